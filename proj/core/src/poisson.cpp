#include "dix/poisson.hpp"

#include <cmath>

#include "dix/errors.hpp"

namespace dix {

namespace {

double poisson_deviance(const Eigen::VectorXd& y, const Eigen::VectorXd& mu) {
    double dev = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double yi = y(i);
        const double mi = mu(i);
        if (yi > 0.0) dev += yi * std::log(yi / mi) - (yi - mi);
        else dev += mi;
    }
    return 2.0 * dev;
}

}  // namespace

double percentage_change(double beta, double sd) { return 100.0 * (std::exp(beta * sd) - 1.0); }

double RegressionFit::coefficient(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return coefficients(static_cast<Eigen::Index>(i));
    }
    throw ValidationError("no coefficient named '" + name + "'");
}

double RegressionFit::pct_change(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return percentage_change[i];
    }
    throw ValidationError("no coefficient named '" + name + "'");
}

RegressionFit poisson_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const Eigen::VectorXd& exposure,
                          const std::vector<std::string>& predictor_names, const PoissonOptions& options) {
    const Eigen::Index n = y.size();
    if (n == 0) throw ValidationError("poisson_fit: empty response");
    if (X.rows() != n && X.cols() > 0) throw ValidationError("poisson_fit: X row count mismatch");
    if (exposure.size() != n) throw ValidationError("poisson_fit: exposure length mismatch");
    if (static_cast<std::size_t>(X.cols()) != predictor_names.size()) {
        throw ValidationError("poisson_fit: predictor name count mismatch");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (y(i) < 0.0 || y(i) != std::floor(y(i))) {
            throw ValidationError("poisson_fit: response must be non-negative integers (row " + std::to_string(i) +
                                  ")");
        }
        if (!(exposure(i) > 0.0)) {
            throw ValidationError("poisson_fit: exposure must be positive (row " + std::to_string(i) + ")");
        }
    }

    // Design with intercept first.
    const Eigen::Index p = X.cols() + 1;
    Eigen::MatrixXd design(n, p);
    design.col(0).setOnes();
    if (X.cols() > 0) design.rightCols(X.cols()) = X;

    {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
        qr.setThreshold(1e-10);
        if (qr.rank() < p) {
            // First pivot beyond the numerical rank names the collinear column.
            const auto perm = qr.colsPermutation().indices();
            const Eigen::Index bad = perm(qr.rank());
            const std::string name = bad == 0 ? "const" : predictor_names[static_cast<std::size_t>(bad - 1)];
            throw ValidationError("poisson_fit: design is rank deficient, column '" + name + "' is collinear");
        }
    }

    const Eigen::VectorXd offset = exposure.array().log();

    // Null model (intercept + offset) has the closed form ln(sum y / sum E).
    const double rate = y.sum() / exposure.sum();
    const double beta0 = rate > 0.0 ? std::log(rate) : -30.0;

    RegressionFit fit;
    fit.names.push_back("const");
    for (const auto& name : predictor_names) fit.names.push_back(name);

    {
        Eigen::VectorXd mu0 = (offset.array() + beta0).exp();
        fit.null_deviance = poisson_deviance(y, mu0);
    }

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    beta(0) = beta0;

    Eigen::VectorXd eta = design * beta + offset;
    Eigen::VectorXd mu = eta.array().exp();
    double dev = poisson_deviance(y, mu);
    std::string trace;

    bool converged = false;
    int iter = 0;
    for (; iter < options.max_iter; ++iter) {
        // Working response z = eta - offset + (y - mu) / mu, weights W = mu.
        Eigen::VectorXd z = (eta - offset).array() + (y - mu).array() / mu.array();
        Eigen::VectorXd w_sqrt = mu.array().sqrt();
        Eigen::MatrixXd wx = w_sqrt.asDiagonal() * design;
        Eigen::VectorXd wz = w_sqrt.asDiagonal() * z;
        beta = wx.householderQr().solve(wz);

        if (!beta.allFinite() || beta.cwiseAbs().maxCoeff() > options.beta_limit) {
            throw ConvergenceError("poisson_fit diverged at iteration " + std::to_string(iter + 1) +
                                       " (coefficient out of range); trace:" + trace,
                                   dev, iter + 1);
        }

        eta = design * beta + offset;
        mu = eta.array().exp();
        const double new_dev = poisson_deviance(y, mu);
        trace += " " + std::to_string(new_dev);
        const double rel = std::abs(new_dev - dev) / (std::abs(new_dev) + 0.1);
        dev = new_dev;
        if (rel < options.tol) {
            converged = true;
            ++iter;
            break;
        }
    }
    if (!converged) {
        throw ConvergenceError("poisson_fit did not converge in " + std::to_string(options.max_iter) +
                                   " iterations; deviance trace:" + trace,
                               dev, options.max_iter);
    }

    fit.coefficients = beta;
    fit.deviance = dev;
    fit.iterations = iter;
    fit.converged = true;

    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) ll += y(i) * std::log(mu(i)) - mu(i) - std::lgamma(y(i) + 1.0);
    fit.log_likelihood = ll;

    // HC0 sandwich: bread = (X'WX)^-1, meat = X' diag((y - mu)^2) X.
    Eigen::MatrixXd xtwx = design.transpose() * mu.asDiagonal() * design;
    Eigen::MatrixXd bread = xtwx.inverse();
    Eigen::VectorXd resid_sq = (y - mu).array().square();
    Eigen::MatrixXd meat = design.transpose() * resid_sq.asDiagonal() * design;
    Eigen::MatrixXd cov = bread * meat * bread;

    fit.robust_se = cov.diagonal().array().max(0.0).sqrt();
    fit.t_stats.resize(p);
    for (Eigen::Index i = 0; i < p; ++i) {
        fit.t_stats(i) = fit.robust_se(i) > 0.0 ? beta(i) / fit.robust_se(i) : 0.0;
    }

    // Percentage change per one-sd predictor increase, sd over the sample.
    fit.predictor_sd.resize(p);
    fit.predictor_sd(0) = 0.0;
    fit.percentage_change.assign(static_cast<std::size_t>(p), 0.0);
    for (Eigen::Index c = 1; c < p; ++c) {
        const Eigen::VectorXd& col = design.col(c);
        const double mean = col.mean();
        const double sd = n > 1 ? std::sqrt((col.array() - mean).square().sum() / static_cast<double>(n - 1)) : 0.0;
        fit.predictor_sd(c) = sd;
        fit.percentage_change[static_cast<std::size_t>(c)] = percentage_change(beta(c), sd);
    }
    return fit;
}

}  // namespace dix
