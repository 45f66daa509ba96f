#include "dix/factor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dix/errors.hpp"
#include "dix/tsv.hpp"

namespace dix {

namespace {

// Deterministic presentation: columns ordered by explained variance, each
// column's largest-magnitude loading positive. The same permutation and sign
// flips are applied to the rotation matrix so rotated == loadings * R stays
// true.
void normalize_columns(Eigen::MatrixXd& rotated, Eigen::MatrixXd& rotation) {
    const Eigen::Index f = rotated.cols();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(f));
    std::iota(order.begin(), order.end(), 0);
    Eigen::VectorXd ssq(f);
    for (Eigen::Index c = 0; c < f; ++c) ssq(c) = rotated.col(c).squaredNorm();
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return ssq(a) > ssq(b); });

    Eigen::MatrixXd new_rotated(rotated.rows(), f);
    Eigen::MatrixXd new_rotation(rotation.rows(), f);
    for (Eigen::Index c = 0; c < f; ++c) {
        const Eigen::Index src = order[static_cast<std::size_t>(c)];
        double sign = 1.0;
        Eigen::Index argmax = 0;
        rotated.col(src).cwiseAbs().maxCoeff(&argmax);
        if (rotated(argmax, src) < 0.0) sign = -1.0;
        new_rotated.col(c) = sign * rotated.col(src);
        new_rotation.col(c) = sign * rotation.col(src);
    }
    rotated = std::move(new_rotated);
    rotation = std::move(new_rotation);
}

}  // namespace

double varimax_criterion(const Eigen::MatrixXd& loadings) {
    const double n = static_cast<double>(loadings.rows());
    double crit = 0.0;
    for (Eigen::Index c = 0; c < loadings.cols(); ++c) {
        const Eigen::ArrayXd sq = loadings.col(c).array().square();
        const double mean = sq.mean();
        crit += (sq - mean).square().sum() / n;
    }
    return crit;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> varimax(const Eigen::MatrixXd& loadings, bool kaiser, double tol,
                                                    int max_sweeps) {
    const Eigen::Index p = loadings.rows();
    const Eigen::Index f = loadings.cols();
    Eigen::MatrixXd rotation = Eigen::MatrixXd::Identity(f, f);
    if (f < 2) {
        Eigen::MatrixXd rotated = loadings;
        if (f == 1) normalize_columns(rotated, rotation);
        return {rotated, rotation};
    }

    // Kaiser weighting: rows scaled to unit communality during the sweeps,
    // unscaled afterwards. Rows with zero communality stay zero.
    Eigen::VectorXd comm = loadings.rowwise().norm();
    Eigen::VectorXd scale = comm;
    if (!kaiser) scale.setOnes();
    for (Eigen::Index r = 0; r < p; ++r) {
        if (scale(r) == 0.0) scale(r) = 1.0;
    }
    Eigen::MatrixXd work = scale.cwiseInverse().asDiagonal() * loadings;

    double crit = varimax_criterion(work);
    bool converged = false;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        for (Eigen::Index a = 0; a < f - 1; ++a) {
            for (Eigen::Index b = a + 1; b < f; ++b) {
                // Classic planar rotation maximizing the criterion for the
                // (a, b) factor pair.
                const Eigen::ArrayXd x = work.col(a).array();
                const Eigen::ArrayXd y = work.col(b).array();
                const Eigen::ArrayXd u = x.square() - y.square();
                const Eigen::ArrayXd v = 2.0 * x * y;
                const double A = u.sum();
                const double B = v.sum();
                const double C = (u.square() - v.square()).sum();
                const double D = (2.0 * u * v).sum();
                const double np = static_cast<double>(p);
                const double num = D - 2.0 * A * B / np;
                const double den = C - (A * A - B * B) / np;
                if (num == 0.0 && den == 0.0) continue;
                const double angle = std::atan2(num, den) / 4.0;
                if (std::abs(angle) < 1e-14) continue;
                const double c = std::cos(angle);
                const double s = std::sin(angle);
                Eigen::Matrix2d plane;
                plane << c, -s, s, c;
                Eigen::MatrixXd pair(p, 2);
                pair.col(0) = work.col(a);
                pair.col(1) = work.col(b);
                pair = pair * plane;
                work.col(a) = pair.col(0);
                work.col(b) = pair.col(1);
                Eigen::MatrixXd rpair(f, 2);
                rpair.col(0) = rotation.col(a);
                rpair.col(1) = rotation.col(b);
                rpair = rpair * plane;
                rotation.col(a) = rpair.col(0);
                rotation.col(b) = rpair.col(1);
            }
        }
        const double next = varimax_criterion(work);
        if (next - crit < tol) {
            crit = next;
            converged = true;
            break;
        }
        crit = next;
    }
    if (!converged) {
        throw ConvergenceError("varimax did not converge in " + std::to_string(max_sweeps) + " sweeps", crit,
                               max_sweeps);
    }

    Eigen::MatrixXd rotated = loadings * rotation;
    normalize_columns(rotated, rotation);
    return {rotated, rotation};
}

FactorModel factor_analysis(const CorrelationMatrix& corr, const FactorOptions& options) {
    const Eigen::MatrixXd& m = corr.values;
    const Eigen::Index p = m.rows();
    if (p == 0 || m.cols() != p) throw ValidationError("correlation matrix must be square and non-empty");
    if (m.hasNaN()) throw ValidationError("correlation matrix contains NA entries");
    if (!m.isApprox(m.transpose(), 1e-10)) throw ValidationError("correlation matrix is not symmetric");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success) throw ValidationError("eigendecomposition failed");

    // Ascending from Eigen; flip to descending.
    Eigen::VectorXd eigenvalues = solver.eigenvalues().reverse();
    Eigen::MatrixXd eigenvectors = solver.eigenvectors().rowwise().reverse();

    const double most_negative = eigenvalues(p - 1);
    if (most_negative < -1e-8) {
        throw ValidationError("correlation matrix is not positive semi-definite: eigenvalue " +
                              std::to_string(most_negative));
    }

    FactorModel model;
    model.variables = corr.variables;
    model.eigenvalues = eigenvalues;

    int retained = 0;
    if (options.fixed_factor_count) {
        retained = std::min<int>(*options.fixed_factor_count, static_cast<int>(p));
        if (retained < 0) throw ValidationError("fixed factor count must be >= 0");
    } else {
        for (Eigen::Index i = 0; i < p; ++i) {
            if (eigenvalues(i) > 1.0) ++retained;
        }
    }
    model.retained = retained;

    model.loadings.resize(p, retained);
    for (int c = 0; c < retained; ++c) {
        Eigen::VectorXd col = eigenvectors.col(c) * std::sqrt(std::max(0.0, eigenvalues(c)));
        // Deterministic eigenvector sign: largest-magnitude element positive.
        Eigen::Index argmax = 0;
        col.cwiseAbs().maxCoeff(&argmax);
        if (col(argmax) < 0.0) col = -col;
        model.loadings.col(c) = col;
    }

    auto [rotated, rotation] = varimax(model.loadings, options.kaiser, options.varimax_tol, options.varimax_max_sweeps);
    model.rotated_loadings = rotated;
    model.rotation = rotation;

    model.uniqueness.resize(p);
    for (Eigen::Index r = 0; r < p; ++r) {
        model.uniqueness(r) = 1.0 - model.rotated_loadings.row(r).squaredNorm();
    }
    return model;
}

Eigen::MatrixXd factor_scores(const FactorModel& model, const CorrelationMatrix& corr, const Eigen::MatrixXd& data,
                              double ridge) {
    const Eigen::Index p = corr.values.rows();
    if (data.cols() != p) throw ValidationError("factor_scores: data has wrong number of columns");
    if (model.retained == 0) return Eigen::MatrixXd(data.rows(), 0);

    // Standardize columns; a zero-variance column cannot be scored.
    Eigen::MatrixXd z = data;
    for (Eigen::Index c = 0; c < p; ++c) {
        const double mean = z.col(c).mean();
        z.col(c).array() -= mean;
        const double sd = std::sqrt(z.col(c).squaredNorm() / static_cast<double>(z.rows() - 1));
        if (sd == 0.0) {
            throw ValidationError("factor_scores: zero-variance column '" + model.variables[static_cast<std::size_t>(c)] +
                                  "'");
        }
        z.col(c) /= sd;
    }

    Eigen::MatrixXd c = corr.values;
    if (ridge > 0.0) c += ridge * Eigen::MatrixXd::Identity(p, p);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(c);
    if (!lu.isInvertible()) {
        throw ValidationError("correlation matrix is singular; rerun with a ridge (e.g. 1e-8)");
    }
    return z * lu.solve(model.rotated_loadings);
}

std::string FactorModel::to_tsv() const {
    std::string out = "variable";
    for (int f = 1; f <= retained; ++f) out += "\tfactor" + std::to_string(f);
    out += "\tuniqueness\n";
    for (Eigen::Index r = 0; r < rotated_loadings.rows(); ++r) {
        out += variables[static_cast<std::size_t>(r)];
        for (Eigen::Index c = 0; c < rotated_loadings.cols(); ++c) {
            out += '\t';
            out += format_fixed(rotated_loadings(r, c), 4);
        }
        out += '\t';
        out += format_fixed(uniqueness(r), 4);
        out += '\n';
    }
    out += "eigenvalue";
    for (int f = 0; f < retained; ++f) {
        out += '\t';
        out += format_fixed(eigenvalues(f), 4);
    }
    out += "\t\n";
    return out;
}

}  // namespace dix
