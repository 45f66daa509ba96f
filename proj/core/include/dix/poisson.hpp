#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dix {

struct PoissonOptions {
    double tol = 1e-10;   // relative deviance change
    int max_iter = 100;
    double beta_limit = 50.0;  // divergence guard on any single coefficient
};

struct RegressionFit {
    std::vector<std::string> names;   // "const" first, then predictors
    Eigen::VectorXd coefficients;
    Eigen::VectorXd robust_se;        // HC0 sandwich
    Eigen::VectorXd t_stats;
    double log_likelihood = 0.0;
    double deviance = 0.0;
    double null_deviance = 0.0;
    int iterations = 0;
    bool converged = false;
    Eigen::VectorXd predictor_sd;     // sample sd per column of X (0 for const)
    std::vector<double> percentage_change;  // 100 * (exp(beta * sd) - 1), 0 for const

    double coefficient(const std::string& name) const;
    double pct_change(const std::string& name) const;
};

// Poisson regression with log link and exposure offset, fitted by
// iteratively reweighted least squares: mean mu = exposure * exp(X beta).
// X excludes the intercept; a constant column is prepended internally.
// Robust (HC0) sandwich covariance. Throws ValidationError on bad input or
// rank deficiency (naming the collinear column) and ConvergenceError when
// IRLS diverges or exhausts max_iter (message carries the iteration trace).
RegressionFit poisson_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const Eigen::VectorXd& exposure,
                          const std::vector<std::string>& predictor_names, const PoissonOptions& options = {});

// 100 * (exp(beta * sd) - 1): percent change in the expected count for a one
// standard deviation increase of the predictor.
double percentage_change(double beta, double sd);

}  // namespace dix
