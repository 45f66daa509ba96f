#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dix/correlation.hpp"

namespace dix {

struct FactorModel {
    std::vector<std::string> variables;
    Eigen::VectorXd eigenvalues;      // all p, descending
    int retained = 0;                 // factors kept (eigenvalue > 1 unless overridden)
    Eigen::MatrixXd loadings;         // unrotated, p x retained
    Eigen::MatrixXd rotated_loadings; // p x retained
    Eigen::MatrixXd rotation;         // retained x retained, orthogonal
    Eigen::VectorXd uniqueness;       // 1 - communality per variable

    std::string to_tsv() const;  // Table-style layout: loadings, eigenvalues, uniqueness
};

struct FactorOptions {
    std::optional<int> fixed_factor_count;  // overrides the eigenvalue > 1 rule
    bool kaiser = true;                     // row-normalize before rotation
    double varimax_tol = 1e-8;              // stop when criterion gain falls below
    int varimax_max_sweeps = 1000;
};

// Principal-component factoring of a correlation matrix: eigendecomposition,
// loadings = eigenvector * sqrt(eigenvalue) for retained factors, then
// varimax rotation. Throws if the matrix is asymmetric, contains NaN, or has
// an eigenvalue below -1e-8.
FactorModel factor_analysis(const CorrelationMatrix& corr, const FactorOptions& options = {});

// Varimax criterion: sum over factors of the variance of squared loadings.
double varimax_criterion(const Eigen::MatrixXd& loadings);

// Pairwise-rotation varimax. Returns rotated loadings and the orthogonal
// rotation matrix R with rotated = loadings * R. Column order is by explained
// variance and each column's largest-magnitude loading is made positive.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> varimax(const Eigen::MatrixXd& loadings, bool kaiser = true,
                                                    double tol = 1e-8, int max_sweeps = 1000);

// Regression (Thomson) factor scores: Z * corr^-1 * rotated_loadings where Z
// holds the standardized model variables. data is n x p in the model's
// variable order (already transformed as for the correlation matrix).
// A singular correlation matrix is an error unless ridge > 0 adds ridge * I.
Eigen::MatrixXd factor_scores(const FactorModel& model, const CorrelationMatrix& corr,
                              const Eigen::MatrixXd& data, double ridge = 0.0);

}  // namespace dix
