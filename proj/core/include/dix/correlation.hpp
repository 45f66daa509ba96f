#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dix {

class AnalysisMatrix;

// Average (fractional) ranks, 1-based; ties share the mean of their ranks.
std::vector<double> average_ranks(std::span<const double> values);

// Spearman rank correlation: Pearson on average-ranked values, tie aware.
// nullopt when either sequence has zero rank variance or fewer than 3 pairs
// survive pairwise NA removal.
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

struct CorrelationMatrix {
    std::vector<std::string> variables;
    Eigen::MatrixXd values;  // symmetric, unit diagonal; NaN where undefined

    std::string to_tsv() const;  // square matrix, header row and column, %.4f
};

// Pairwise Spearman over complete cases of the named columns; log(x+1)
// applied first when `transform` is set (values of exactly -1 shifted by
// 1e-9, counted into *shifted when given).
CorrelationMatrix correlation_matrix(const AnalysisMatrix& matrix, const std::vector<std::string>& variables,
                                     bool transform, std::size_t* shifted = nullptr);

CorrelationMatrix load_correlation_tsv(const std::string& path);

}  // namespace dix
