#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dix/analysis_matrix.hpp"
#include "dix/assessments.hpp"
#include "dix/poisson.hpp"

namespace dix {

// A family of Poisson models sharing predictor columns: one model per
// response (tag). Orientation tells the expectation scorer which way the
// predictor points: +1 rises with disruptiveness, -1 with dependence (DeIn),
// 0 carries no expectation.
struct PredictorSet {
    std::string label;                 // e.g. "factor" or the indicator name
    std::vector<std::string> names;    // column names, also used in output
    Eigen::MatrixXd columns;           // n x k
    std::vector<int> orientation;      // per predictor
};

enum class Expectation { Matches, Violates, None };

struct GridCell {
    std::string response;   // tag name
    std::string predictor;  // predictor column name
    std::string grid;       // PredictorSet label
    double coefficient = 0.0;
    double robust_se = 0.0;
    double t_stat = 0.0;
    double pct_change = 0.0;
    Expectation expectation = Expectation::None;
    std::string error;  // non-empty when the cell's fit failed
};

struct GridResult {
    std::vector<GridCell> cells;       // (response, predictor) order
    std::size_t model_count = 0;       // fits attempted
    std::size_t failed_models = 0;
    // Table-5 style tally: predictor -> number of classified responses whose
    // percentage-change sign met the expectation.
    std::vector<std::pair<std::string, std::size_t>> expectation_tally;

    std::optional<std::string> best_predictor() const;  // argmax of the tally
};

// Fits one Poisson model per (response, predictor set): the response tag
// counts against all columns of the set, with exposure_years as offset.
// Cell errors are recorded and the grid continues.
GridResult regression_grid(const AnalysisMatrix& matrix, const std::vector<std::string>& responses,
                           const std::vector<PredictorSet>& predictor_sets, const TagClassification& classes,
                           unsigned worker_count = 1);

// Predictor sets for the two grids: the retained factor-score columns as one
// joint set, and each indicator as its own single-column set.
PredictorSet factor_predictors(const AnalysisMatrix& matrix, const Eigen::MatrixXd& scores,
                               const std::vector<std::string>& factor_names, const std::vector<int>& orientation);
std::vector<PredictorSet> indicator_predictors(const AnalysisMatrix& matrix,
                                               const std::vector<std::string>& indicators);

// regress.tsv: one row per grid cell plus tally rows, reals %.4f.
std::string grid_tsv(const GridResult& result);

}  // namespace dix
