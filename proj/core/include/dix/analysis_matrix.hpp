#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dix/assessments.hpp"
#include "dix/indicators.hpp"
#include "dix/normalize.hpp"

namespace dix {

// The variables entering correlation / factor analysis, in fixed order.
inline const std::vector<std::string> kIndicatorVariables = {
    "di_1", "di_5", "di_1_nok", "di_5_nok", "dein",
};
inline const std::vector<std::string> kAnalysisVariables = {
    "di_1", "di_5", "di_1_nok", "di_5_nok", "dein",
    "citations", "percentile", "resc_sum", "resc_avg",
};

// One row per eligible paper after the inner join of indicator scores,
// percentiles, metadata and aggregated assessments. Column-major doubles;
// tag counts are integral values stored as doubles.
class AnalysisMatrix {
public:
    AnalysisMatrix(std::vector<std::string> column_names, std::vector<PaperId> papers);

    std::size_t rows() const { return papers_.size(); }
    std::size_t cols() const { return names_.size(); }
    const std::vector<std::string>& column_names() const { return names_; }
    const std::vector<PaperId>& papers() const { return papers_; }

    bool has_column(const std::string& name) const;
    const std::vector<double>& column(const std::string& name) const;
    std::vector<double>& column(const std::string& name);

    std::string to_tsv() const;  // fixed column order, reals as %.6g

private:
    std::vector<std::string> names_;
    std::vector<PaperId> papers_;
    std::map<std::string, std::vector<double>> columns_;
};

struct JoinReport {
    std::size_t joined = 0;
    std::size_t missing_percentile = 0;
    std::size_t missing_metadata = 0;
    std::size_t missing_assessment = 0;
    std::size_t na_indicators_dropped = 0;
    std::size_t nonpositive_exposure_dropped = 0;
    std::size_t minus_one_shifted = 0;  // filled by the transform stage

    std::string summary() const;
};

// Inner join on paper id. Rows with any NA indicator are dropped so the
// factor-analysis columns are complete. exposure_years = reference_year -
// publication year, and must be >= 1. Duplicate ids in any input are errors.
AnalysisMatrix build_matrix(const std::vector<DisruptionScores>& scores,
                            const std::vector<PercentileScore>& percentile_scores,
                            const std::vector<PaperMetadata>& metadata,
                            const std::vector<AssessmentRecord>& assessments,
                            std::int32_t reference_year, JoinReport* report = nullptr);

// matrix.tsv reader (inverse of AnalysisMatrix::to_tsv).
AnalysisMatrix load_matrix(const std::string& path);

}  // namespace dix
