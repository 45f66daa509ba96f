#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dix/graph.hpp"

namespace dix {

struct PaperMetadata {
    PaperId paper;
    std::int32_t year = kNoYear;
    std::string field;
    std::size_t citations = 0;       // in the citation window
    std::size_t reference_count = 0;
};

struct PercentileScore {
    PaperId paper;
    double percentile = 0.0;  // strictly inside (0, 100)
};

// Derives per-paper metadata from the graph: windowed citation counts,
// reference counts, year/field as loaded.
std::vector<PaperMetadata> collect_metadata(const CitationGraph& graph, std::optional<std::int32_t> window_end);

// Papers with reference_count >= min_refs, citations >= min_cites and a known
// year inside [year_min, year_max]. Boundaries inclusive.
std::vector<PaperId> eligible_papers(const std::vector<PaperMetadata>& metadata, std::size_t min_refs,
                                     std::size_t min_cites, std::int32_t year_min, std::int32_t year_max);

struct PercentileReport {
    std::size_t skipped_missing_field = 0;
    std::size_t skipped_missing_year = 0;
    std::size_t group_count = 0;
};

// Hazen percentiles within each (field, year) group: papers ranked ascending
// by citations, ties averaged, percentile = (rank - 0.5) / n * 100. Output is
// sorted by paper id.
std::vector<PercentileScore> percentiles(const std::vector<PaperMetadata>& metadata,
                                         PercentileReport* report = nullptr);

// Element-wise ln(x + 1). NaN (NA) passes through; any value <= -1 is a
// domain error naming the offending row.
std::vector<double> log1p_transform(const std::vector<double>& values);

// Pipeline variant: values equal to -1 are shifted by +epsilon before the
// transform instead of failing, counting each shift. Values below -1 still
// throw.
std::vector<double> log1p_transform_shifted(const std::vector<double>& values, double epsilon,
                                            std::size_t* shifted_count);

// percentiles.tsv reader: recovers both the metadata columns (field, year,
// citations; reference counts are not stored) and the percentile scores.
struct PercentileTable {
    std::vector<PaperMetadata> metadata;
    std::vector<PercentileScore> scores;
};
PercentileTable load_percentiles_tsv(const std::string& path);

}  // namespace dix
