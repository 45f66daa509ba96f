#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dix/analysis_matrix.hpp"
#include "dix/assessments.hpp"
#include "dix/graph.hpp"
#include "dix/indicators.hpp"

namespace dix {

// Defaults reproduce the standard eligibility filters: at least 10 cited
// references and 10 citations, publication years 2000-2016, citations counted
// through 2018.
struct PipelineConfig {
    std::string nodes_path;
    std::string edges_path;
    std::string reviews_path;
    std::string out_dir = ".";

    std::size_t min_refs = 10;
    std::size_t min_cites = 10;
    std::int32_t year_min = 2000;
    std::int32_t year_max = 2016;
    std::optional<std::int32_t> window_end = 2018;
    std::vector<int> l_values = {1, 5};
    NiStrategy ni_strategy = NiStrategy::ZeroCoupling;
    std::int32_t reference_year = 2018;
    unsigned workers = 1;
    bool transform = true;   // log(x+1) before correlation / FA
    double ridge = 0.0;      // optional ridge for factor scoring
    std::string tag_classes_path;  // empty -> built-in defaults

    // Applies `key = value` lines from a config file; flags override later.
    void apply_file(const std::string& path);
    void apply_entry(const std::string& key, const std::string& value);

    std::map<std::string, std::string> entries() const;  // flattened, sorted
    std::string config_digest() const;
    TagClassification tag_classes() const;
};

// Key/value lines collected during a run and written as manifest.tsv next to
// the outputs. Contains only basenames and digests, never timestamps, so a
// rerun over identical inputs is byte-identical.
class RunManifest {
public:
    explicit RunManifest(const PipelineConfig& config);

    void add_input(const std::string& path);
    void add_output(const std::string& name, std::string_view content);
    void add_count(const std::string& key, std::size_t value);

    std::string to_tsv() const;
    void write(const std::string& out_dir) const;

private:
    std::vector<std::pair<std::string, std::string>> rows_;
};

struct ComputeResult {
    IngestReport ingest;
    std::size_t eligible_count = 0;
    std::vector<DisruptionScores> scores;
    std::string scores_tsv;
};

struct AnalyzeResult {
    std::string corr_tsv;
    std::string fa_tsv;
    std::string regress_tsv;
    int retained_factors = 0;
    std::optional<std::string> best_indicator;  // expectation-tally argmax
};

// compute: load graph, filter eligible papers, batch the indicators.
ComputeResult run_compute(const CitationGraph& graph, const PipelineConfig& config);

// percentile: Hazen percentiles over every paper with known field and year.
std::string percentiles_tsv(const CitationGraph& graph, const PipelineConfig& config,
                            std::size_t* skipped = nullptr);

// join: scores + percentiles + metadata + assessments -> matrix.
AnalysisMatrix run_join(const CitationGraph& graph, const ComputeResult& compute,
                        const std::vector<AssessmentRecord>& assessments, const PipelineConfig& config,
                        JoinReport* report = nullptr);

// analyze: correlation matrix, factor analysis, both regression grids.
AnalyzeResult run_analyze(const AnalysisMatrix& matrix, const PipelineConfig& config);

// Full pipeline into config.out_dir: scores.tsv, percentiles.tsv, matrix.tsv,
// corr.tsv, fa.tsv, regress.tsv, manifest.tsv. On error, files created by
// this run are removed and the error is rethrown tagged with the stage name.
void run_pipeline(const PipelineConfig& config);

}  // namespace dix
