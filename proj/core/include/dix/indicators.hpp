#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dix/graph.hpp"

namespace dix {

// How N_i is counted once the coupling threshold l exceeds 1. ZeroCoupling
// keeps N_i = citers sharing no reference with the focal paper regardless of
// l; Complement counts every citer below the threshold, so N_i + N_j equals
// the citer total. At l = 1 the two coincide.
enum class NiStrategy { ZeroCoupling, Complement };

struct IndicatorConfig {
    int l = 1;  // minimum coupling links for a citer to count into N_j
    bool include_k = true;
    NiStrategy ni_strategy = NiStrategy::ZeroCoupling;
    std::optional<std::int32_t> window_end;  // citations counted up to this year

    void validate() const;  // l >= 1
};

// Citers of one focal paper partitioned by bibliographic coupling strength.
struct CiterPartition {
    std::size_t n_i = 0;
    std::size_t n_j = 0;
    std::size_t citer_total = 0;                    // citers inside the window
    std::map<std::size_t, std::size_t> coupling_histogram;  // strength -> citer count
    std::size_t unknown_year_excluded = 0;          // citers dropped by the window
};

// NA (undefined because a denominator is zero) is represented as quiet NaN.
inline constexpr double kNA = std::numeric_limits<double>::quiet_NaN();
inline bool is_na(double v) { return std::isnan(v); }

struct DisruptionScores {
    PaperId focal;
    std::size_t citer_count = 0;
    std::size_t n_i = 0;    // citers with zero coupling (N_i at l = 1)
    std::size_t n_k = 0;
    std::map<int, std::size_t> n_j_by_l;
    // (l, include_k) -> DI value in [-1, 1], NaN when undefined.
    std::map<std::pair<int, bool>, double> di;
    double dein = kNA;
    double bu_ratio = kNA;

    double di_value(int l, bool include_k) const;
};

// Partitions the focal paper's citers by coupling strength against its
// reference set. One linear merge per citer.
CiterPartition classify_citers(const CitationGraph& graph, const PaperId& focal, const IndicatorConfig& config);

// N_k: distinct papers citing at least one of the focal paper's references
// without citing the focal paper itself. Window applies as for citers.
// Independent of l.
std::size_t count_nk(const CitationGraph& graph, const PaperId& focal, const IndicatorConfig& config);

// (n_i - n_j) / (n_i + n_j [+ n_k]); NA when the denominator is zero.
double disruption_score(const CiterPartition& partition, std::size_t n_k, bool include_k);

// DeIn: mean coupling strength over the focal paper's citers; NA if uncited.
double dependence_score(const CitationGraph& graph, const PaperId& focal, const IndicatorConfig& config);

// N_i / (N_i + N_j) on an l = 1 partition; equals (1 + DI_1^no-k) / 2.
double bu_ratio(const CiterPartition& partition);

// Computes every requested (l, include_k) variant plus DeIn and the Bu ratio
// from a single pass over the citers. All configs must agree on ni_strategy
// and window_end.
DisruptionScores compute_all(const CitationGraph& graph, const PaperId& focal,
                             const std::vector<IndicatorConfig>& configs);

// One row per focal paper, sorted by id; identical output for any
// worker_count. Aborts with the offending id if a focal paper is unknown.
std::vector<DisruptionScores> batch_compute(const CitationGraph& graph, const std::vector<PaperId>& focal_set,
                                            const std::vector<IndicatorConfig>& configs, unsigned worker_count);

// Standard config lattice for a set of thresholds: every l paired with both
// include_k variants, shared strategy/window.
std::vector<IndicatorConfig> make_config_set(const std::vector<int>& l_values, NiStrategy strategy,
                                             std::optional<std::int32_t> window_end);

// scores.tsv header and row serialization (reals: 6 significant digits,
// half-even; NA literal for undefined).
std::string scores_tsv_header(const std::vector<int>& l_values);
std::string scores_tsv_row(const DisruptionScores& s, const std::vector<int>& l_values);

// Inverse of the writer; recovers the l thresholds from the header.
std::vector<DisruptionScores> load_scores_tsv(const std::string& path, std::vector<int>* l_values = nullptr);

}  // namespace dix
