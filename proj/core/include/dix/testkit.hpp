#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dix/graph.hpp"
#include "dix/indicators.hpp"
#include "dix/normalize.hpp"

namespace dix::testkit {

enum class CouplingRegime { DisruptiveHeavy, DevelopmentalHeavy, Mixed };

struct TagCoefficients {
    std::string tag;
    double intercept = -2.0;  // log-rate at indicator value 0, per exposure year
    double slope = 0.0;       // dependence on the chosen indicator
};

struct SyntheticSpec {
    std::uint64_t seed = 1;
    std::size_t paper_count = 500;
    std::int32_t year_min = 2000;
    std::int32_t year_max = 2016;
    std::size_t mean_references = 14;
    CouplingRegime regime = CouplingRegime::Mixed;
    std::size_t fields = 3;

    // Assessment generation: tag counts ~ Poisson(exposure * exp(a + b * x))
    // with x the named indicator column of the scores table.
    std::string indicator = "di_5";
    std::vector<TagCoefficients> tag_model;  // empty -> default_tag_model()
    std::int32_t reference_year = 2018;

    static std::vector<TagCoefficients> default_tag_model();
    void validate() const;
};

struct SyntheticData {
    CitationGraph graph;
    std::vector<PaperMetadata> metadata;

    std::string nodes_tsv() const;
    std::string edges_tsv() const;
};

// Deterministic, integer-only topology generation: identical seed, identical
// dataset on any platform. Edges respect time order (citing year >= cited
// year). The regime controls whether citers copy or avoid the references of
// the papers they cite.
SyntheticData generate_network(const SyntheticSpec& spec);

// Small seeded random DAGs for oracle sweeps: node years ascend with index,
// edges only point at older papers. edge_permille is the edge density.
CitationGraph random_dag(std::uint64_t seed, std::size_t nodes, unsigned edge_permille);

// Naive reference implementation of every indicator, sharing no logic with
// the engine: citers and coupling counts are found by scanning the forward
// adjacency of all nodes. O(V * E); test use only.
DisruptionScores oracle_indicators(const CitationGraph& graph, const PaperId& focal, const IndicatorConfig& config);

// Reviews with known ground truth: per-tag counts are Poisson in the chosen
// indicator with exposure (reference_year - publication year). Returns
// reviews.tsv content.
std::string generate_assessments(const std::vector<PaperMetadata>& metadata,
                                 const std::vector<DisruptionScores>& scores, const SyntheticSpec& spec);

// Toy fixtures used across the test suites.
CitationGraph toy_graph_g1();  // FP->{R1,R2,R3}; A->{FP}; B->{FP,R1}; C->{R1}
CitationGraph toy_graph_g2();  // FP->{R1}; A,B->{FP}
CitationGraph toy_graph_g3();  // FP->{R1}; A,B->{FP,R1}

// Deterministic xorshift-style RNG helpers shared by the generators: raw
// std::mt19937_64 output reduced without distribution objects, so results do
// not depend on the standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    std::uint64_t next() { return engine_(); }
    std::size_t bounded(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(engine_() % n); }
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    // Knuth Poisson sampler; fine for the small rates used here.
    std::size_t poisson(double rate);

private:
    std::mt19937_64 engine_;
};

}  // namespace dix::testkit
