#include <doctest.h>

#include <cmath>

#include "dix/errors.hpp"
#include "dix/indicators.hpp"
#include "dix/testkit.hpp"
#include "dix/tsv.hpp"

using namespace dix;
using testkit::toy_graph_g1;

namespace {

IndicatorConfig cfg(int l, bool include_k, NiStrategy s = NiStrategy::ZeroCoupling) {
    return {l, include_k, s, std::nullopt};
}

const std::vector<IndicatorConfig> kDefaultConfigs = make_config_set({1, 5}, NiStrategy::ZeroCoupling, std::nullopt);

}  // namespace

TEST_CASE("G1 citer partition at l=1") {
    auto g = toy_graph_g1();
    auto p = classify_citers(g, "FP", cfg(1, true));
    CHECK(p.n_i == 1);
    CHECK(p.n_j == 1);
    CHECK(p.citer_total == 2);
    REQUIRE(p.coupling_histogram.size() == 2);
    CHECK(p.coupling_histogram.at(0) == 1);
    CHECK(p.coupling_histogram.at(1) == 1);
}

TEST_CASE("G1 citer partition at l=5 under both strategies") {
    auto g = toy_graph_g1();
    auto zero = classify_citers(g, "FP", cfg(5, true, NiStrategy::ZeroCoupling));
    CHECK(zero.n_i == 1);
    CHECK(zero.n_j == 0);
    auto comp = classify_citers(g, "FP", cfg(5, true, NiStrategy::Complement));
    CHECK(comp.n_i == 2);
    CHECK(comp.n_j == 0);
    CHECK(comp.n_i + comp.n_j == comp.citer_total);
}

TEST_CASE("count_nk on G1 and variants") {
    auto g = toy_graph_g1();
    CHECK(count_nk(g, "FP", cfg(1, true)) == 1);  // paper C

    // Adding D -> {R1, R2} counts D once despite two shared links.
    std::vector<CitationGraph::NodeInput> nodes = {{"FP", 2005, "F1"}, {"R1", 2000, "F1"}, {"R2", 2001, "F1"},
                                                   {"R3", 2002, "F1"}, {"A", 2008, "F1"},  {"B", 2009, "F1"},
                                                   {"C", 2010, "F1"},  {"D", 2011, "F1"}};
    std::vector<CitationGraph::EdgeInput> edges = {{"FP", "R1"}, {"FP", "R2"}, {"FP", "R3"}, {"A", "FP"},
                                                   {"B", "FP"},  {"B", "R1"},  {"C", "R1"},  {"D", "R1"},
                                                   {"D", "R2"}};
    auto g2 = CitationGraph::build(nodes, edges);
    CHECK(count_nk(g2, "FP", cfg(1, true)) == 2);

    // Only citers touch R(FP): N_k vanishes.
    auto g3 = testkit::toy_graph_g3();
    CHECK(count_nk(g3, "FP", cfg(1, true)) == 0);
}

TEST_CASE("disruption_score boundary cases and NA") {
    CiterPartition p;
    p.n_i = 2;
    p.n_j = 0;
    CHECK(disruption_score(p, 0, true) == doctest::Approx(1.0));
    CHECK(disruption_score(p, 0, false) == doctest::Approx(1.0));
    p.n_i = 0;
    p.n_j = 2;
    CHECK(disruption_score(p, 0, true) == doctest::Approx(-1.0));
    CHECK(disruption_score(p, 0, false) == doctest::Approx(-1.0));
    p.n_j = 0;
    CHECK(is_na(disruption_score(p, 0, false)));
    CHECK(disruption_score(p, 3, true) == doctest::Approx(0.0));  // n_k alone defines DI_l
}

TEST_CASE("G1 disruption scores across variants") {
    auto g = toy_graph_g1();
    auto zero5 = classify_citers(g, "FP", cfg(5, true, NiStrategy::ZeroCoupling));
    auto l1 = classify_citers(g, "FP", cfg(1, true));
    const auto nk = count_nk(g, "FP", cfg(1, true));
    CHECK(disruption_score(l1, nk, true) == doctest::Approx(0.0));
    CHECK(disruption_score(l1, nk, false) == doctest::Approx(0.0));
    CHECK(disruption_score(zero5, nk, true) == doctest::Approx(0.5));
    CHECK(disruption_score(zero5, nk, false) == doctest::Approx(1.0));
    auto comp5 = classify_citers(g, "FP", cfg(5, true, NiStrategy::Complement));
    CHECK(disruption_score(comp5, nk, true) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("dependence score on G1 and degenerate cases") {
    auto g = toy_graph_g1();
    CHECK(dependence_score(g, "FP", cfg(1, true)) == doctest::Approx(0.5));
    CHECK(dependence_score(g, "R2", cfg(1, true)) == doctest::Approx(0.0));  // only FP cites R2, zero coupling
    CHECK(is_na(dependence_score(g, "C", cfg(1, true))));                    // uncited
}

TEST_CASE("bu ratio examples and identity") {
    auto g = toy_graph_g1();
    auto p = classify_citers(g, "FP", cfg(1, false));
    CHECK(bu_ratio(p) == doctest::Approx(0.5));

    CiterPartition manual;
    manual.n_i = 2;
    manual.n_j = 0;
    CHECK(bu_ratio(manual) == doctest::Approx(1.0));
    manual.n_i = 0;
    manual.n_j = 3;
    CHECK(bu_ratio(manual) == doctest::Approx(0.0));
    manual.n_j = 0;
    CHECK(is_na(bu_ratio(manual)));

    auto scores = compute_all(g, "FP", kDefaultConfigs);
    CHECK(scores.bu_ratio == doctest::Approx((1.0 + scores.di_value(1, false)) / 2.0));
}

TEST_CASE("compute_all on G1 matches the per-variant operations") {
    auto g = toy_graph_g1();
    auto s = compute_all(g, "FP", kDefaultConfigs);
    CHECK(s.di_value(1, true) == doctest::Approx(0.0));
    CHECK(s.di_value(5, true) == doctest::Approx(0.5));
    CHECK(s.di_value(1, false) == doctest::Approx(0.0));
    CHECK(s.di_value(5, false) == doctest::Approx(1.0));
    CHECK(s.dein == doctest::Approx(0.5));
    CHECK(s.bu_ratio == doctest::Approx(0.5));
    CHECK(s.n_k == 1);
    CHECK(s.citer_count == 2);
    CHECK(s.n_i == 1);
    CHECK(s.n_j_by_l.at(1) == 1);
    CHECK(s.n_j_by_l.at(5) == 0);

    // Field values agree with the single-score operations.
    auto part1 = classify_citers(g, "FP", cfg(1, true));
    auto nk = count_nk(g, "FP", cfg(1, true));
    CHECK(s.di_value(1, true) == doctest::Approx(disruption_score(part1, nk, true)));
    CHECK(s.dein == doctest::Approx(dependence_score(g, "FP", cfg(1, true))));
}

TEST_CASE("uncited paper yields all-NA record") {
    auto g = toy_graph_g1();
    auto s = compute_all(g, "C", kDefaultConfigs);
    CHECK(s.citer_count == 0);
    CHECK(is_na(s.di_value(1, true)));
    CHECK(is_na(s.di_value(5, false)));
    CHECK(is_na(s.dein));
    CHECK(is_na(s.bu_ratio));
    CHECK(is_na(s.di_value(1, false)));  // no-k with zero citers is NA, not 0
}

TEST_CASE("l=1 strategies coincide") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto g = testkit::random_dag(seed, 40, 150);
        for (PaperIndex f = 0; f < g.node_count(); f += 3) {
            auto zero = classify_citers(g, g.id_of(f), cfg(1, true, NiStrategy::ZeroCoupling));
            auto comp = classify_citers(g, g.id_of(f), cfg(1, true, NiStrategy::Complement));
            CHECK(zero.n_i == comp.n_i);
            CHECK(zero.n_j == comp.n_j);
        }
    }
}

TEST_CASE("config validation rejects l < 1") {
    CHECK_THROWS_AS(classify_citers(toy_graph_g1(), "FP", cfg(0, true)), ValidationError);
}

TEST_CASE("|DI_l| <= |DI_l^no-k| with equality iff n_k = 0") {
    for (std::uint64_t seed = 20; seed < 40; ++seed) {
        auto g = testkit::random_dag(seed, 50, 130);
        for (PaperIndex f = 0; f < g.node_count(); f += 5) {
            auto s = compute_all(g, g.id_of(f), kDefaultConfigs);
            for (int l : {1, 5}) {
                const double with_k = s.di_value(l, true);
                const double no_k = s.di_value(l, false);
                if (is_na(no_k)) continue;
                REQUIRE_FALSE(is_na(with_k));
                CHECK(std::abs(with_k) <= std::abs(no_k) + 1e-15);
                if (s.n_k == 0) CHECK(with_k == doctest::Approx(no_k));
                else if (no_k != 0.0) CHECK(std::abs(with_k) < std::abs(no_k));
            }
        }
    }
}

TEST_CASE("n_j non-increasing in l, DI_l^no-k non-decreasing (ZeroCoupling)") {
    const auto ladder = make_config_set({1, 2, 3, 5, 8}, NiStrategy::ZeroCoupling, std::nullopt);
    for (std::uint64_t seed = 50; seed < 60; ++seed) {
        auto g = testkit::random_dag(seed, 50, 200);
        for (PaperIndex f = 0; f < g.node_count(); f += 4) {
            auto s = compute_all(g, g.id_of(f), ladder);
            std::size_t prev_nj = SIZE_MAX;
            double prev_di = -2.0;
            for (int l : {1, 2, 3, 5, 8}) {
                CHECK(s.n_j_by_l.at(l) <= prev_nj);
                prev_nj = s.n_j_by_l.at(l);
                const double di = s.di_value(l, false);
                if (!is_na(di)) {
                    CHECK(di >= prev_di - 1e-15);
                    prev_di = di;
                }
            }
        }
    }
}

TEST_CASE("range conformance on random graphs") {
    for (std::uint64_t seed = 70; seed < 90; ++seed) {
        auto g = testkit::random_dag(seed, 45, 180);
        for (PaperIndex f = 0; f < g.node_count(); ++f) {
            auto s = compute_all(g, g.id_of(f), kDefaultConfigs);
            for (const auto& [key, v] : s.di) {
                if (!is_na(v)) {
                    CHECK(v >= -1.0);
                    CHECK(v <= 1.0);
                }
            }
            if (!is_na(s.dein)) CHECK(s.dein >= 0.0);
            if (!is_na(s.bu_ratio)) {
                CHECK(s.bu_ratio >= 0.0);
                CHECK(s.bu_ratio <= 1.0);
            }
        }
    }
}

TEST_CASE("reference-only citer shrinks DI_l and leaves no-k variants untouched") {
    // Metamorphic: a new paper citing one reference of FP (but not FP) only
    // enlarges n_k. Also checked bitwise at acceptance scale.
    auto base_nodes = std::vector<CitationGraph::NodeInput>{{"FP", 2005, "F1"}, {"R1", 2000, "F1"},
                                                            {"A", 2008, "F1"},  {"B", 2009, "F1"}};
    auto base_edges = std::vector<CitationGraph::EdgeInput>{{"FP", "R1"}, {"A", "FP"}, {"B", "FP"}, {"B", "R1"}};
    auto g = CitationGraph::build(base_nodes, base_edges);
    auto before = compute_all(g, "FP", kDefaultConfigs);

    base_nodes.push_back({"X", 2012, "F1"});
    base_edges.push_back({"X", "R1"});
    auto g2 = CitationGraph::build(base_nodes, base_edges);
    auto after = compute_all(g2, "FP", kDefaultConfigs);

    CHECK(after.n_k == before.n_k + 1);
    CHECK(std::abs(after.di_value(1, true)) < std::abs(before.di_value(1, true)));
    CHECK(after.di_value(1, false) == before.di_value(1, false));
    CHECK(after.dein == before.dein);
}

TEST_CASE("zero-coupling citer weakly raises DI and lowers DeIn") {
    auto nodes = std::vector<CitationGraph::NodeInput>{{"FP", 2005, "F1"}, {"R1", 2000, "F1"},
                                                       {"A", 2008, "F1"},  {"B", 2009, "F1"}};
    auto edges = std::vector<CitationGraph::EdgeInput>{{"FP", "R1"}, {"A", "FP"}, {"A", "R1"}, {"B", "FP"}, {"B", "R1"}};
    auto g = CitationGraph::build(nodes, edges);
    auto before = compute_all(g, "FP", kDefaultConfigs);

    nodes.push_back({"Z", 2012, "F1"});
    edges.push_back({"Z", "FP"});
    auto g2 = CitationGraph::build(nodes, edges);
    auto after = compute_all(g2, "FP", kDefaultConfigs);

    CHECK(after.di_value(1, true) >= before.di_value(1, true));
    CHECK(after.di_value(1, false) >= before.di_value(1, false));
    CHECK(after.dein <= before.dein);
}

TEST_CASE("batch_compute is deterministic across worker counts") {
    auto g = testkit::random_dag(99, 400, 40);
    std::vector<PaperId> focal;
    for (PaperIndex i = 0; i < g.node_count(); ++i) focal.push_back(g.id_of(i));

    auto one = batch_compute(g, focal, kDefaultConfigs, 1);
    auto eight = batch_compute(g, focal, kDefaultConfigs, 8);
    REQUIRE(one.size() == eight.size());
    std::string a, b;
    for (std::size_t i = 0; i < one.size(); ++i) {
        a += scores_tsv_row(one[i], {1, 5}) + "\n";
        b += scores_tsv_row(eight[i], {1, 5}) + "\n";
    }
    CHECK(a == b);  // byte-identical serialization

    SUBCASE("rows are sorted by paper id") {
        for (std::size_t i = 1; i < one.size(); ++i) CHECK(one[i - 1].focal < one[i].focal);
    }
}

TEST_CASE("batch_compute edge cases") {
    auto g = testkit::toy_graph_g1();
    CHECK(batch_compute(g, {}, kDefaultConfigs, 4).empty());

    auto single = batch_compute(g, {"FP"}, kDefaultConfigs, 4);
    REQUIRE(single.size() == 1);
    auto direct = compute_all(g, "FP", kDefaultConfigs);
    CHECK(scores_tsv_row(single[0], {1, 5}) == scores_tsv_row(direct, {1, 5}));

    CHECK_THROWS_AS(batch_compute(g, {"missing"}, kDefaultConfigs, 2), LookupError);
}

TEST_CASE("scores TSV round-trips through the loader") {
    auto g = testkit::random_dag(123, 60, 150);
    std::vector<PaperId> focal;
    for (PaperIndex i = 0; i < g.node_count(); i += 2) focal.push_back(g.id_of(i));
    auto rows = batch_compute(g, focal, kDefaultConfigs, 2);

    std::string tsv = scores_tsv_header({1, 5}) + "\n";
    for (const auto& r : rows) tsv += scores_tsv_row(r, {1, 5}) + "\n";

    const std::string path = "/tmp/dix_scores_roundtrip.tsv";
    write_file(path, tsv);
    std::vector<int> ls;
    auto loaded = load_scores_tsv(path, &ls);
    CHECK(ls == std::vector<int>{1, 5});
    REQUIRE(loaded.size() == rows.size());
    std::string rewritten = scores_tsv_header(ls) + "\n";
    for (const auto& r : loaded) rewritten += scores_tsv_row(r, ls) + "\n";
    CHECK(rewritten == tsv);
}
