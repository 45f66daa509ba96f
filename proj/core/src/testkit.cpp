#include "dix/testkit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>

#include "dix/assessments.hpp"
#include "dix/errors.hpp"
#include "dix/tsv.hpp"

namespace dix::testkit {

std::size_t Rng::poisson(double rate) {
    if (rate <= 0.0) return 0;
    if (rate > 30.0) rate = 30.0;  // generators never need heavier tails
    const double limit = std::exp(-rate);
    double product = 1.0;
    std::size_t count = 0;
    while (true) {
        product *= uniform();
        if (product <= limit) return count;
        ++count;
        if (count > 200) return count;
    }
}

std::vector<TagCoefficients> SyntheticSpec::default_tag_model() {
    return {
        {"hypothesis", -2.4, 1.2},        {"new-finding", -1.8, 1.2},
        {"novel-drug-target", -2.8, 1.2}, {"technical-advance", -2.4, 1.2},
        {"confirmation", -2.2, -1.2},     {"good-for-teaching", -2.6, -1.2},
        {"negative-null", -3.0, -1.2},    {"refutation", -3.0, -1.2},
        {"controversial", -2.6, 0.0},
    };
}

void SyntheticSpec::validate() const {
    if (paper_count < 2) throw ValidationError("synthetic spec: need at least 2 papers");
    if (mean_references < 1) throw ValidationError("synthetic spec: mean_references must be >= 1");
    if (mean_references >= paper_count) {
        throw ValidationError("synthetic spec: mean_references must be below paper_count");
    }
    if (year_min > year_max) throw ValidationError("synthetic spec: year range is empty");
    if (fields < 1) throw ValidationError("synthetic spec: need at least one field");
    for (const auto& t : tag_model.empty() ? default_tag_model() : tag_model) {
        if (tag_column(t.tag) < 0) throw ValidationError("synthetic spec: unknown tag '" + t.tag + "'");
    }
}

namespace {

std::string paper_name(std::size_t i, std::size_t total) {
    std::size_t width = 1;
    for (std::size_t v = total; v >= 10; v /= 10) ++width;
    std::string digits = std::to_string(i);
    return "P" + std::string(width - std::min(width, digits.size()), '0') + digits;
}

}  // namespace

SyntheticData generate_network(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);

    const std::size_t P = spec.paper_count;
    const std::size_t span = static_cast<std::size_t>(spec.year_max - spec.year_min) + 1;

    std::vector<CitationGraph::NodeInput> nodes(P);
    for (std::size_t i = 0; i < P; ++i) {
        nodes[i].id = paper_name(i, P);
        nodes[i].year = spec.year_min + static_cast<std::int32_t>(i * span / P);  // non-decreasing
        nodes[i].field = "F" + std::to_string(i % spec.fields + 1);
    }

    std::vector<CitationGraph::EdgeInput> edges;
    std::vector<std::vector<std::size_t>> refs_of(P);  // forward adjacency under construction
    std::vector<std::size_t> edge_targets;             // for preferential target picks

    for (std::size_t i = 1; i < P; ++i) {
        const bool disruptive = spec.regime == CouplingRegime::DisruptiveHeavy ||
                                (spec.regime == CouplingRegime::Mixed && rng.bounded(2) == 0);

        const std::size_t budget =
            std::min(i, spec.mean_references / 2 + rng.bounded(spec.mean_references + 1));
        if (budget == 0) continue;

        std::set<std::size_t> refs;
        std::set<std::size_t> primary_refs;  // union of the primaries' reference sets

        // One or two anchor citations; half of them preferential so citation
        // counts are skewed enough to clear eligibility thresholds.
        const std::size_t primary_count = std::min<std::size_t>(i >= 4 ? 2 : 1, budget);
        std::vector<std::size_t> primaries;
        for (std::size_t k = 0; k < primary_count; ++k) {
            std::size_t t;
            if (!edge_targets.empty() && rng.bounded(2) == 0) {
                t = edge_targets[rng.bounded(edge_targets.size())];
                if (t >= i) t = rng.bounded(i);
            } else {
                t = rng.bounded(i);
            }
            if (refs.count(t)) continue;
            refs.insert(t);
            primaries.push_back(t);
            for (std::size_t r : refs_of[t]) primary_refs.insert(r);
        }

        if (!disruptive) {
            // Developmental: copy references of the cited papers.
            for (std::size_t t : primaries) {
                for (std::size_t r : refs_of[t]) {
                    if (refs.size() >= budget) break;
                    if (rng.bounded(4) < 3) refs.insert(r);
                }
            }
        }

        std::size_t attempts = 0;
        while (refs.size() < budget && attempts < budget * 8) {
            ++attempts;
            const std::size_t t = rng.bounded(i);
            if (refs.count(t)) continue;
            if (disruptive && primary_refs.count(t)) continue;  // avoid the forebears
            refs.insert(t);
            if (!disruptive && !refs_of[t].empty() && refs.size() < budget) {
                // Also lean on the filler's own references.
                const std::size_t r = refs_of[t][rng.bounded(refs_of[t].size())];
                if (!(disruptive && primary_refs.count(r))) refs.insert(r);
            }
        }

        for (std::size_t t : refs) {
            refs_of[i].push_back(t);
            edges.push_back({nodes[i].id, nodes[t].id});
            edge_targets.push_back(t);
        }
    }

    SyntheticData data{CitationGraph::build(nodes, std::move(edges)), {}};
    data.metadata = collect_metadata(data.graph, spec.reference_year);
    return data;
}

std::string SyntheticData::nodes_tsv() const {
    std::string out = "paper_id\tyear\tfield\n";
    for (PaperIndex i = 0; i < graph.node_count(); ++i) {
        out += graph.id_of(i);
        out += '\t';
        if (auto y = graph.year(i)) out += std::to_string(*y);
        out += '\t';
        out += graph.field(i);
        out += '\n';
    }
    return out;
}

std::string SyntheticData::edges_tsv() const {
    std::string out = "citing_id\tcited_id\n";
    for (const auto& e : graph.export_edges()) {
        out += e.citing;
        out += '\t';
        out += e.cited;
        out += '\n';
    }
    return out;
}

CitationGraph random_dag(std::uint64_t seed, std::size_t node_count, unsigned edge_permille) {
    Rng rng(seed);
    std::vector<CitationGraph::NodeInput> nodes(node_count);
    for (std::size_t i = 0; i < node_count; ++i) {
        nodes[i].id = paper_name(i, node_count);
        // A sprinkle of unknown years exercises the window warning paths.
        if (rng.bounded(16) == 0) {
            nodes[i].year = kNoYear;
        } else {
            nodes[i].year = 2000 + static_cast<std::int32_t>(i * 11 / std::max<std::size_t>(1, node_count));
        }
        nodes[i].field = "F1";
    }
    std::vector<CitationGraph::EdgeInput> edges;
    for (std::size_t i = 1; i < node_count; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (rng.bounded(1000) < edge_permille) edges.push_back({nodes[i].id, nodes[j].id});
        }
    }
    return CitationGraph::build(std::move(nodes), std::move(edges));
}

DisruptionScores oracle_indicators(const CitationGraph& graph, const PaperId& focal, const IndicatorConfig& config) {
    config.validate();
    const PaperIndex f = graph.index_of(focal);
    const std::size_t n = graph.node_count();

    auto year_ok = [&](PaperIndex p) {
        if (!config.window_end) return true;
        auto y = graph.year(p);
        return y.has_value() && *y <= *config.window_end;
    };
    auto cites = [&](PaperIndex a, PaperIndex b) {
        for (PaperIndex q : graph.out_neighbors(a)) {
            if (q == b) return true;
        }
        return false;
    };

    std::vector<PaperIndex> fp_refs(graph.out_neighbors(f).begin(), graph.out_neighbors(f).end());

    // Citers found by scanning every node's forward list.
    std::vector<PaperIndex> citers;
    for (PaperIndex p = 0; p < n; ++p) {
        if (p == f) continue;
        if (!cites(p, f)) continue;
        if (!year_ok(p)) continue;
        citers.push_back(p);
    }

    std::vector<std::size_t> coupling(citers.size(), 0);
    for (std::size_t c = 0; c < citers.size(); ++c) {
        std::size_t links = 0;
        for (PaperIndex q : graph.out_neighbors(citers[c])) {
            for (PaperIndex r : fp_refs) {
                if (q == r) ++links;
            }
        }
        coupling[c] = links;
    }

    const auto l = static_cast<std::size_t>(config.l);
    std::size_t zero_coupling = 0, at_least_l = 0, below_l = 0, coupling_sum = 0;
    for (std::size_t c : coupling) {
        if (c == 0) ++zero_coupling;
        if (c >= l) ++at_least_l;
        if (c < l) ++below_l;
        coupling_sum += c;
    }

    std::size_t n_k = 0;
    for (PaperIndex p = 0; p < n; ++p) {
        if (p == f) continue;
        if (cites(p, f)) continue;
        if (!year_ok(p)) continue;
        bool shares = false;
        for (PaperIndex q : graph.out_neighbors(p)) {
            for (PaperIndex r : fp_refs) {
                if (q == r) shares = true;
            }
        }
        if (shares) ++n_k;
    }

    DisruptionScores s;
    s.focal = focal;
    s.citer_count = citers.size();
    s.n_i = zero_coupling;
    s.n_k = n_k;
    s.n_j_by_l[config.l] = at_least_l;

    const double ni =
        static_cast<double>(config.ni_strategy == NiStrategy::ZeroCoupling ? zero_coupling : below_l);
    const double nj = static_cast<double>(at_least_l);
    double denom = ni + nj + (config.include_k ? static_cast<double>(n_k) : 0.0);
    s.di[{config.l, config.include_k}] = denom == 0.0 ? kNA : (ni - nj) / denom;

    s.dein = citers.empty() ? kNA : static_cast<double>(coupling_sum) / static_cast<double>(citers.size());

    const double bu_den = static_cast<double>(zero_coupling) + static_cast<double>(coupling.size() - zero_coupling);
    s.bu_ratio = bu_den == 0.0 ? kNA : static_cast<double>(zero_coupling) / bu_den;
    return s;
}

std::string generate_assessments(const std::vector<PaperMetadata>& metadata,
                                 const std::vector<DisruptionScores>& scores, const SyntheticSpec& spec) {
    spec.validate();
    Rng rng(spec.seed ^ 0x5eed5eedull);
    const auto model = spec.tag_model.empty() ? SyntheticSpec::default_tag_model() : spec.tag_model;

    std::map<PaperId, const PaperMetadata*> meta_by_id;
    for (const auto& m : metadata) meta_by_id[m.paper] = &m;

    auto indicator_value = [&](const DisruptionScores& s) -> double {
        if (spec.indicator == "di_1") return s.di_value(1, true);
        if (spec.indicator == "di_5") return s.di_value(5, true);
        if (spec.indicator == "di_1_nok") return s.di_value(1, false);
        if (spec.indicator == "di_5_nok") return s.di_value(5, false);
        if (spec.indicator == "dein") return s.dein;
        if (spec.indicator == "bu_ratio") return s.bu_ratio;
        throw ValidationError("synthetic spec: unknown indicator '" + spec.indicator + "'");
    };

    std::string out = "paper_id\tstars\ttags\n";
    for (const auto& s : scores) {
        auto m = meta_by_id.find(s.focal);
        if (m == meta_by_id.end() || m->second->year == kNoYear) continue;
        const double exposure = static_cast<double>(spec.reference_year - m->second->year);
        if (exposure < 1.0) continue;
        const double x = indicator_value(s);
        if (is_na(x)) continue;

        std::array<std::size_t, 9> tag_count{};
        std::size_t max_tags = 0;
        for (const auto& t : model) {
            const double rate = exposure * std::exp(t.intercept + t.slope * x);
            const std::size_t k = std::min<std::size_t>(rng.poisson(rate), 8);
            tag_count[static_cast<std::size_t>(tag_column(t.tag))] = k;
            max_tags = std::max(max_tags, k);
        }

        // Reviewer enthusiasm drives both how many reviews a paper gets and
        // how generous the stars are, giving ReSc.sum and ReSc.avg a shared
        // component.
        const std::size_t enthusiasm = rng.bounded(3);
        std::size_t review_count = std::max<std::size_t>(1 + rng.poisson(0.6 * static_cast<double>(enthusiasm + 1)),
                                                         max_tags);
        review_count = std::min<std::size_t>(review_count, 12);

        for (std::size_t r = 0; r < review_count; ++r) {
            const int stars = 1 + static_cast<int>(rng.bounded(enthusiasm + 1));
            std::string tags;
            for (std::size_t t = 0; t < kTagVocabulary.size(); ++t) {
                if (r < tag_count[t]) {
                    if (!tags.empty()) tags += ';';
                    tags += kTagVocabulary[t];
                }
            }
            out += s.focal;
            out += '\t';
            out += std::to_string(stars);
            out += '\t';
            out += tags;
            out += '\n';
        }
    }
    return out;
}

namespace {

CitationGraph build_toy(const std::vector<std::pair<std::string, std::int32_t>>& nodes,
                        const std::vector<std::pair<std::string, std::string>>& edges) {
    std::vector<CitationGraph::NodeInput> n;
    for (const auto& [id, year] : nodes) n.push_back({id, year, "F1"});
    std::vector<CitationGraph::EdgeInput> e;
    for (const auto& [u, v] : edges) e.push_back({u, v});
    return CitationGraph::build(std::move(n), std::move(e));
}

}  // namespace

CitationGraph toy_graph_g1() {
    return build_toy(
        {{"FP", 2005}, {"R1", 2000}, {"R2", 2001}, {"R3", 2002}, {"A", 2008}, {"B", 2009}, {"C", 2010}},
        {{"FP", "R1"}, {"FP", "R2"}, {"FP", "R3"}, {"A", "FP"}, {"B", "FP"}, {"B", "R1"}, {"C", "R1"}});
}

CitationGraph toy_graph_g2() {
    return build_toy({{"FP", 2005}, {"R1", 2000}, {"A", 2008}, {"B", 2009}},
                     {{"FP", "R1"}, {"A", "FP"}, {"B", "FP"}});
}

CitationGraph toy_graph_g3() {
    return build_toy({{"FP", 2005}, {"R1", 2000}, {"A", 2008}, {"B", 2009}},
                     {{"FP", "R1"}, {"A", "FP"}, {"A", "R1"}, {"B", "FP"}, {"B", "R1"}});
}

}  // namespace dix::testkit
