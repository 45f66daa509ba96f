#include "dix/graph.hpp"

#include <algorithm>
#include <utility>

#include "dix/errors.hpp"
#include "dix/tsv.hpp"

namespace dix {

CitationGraph CitationGraph::build(std::vector<NodeInput> nodes, std::vector<EdgeInput> edges,
                                   IngestReport* report) {
    IngestReport local;
    IngestReport& rep = report ? *report : local;
    rep.node_rows = nodes.size();
    rep.edge_rows = edges.size();

    CitationGraph g;

    // Collect the id universe: node rows plus both edge endpoints.
    g.ids_.reserve(nodes.size());
    for (const auto& n : nodes) g.ids_.push_back(n.id);
    for (const auto& e : edges) {
        g.ids_.push_back(e.citing);
        g.ids_.push_back(e.cited);
    }
    std::sort(g.ids_.begin(), g.ids_.end());
    g.ids_.erase(std::unique(g.ids_.begin(), g.ids_.end()), g.ids_.end());

    const std::size_t n = g.ids_.size();
    g.index_.reserve(n);
    for (PaperIndex i = 0; i < n; ++i) g.index_.emplace(g.ids_[i], i);

    g.years_.assign(n, kNoYear);
    g.fields_.assign(n, std::string());
    std::vector<bool> in_nodes_file(n, false);
    for (auto& node : nodes) {
        PaperIndex i = g.index_.at(node.id);
        if (in_nodes_file[i]) {
            ++rep.duplicate_node_rows;
            continue;  // first row wins
        }
        in_nodes_file[i] = true;
        g.years_[i] = node.year;
        g.fields_[i] = std::move(node.field);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!in_nodes_file[i]) ++rep.materialized_endpoints;
    }

    // Edge list as index pairs; drop self-loops, dedupe by sort+unique.
    std::vector<std::pair<PaperIndex, PaperIndex>> pairs;
    pairs.reserve(edges.size());
    for (const auto& e : edges) {
        PaperIndex u = g.index_.at(e.citing);
        PaperIndex v = g.index_.at(e.cited);
        if (u == v) {
            ++rep.self_loops;
            continue;
        }
        pairs.emplace_back(u, v);
    }
    std::sort(pairs.begin(), pairs.end());
    auto last = std::unique(pairs.begin(), pairs.end());
    rep.duplicate_edges = static_cast<std::size_t>(pairs.end() - last);
    pairs.erase(last, pairs.end());

    // CSR in both directions. pairs is sorted by (citing, cited), which makes
    // every out-adjacency row sorted; in-rows are filled by counting sort.
    g.out_offsets_.assign(n + 1, 0);
    g.in_offsets_.assign(n + 1, 0);
    for (const auto& [u, v] : pairs) {
        ++g.out_offsets_[u + 1];
        ++g.in_offsets_[v + 1];
    }
    for (std::size_t i = 0; i < n; ++i) {
        g.out_offsets_[i + 1] += g.out_offsets_[i];
        g.in_offsets_[i + 1] += g.in_offsets_[i];
    }
    g.out_targets_.resize(pairs.size());
    g.in_targets_.resize(pairs.size());
    std::vector<std::size_t> cursor(g.in_offsets_.begin(), g.in_offsets_.end() - 1);
    std::size_t out_pos = 0;
    for (const auto& [u, v] : pairs) {
        g.out_targets_[out_pos++] = v;
        g.in_targets_[cursor[v]++] = u;  // pairs sorted by u, so each in-row ends up sorted
    }
    return g;
}

PaperIndex CitationGraph::index_of(std::string_view id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw LookupError("unknown paper id '" + std::string(id) + "'");
    return it->second;
}

std::optional<PaperIndex> CitationGraph::find(std::string_view id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::vector<PaperId> CitationGraph::cited_references(const PaperId& paper) const {
    std::vector<PaperId> out;
    for (PaperIndex v : out_neighbors(index_of(paper))) out.push_back(ids_[v]);
    return out;
}

std::vector<PaperId> CitationGraph::citing_papers(const PaperId& paper, std::optional<std::int32_t> window_end,
                                                  std::size_t* unknown_year_excluded) const {
    std::vector<PaperId> out;
    for (PaperIndex u : in_neighbors(index_of(paper))) {
        if (window_end) {
            if (years_[u] == kNoYear) {
                if (unknown_year_excluded) ++*unknown_year_excluded;
                continue;
            }
            if (years_[u] > *window_end) continue;
        }
        out.push_back(ids_[u]);
    }
    return out;
}

std::size_t CitationGraph::merge_intersection_size(std::span<const PaperIndex> a, std::span<const PaperIndex> b) {
    std::size_t count = 0, i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) {
            ++i;
        } else if (b[j] < a[i]) {
            ++j;
        } else {
            ++count;
            ++i;
            ++j;
        }
    }
    return count;
}

std::size_t CitationGraph::coupling_strength(const PaperId& focal, const PaperId& other) const {
    return coupling_strength(index_of(focal), index_of(other));
}

std::vector<CitationGraph::EdgeInput> CitationGraph::export_edges() const {
    std::vector<EdgeInput> out;
    out.reserve(edge_count());
    for (PaperIndex u = 0; u < node_count(); ++u) {
        for (PaperIndex v : out_neighbors(u)) out.push_back({ids_[u], ids_[v]});
    }
    return out;
}

CitationGraph load_graph(const std::string& nodes_path, const std::string& edges_path, IngestReport* report) {
    IngestReport local;
    IngestReport& rep = report ? *report : local;

    std::vector<CitationGraph::NodeInput> nodes;
    read_tsv(nodes_path, {"paper_id", "year", "field"},
             [&](const std::vector<std::string_view>& f, std::size_t line) {
                 if (f[0].empty()) throw ParseError(nodes_path, line, "empty paper_id");
                 CitationGraph::NodeInput n;
                 n.id = std::string(f[0]);
                 if (!f[1].empty()) {
                     auto y = parse_int(f[1]);
                     if (y) {
                         n.year = static_cast<std::int32_t>(*y);
                     } else {
                         ++rep.year_warnings;  // row kept, year recorded as absent
                     }
                 }
                 n.field = std::string(f[2]);
                 nodes.push_back(std::move(n));
             });

    std::vector<CitationGraph::EdgeInput> edges;
    read_tsv(edges_path, {"citing_id", "cited_id"},
             [&](const std::vector<std::string_view>& f, std::size_t line) {
                 if (f[0].empty() || f[1].empty()) throw ParseError(edges_path, line, "empty endpoint id");
                 edges.push_back({std::string(f[0]), std::string(f[1])});
             });

    return CitationGraph::build(std::move(nodes), std::move(edges), &rep);
}

}  // namespace dix
