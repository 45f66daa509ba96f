#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dix {

// External papers are identified by opaque string ids; internally every id is
// mapped to a dense index assigned in ascending byte order of the id, so
// adjacency lists sorted by index are also sorted by id. That makes set
// intersections linear merges and batch output order well defined.
using PaperId = std::string;
using PaperIndex = std::uint32_t;

inline constexpr std::int32_t kNoYear = INT32_MIN;

struct IngestReport {
    std::size_t node_rows = 0;
    std::size_t edge_rows = 0;
    std::size_t duplicate_edges = 0;
    std::size_t self_loops = 0;
    std::size_t year_warnings = 0;          // non-integer year tokens, year recorded as absent
    std::size_t duplicate_node_rows = 0;    // repeated paper_id in the nodes file
    std::size_t materialized_endpoints = 0; // edge endpoints missing from the nodes file
};

// Immutable directed citation graph. Forward edges point at cited references,
// reverse edges at citers. Safe for concurrent reads after construction.
class CitationGraph {
public:
    struct NodeInput {
        std::string id;
        std::int32_t year = kNoYear;
        std::string field;
    };
    struct EdgeInput {
        std::string citing;
        std::string cited;
    };

    // Builds the graph from parsed rows. Deduplicates edges, drops self-loops,
    // and materializes endpoints that never appeared as nodes (unknown year).
    // Counts everything it drops into `report`.
    static CitationGraph build(std::vector<NodeInput> nodes, std::vector<EdgeInput> edges,
                               IngestReport* report = nullptr);

    std::size_t node_count() const { return ids_.size(); }
    std::size_t edge_count() const { return out_targets_.size(); }

    // Lookup error if unknown.
    PaperIndex index_of(std::string_view id) const;
    std::optional<PaperIndex> find(std::string_view id) const;
    const std::string& id_of(PaperIndex i) const { return ids_[i]; }

    std::optional<std::int32_t> year(PaperIndex i) const {
        return years_[i] == kNoYear ? std::nullopt : std::optional<std::int32_t>(years_[i]);
    }
    const std::string& field(PaperIndex i) const { return fields_[i]; }

    // Sorted ascending by internal index.
    std::span<const PaperIndex> out_neighbors(PaperIndex i) const {
        return {out_targets_.data() + out_offsets_[i], out_offsets_[i + 1] - out_offsets_[i]};
    }
    std::span<const PaperIndex> in_neighbors(PaperIndex i) const {
        return {in_targets_.data() + in_offsets_[i], in_offsets_[i + 1] - in_offsets_[i]};
    }

    std::size_t out_degree(PaperIndex i) const { return out_offsets_[i + 1] - out_offsets_[i]; }
    std::size_t in_degree(PaperIndex i) const { return in_offsets_[i + 1] - in_offsets_[i]; }

    // R(FP): the papers `paper` cites.
    std::vector<PaperId> cited_references(const PaperId& paper) const;

    // Citers of `paper`. Under a window only citers with a known year
    // <= window_end are returned; unknown-year citers are counted into
    // `unknown_year_excluded` when given.
    std::vector<PaperId> citing_papers(const PaperId& paper, std::optional<std::int32_t> window_end,
                                       std::size_t* unknown_year_excluded = nullptr) const;

    bool in_window(PaperIndex i, std::optional<std::int32_t> window_end) const {
        if (!window_end) return true;
        return years_[i] != kNoYear && years_[i] <= *window_end;
    }

    // Number of shared cited references (bibliographic coupling links),
    // computed by linear merge of the two sorted reference lists.
    std::size_t coupling_strength(const PaperId& focal, const PaperId& other) const;
    std::size_t coupling_strength(PaperIndex focal, PaperIndex other) const {
        return merge_intersection_size(out_neighbors(focal), out_neighbors(other));
    }

    static std::size_t merge_intersection_size(std::span<const PaperIndex> a, std::span<const PaperIndex> b);

    // Edge list in deterministic (citing, cited) index order; round-trips
    // through build() to an identical graph.
    std::vector<EdgeInput> export_edges() const;

private:
    struct StringHash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
    };

    std::vector<std::string> ids_;  // ascending byte order; position == internal index
    std::unordered_map<std::string, PaperIndex, StringHash, std::equal_to<>> index_;
    std::vector<std::int32_t> years_;
    std::vector<std::string> fields_;
    std::vector<std::size_t> out_offsets_;
    std::vector<PaperIndex> out_targets_;
    std::vector<std::size_t> in_offsets_;
    std::vector<PaperIndex> in_targets_;
};

// Reads nodes.tsv (paper_id, year, field; empty year/field allowed) and
// edges.tsv (citing_id, cited_id) and builds the graph.
CitationGraph load_graph(const std::string& nodes_path, const std::string& edges_path,
                         IngestReport* report = nullptr);

}  // namespace dix
