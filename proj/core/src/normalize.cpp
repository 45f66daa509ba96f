#include "dix/normalize.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "dix/errors.hpp"
#include "dix/tsv.hpp"

namespace dix {

std::vector<PaperMetadata> collect_metadata(const CitationGraph& graph, std::optional<std::int32_t> window_end) {
    std::vector<PaperMetadata> out;
    out.reserve(graph.node_count());
    for (PaperIndex i = 0; i < graph.node_count(); ++i) {
        PaperMetadata m;
        m.paper = graph.id_of(i);
        m.year = graph.year(i).value_or(kNoYear);
        m.field = graph.field(i);
        m.reference_count = graph.out_degree(i);
        if (window_end) {
            std::size_t c = 0;
            for (PaperIndex u : graph.in_neighbors(i)) {
                if (graph.in_window(u, window_end)) ++c;
            }
            m.citations = c;
        } else {
            m.citations = graph.in_degree(i);
        }
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<PaperId> eligible_papers(const std::vector<PaperMetadata>& metadata, std::size_t min_refs,
                                     std::size_t min_cites, std::int32_t year_min, std::int32_t year_max) {
    std::vector<PaperId> out;
    for (const auto& m : metadata) {
        if (m.reference_count < min_refs) continue;
        if (m.citations < min_cites) continue;
        if (m.year == kNoYear || m.year < year_min || m.year > year_max) continue;
        out.push_back(m.paper);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<PercentileScore> percentiles(const std::vector<PaperMetadata>& metadata, PercentileReport* report) {
    PercentileReport local;
    PercentileReport& rep = report ? *report : local;

    std::map<std::pair<std::string, std::int32_t>, std::vector<const PaperMetadata*>> groups;
    for (const auto& m : metadata) {
        if (m.field.empty()) {
            ++rep.skipped_missing_field;
            continue;
        }
        if (m.year == kNoYear) {
            ++rep.skipped_missing_year;
            continue;
        }
        groups[{m.field, m.year}].push_back(&m);
    }
    rep.group_count = groups.size();

    std::vector<PercentileScore> out;
    for (auto& [key, members] : groups) {
        // Ascending citations; ties share the average of the ranks they span,
        // so the most cited paper lands near 100.
        std::sort(members.begin(), members.end(), [](const PaperMetadata* a, const PaperMetadata* b) {
            if (a->citations != b->citations) return a->citations < b->citations;
            return a->paper < b->paper;
        });
        const std::size_t n = members.size();
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && members[j + 1]->citations == members[i]->citations) ++j;
            // ranks are 1-based: positions i..j average to (i + j) / 2 + 1
            const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
            const double pct = (rank - 0.5) / static_cast<double>(n) * 100.0;
            for (std::size_t k = i; k <= j; ++k) out.push_back({members[k]->paper, pct});
            i = j + 1;
        }
    }
    std::sort(out.begin(), out.end(), [](const PercentileScore& a, const PercentileScore& b) {
        return a.paper < b.paper;
    });
    return out;
}

std::vector<double> log1p_transform(const std::vector<double>& values) {
    std::vector<double> out;
    out.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        if (std::isnan(v)) {
            out.push_back(v);
            continue;
        }
        if (v <= -1.0) {
            throw ValidationError("log1p domain error at row " + std::to_string(i) + ": value " +
                                  std::to_string(v) + " <= -1");
        }
        out.push_back(std::log1p(v));
    }
    return out;
}

std::vector<double> log1p_transform_shifted(const std::vector<double>& values, double epsilon,
                                            std::size_t* shifted_count) {
    std::vector<double> adjusted = values;
    for (auto& v : adjusted) {
        if (!std::isnan(v) && v == -1.0) {
            v = -1.0 + epsilon;
            if (shifted_count) ++*shifted_count;
        }
    }
    return log1p_transform(adjusted);
}

PercentileTable load_percentiles_tsv(const std::string& path) {
    PercentileTable table;
    read_tsv(path, {"paper_id", "field", "year", "citations", "percentile"},
             [&](const std::vector<std::string_view>& f, std::size_t line) {
                 PaperMetadata m;
                 m.paper = std::string(f[0]);
                 m.field = std::string(f[1]);
                 auto year = parse_int(f[2]);
                 if (!year) throw ParseError(path, line, "malformed year '" + std::string(f[2]) + "'");
                 m.year = static_cast<std::int32_t>(*year);
                 auto cites = parse_int(f[3]);
                 if (!cites || *cites < 0) throw ParseError(path, line, "malformed citations");
                 m.citations = static_cast<std::size_t>(*cites);
                 auto pct = parse_real(f[4]);
                 if (!pct) throw ParseError(path, line, "malformed percentile");
                 table.metadata.push_back(m);
                 table.scores.push_back({m.paper, *pct});
             });
    return table;
}

}  // namespace dix
