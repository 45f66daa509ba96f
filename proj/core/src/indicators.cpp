#include "dix/indicators.hpp"

#include <algorithm>
#include <mutex>
#include <thread>

#include "dix/errors.hpp"
#include "dix/tsv.hpp"

namespace dix {

void IndicatorConfig::validate() const {
    if (l < 1) throw ValidationError("coupling threshold l must be >= 1, got " + std::to_string(l));
}

double DisruptionScores::di_value(int l, bool include_k) const {
    auto it = di.find({l, include_k});
    if (it == di.end()) throw ValidationError("no DI variant computed for l=" + std::to_string(l));
    return it->second;
}

namespace {

// Shared single pass: histogram of coupling strengths over windowed citers.
struct CiterScan {
    std::map<std::size_t, std::size_t> histogram;
    std::size_t citer_total = 0;
    std::size_t unknown_year_excluded = 0;
    std::size_t coupling_sum = 0;
};

CiterScan scan_citers(const CitationGraph& graph, PaperIndex focal, std::optional<std::int32_t> window_end) {
    CiterScan scan;
    const auto refs = graph.out_neighbors(focal);
    for (PaperIndex citer : graph.in_neighbors(focal)) {
        if (window_end && !graph.year(citer)) {
            ++scan.unknown_year_excluded;
            continue;
        }
        if (!graph.in_window(citer, window_end)) continue;
        const std::size_t c = CitationGraph::merge_intersection_size(refs, graph.out_neighbors(citer));
        ++scan.histogram[c];
        ++scan.citer_total;
        scan.coupling_sum += c;
    }
    return scan;
}

std::size_t count_at_or_above(const std::map<std::size_t, std::size_t>& histogram, std::size_t l) {
    std::size_t n = 0;
    for (auto it = histogram.lower_bound(l); it != histogram.end(); ++it) n += it->second;
    return n;
}

CiterPartition partition_from_scan(const CiterScan& scan, const IndicatorConfig& config) {
    CiterPartition p;
    p.coupling_histogram = scan.histogram;
    p.citer_total = scan.citer_total;
    p.unknown_year_excluded = scan.unknown_year_excluded;
    const auto l = static_cast<std::size_t>(config.l);
    p.n_j = count_at_or_above(scan.histogram, l);
    if (config.ni_strategy == NiStrategy::ZeroCoupling) {
        auto it = scan.histogram.find(0);
        p.n_i = it == scan.histogram.end() ? 0 : it->second;
    } else {
        p.n_i = p.citer_total - p.n_j;  // coupling < l
    }
    return p;
}

std::size_t count_nk_at(const CitationGraph& graph, PaperIndex focal, std::optional<std::int32_t> window_end) {
    // Union of the reference lists' citers, minus the focal paper and its own
    // citers. in_neighbors(focal) is sorted, so membership is a binary search.
    const auto citers = graph.in_neighbors(focal);
    auto cites_focal = [&](PaperIndex p) {
        return std::binary_search(citers.begin(), citers.end(), p);
    };
    std::vector<PaperIndex> candidates;
    for (PaperIndex ref : graph.out_neighbors(focal)) {
        for (PaperIndex p : graph.in_neighbors(ref)) candidates.push_back(p);
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    std::size_t n_k = 0;
    for (PaperIndex p : candidates) {
        if (p == focal || cites_focal(p)) continue;
        if (!graph.in_window(p, window_end)) continue;
        ++n_k;
    }
    return n_k;
}

DisruptionScores compute_all_at(const CitationGraph& graph, PaperIndex focal,
                                const std::vector<IndicatorConfig>& configs) {
    if (configs.empty()) throw ValidationError("compute_all requires at least one config");
    for (const auto& c : configs) {
        c.validate();
        if (c.ni_strategy != configs.front().ni_strategy || c.window_end != configs.front().window_end) {
            throw ValidationError("compute_all configs must share ni_strategy and window_end");
        }
    }
    const auto window_end = configs.front().window_end;
    const auto strategy = configs.front().ni_strategy;

    const CiterScan scan = scan_citers(graph, focal, window_end);

    DisruptionScores s;
    s.focal = graph.id_of(focal);
    s.citer_count = scan.citer_total;
    {
        auto it = scan.histogram.find(0);
        s.n_i = it == scan.histogram.end() ? 0 : it->second;
    }
    s.n_k = count_nk_at(graph, focal, window_end);

    for (const auto& config : configs) {
        IndicatorConfig c = config;
        c.ni_strategy = strategy;
        const CiterPartition part = partition_from_scan(scan, c);
        s.n_j_by_l[c.l] = part.n_j;
        s.di[{c.l, c.include_k}] = disruption_score(part, s.n_k, c.include_k);
    }

    s.dein = scan.citer_total == 0 ? kNA
                                   : static_cast<double>(scan.coupling_sum) / static_cast<double>(scan.citer_total);

    // Bu's ratio always comes from the l = 1 partition.
    IndicatorConfig l1{1, false, strategy, window_end};
    s.bu_ratio = bu_ratio(partition_from_scan(scan, l1));
    return s;
}

}  // namespace

CiterPartition classify_citers(const CitationGraph& graph, const PaperId& focal, const IndicatorConfig& config) {
    config.validate();
    const PaperIndex f = graph.index_of(focal);
    return partition_from_scan(scan_citers(graph, f, config.window_end), config);
}

std::size_t count_nk(const CitationGraph& graph, const PaperId& focal, const IndicatorConfig& config) {
    return count_nk_at(graph, graph.index_of(focal), config.window_end);
}

double disruption_score(const CiterPartition& partition, std::size_t n_k, bool include_k) {
    const double ni = static_cast<double>(partition.n_i);
    const double nj = static_cast<double>(partition.n_j);
    const double denom = ni + nj + (include_k ? static_cast<double>(n_k) : 0.0);
    if (denom == 0.0) return kNA;
    return (ni - nj) / denom;
}

double dependence_score(const CitationGraph& graph, const PaperId& focal, const IndicatorConfig& config) {
    const CiterScan scan = scan_citers(graph, graph.index_of(focal), config.window_end);
    if (scan.citer_total == 0) return kNA;
    return static_cast<double>(scan.coupling_sum) / static_cast<double>(scan.citer_total);
}

double bu_ratio(const CiterPartition& partition) {
    const double ni = static_cast<double>(partition.n_i);
    const double nj = static_cast<double>(partition.n_j);
    if (ni + nj == 0.0) return kNA;
    return ni / (ni + nj);
}

DisruptionScores compute_all(const CitationGraph& graph, const PaperId& focal,
                             const std::vector<IndicatorConfig>& configs) {
    return compute_all_at(graph, graph.index_of(focal), configs);
}

std::vector<DisruptionScores> batch_compute(const CitationGraph& graph, const std::vector<PaperId>& focal_set,
                                            const std::vector<IndicatorConfig>& configs, unsigned worker_count) {
    // Resolve and sort up front so unknown ids abort before any work starts
    // and the output order is independent of scheduling.
    std::vector<PaperIndex> focals;
    focals.reserve(focal_set.size());
    for (const auto& id : focal_set) focals.push_back(graph.index_of(id));
    std::sort(focals.begin(), focals.end());
    focals.erase(std::unique(focals.begin(), focals.end()), focals.end());

    std::vector<DisruptionScores> rows(focals.size());
    if (focals.empty()) return rows;

    const unsigned workers = std::max(1u, std::min<unsigned>(worker_count, static_cast<unsigned>(focals.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < focals.size(); ++i) rows[i] = compute_all_at(graph, focals[i], configs);
        return rows;
    }

    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < focals.size(); i += workers) {
                    rows[i] = compute_all_at(graph, focals[i], configs);
                }
            } catch (...) {
                std::lock_guard guard(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return rows;
}

std::vector<IndicatorConfig> make_config_set(const std::vector<int>& l_values, NiStrategy strategy,
                                             std::optional<std::int32_t> window_end) {
    std::vector<IndicatorConfig> configs;
    for (int l : l_values) {
        configs.push_back({l, true, strategy, window_end});
        configs.push_back({l, false, strategy, window_end});
    }
    return configs;
}

std::string scores_tsv_header(const std::vector<int>& l_values) {
    std::string h = "paper_id\tciter_count\tn_i";
    for (int l : l_values) h += "\tn_j_l" + std::to_string(l);
    h += "\tn_k";
    for (int l : l_values) h += "\tdi_" + std::to_string(l);
    for (int l : l_values) h += "\tdi_" + std::to_string(l) + "_nok";
    h += "\tdein\tbu_ratio";
    return h;
}

std::vector<DisruptionScores> load_scores_tsv(const std::string& path, std::vector<int>* l_values) {
    const std::string content = read_file(path);
    std::size_t eol = content.find('\n');
    if (eol == std::string::npos) throw ParseError(path, 1, "missing header row");

    // Recover the l list from the n_j_l* columns, then demand an exact header.
    std::vector<int> ls;
    for (std::string_view col : split_tsv(std::string_view(content).substr(0, eol))) {
        if (col.rfind("n_j_l", 0) == 0) {
            auto l = parse_int(col.substr(5));
            if (!l || *l < 1) throw ParseError(path, 1, "malformed column '" + std::string(col) + "'");
            ls.push_back(static_cast<int>(*l));
        }
    }
    const std::string expected = scores_tsv_header(ls);
    if (std::string_view(content).substr(0, eol) != expected) {
        throw ParseError(path, 1, "unexpected scores header (expected '" + expected + "')");
    }
    if (l_values) *l_values = ls;

    auto count_field = [&](std::string_view tok, std::size_t line) {
        auto v = parse_int(tok);
        if (!v || *v < 0) throw ParseError(path, line, "malformed count '" + std::string(tok) + "'");
        return static_cast<std::size_t>(*v);
    };
    auto real_field = [&](std::string_view tok, std::size_t line) {
        if (tok == "NA") return kNA;
        auto v = parse_real(tok);
        if (!v) throw ParseError(path, line, "malformed real '" + std::string(tok) + "'");
        return *v;
    };

    std::vector<DisruptionScores> rows;
    const std::size_t columns = 6 + 3 * ls.size();
    std::size_t pos = eol + 1;
    std::size_t line_no = 1;
    while (pos < content.size()) {
        std::size_t end = content.find('\n', pos);
        if (end == std::string::npos) end = content.size();
        std::string_view line(content.data() + pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.empty()) continue;
        auto f = split_tsv(line);
        if (f.size() != columns) {
            throw ParseError(path, line_no, "row has " + std::to_string(f.size()) + " columns, expected " +
                                                std::to_string(columns));
        }
        DisruptionScores s;
        std::size_t i = 0;
        s.focal = std::string(f[i++]);
        s.citer_count = count_field(f[i++], line_no);
        s.n_i = count_field(f[i++], line_no);
        for (int l : ls) s.n_j_by_l[l] = count_field(f[i++], line_no);
        s.n_k = count_field(f[i++], line_no);
        for (int l : ls) s.di[{l, true}] = real_field(f[i++], line_no);
        for (int l : ls) s.di[{l, false}] = real_field(f[i++], line_no);
        s.dein = real_field(f[i++], line_no);
        s.bu_ratio = real_field(f[i++], line_no);
        rows.push_back(std::move(s));
    }
    return rows;
}

std::string scores_tsv_row(const DisruptionScores& s, const std::vector<int>& l_values) {
    std::string row = s.focal;
    row += '\t';
    row += std::to_string(s.citer_count);
    row += '\t';
    row += std::to_string(s.n_i);
    for (int l : l_values) {
        row += '\t';
        row += std::to_string(s.n_j_by_l.at(l));
    }
    row += '\t';
    row += std::to_string(s.n_k);
    for (int l : l_values) {
        row += '\t';
        row += format_real(s.di_value(l, true));
    }
    for (int l : l_values) {
        row += '\t';
        row += format_real(s.di_value(l, false));
    }
    row += '\t';
    row += format_real(s.dein);
    row += '\t';
    row += format_real(s.bu_ratio);
    return row;
}

}  // namespace dix
