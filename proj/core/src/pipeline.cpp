#include "dix/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "dix/correlation.hpp"
#include "dix/errors.hpp"
#include "dix/factor.hpp"
#include "dix/normalize.hpp"
#include "dix/regression_grid.hpp"
#include "dix/tsv.hpp"

namespace dix {

namespace {

std::string basename_of(const std::string& path) { return std::filesystem::path(path).filename().string(); }

std::string strategy_token(NiStrategy s) { return s == NiStrategy::ZeroCoupling ? "zero-coupling" : "complement"; }

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

// Rethrows with the failing stage in the message while keeping the error
// type, so exit codes stay meaningful.
[[noreturn]] void throw_with_stage(const std::string& stage, const Error& e) {
    const std::string msg = "stage " + stage + ": " + e.what();
    if (dynamic_cast<const IoError*>(&e)) throw IoError(msg);
    if (dynamic_cast<const ParseError*>(&e)) throw ParseError(msg);
    if (const auto* ce = dynamic_cast<const ConvergenceError*>(&e)) {
        throw ConvergenceError(msg, ce->last_criterion(), ce->iterations());
    }
    if (dynamic_cast<const LookupError*>(&e)) throw LookupError(msg);
    if (dynamic_cast<const ValidationError*>(&e)) throw ValidationError(msg);
    throw Error(msg);
}

}  // namespace

void PipelineConfig::apply_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) throw ParseError(path, line_no, "expected 'key = value'");
        apply_entry(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
}

void PipelineConfig::apply_entry(const std::string& key, const std::string& value) {
    auto as_int = [&](const std::string& v) {
        auto parsed = parse_int(v);
        if (!parsed) throw ValidationError("config key '" + key + "': malformed integer '" + v + "'");
        return *parsed;
    };
    if (key == "nodes") nodes_path = value;
    else if (key == "edges") edges_path = value;
    else if (key == "reviews") reviews_path = value;
    else if (key == "out") out_dir = value;
    else if (key == "min_refs") min_refs = static_cast<std::size_t>(as_int(value));
    else if (key == "min_cites") min_cites = static_cast<std::size_t>(as_int(value));
    else if (key == "year_min") year_min = static_cast<std::int32_t>(as_int(value));
    else if (key == "year_max") year_max = static_cast<std::int32_t>(as_int(value));
    else if (key == "window_end") {
        if (value == "none") window_end.reset();
        else window_end = static_cast<std::int32_t>(as_int(value));
    } else if (key == "l_values") {
        l_values.clear();
        std::size_t start = 0;
        while (start <= value.size()) {
            std::size_t comma = value.find(',', start);
            const std::string tok = trim(comma == std::string::npos ? value.substr(start)
                                                                    : value.substr(start, comma - start));
            if (!tok.empty()) l_values.push_back(static_cast<int>(as_int(tok)));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (l_values.empty()) throw ValidationError("config key 'l_values': empty list");
    } else if (key == "ni_strategy") {
        if (value == "zero-coupling") ni_strategy = NiStrategy::ZeroCoupling;
        else if (value == "complement") ni_strategy = NiStrategy::Complement;
        else throw ValidationError("config key 'ni_strategy': expected zero-coupling or complement");
    } else if (key == "reference_year") reference_year = static_cast<std::int32_t>(as_int(value));
    else if (key == "workers") workers = static_cast<unsigned>(as_int(value));
    else if (key == "transform") {
        if (value == "true" || value == "1") transform = true;
        else if (value == "false" || value == "0") transform = false;
        else throw ValidationError("config key 'transform': expected true or false");
    } else if (key == "ridge") {
        auto v = parse_real(value);
        if (!v) throw ValidationError("config key 'ridge': malformed real");
        ridge = *v;
    } else if (key == "tag_classes") tag_classes_path = value;
    else throw ValidationError("unknown config key '" + key + "'");
}

std::map<std::string, std::string> PipelineConfig::entries() const {
    std::map<std::string, std::string> e;
    e["min_refs"] = std::to_string(min_refs);
    e["min_cites"] = std::to_string(min_cites);
    e["year_min"] = std::to_string(year_min);
    e["year_max"] = std::to_string(year_max);
    e["window_end"] = window_end ? std::to_string(*window_end) : "none";
    std::string ls;
    for (int l : l_values) {
        if (!ls.empty()) ls += ',';
        ls += std::to_string(l);
    }
    e["l_values"] = ls;
    e["ni_strategy"] = strategy_token(ni_strategy);
    e["reference_year"] = std::to_string(reference_year);
    e["transform"] = transform ? "true" : "false";
    e["ridge"] = format_real(ridge, 6);
    return e;
}

std::string PipelineConfig::config_digest() const {
    std::string blob;
    for (const auto& [k, v] : entries()) blob += k + "=" + v + "\n";
    return to_hex(fnv1a64(blob));
}

TagClassification PipelineConfig::tag_classes() const {
    if (tag_classes_path.empty()) return TagClassification::defaults();
    return TagClassification::load(tag_classes_path);
}

RunManifest::RunManifest(const PipelineConfig& config) {
    rows_.emplace_back("tool", "dix");
    rows_.emplace_back("config_digest", config.config_digest());
    for (const auto& [k, v] : config.entries()) rows_.emplace_back("config." + k, v);
}

void RunManifest::add_input(const std::string& path) {
    rows_.emplace_back("input." + basename_of(path), to_hex(fnv1a64_file(path)));
}

void RunManifest::add_output(const std::string& name, std::string_view content) {
    rows_.emplace_back("output." + name, to_hex(fnv1a64(content)));
}

void RunManifest::add_count(const std::string& key, std::size_t value) {
    rows_.emplace_back("count." + key, std::to_string(value));
}

std::string RunManifest::to_tsv() const {
    std::string out = "key\tvalue\n";
    for (const auto& [k, v] : rows_) out += k + "\t" + v + "\n";
    return out;
}

void RunManifest::write(const std::string& out_dir) const {
    write_file((std::filesystem::path(out_dir) / "manifest.tsv").string(), to_tsv());
}

ComputeResult run_compute(const CitationGraph& graph, const PipelineConfig& config) {
    ComputeResult result;
    const auto metadata = collect_metadata(graph, config.window_end);
    const auto eligible =
        eligible_papers(metadata, config.min_refs, config.min_cites, config.year_min, config.year_max);
    result.eligible_count = eligible.size();

    const auto configs = make_config_set(config.l_values, config.ni_strategy, config.window_end);
    result.scores = batch_compute(graph, eligible, configs, std::max(1u, config.workers));

    std::string tsv = scores_tsv_header(config.l_values) + "\n";
    for (const auto& s : result.scores) tsv += scores_tsv_row(s, config.l_values) + "\n";
    result.scores_tsv = std::move(tsv);
    return result;
}

std::string percentiles_tsv(const CitationGraph& graph, const PipelineConfig& config, std::size_t* skipped) {
    const auto metadata = collect_metadata(graph, config.window_end);
    PercentileReport report;
    const auto scores = percentiles(metadata, &report);
    if (skipped) *skipped = report.skipped_missing_field + report.skipped_missing_year;

    std::map<PaperId, const PaperMetadata*> meta_by_id;
    for (const auto& m : metadata) meta_by_id[m.paper] = &m;

    std::string out = "paper_id\tfield\tyear\tcitations\tpercentile\n";
    for (const auto& p : scores) {
        const auto* m = meta_by_id.at(p.paper);
        out += p.paper;
        out += '\t';
        out += m->field;
        out += '\t';
        out += std::to_string(m->year);
        out += '\t';
        out += std::to_string(m->citations);
        out += '\t';
        out += format_real(p.percentile, 6);
        out += '\n';
    }
    return out;
}

AnalysisMatrix run_join(const CitationGraph& graph, const ComputeResult& compute,
                        const std::vector<AssessmentRecord>& assessments, const PipelineConfig& config,
                        JoinReport* report) {
    const auto metadata = collect_metadata(graph, config.window_end);
    const auto pct = percentiles(metadata);
    return build_matrix(compute.scores, pct, metadata, assessments, config.reference_year, report);
}

namespace {

// The rotated factor whose loadings concentrate on the disruption indicators
// is the one that carries newness expectations; its sign is read off the
// DI_5^no-k loading so a flipped column still scores correctly.
std::vector<int> factor_orientations(const FactorModel& model) {
    std::vector<int> orientation(static_cast<std::size_t>(model.retained), 0);
    if (model.retained == 0) return orientation;

    std::vector<std::size_t> indicator_rows;
    std::size_t di5nok_row = 0;
    for (std::size_t v = 0; v < model.variables.size(); ++v) {
        for (const auto& name : kIndicatorVariables) {
            if (model.variables[v] == name && name != "di_1") indicator_rows.push_back(v);
        }
        if (model.variables[v] == "di_5_nok") di5nok_row = v;
    }
    if (indicator_rows.empty()) return orientation;

    Eigen::Index best = 0;
    double best_mass = -1.0;
    for (Eigen::Index f = 0; f < model.rotated_loadings.cols(); ++f) {
        double mass = 0.0;
        for (std::size_t v : indicator_rows) {
            mass += std::abs(model.rotated_loadings(static_cast<Eigen::Index>(v), f));
        }
        if (mass > best_mass) {
            best_mass = mass;
            best = f;
        }
    }
    const double direction = model.rotated_loadings(static_cast<Eigen::Index>(di5nok_row), best);
    orientation[static_cast<std::size_t>(best)] = direction >= 0.0 ? 1 : -1;
    return orientation;
}

}  // namespace

AnalyzeResult run_analyze(const AnalysisMatrix& matrix, const PipelineConfig& config) {
    AnalyzeResult result;
    if (matrix.rows() < 3) throw ValidationError("analysis needs at least 3 joined rows, got " +
                                                 std::to_string(matrix.rows()));

    const CorrelationMatrix corr = correlation_matrix(matrix, kAnalysisVariables, config.transform);
    result.corr_tsv = corr.to_tsv();

    const FactorModel model = factor_analysis(corr);
    result.fa_tsv = model.to_tsv();
    result.retained_factors = model.retained;

    // Factor scores need the same transformed data the correlations saw.
    const auto n = static_cast<Eigen::Index>(matrix.rows());
    Eigen::MatrixXd data(n, static_cast<Eigen::Index>(kAnalysisVariables.size()));
    for (std::size_t c = 0; c < kAnalysisVariables.size(); ++c) {
        std::vector<double> col = matrix.column(kAnalysisVariables[c]);
        if (config.transform) col = log1p_transform_shifted(col, 1e-9, nullptr);
        for (Eigen::Index r = 0; r < n; ++r) data(r, static_cast<Eigen::Index>(c)) = col[static_cast<std::size_t>(r)];
    }

    const TagClassification classes = config.tag_classes();
    std::vector<std::string> responses(kTagVocabulary.begin(), kTagVocabulary.end());

    std::vector<PredictorSet> sets;
    if (model.retained > 0) {
        const Eigen::MatrixXd scores = factor_scores(model, corr, data, config.ridge);
        std::vector<std::string> factor_names;
        for (int f = 1; f <= model.retained; ++f) factor_names.push_back("factor" + std::to_string(f));
        sets.push_back(factor_predictors(matrix, scores, factor_names, factor_orientations(model)));
    }
    for (auto& set : indicator_predictors(matrix, kIndicatorVariables)) sets.push_back(std::move(set));

    const GridResult grid = regression_grid(matrix, responses, sets, classes, std::max(1u, config.workers));
    result.regress_tsv = grid_tsv(grid);

    // Best indicator by tally, ignoring factor columns.
    std::optional<std::string> best;
    std::size_t best_count = 0;
    for (const auto& [name, count] : grid.expectation_tally) {
        if (name.rfind("factor", 0) == 0) continue;
        if (!best || count > best_count) {
            best = name;
            best_count = count;
        }
    }
    result.best_indicator = best;
    return result;
}

void run_pipeline(const PipelineConfig& config) {
    namespace fs = std::filesystem;
    std::vector<std::string> written;
    auto emit = [&](RunManifest& manifest, const std::string& name, const std::string& content) {
        const std::string path = (fs::path(config.out_dir) / name).string();
        write_file(path, content);
        written.push_back(path);
        manifest.add_output(name, content);
    };

    std::string stage = "setup";
    try {
        fs::create_directories(config.out_dir);
        RunManifest manifest(config);

        stage = "ingest";
        IngestReport ingest;
        const CitationGraph graph = load_graph(config.nodes_path, config.edges_path, &ingest);
        manifest.add_input(config.nodes_path);
        manifest.add_input(config.edges_path);
        ReviewReport review_report;
        const auto reviews = load_reviews(config.reviews_path, &review_report);
        manifest.add_input(config.reviews_path);
        manifest.add_count("nodes", graph.node_count());
        manifest.add_count("edges", graph.edge_count());
        manifest.add_count("self_loops_dropped", ingest.self_loops);
        manifest.add_count("duplicate_edges", ingest.duplicate_edges);
        manifest.add_count("year_warnings", ingest.year_warnings);
        manifest.add_count("reviews", reviews.size());
        manifest.add_count("excluded_tags_dropped", review_report.dropped_excluded_tags);

        stage = "compute";
        const ComputeResult compute = run_compute(graph, config);
        manifest.add_count("eligible_papers", compute.eligible_count);
        emit(manifest, "scores.tsv", compute.scores_tsv);

        stage = "percentile";
        std::size_t pct_skipped = 0;
        const std::string pct_tsv = percentiles_tsv(graph, config, &pct_skipped);
        manifest.add_count("percentile_skipped", pct_skipped);
        emit(manifest, "percentiles.tsv", pct_tsv);

        stage = "join";
        const auto assessments = aggregate_assessments(reviews);
        JoinReport join_report;
        const AnalysisMatrix matrix = run_join(graph, compute, assessments, config, &join_report);
        manifest.add_count("matrix_rows", join_report.joined);
        manifest.add_count("join_na_indicators_dropped", join_report.na_indicators_dropped);
        manifest.add_count("join_missing_assessment", join_report.missing_assessment);
        emit(manifest, "matrix.tsv", matrix.to_tsv());

        stage = "analyze";
        const AnalyzeResult analysis = run_analyze(matrix, config);
        emit(manifest, "corr.tsv", analysis.corr_tsv);
        emit(manifest, "fa.tsv", analysis.fa_tsv);
        emit(manifest, "regress.tsv", analysis.regress_tsv);
        manifest.add_count("retained_factors", static_cast<std::size_t>(analysis.retained_factors));

        manifest.write(config.out_dir);
    } catch (...) {
        // Partial outputs are removed so a failed run leaves nothing behind.
        for (const auto& path : written) {
            std::error_code ec;
            fs::remove(path, ec);
        }
        try {
            throw;
        } catch (const Error& e) {
            throw_with_stage(stage, e);
        }
    }
}

}  // namespace dix
