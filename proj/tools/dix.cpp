// dix: disruption-indicator analytics for citation graphs.
//
// Subcommands wire the library pipeline together; every behavior lives in
// dix_core. Exit codes are stable for scripting: 0 success, 2 validation,
// 3 parse, 4 IO, 5 non-convergence.

#include <deque>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dix/analysis_matrix.hpp"
#include "dix/assessments.hpp"
#include "dix/correlation.hpp"
#include "dix/errors.hpp"
#include "dix/factor.hpp"
#include "dix/graph.hpp"
#include "dix/indicators.hpp"
#include "dix/normalize.hpp"
#include "dix/pipeline.hpp"
#include "dix/regression_grid.hpp"
#include "dix/testkit.hpp"
#include "dix/tsv.hpp"

namespace fs = std::filesystem;

namespace {

int exit_code_for(const dix::Error& e) {
    if (dynamic_cast<const dix::ConvergenceError*>(&e)) return 5;
    if (dynamic_cast<const dix::IoError*>(&e)) return 4;
    if (dynamic_cast<const dix::ParseError*>(&e)) return 3;
    return 2;
}

// Every tunable flag funnels through PipelineConfig::apply_entry so the
// config file and the command line share one parser. The config file is
// applied before CLI11 runs, flags override it.
struct ConfigBinding {
    dix::PipelineConfig config;
    std::deque<std::string> storage;                           // stable addresses for CLI11
    std::vector<std::pair<std::string, std::string*>> pending; // config key -> flag storage

    void slot(CLI::App* cmd, const std::string& flag, const std::string& key, const std::string& help) {
        storage.emplace_back();
        pending.emplace_back(key, &storage.back());
        cmd->add_option(flag, storage.back(), help);
    }

    // Applies every flag the user actually passed, in registration order.
    void finalize(CLI::App*) {
        for (auto& [key, value] : pending) {
            if (!value->empty()) config.apply_entry(key, *value);
        }
    }
};

void add_io_flags(CLI::App* cmd, ConfigBinding& bind, bool reviews) {
    bind.slot(cmd, "--nodes", "nodes", "nodes.tsv: paper_id<TAB>year<TAB>field");
    bind.slot(cmd, "--edges", "edges", "edges.tsv: citing_id<TAB>cited_id");
    if (reviews) bind.slot(cmd, "--reviews", "reviews", "reviews.tsv: paper_id<TAB>stars<TAB>tag;tag;...");
    bind.slot(cmd, "--out", "out", "output directory (default: .)");
}

void add_filter_flags(CLI::App* cmd, ConfigBinding& bind) {
    bind.slot(cmd, "--min-refs", "min_refs", "minimum cited references for eligibility (default: 10)");
    bind.slot(cmd, "--min-cites", "min_cites", "minimum citations for eligibility (default: 10)");
    bind.slot(cmd, "--year-min", "year_min", "earliest eligible publication year (default: 2000)");
    bind.slot(cmd, "--year-max", "year_max", "latest eligible publication year (default: 2016)");
    bind.slot(cmd, "--window-end", "window_end", "last year citations are counted, or 'none' (default: 2018)");
}

void add_indicator_flags(CLI::App* cmd, ConfigBinding& bind) {
    bind.slot(cmd, "--l", "l_values", "comma-separated coupling thresholds (default: 1,5)");
    bind.slot(cmd, "--ni-strategy", "ni_strategy", "N_i under l>1: zero-coupling or complement (default: zero-coupling)");
    bind.slot(cmd, "--workers", "workers", "worker threads; output is identical for any count (default: 1)");
}

void add_stats_flags(CLI::App* cmd, ConfigBinding& bind) {
    bind.slot(cmd, "--reference-year", "reference_year", "exposure = reference year - publication year (default: 2018)");
    bind.slot(cmd, "--transform", "transform", "log(x+1) before correlations: true or false (default: true)");
    bind.slot(cmd, "--ridge", "ridge", "ridge added to the correlation matrix for factor scoring (default: 0)");
    bind.slot(cmd, "--tag-classes", "tag_classes", "tag classification file overriding the built-in newness classes");
}

void write_with_manifest(dix::RunManifest& manifest, const std::string& out_dir, const std::string& name,
                         const std::string& content) {
    fs::create_directories(out_dir);
    dix::write_file((fs::path(out_dir) / name).string(), content);
    manifest.add_output(name, content);
}

void require(bool ok, const std::string& message) {
    if (!ok) throw dix::ValidationError(message);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dix: disruption-indicator analytics for citation graphs"};
    app.require_subcommand(1);

    // --config is applied before flag overrides; scan for it up front.
    std::string config_file;
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string_view(argv[i]) == "--config") config_file = argv[i + 1];
    }

    ConfigBinding bind;
    int exit_code = 0;

    try {
        if (!config_file.empty()) bind.config.apply_file(config_file);

        auto* ingest_check = app.add_subcommand("ingest-check", "parse inputs and print the ingestion report");
        add_io_flags(ingest_check, bind, true);
        ingest_check->add_option("--config", config_file, "key = value config file; flags override");
        ingest_check->callback([&] {
            bind.finalize(ingest_check);
            const auto& cfg = bind.config;
            require(!cfg.nodes_path.empty() && !cfg.edges_path.empty(), "ingest-check needs --nodes and --edges");
            dix::IngestReport report;
            const auto graph = dix::load_graph(cfg.nodes_path, cfg.edges_path, &report);
            std::cout << "nodes\t" << graph.node_count() << "\n"
                      << "edges\t" << graph.edge_count() << "\n"
                      << "node_rows\t" << report.node_rows << "\n"
                      << "edge_rows\t" << report.edge_rows << "\n"
                      << "duplicate_edges\t" << report.duplicate_edges << "\n"
                      << "self_loops\t" << report.self_loops << "\n"
                      << "year_warnings\t" << report.year_warnings << "\n"
                      << "duplicate_node_rows\t" << report.duplicate_node_rows << "\n"
                      << "materialized_endpoints\t" << report.materialized_endpoints << "\n";
            if (!cfg.reviews_path.empty()) {
                dix::ReviewReport reviews;
                const auto rows = dix::load_reviews(cfg.reviews_path, &reviews);
                std::cout << "review_rows\t" << rows.size() << "\n"
                          << "excluded_tags_dropped\t" << reviews.dropped_excluded_tags << "\n"
                          << "duplicate_tags\t" << reviews.duplicate_tags << "\n";
            }
        });

        auto* compute = app.add_subcommand("compute", "indicator scores for all eligible papers -> scores.tsv");
        add_io_flags(compute, bind, false);
        add_filter_flags(compute, bind);
        add_indicator_flags(compute, bind);
        compute->add_option("--config", config_file, "key = value config file; flags override");
        compute->callback([&] {
            bind.finalize(compute);
            const auto& cfg = bind.config;
            require(!cfg.nodes_path.empty() && !cfg.edges_path.empty(), "compute needs --nodes and --edges");
            dix::RunManifest manifest(cfg);
            dix::IngestReport ingest;
            const auto graph = dix::load_graph(cfg.nodes_path, cfg.edges_path, &ingest);
            manifest.add_input(cfg.nodes_path);
            manifest.add_input(cfg.edges_path);
            const auto result = dix::run_compute(graph, cfg);
            manifest.add_count("nodes", graph.node_count());
            manifest.add_count("edges", graph.edge_count());
            manifest.add_count("eligible_papers", result.eligible_count);
            manifest.add_count("self_loops_dropped", ingest.self_loops);
            manifest.add_count("duplicate_edges", ingest.duplicate_edges);
            manifest.add_count("year_warnings", ingest.year_warnings);
            write_with_manifest(manifest, cfg.out_dir, "scores.tsv", result.scores_tsv);
            manifest.write(cfg.out_dir);
            std::cerr << "scores.tsv: " << result.scores.size() << " rows\n";
        });

        auto* percentile = app.add_subcommand("percentile", "field/year citation percentiles -> percentiles.tsv");
        add_io_flags(percentile, bind, false);
        bind.slot(percentile, "--window-end", "window_end", "last year citations are counted, or 'none' (default: 2018)");
        percentile->add_option("--config", config_file, "key = value config file; flags override");
        percentile->callback([&] {
            bind.finalize(percentile);
            const auto& cfg = bind.config;
            require(!cfg.nodes_path.empty() && !cfg.edges_path.empty(), "percentile needs --nodes and --edges");
            dix::RunManifest manifest(cfg);
            const auto graph = dix::load_graph(cfg.nodes_path, cfg.edges_path);
            manifest.add_input(cfg.nodes_path);
            manifest.add_input(cfg.edges_path);
            std::size_t skipped = 0;
            const std::string tsv = dix::percentiles_tsv(graph, cfg, &skipped);
            manifest.add_count("percentile_skipped", skipped);
            write_with_manifest(manifest, cfg.out_dir, "percentiles.tsv", tsv);
            manifest.write(cfg.out_dir);
            if (skipped) std::cerr << "skipped " << skipped << " papers without field or year\n";
        });

        auto* join = app.add_subcommand("join", "scores + percentiles + reviews -> matrix.tsv");
        std::string scores_path, percentiles_path;
        join->add_option("--scores", scores_path, "scores.tsv from `dix compute`");
        join->add_option("--percentiles", percentiles_path, "percentiles.tsv from `dix percentile`");
        bind.slot(join, "--reviews", "reviews", "reviews.tsv: paper_id<TAB>stars<TAB>tag;tag;...");
        bind.slot(join, "--out", "out", "output directory (default: .)");
        bind.slot(join, "--reference-year", "reference_year",
                  "exposure = reference year - publication year (default: 2018)");
        join->add_option("--config", config_file, "key = value config file; flags override");
        join->callback([&] {
            bind.finalize(join);
            const auto& cfg = bind.config;
            require(!scores_path.empty() && !percentiles_path.empty() && !cfg.reviews_path.empty(),
                    "join needs --scores, --percentiles and --reviews");
            dix::RunManifest manifest(cfg);
            const auto scores = dix::load_scores_tsv(scores_path);
            manifest.add_input(scores_path);
            const auto pct = dix::load_percentiles_tsv(percentiles_path);
            manifest.add_input(percentiles_path);
            const auto reviews = dix::load_reviews(cfg.reviews_path);
            manifest.add_input(cfg.reviews_path);
            const auto assessments = dix::aggregate_assessments(reviews);
            dix::JoinReport report;
            const auto matrix =
                dix::build_matrix(scores, pct.scores, pct.metadata, assessments, cfg.reference_year, &report);
            manifest.add_count("matrix_rows", report.joined);
            write_with_manifest(manifest, cfg.out_dir, "matrix.tsv", matrix.to_tsv());
            manifest.write(cfg.out_dir);
            std::cerr << "join report: " << report.summary() << "\n";
        });

        auto* corr = app.add_subcommand("corr", "Spearman correlation matrix -> corr.tsv");
        std::string matrix_path;
        corr->add_option("--matrix", matrix_path, "matrix.tsv from `dix join`");
        bind.slot(corr, "--out", "out", "output directory (default: .)");
        bind.slot(corr, "--transform", "transform", "log(x+1) before correlations: true or false (default: true)");
        corr->add_option("--config", config_file, "key = value config file; flags override");
        corr->callback([&] {
            bind.finalize(corr);
            const auto& cfg = bind.config;
            require(!matrix_path.empty(), "corr needs --matrix");
            dix::RunManifest manifest(cfg);
            const auto matrix = dix::load_matrix(matrix_path);
            manifest.add_input(matrix_path);
            const auto c = dix::correlation_matrix(matrix, dix::kAnalysisVariables, cfg.transform);
            write_with_manifest(manifest, cfg.out_dir, "corr.tsv", c.to_tsv());
            manifest.write(cfg.out_dir);
        });

        auto* fa = app.add_subcommand("fa", "principal-component factor analysis with varimax -> fa.tsv");
        fa->add_option("--matrix", matrix_path, "matrix.tsv from `dix join`");
        bind.slot(fa, "--out", "out", "output directory (default: .)");
        bind.slot(fa, "--transform", "transform", "log(x+1) before correlations: true or false (default: true)");
        fa->add_option("--config", config_file, "key = value config file; flags override");
        fa->callback([&] {
            bind.finalize(fa);
            const auto& cfg = bind.config;
            require(!matrix_path.empty(), "fa needs --matrix");
            dix::RunManifest manifest(cfg);
            const auto matrix = dix::load_matrix(matrix_path);
            manifest.add_input(matrix_path);
            const auto c = dix::correlation_matrix(matrix, dix::kAnalysisVariables, cfg.transform);
            const auto model = dix::factor_analysis(c);
            manifest.add_count("retained_factors", static_cast<std::size_t>(model.retained));
            write_with_manifest(manifest, cfg.out_dir, "fa.tsv", model.to_tsv());
            manifest.write(cfg.out_dir);
            std::cerr << "retained " << model.retained << " factors\n";
        });

        auto* regress = app.add_subcommand("regress", "Poisson regression grids -> regress.tsv");
        regress->add_option("--matrix", matrix_path, "matrix.tsv from `dix join`");
        bind.slot(regress, "--out", "out", "output directory (default: .)");
        add_stats_flags(regress, bind);
        bind.slot(regress, "--workers", "workers", "worker threads (default: 1)");
        regress->add_option("--config", config_file, "key = value config file; flags override");
        regress->callback([&] {
            bind.finalize(regress);
            const auto& cfg = bind.config;
            require(!matrix_path.empty(), "regress needs --matrix");
            dix::RunManifest manifest(cfg);
            const auto matrix = dix::load_matrix(matrix_path);
            manifest.add_input(matrix_path);
            const auto analysis = dix::run_analyze(matrix, cfg);
            write_with_manifest(manifest, cfg.out_dir, "regress.tsv", analysis.regress_tsv);
            manifest.write(cfg.out_dir);
            if (analysis.best_indicator) {
                std::cerr << "expectation tally favors " << *analysis.best_indicator << "\n";
            }
        });

        auto* pipeline = app.add_subcommand("pipeline", "full run: ingest -> compute -> join -> statistics");
        add_io_flags(pipeline, bind, true);
        add_filter_flags(pipeline, bind);
        add_indicator_flags(pipeline, bind);
        add_stats_flags(pipeline, bind);
        pipeline->add_option("--config", config_file, "key = value config file; flags override");
        pipeline->callback([&] {
            bind.finalize(pipeline);
            const auto& cfg = bind.config;
            require(!cfg.nodes_path.empty() && !cfg.edges_path.empty() && !cfg.reviews_path.empty(),
                    "pipeline needs --nodes, --edges and --reviews");
            dix::run_pipeline(cfg);
            std::cerr << "pipeline outputs written to " << cfg.out_dir << "\n";
        });

        auto* datagen = app.add_subcommand("datagen", "synthetic dataset with known ground truth");
        dix::testkit::SyntheticSpec spec;
        std::string regime = "mixed", datagen_out = ".";
        datagen->add_option("--out", datagen_out, "output directory (default: .)");
        datagen->add_option("--seed", spec.seed, "random seed (default: 1)");
        datagen->add_option("--papers", spec.paper_count, "paper count (default: 500)");
        datagen->add_option("--mean-refs", spec.mean_references, "mean references per paper (default: 14)");
        datagen->add_option("--year-min", spec.year_min, "first publication year (default: 2000)");
        datagen->add_option("--year-max", spec.year_max, "last publication year (default: 2016)");
        datagen->add_option("--fields", spec.fields, "number of subject fields (default: 3)");
        datagen->add_option("--regime", regime, "disruptive, developmental or mixed (default: mixed)");
        datagen->add_option("--indicator", spec.indicator, "indicator driving tag generation (default: di_5)");
        datagen->callback([&] {
            if (regime == "disruptive") spec.regime = dix::testkit::CouplingRegime::DisruptiveHeavy;
            else if (regime == "developmental") spec.regime = dix::testkit::CouplingRegime::DevelopmentalHeavy;
            else if (regime == "mixed") spec.regime = dix::testkit::CouplingRegime::Mixed;
            else throw dix::ValidationError("unknown regime '" + regime + "'");

            const auto data = dix::testkit::generate_network(spec);
            // Ground-truth reviews need scores; reuse the production engine
            // with the default config lattice.
            const auto configs = dix::make_config_set({1, 5}, dix::NiStrategy::ZeroCoupling, spec.reference_year);
            std::vector<dix::PaperId> all;
            for (dix::PaperIndex i = 0; i < data.graph.node_count(); ++i) all.push_back(data.graph.id_of(i));
            const auto scores = dix::batch_compute(data.graph, all, configs, 1);
            const std::string reviews = dix::testkit::generate_assessments(data.metadata, scores, spec);

            fs::create_directories(datagen_out);
            dix::write_file((fs::path(datagen_out) / "nodes.tsv").string(), data.nodes_tsv());
            dix::write_file((fs::path(datagen_out) / "edges.tsv").string(), data.edges_tsv());
            dix::write_file((fs::path(datagen_out) / "reviews.tsv").string(), reviews);
            std::cerr << "wrote nodes.tsv, edges.tsv, reviews.tsv to " << datagen_out << "\n";
        });

        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const dix::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        exit_code = exit_code_for(e);
    }
    return exit_code;
}
