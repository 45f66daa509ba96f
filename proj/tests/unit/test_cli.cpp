#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "dix/tsv.hpp"

// Wiring-level checks of the installed binary: exit codes, --help coverage,
// manifest reproducibility. Everything behavioral is covered by the library
// tests; these only prove the shell is connected.

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
    const char* env = std::getenv("DIX_CLI");
    REQUIRE_MESSAGE(env != nullptr, "DIX_CLI must point at the dix binary");
    return env;
}

std::string fixtures_path() {
    const char* env = std::getenv("DIX_FIXTURES");
    REQUIRE_MESSAGE(env != nullptr, "DIX_FIXTURES must point at tests/fixtures");
    return env;
}

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run(const std::string& args) {
    const std::string out_file = "/tmp/dix_cli_out.txt";
    const std::string cmd = cli_path() + " " + args + " > " + out_file + " 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out_file);
    r.output.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    return r;
}

}  // namespace

TEST_CASE("--help documents the subcommands and exits 0") {
    auto r = run("--help");
    CHECK(r.exit_code == 0);
    for (const char* sub : {"ingest-check", "compute", "percentile", "join", "corr", "fa", "regress", "pipeline"}) {
        CHECK_MESSAGE(r.output.find(sub) != std::string::npos, "missing subcommand ", sub);
    }

    auto rc = run("compute --help");
    CHECK(rc.exit_code == 0);
    for (const char* flag : {"--nodes", "--edges", "--min-refs", "--min-cites", "--year-min", "--year-max",
                             "--window-end", "--l", "--ni-strategy", "--workers", "--out", "--config"}) {
        CHECK_MESSAGE(rc.output.find(flag) != std::string::npos, "missing flag ", flag);
    }
    CHECK(rc.output.find("default: 10") != std::string::npos);
    CHECK(rc.output.find("default: 2000") != std::string::npos);
}

TEST_CASE("exit codes: IO=4, parse=3, validation=2") {
    const std::string fx = fixtures_path();
    auto io = run("compute --nodes /nonexistent.tsv --edges " + fx + "/g1_edges.tsv --out /tmp/dix_cli_io");
    CHECK(io.exit_code == 4);

    auto parse = run("compute --nodes " + fx + "/bad_nodes.tsv --edges " + fx + "/g1_edges.tsv --out /tmp/dix_cli_p");
    CHECK(parse.exit_code == 3);
    CHECK(parse.output.find("bad_nodes.tsv:3") != std::string::npos);  // line number surfaces

    auto validation = run("ingest-check --nodes " + fx + "/g1_nodes.tsv --edges " + fx + "/g1_edges.tsv --reviews " +
                          fx + "/bad_reviews.tsv");
    CHECK(validation.exit_code == 2);
}

TEST_CASE("compute on the G1 fixture matches the frozen golden scores") {
    const std::string fx = fixtures_path();
    const std::string out = "/tmp/dix_cli_g1";
    fs::remove_all(out);
    // No eligibility filtering so the toy graph survives; no window.
    auto r = run("compute --nodes " + fx + "/g1_nodes.tsv --edges " + fx + "/g1_edges.tsv --out " + out +
                 " --min-refs 0 --min-cites 0 --year-min 1900 --year-max 2100 --window-end none");
    REQUIRE(r.exit_code == 0);
    CHECK(dix::read_file(out + "/scores.tsv") == dix::read_file(fx + "/g1_scores_golden.tsv"));
}

TEST_CASE("manifest digests are identical across reruns") {
    const std::string fx = fixtures_path();
    const std::string out_a = "/tmp/dix_cli_rerun_a";
    const std::string out_b = "/tmp/dix_cli_rerun_b";
    fs::remove_all(out_a);
    fs::remove_all(out_b);
    const std::string args = "compute --nodes " + fx + "/g1_nodes.tsv --edges " + fx +
                             "/g1_edges.tsv --min-refs 0 --min-cites 0 --year-min 1900 --year-max 2100 --out ";
    REQUIRE(run(args + out_a).exit_code == 0);
    REQUIRE(run(args + out_b).exit_code == 0);
    CHECK(dix::read_file(out_a + "/manifest.tsv") == dix::read_file(out_b + "/manifest.tsv"));
    CHECK(dix::read_file(out_a + "/scores.tsv") == dix::read_file(out_b + "/scores.tsv"));
}

TEST_CASE("empty edges file produces a valid header-only scores table") {
    const std::string fx = fixtures_path();
    const std::string out = "/tmp/dix_cli_empty";
    fs::remove_all(out);
    auto r = run("compute --nodes " + fx + "/g1_nodes.tsv --edges " + fx + "/empty_edges.tsv --out " + out);
    REQUIRE(r.exit_code == 0);
    const std::string scores = dix::read_file(out + "/scores.tsv");
    CHECK(scores ==
          "paper_id\tciter_count\tn_i\tn_j_l1\tn_j_l5\tn_k\tdi_1\tdi_5\tdi_1_nok\tdi_5_nok\tdein\tbu_ratio\n");
}

TEST_CASE("config file supplies values and flags override them") {
    const std::string fx = fixtures_path();
    const std::string cfg = "/tmp/dix_cli_config.cfg";
    dix::write_file(cfg, "min_refs = 99\nmin_cites = 0\nyear_min = 1900\nyear_max = 2100\nwindow_end = none\n");
    const std::string out = "/tmp/dix_cli_cfg_run";
    fs::remove_all(out);
    // min_refs 99 from the file would exclude everything; the flag wins.
    auto r = run("compute --config " + cfg + " --nodes " + fx + "/g1_nodes.tsv --edges " + fx +
                 "/g1_edges.tsv --min-refs 0 --out " + out);
    REQUIRE(r.exit_code == 0);
    const std::string scores = dix::read_file(out + "/scores.tsv");
    CHECK(scores.find("FP") != std::string::npos);
}
