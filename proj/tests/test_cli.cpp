#include "doctest.h"

#include "helpers.hpp"
#include "snapshots.hpp"

#include "json.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliRun {
    int exit_code = -1;
    std::string out, err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Fresh working directory per call site, cleaned up on destruction.
struct Scratch {
    fs::path dir;
    Scratch() {
        static std::atomic<int> counter{0};
        dir = fs::temp_directory_path() /
              ("nestkit_cli_" + std::to_string(::getpid()) + "_" +
               std::to_string(counter++));
        fs::create_directories(dir);
    }
    ~Scratch() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

CliRun run_cli(const Scratch& s, const std::string& args) {
    const fs::path out = s.dir / "_stdout", err = s.dir / "_stderr";
    const std::string cmd = std::string(NESTKIT_CLI_PATH) + " " + args + " >" +
                            out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    CliRun r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

// Perfectly nested 3x3 edge list.
std::string staircase_tsv() { return "a\tx\na\ty\na\tz\nb\tx\nb\ty\nc\tx\n"; }

// Three monthly dumps of the same small internet; one membership appears
// from February on, one disappears after January.
void write_dumps(const Scratch& s) {
    using testutil::Ix;
    using testutil::Link;
    using testutil::Net;
    const std::vector<Net> nets = {{"1", "Heavy Outbound"}, {"2", "Mostly Inbound"},
                                   {"3", ""},               {"4", "Balanced"},
                                   {"5", ""},               {"6", ""}};
    const std::vector<Ix> ixs = {{"10", "DE"}, {"11", "FR"}, {"12", "US"}};
    const std::vector<Link> stable = {
        {"1", "10", 1000}, {"1", "11", 1000}, {"1", "12", 1000},
        {"2", "10", 500},  {"2", "11", 500},  {"3", "10", 100},
        {"4", "11", 100},  {"5", "12", 100},  {"6", "10", 100},
    };
    auto with = [&](std::initializer_list<Link> extra) {
        std::vector<Link> links = stable;
        links.insert(links.end(), extra.begin(), extra.end());
        return links;
    };
    testutil::write_file(s.path("peeringdb_2021-01-01.json"),
                         testutil::snapshot_json(nets, ixs, with({{"6", "12", 200}})));
    testutil::write_file(s.path("peeringdb_2021-02-01.json"),
                         testutil::snapshot_json(nets, ixs, with({{"3", "12", 300}})));
    testutil::write_file(s.path("peeringdb_2021-03-01.json"),
                         testutil::snapshot_json(nets, ixs, with({{"3", "12", 300}})));
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("metric subcommand reports the score as json") {
    Scratch s;
    testutil::write_file(s.path("edges.tsv"), staircase_tsv());
    auto r = run_cli(s, "--out " + s.dir.string() + " --log-level quiet metric --input " +
                            s.path("edges.tsv") + " --metric nodf");
    REQUIRE(r.exit_code == 0);
    const json out = json::parse(r.out);
    CHECK(out.at("metric") == "nodf");
    CHECK(out.at("value").get<double>() == 1.0);
    CHECK(out.at("detail").at("rows") == 3);
    CHECK(out.at("detail").at("fill").get<double>() == doctest::Approx(6.0 / 9.0));
    CHECK(fs::exists(s.dir / "metric-nodf.json"));
    CHECK(fs::exists(s.dir / "manifest-metric.json"));
    CHECK(json::parse(slurp(s.dir / "metric-nodf.json")) == out);
}

TEST_CASE("usage problems exit with 2, runtime failures with 1") {
    Scratch s;
    CHECK(run_cli(s, "").exit_code == 2);                  // no subcommand
    CHECK(run_cli(s, "frobnicate").exit_code == 2);        // unknown subcommand
    CHECK(run_cli(s, "metric --metric nodf").exit_code == 2);  // missing --input
    CHECK(run_cli(s, "--log-level loud metric --input x --metric nodf").exit_code == 2);

    auto missing = run_cli(s, "metric --input " + s.path("absent.tsv") + " --metric nodf");
    CHECK(missing.exit_code == 1);
    CHECK(missing.err.find("nestkit: error:") != std::string::npos);

    testutil::write_file(s.path("edges.tsv"), staircase_tsv());
    auto bogus = run_cli(s, "metric --input " + s.path("edges.tsv") + " --metric banana");
    CHECK(bogus.exit_code == 1);
    CHECK(bogus.err.find("unknown metric: banana") != std::string::npos);

    auto version = run_cli(s, "--version");
    CHECK(version.exit_code == 0);
    CHECK(version.out.find("nestkit") != std::string::npos);
}

TEST_CASE("graph subcommand conditions an edge list") {
    Scratch s;
    // two components; the bigger one survives --component, then min-degree
    // 2 drops the leaf row
    testutil::write_file(s.path("edges.tsv"),
                         "a\tx\na\ty\nb\tx\nb\ty\nc\tx\nq\tw\n");
    auto r = run_cli(s, "--out " + s.dir.string() + " --log-level quiet graph --input " +
                            s.path("edges.tsv") + " --component --min-degree 2");
    REQUIRE(r.exit_code == 0);
    const json diag = json::parse(r.out);
    CHECK(diag.at("rows") == 2);
    CHECK(diag.at("cols") == 2);
    CHECK(diag.at("edges") == 4);
    CHECK(diag.at("connected") == true);
    CHECK(slurp(s.dir / "graph.tsv") == "a\tx\na\ty\nb\tx\nb\ty\n");
}

TEST_CASE("significance runs are reproducible byte for byte") {
    Scratch s;
    testutil::write_file(s.path("edges.tsv"), staircase_tsv());
    const std::string common = " --log-level quiet --seed 7 test --input " +
                               s.path("edges.tsv") + " --metric eta --null pp --n 200";
    fs::create_directories(s.dir / "one");
    fs::create_directories(s.dir / "two");
    auto a = run_cli(s, "--out " + (s.dir / "one").string() + " --threads 1" + common);
    auto b = run_cli(s, "--out " + (s.dir / "two").string() + " --threads 4" + common);
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    CHECK(a.out == b.out);  // thread count must not leak into results
    CHECK(slurp(s.dir / "one/test-eta-pp.json") == slurp(s.dir / "two/test-eta-pp.json"));
    const json out = json::parse(a.out);
    CHECK(out.at("n") == 200);
    CHECK(out.at("seed") == 7);
    CHECK(out.at("p_value").get<double>() > 0.0);

    // a different seed gives a different ensemble
    auto c = run_cli(s, "--out " + (s.dir / "one").string() + " --log-level quiet" +
                            " --seed 8 test --input " + s.path("edges.tsv") +
                            " --metric eta --null pp --n 200");
    REQUIRE(c.exit_code == 0);
    CHECK(json::parse(c.out).at("ensemble_mean") != out.at("ensemble_mean"));
}

TEST_CASE("rank subcommand emits a csv ordering") {
    Scratch s;
    testutil::write_file(s.path("edges.tsv"), staircase_tsv());
    auto r = run_cli(s, "--out " + s.dir.string() + " --log-level quiet rank --input " +
                            s.path("edges.tsv") + " --metric degree --class row");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out == "node,score,rank\na,3,1\nb,2,2\nc,1,3\n");
    CHECK(slurp(s.dir / "rank-degree-row.csv") == r.out);
}

TEST_CASE("communities subcommand recovers separated blocks") {
    Scratch s;
    testutil::write_file(s.path("edges.tsv"),
                         "a1\tx1\na1\tx2\na2\tx1\na2\tx2\n"
                         "b1\ty1\nb1\ty2\nb2\ty1\nb2\ty2\n");
    auto r = run_cli(s, "--out " + s.dir.string() + " --log-level quiet --seed 3 " +
                            "communities --input " + s.path("edges.tsv") +
                            " --objective modularity --restarts 4");
    REQUIRE(r.exit_code == 0);
    const json out = json::parse(r.out);
    CHECK(out.at("value").get<double>() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(out.at("communities") == 2);
    CHECK(out.at("rows").at("a1") == out.at("rows").at("a2"));
    CHECK(out.at("rows").at("a1") != out.at("rows").at("b1"));
    CHECK(out.at("cols").at("x1") == out.at("rows").at("a1"));
    const std::string csv = slurp(s.dir / "composition.csv");
    CHECK(csv.rfind("community,rows,cols,", 0) == 0);
}

TEST_CASE("plot-matrix writes a figure with csv twins") {
    Scratch s;
    testutil::write_file(s.path("edges.tsv"), staircase_tsv());
    auto r = run_cli(s, "--out " + s.dir.string() +
                            " --log-level quiet plot-matrix --input " +
                            s.path("edges.tsv") + " --order-by degree");
    REQUIRE(r.exit_code == 0);
    const std::string svg = slurp(s.dir / "matrix.svg");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(slurp(s.dir / "matrix-cells.csv").rfind("row,col,weight\n", 0) == 0);
    const std::string rows = slurp(s.dir / "matrix-rows.csv");
    CHECK(rows.rfind("node,rank,degree,score\na,1,3,", 0) == 0);
    CHECK(fs::exists(s.dir / "matrix-cols.csv"));
}

TEST_CASE("roc subcommand scores a label file") {
    Scratch s;
    testutil::write_file(s.path("labels.txt"), "1\n0\n1\n0\n");
    auto r = run_cli(s, "--out " + s.dir.string() + " --log-level quiet roc --labels " +
                            s.path("labels.txt"));
    REQUIRE(r.exit_code == 0);
    const json out = json::parse(r.out);
    CHECK(out.at("auc").get<double>() == 0.75);
    CHECK(out.at("positives") == 2);
    CHECK(fs::exists(s.dir / "roc.csv"));
    CHECK(fs::exists(s.dir / "roc.svg"));

    testutil::write_file(s.path("bad.txt"), "1\n2\n");
    auto bad = run_cli(s, "roc --labels " + s.path("bad.txt"));
    CHECK(bad.exit_code == 1);
    CHECK(bad.err.find("expected 0 or 1") != std::string::npos);
}

TEST_CASE("dump pipeline: ingest, series, predict") {
    Scratch s;
    write_dumps(s);

    // ingest parses every dump and reports provenance
    fs::create_directories(s.dir / "ingest");
    auto ing = run_cli(s, "--out " + (s.dir / "ingest").string() +
                              " --log-level quiet ingest --dir " + s.dir.string() +
                              " --country");
    REQUIRE(ing.exit_code == 0);
    const json prov = json::parse(ing.out);
    REQUIRE(prov.size() == 3);
    CHECK(prov[0].at("date") == "2021-01-01");
    CHECK(prov[0].at("networks") == 6);
    CHECK(prov[0].at("memberships") == 10);
    CHECK(prov[2].at("date") == "2021-03-01");
    CHECK(fs::exists(s.dir / "ingest/memberships-2021-01-01.tsv"));
    CHECK(fs::exists(s.dir / "ingest/country-2021-02-01.tsv"));

    // series over the same dumps, kept raw so every node survives
    fs::create_directories(s.dir / "series");
    auto ser = run_cli(s, "--out " + (s.dir / "series").string() +
                              " --log-level quiet series --dir " + s.dir.string() +
                              " --kind as-ixp --no-filter --no-community");
    REQUIRE(ser.exit_code == 0);
    const json manifest = json::parse(ser.out);
    CHECK(manifest.at("dates") == json({"2021-01-01", "2021-02-01", "2021-03-01"}));
    CHECK(manifest.at("row_universe") == json({"1", "2", "3", "4", "5", "6"}));
    CHECK(manifest.at("col_universe") == json({"10", "11", "12"}));
    CHECK(manifest.at("community_restricted") == false);

    // the membership that appears in february is the top creation story
    auto pred = run_cli(s, "--out " + (s.dir / "series").string() +
                               " --log-level quiet predict --series " +
                               (s.dir / "series/series-manifest.json").string() +
                               " --direction create --persist 1");
    REQUIRE(pred.exit_code == 0);
    const json create = json::parse(pred.out);
    CHECK(create.at("positives") == 1);
    CHECK(create.at("auc").get<double>() >= 0.0);
    CHECK(create.at("auc").get<double>() <= 1.0);
    CHECK(fs::exists(s.dir / "series/predict-create.csv"));
    CHECK(fs::exists(s.dir / "series/roc-create.svg"));

    // the link dropped after january is the only true deletion
    auto del = run_cli(s, "--out " + (s.dir / "series").string() +
                              " --log-level quiet predict --series " +
                              (s.dir / "series/series-manifest.json").string() +
                              " --direction delete --persist 2");
    REQUIRE(del.exit_code == 0);
    const json remove = json::parse(del.out);
    CHECK(remove.at("positives") == 1);
    CHECK(fs::exists(s.dir / "series/auc-delete.json"));

    // rerunning the series yields identical bytes
    fs::create_directories(s.dir / "series2");
    auto ser2 = run_cli(s, "--out " + (s.dir / "series2").string() +
                               " --log-level quiet series --dir " + s.dir.string() +
                               " --kind as-ixp --no-filter --no-community");
    REQUIRE(ser2.exit_code == 0);
    CHECK(slurp(s.dir / "series/series-manifest.json") ==
          slurp(s.dir / "series2/series-manifest.json"));
    CHECK(slurp(s.dir / "series/series-as-ixp-2021-02-01.tsv") ==
          slurp(s.dir / "series2/series-as-ixp-2021-02-01.tsv"));
}

TEST_SUITE_END();
