#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using baqca::cli::run;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome call(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Y equals A exactly.
fs::path identity_csv(const oracle::TempDir& tmp) {
    const auto p = tmp / "ya.csv";
    std::ofstream(p) << "case,A,B,C,Y\nc1,1,0,1,1\nc2,1,1,0,1\nc3,0,0,1,0\nc4,0,1,1,0\nc5,1,1,1,1\nc6,0,0,0,0\n";
    return p;
}

const std::string county = std::string(BAQCA_FIXTURES) + "/county67.csv";

}  // namespace

TEST_CASE("qca on a perfect single-condition relation") {
    oracle::TempDir tmp;
    const auto data = identity_csv(tmp).string();
    const auto r = call({"qca", "--data", data, "--outcome", "Y", "--id", "case", "--solution", "parsimonious"});
    CHECK(r.code == 0);
    CHECK(r.out.find("A ") != std::string::npos);
    CHECK(r.out.find("100.0%      100.0%") != std::string::npos);

    const auto j = call({"qca", "--data", data, "--outcome", "Y", "--id", "case", "--solution", "parsimonious", "--json"});
    REQUIRE(j.code == 0);
    const auto parsed = nlohmann::json::parse(j.out);
    CHECK(parsed["result"]["solution"] == "A");
}

TEST_CASE("qca exit codes") {
    oracle::TempDir tmp;
    const auto data = identity_csv(tmp).string();
    // Every observed row passes at consistency 0: no negative row remains.
    const auto none = call({"qca", "--data", data, "--outcome", "Y", "--id", "case", "--consistency", "0",
                            "--solution", "parsimonious"});
    CHECK(none.code == 3);
    CHECK(none.err.rfind("no result: ", 0) == 0);

    CHECK(call({"qca", "--data", data, "--outcome", "Z", "--id", "case"}).code == 2);
    CHECK(call({"qca", "--data", (tmp / "missing.csv").string(), "--outcome", "Y"}).code == 2);
    CHECK(call({"qca", "--data", data, "--outcome", "Y"}).code == 2);  // non-binary id column
    CHECK(call({"qca", "--data", data, "--outcome", "Y", "--id", "case", "--consistency", "1.5"}).code == 2);
    CHECK(call({"bogus"}).code == 2);
    CHECK(call({"--help"}).code == 0);
}

TEST_CASE("qca writes the truth table and a manifest") {
    oracle::TempDir tmp;
    const auto tt = tmp / "tt.csv";
    const auto r = call({"qca", "--data", county, "--outcome", "rally", "--id", "county", "--truth-table", tt.string()});
    CHECK((r.code == 0 || r.code == 3));
    const auto text = slurp(tt);
    CHECK(std::count(text.begin(), text.end(), '\n') <= 33);
    CHECK(text.rfind("republican,college,unemployment,black,evangelical,n,outcome_n,consistency,status\n", 0) == 0);
    const auto manifest = nlohmann::json::parse(slurp(tmp / "tt.csv.manifest.json"));
    CHECK(manifest["command"] == "qca");
    CHECK(manifest["inputs"][0]["sha256"].get<std::string>().size() == 64);
}

TEST_CASE("assess on an outcome that never occurs") {
    oracle::TempDir tmp;
    const auto p = tmp / "zero.csv";
    std::ofstream(p) << "A,B,Y\n1,0,0\n0,1,0\n1,1,0\n0,0,0\n";
    const auto r = call({"assess", "--data", p.string(), "--outcome", "Y", "--seed", "1", "--sims", "200", "--boot", "100"});
    CHECK(r.code == 0);
    CHECK(r.out.find("0.0000   0.0000") != std::string::npos);
}

TEST_CASE("outputs are byte-identical across worker counts") {
    oracle::TempDir tmp;
    std::string first;
    for (const char* threads : {"1", "2", "4"}) {
        const auto out = tmp / (std::string("a") + threads + ".json");
        const auto r = call({"assess", "--data", county, "--outcome", "rally", "--id", "county", "--seed", "99", "--sims",
                             "300", "--boot", "200", "--threads", threads, "--output", out.string()});
        REQUIRE(r.code == 0);
        const auto text = slurp(out);
        if (first.empty()) first = text;
        CHECK(text == first);
        CHECK(fs::exists(out.string() + ".manifest.json"));
    }
}

TEST_CASE("environment variables set defaults") {
    oracle::TempDir tmp;
    ::setenv("BAQCA_SEED", "5", 1);
    ::setenv("BAQCA_SIMS", "150", 1);
    const auto r = call({"assess", "--data", county, "--outcome", "rally", "--id", "county", "--boot", "50", "--json"});
    ::unsetenv("BAQCA_SEED");
    ::unsetenv("BAQCA_SIMS");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["assessment"]["settings"]["seed"] == 5);
    CHECK(j["assessment"]["settings"]["sims"] == 150);
    CHECK(r.err.find("seed:") == std::string::npos);

    const auto drawn = call({"assess", "--data", county, "--outcome", "rally", "--id", "county", "--sims", "120", "--boot", "20"});
    CHECK(drawn.err.rfind("seed: ", 0) == 0);
}

TEST_CASE("recommend writes tables and plot data") {
    oracle::TempDir tmp;
    const auto r = call({"recommend", "--data", county, "--outcome", "rally", "--id", "county", "--seed", "4", "--sims",
                         "100", "--alpha", "0.1,0.05", "--table-csv", (tmp / "t.csv").string(), "--plot-csv",
                         (tmp / "p.csv").string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("alpha = 0.1\n") != std::string::npos);
    CHECK(slurp(tmp / "t.csv").rfind("alpha,conf_n,", 0) == 0);
    CHECK(slurp(tmp / "p.csv").rfind("confN,consistency,fitted,ci_low,ci_high\n", 0) == 0);
    CHECK(fs::exists(tmp / "p.csv.manifest.json"));
}

TEST_CASE("study writes every artifact") {
    oracle::TempDir tmp;
    const auto dir = tmp / "study";
    const auto r = call({"study", "--iterations", "1000", "--seed", "8", "--out-dir", dir.string()});
    REQUIRE(r.code == 0);
    for (const char* f : {"records.csv", "model1.csv", "model2.csv", "models.txt", "models.json", "manifest.json",
                          "curves_main_effects.csv", "curves_by_outcome_dist.csv", "curves_by_num_conditions.csv",
                          "curves_by_sample_size.csv"})
        CHECK(fs::exists(dir / f));
    const auto records = slurp(dir / "records.csv");
    CHECK(std::count(records.begin(), records.end(), '\n') == 1001);

    const auto refit = call({"study", "--refit", (dir / "records.csv").string(), "--out-dir", (tmp / "refit").string()});
    REQUIRE(refit.code == 0);
    CHECK(slurp(tmp / "refit" / "models.json") == slurp(dir / "models.json"));

    CHECK(call({"study", "--iterations", "10", "--seed", "1", "--conditions", "4", "2", "--out-dir", dir.string()}).code == 2);
}
