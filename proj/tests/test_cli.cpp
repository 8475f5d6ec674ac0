#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

std::string bin() { return MMELAB_BIN; }

int run(const std::string& args) {
    int rc = std::system((bin() + " " + args + " > /dev/null 2>&1").c_str());
    REQUIRE(rc != -1);
    return WEXITSTATUS(rc);
}

fs::path write_config(const std::string& name, const std::string& body) {
    fs::path dir = fs::temp_directory_path() / "mmelab_cli_test";
    fs::create_directories(dir);
    fs::path p = dir / name;
    std::ofstream(p) << body;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kZ2 = R"({"map": {"kind": "poly1d", "coeffs": [0, 0, 1]},
                      "n_points": 2500, "seed": 7})";

}  // namespace

TEST_CASE("degree-1 map is rejected at config validation with exit 2") {
    auto cfg = write_config("bad.json", R"({"map": {"kind": "poly1d", "coeffs": [0, 1]}})");
    fs::path out = cfg.parent_path() / "bad_out";
    CHECK(run("run --config " + cfg.string() + " --out " + out.string()) == 2);
}

TEST_CASE("malformed config and unknown map kind give exit 2") {
    auto garbled = write_config("garbled.json", "{not json");
    CHECK(run("sample --config " + garbled.string()) == 2);
    auto unknown = write_config("unknown.json", R"({"map": {"kind": "rational"}})");
    CHECK(run("sample --config " + unknown.string()) == 2);
}

TEST_CASE("rerun with the same config and seed is byte-identical") {
    auto cfg = write_config("z2.json", kZ2);
    fs::path base = cfg.parent_path();
    REQUIRE(run("run --config " + cfg.string() + " --out " + (base / "a").string()) == 0);
    REQUIRE(run("run --config " + cfg.string() + " --out " + (base / "b").string()) == 0);
    std::string a = slurp(base / "a" / "report.json");
    std::string b = slurp(base / "b" / "report.json");
    CHECK(a.size() > 0);
    CHECK(a == b);
    CHECK(slurp(base / "a" / "points.csv") == slurp(base / "b" / "points.csv"));

    // a different seed must change the report body
    REQUIRE(run("run --config " + cfg.string() + " --seed 8 --out " + (base / "c").string()) ==
            0);
    CHECK(slurp(base / "c" / "report.json") != a);
}

TEST_CASE("verify subcommands report pass with exit 0") {
    auto cfg = write_config("z2v.json", kZ2);
    fs::path out = cfg.parent_path() / "v";
    CHECK(run("verify-lemma1 --config " + cfg.string() + " --out " + out.string()) == 0);
    std::string rep = slurp(out / "report.json");
    CHECK(rep.find("\"pass\": true") != std::string::npos);
    CHECK(rep.find("lemma1") != std::string::npos);
}
