#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const std::string cli = PTSCAT_CLI_PATH;

int run(const std::string& args) {
    std::string cmd = cli + " " + args + " > /dev/null 2>&1";
    int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

fs::path fresh_dir(const std::string& name) {
    fs::path d = fs::temp_directory_path() / ("ptscat_cli_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

void write(const fs::path& p, const std::string& s) {
    std::ofstream f(p, std::ios::binary);
    f << s;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

const char* kBoxScatter = R"json({
  "lambda": 1.0,
  "grid_n": 64,
  "q": {"breakpoints": [-1.0, 1.0], "coefficients": [[1.0]]},
  "scattering": {"re_range": [0.5, 2.0], "count": 6, "im": 0.0}
})json";

} // namespace

TEST_CASE("verify succeeds on the unperturbed reference configuration") {
    auto d = fresh_dir("verify");
    write(d / "cfg.json", R"({"lambda": 1.0})");
    CHECK(run("verify --config " + (d / "cfg.json").string()) == 0);
}

TEST_CASE("zero coupling is rejected as a config error") {
    auto d = fresh_dir("lam0");
    write(d / "cfg.json", R"({"lambda": 0.0})");
    CHECK(run("verify --config " + (d / "cfg.json").string()) == 2);
}

TEST_CASE("malformed config and missing file exit with code 2") {
    auto d = fresh_dir("bad");
    write(d / "cfg.json", "{ not json");
    CHECK(run("verify --config " + (d / "cfg.json").string()) == 2);
    CHECK(run("verify --config " + (d / "nonexistent.json").string()) == 2);
}

TEST_CASE("scattering run is deterministic and cache-stable") {
    auto d = fresh_dir("scatter");
    write(d / "cfg.json", kBoxScatter);
    fs::path out1 = d / "out1", out2 = d / "out2", out3 = d / "out3";
    fs::path cache = d / "cache";
    std::string base = "scattering --config " + (d / "cfg.json").string();
    REQUIRE(run(base + " --out " + out1.string() + " --cache " + cache.string()) == 0);
    // Second run hits the kernel cache; third runs without any cache.
    REQUIRE(run(base + " --out " + out2.string() + " --cache " + cache.string()) == 0);
    REQUIRE(run(base + " --out " + out3.string()) == 0);
    std::string a = slurp(out1 / "scattering.csv");
    REQUIRE(!a.empty());
    CHECK(a == slurp(out2 / "scattering.csv"));
    CHECK(a == slurp(out3 / "scattering.csv"));
    CHECK(!fs::is_empty(cache)); // kernels were actually cached
    // 6 rows + header
    CHECK(std::count(a.begin(), a.end(), '\n') == 7);
}

TEST_CASE("threaded batch output matches single-threaded output byte for byte") {
    auto d = fresh_dir("threads");
    write(d / "cfg.json", kBoxScatter);
    std::string base = "scattering --config " + (d / "cfg.json").string();
    REQUIRE(run(base + " --out " + (d / "t1").string() + " --threads 1") == 0);
    REQUIRE(run(base + " --out " + (d / "t4").string() + " --threads 4") == 0);
    CHECK(slurp(d / "t1" / "scattering.csv") == slurp(d / "t4" / "scattering.csv"));
}

TEST_CASE("resonances subcommand finds the closed-form zeros") {
    auto d = fresh_dir("resonances");
    write(d / "cfg.json", R"json({
      "lambda": 0.2,
      "resonances": {"re_min": -0.5, "re_max": 0.5, "im_min": -1.0, "im_max": -0.1}
    })json");
    REQUIRE(run("resonances --config " + (d / "cfg.json").string() +
                " --out " + d.string()) == 0);
    std::string csv = slurp(d / "resonances.csv");
    // zeros at -i(0.5 +/- sqrt(0.05)) = -0.27639i, -0.72360i
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(csv.find("-0.2763932") != std::string::npos);
    CHECK(csv.find("-0.7236067") != std::string::npos);
}

TEST_CASE("branches subcommand writes one row per predicted index") {
    auto d = fresh_dir("branches");
    write(d / "cfg.json", R"json({
      "lambda": 1.0,
      "q": {"breakpoints": [-1.0, 1.0], "coefficients": [[1.0]]},
      "branches": {"kind": "log", "j_lo": 1, "j_hi": 5}
    })json");
    REQUIRE(run("branches --config " + (d / "cfg.json").string() +
                " --out " + d.string()) == 0);
    std::string csv = slurp(d / "branches.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6); // header + j=1..5
}

TEST_CASE("reconstruct subcommand emits the factorization fit") {
    auto d = fresh_dir("reconstruct");
    write(d / "cfg.json", R"json({
      "lambda": 1.0,
      "reconstruct": {"target": "W", "n_max": 60}
    })json");
    REQUIRE(run("reconstruct --config " + (d / "cfg.json").string() +
                " --out " + d.string()) == 0);
    std::string j = slurp(d / "reconstruct.json");
    CHECK(j.find("\"target\": \"W\"") != std::string::npos);
    CHECK(j.find("fit_residual") != std::string::npos);
}

TEST_CASE("failed runs leave no partial outputs behind") {
    auto d = fresh_dir("cleanup");
    // resonances without the required region block -> config error after the
    // output directory may have been prepared
    write(d / "cfg.json", R"json({"lambda": 0.2})json");
    fs::path out = d / "out";
    CHECK(run("resonances --config " + (d / "cfg.json").string() +
              " --out " + out.string()) == 2);
    CHECK(!fs::exists(out / "resonances.csv"));
}
