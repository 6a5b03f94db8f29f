#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Result {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("rollwave_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// Runs the CLI with the given argument string inside dir; env is a prefix such
// as "ROLLWAVE_JOBS=3".
Result run(const fs::path& dir, const std::string& args, const std::string& env = "") {
    const std::string cmd = "cd '" + dir.string() + "' && " + env + " '" + ROLLWAVE_CLI_PATH + "' " + args +
                            " > stdout.txt 2> stderr.txt";
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(dir / "stdout.txt");
    r.err = slurp(dir / "stderr.txt");
    return r;
}

void check_error(const Result& r, int code, const std::string& category) {
    CHECK(r.code == code);
    const json e = json::parse(r.err);
    CHECK(e.at("error") == category);
    CHECK(e.at("message").get<std::string>().size() > 0);
}

}  // namespace

TEST_CASE("version") {
    const fs::path d = scratch("version");
    const Result r = run(d, "version");
    CHECK(r.code == 0);
    CHECK(r.out.rfind("rollwave ", 0) == 0);
}

TEST_CASE("profile writes JSON and CSV, deterministically") {
    const fs::path d = scratch("profile");
    const Result r = run(d, "profile --froude 2.05 --period 10 --n 128 --out a");
    REQUIRE(r.code == 0);
    const json summary = json::parse(r.out);
    CHECK(summary.at("residual_norm").get<double>() < 1e-8);
    CHECK(summary.at("slope").at("averaged_holds").get<bool>());
    const json p = json::parse(slurp(d / "a" / "profile.json"));
    CHECK(p.at("n") == 128);
    CHECK(p.at("period") == 10.0);
    CHECK(fs::exists(d / "a" / "profile.csv"));

    REQUIRE(run(d, "profile --froude 2.05 --period 10 --n 128 --out b").code == 0);
    CHECK(slurp(d / "a" / "profile.json") == slurp(d / "b" / "profile.json"));
    CHECK(slurp(d / "a" / "profile.csv") == slurp(d / "b" / "profile.csv"));
}

TEST_CASE("profile far from onset and continuation output") {
    const fs::path d = scratch("continuation");
    const Result far = run(d, "profile --froude 4 --n 128 --out far");
    REQUIRE(far.code == 0);
    CHECK(json::parse(far.out).at("froude") == 4.0);
    CHECK_FALSE(json::parse(far.out).at("slope").at("pointwise_holds").get<bool>());

    const Result r = run(d, "profile --froude 2.05 --n 128 --continue-to 3.0 --out c");
    REQUIRE(r.code == 0);
    const json s = json::parse(r.out);
    CHECK(s.at("continuation").at("reached") == doctest::Approx(3.0));
    CHECK_FALSE(s.at("continuation").at("failed").get<bool>());
    CHECK(fs::exists(d / "c" / "continuation" / "path.csv"));
    CHECK(fs::exists(d / "c" / "continuation" / "profile_000.json"));
}

TEST_CASE("validation and I/O failures exit nonzero with an error JSON") {
    const fs::path d = scratch("errors");
    check_error(run(d, "profile --froude -1"), 1, "domain");
    check_error(run(d, "profile --n 4"), 1, "domain");
    check_error(run(d, "profile --bogus 3"), 1, "domain");
    check_error(run(d, ""), 1, "domain");
    check_error(run(d, "scan --froude-min 3 --froude-max 2"), 1, "domain");
    check_error(run(d, "gauge --profile missing.json"), 3, "io");
    check_error(run(d, "profile --config missing.json"), 3, "io");
    REQUIRE(run(d, "profile --n 64 --out p").code == 0);
    check_error(run(d, "evolve --profile p/profile.json"), 1, "domain");
    check_error(run(d, "shock --tau-plus 1"), 1, "domain");
    std::ofstream(d / "bad.json") << "[1, 2]";
    check_error(run(d, "profile --config bad.json"), 1, "domain");
}

TEST_CASE("config file merges with flags, flags winning") {
    const fs::path d = scratch("config");
    std::ofstream(d / "cfg.json") << R"({"froude": 2.3, "n": 64, "period": 10.0, "out": "fromcfg"})";
    REQUIRE(run(d, "profile --config cfg.json --n 96").code == 0);
    const json p = json::parse(slurp(d / "fromcfg" / "profile.json"));
    CHECK(p.at("n") == 96);
    CHECK(p.at("params").at("froude") == doctest::Approx(2.3));

    std::ofstream(d / "fmt.json") << R"({"format": "csv"})";
    REQUIRE(run(d, "profile --config fmt.json --n 64 --out csvonly").code == 0);
    CHECK(fs::exists(d / "csvonly" / "profile.csv"));
    CHECK_FALSE(fs::exists(d / "csvonly" / "profile.json"));
}

TEST_CASE("scan is deterministic and independent of the worker count") {
    const fs::path d = scratch("scan");
    const std::string args = "scan --froude-min 2.1 --froude-max 2.7 --froude-step 0.2 --n 64 --no-stability";
    const Result a = run(d, args + " --out a", "ROLLWAVE_JOBS=1");
    REQUIRE(a.code == 0);
    REQUIRE(run(d, args + " --out b", "ROLLWAVE_JOBS=3").code == 0);
    REQUIRE(run(d, args + " --out c --jobs 2").code == 0);
    const std::string csv = slurp(d / "a" / "scan.csv");
    CHECK(csv == slurp(d / "b" / "scan.csv"));
    CHECK(csv == slurp(d / "c" / "scan.csv"));
    // header plus one row per F
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    const json s = json::parse(slurp(d / "a" / "scan_summary.json"));
    CHECK(s.at("branches").at(0).at("failures") == 0);
    CHECK(s.at("branches").at(0).at("averaged_positive").get<bool>());
    check_error(run(d, args + " --out e", "ROLLWAVE_JOBS=0"), 1, "domain");
}

TEST_CASE("spectrum, gauge and evolve on a saved profile") {
    const fs::path d = scratch("wrappers");
    REQUIRE(run(d, "profile --froude 2.3 --n 128 --out p").code == 0);

    const Result sp = run(d, "spectrum --profile p/profile.json --xi-points 16 --modes 48 --out s");
    REQUIRE(sp.code == 0);
    const json rep = json::parse(slurp(d / "s" / "stability.json"));
    for (const char* k : {"d1", "d2", "d3", "h", "theta", "xi_grid"}) CHECK(rep.contains(k));
    CHECK(rep.contains("hf_asymptote"));
    CHECK(fs::exists(d / "s" / "spectrum.csv"));

    const Result g = run(d, "gauge --profile p/profile.json --out g");
    REQUIRE(g.code == 0);
    CHECK(json::parse(g.out).at("coercivity_min").get<double>() > 0.0);
    CHECK(json::parse(g.out).at("periodicity_gap").get<double>() <= 1e-8);
    CHECK(fs::exists(d / "g" / "gauge.json"));
    CHECK(fs::exists(d / "g" / "gauge.csv"));

    const Result lin = run(d, "evolve --linear --profile p/profile.json --t 2 --out el");
    REQUIRE(lin.code == 0);
    const json jl = json::parse(slurp(d / "el" / "evolve.json"));
    CHECK(jl.at("fit").at("fitted_eta").get<double>() > 0.0);
    CHECK(jl.at("fit").at("violation_count") == 0);
    CHECK(fs::exists(d / "el" / "trace.csv"));
    REQUIRE(run(d, "evolve --linear --profile p/profile.json --t 2 --out el2").code == 0);
    CHECK(slurp(d / "el" / "trace.csv") == slurp(d / "el2" / "trace.csv"));

    const Result nl = run(d, "evolve --nonlinear --profile p/profile.json --t 0.5 --out en");
    REQUIRE(nl.code == 0);
    CHECK(json::parse(nl.out).at("final_L2").get<double>() < 1e-2);

    const Result mod = run(d, "evolve --modulated --profile p/profile.json --t 2 --out em");
    REQUIRE(mod.code == 0);
    const json jm = json::parse(mod.out);
    CHECK(jm.at("modulated_bounds").size() == 3);
    CHECK_FALSE(jm.at("hypothesis_violated").get<bool>());
    check_error(run(d, "evolve --modulated --profile p/profile.json --psi 'sin(' --out ex"), 1, "domain");
}

TEST_CASE("shock") {
    const fs::path d = scratch("shock");
    const Result r = run(d, "shock --evolve --t 1 --out s");
    REQUIRE(r.code == 0);
    const json s = json::parse(r.out);
    CHECK(s.at("rh_residual").get<double>() <= 1e-12);
    CHECK(s.at("coercivity_min").get<double>() > 0.0);
    CHECK(s.at("fit").at("violation_count") == 0);
    for (const char* f : {"shock.json", "shock.csv", "shock_gauge.json", "shock_gauge.csv", "shock_trace.csv"})
        CHECK(fs::exists(d / "s" / f));
}
