// Drives the alox executable end to end and checks exit codes and artifacts.
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

#include "alox/stats.hpp"
#include "scratch_dir.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(ALOX_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t data_rows(const fs::path& csv) {
    std::ifstream in(csv);
    std::string line;
    std::size_t n = 0;
    std::getline(in, line);
    while (std::getline(in, line)) ++n;
    return n;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

} // namespace

TEST_CASE("fit-stats from a count file") {
    scratch_dir dir("cli-fit");
    {
        std::ofstream out(dir.path / "counts.txt");
        for (int n : alox::sample(alox::beta_binomial(17.69, 15.36, 40), 12, 400)) out << n << '\n';
    }
    CHECK(run("fit-stats --counts " + q(dir.path / "counts.txt") + " --m fixed=40 --out " + q(dir.path / "o")) == 0);
    const auto j = nlohmann::json::parse(slurp(dir.path / "o" / "fit.json"));
    CHECK(j["M"] == 40);
    CHECK(std::abs(j["mean"].get<double>() - 21.41) < 0.5);
    for (const char* key : {"alpha", "beta", "M", "log_likelihood", "mean", "std"}) CHECK(j.contains(key));
    CHECK(data_rows(dir.path / "o" / "histogram.csv") == 41);

    std::ofstream(dir.path / "empty.txt").close();
    CHECK(run("fit-stats --counts " + q(dir.path / "empty.txt") + " --out " + q(dir.path / "o2")) == 2);
    CHECK(run("fit-stats --counts " + q(dir.path / "missing.txt") + " --out " + q(dir.path / "o2")) == 2);
    std::ofstream(dir.path / "flat.txt") << "5\n5\n5\n";
    CHECK(run("fit-stats --counts " + q(dir.path / "flat.txt") + " --out " + q(dir.path / "o2")) == 3);
    CHECK(run("fit-stats --out " + q(dir.path / "o2")) == 2);
    CHECK(run("fit-stats --counts " + q(dir.path / "counts.txt") + " --m fixed=oops") == 2);
}

TEST_CASE("analyze tolerates one corrupt file") {
    scratch_dir dir("cli-analyze");
    const auto xyz = dir.path / "xyz";
    CHECK(run("synth --samples 3 --lateral 8 --length 15.2 --layers 2 --trials 6 --out " + q(xyz)) == 0);
    CHECK(run("analyze --structures " + q(xyz) + " --out " + q(dir.path / "a")) == 0);
    CHECK(data_rows(dir.path / "a" / "stoichiometry.csv") == 3);
    const auto table = nlohmann::json::parse(slurp(dir.path / "a" / "motif_table.json"));
    CHECK(table["classes"].size() == 9);

    std::ofstream(xyz / "sample_0001.xyz") << "10\ncorrupt\nAl 0 0\n";
    CHECK(run("analyze --structures " + q(xyz) + " --out " + q(dir.path / "b")) == 0);
    CHECK(data_rows(dir.path / "b" / "stoichiometry.csv") == 2);

    for (const auto& e : fs::directory_iterator(xyz)) std::ofstream(e.path()) << "garbage\n";
    CHECK(run("analyze --structures " + q(xyz) + " --out " + q(dir.path / "c")) == 2);
}

TEST_CASE("transmission grid flag and calibration sidecar") {
    scratch_dir dir("cli-tx");
    CHECK(run("transmission --grid 101 --out " + q(dir.path)) == 0);
    CHECK(data_rows(dir.path / "transmission_jj.csv") == 101);
    CHECK(data_rows(dir.path / "transmission_jjh.csv") == 101);
    const auto cal = nlohmann::json::parse(slurp(dir.path / "calibration.json"));
    CHECK(std::abs(cal["t_jj"].get<double>() / 1.61e-5 - 1) < 1e-3);
    CHECK(std::abs(cal["t_jjh"].get<double>() / 1.74e-5 - 1) < 1e-3);
    CHECK(cal["curve_shift_ev"].get<double>() > 0);
    const auto first = slurp(dir.path / "transmission_jj.csv");
    CHECK(run("transmission --grid 101 --threads 3 --out " + q(dir.path)) == 0);
    CHECK(slurp(dir.path / "transmission_jj.csv") == first);

    std::ofstream(dir.path / "bad.ini") << "[transport]\nheight_min = 0.5\nheight_max = 1.0\n";
    CHECK(run("--config " + q(dir.path / "bad.ini") + " transmission --out " + q(dir.path / "x")) == 3);
}

TEST_CASE("ej with inline parameters and from upstream artifacts") {
    scratch_dir dir("cli-ej");
    CHECK(run("ej --out " + q(dir.path / "none")) == 2);
    CHECK(run("ej --t-jj 1.61e-5 --t-jjh 1.74e-5 --alpha 17.69 --beta 15.36 --trials 40 --out " + q(dir.path)) == 0);
    const auto j = nlohmann::json::parse(slurp(dir.path / "ej_report.json"));
    CHECK(std::abs(j["mean_ghz"].get<double>() - 10.92) < 0.05);
    CHECK(std::abs(j["std_ghz"].get<double>() - 0.26) < 0.02);
    // emitted probabilities still sum to one after rounding to 12 digits
    std::ifstream pmf(dir.path / "ej_pmf.csv");
    std::string line;
    std::getline(pmf, line);
    CHECK(line == "ej_ghz,probability");
    double total = 0;
    int rows = 0;
    while (std::getline(pmf, line)) {
        total += std::stod(line.substr(line.find(',') + 1));
        ++rows;
    }
    CHECK(rows == 41);
    CHECK(std::abs(total - 1) < 1e-9);

    CHECK(run("ej --t-jj 1.61e-5 --t-jjh 1.61e-5 --alpha 17.69 --beta 15.36 --trials 40 --out " + q(dir.path / "flat")) ==
          0);
    CHECK(nlohmann::json::parse(slurp(dir.path / "flat" / "ej_report.json"))["std_ghz"].get<double>() == 0.0);
}

TEST_CASE("pipeline end to end, deterministic across thread counts") {
    scratch_dir dir("cli-pipe");
    CHECK(run("synth --samples 5 --lateral 8 --length 15.2 --layers 2 --trials 8 --seed 4 --out " + q(dir.path / "xyz")) ==
          0);
    std::ofstream(dir.path / "run.ini") << "[paths]\nstructures = xyz\n[run]\nseed = 4\n[transport]\ngrid = 201\n";
    CHECK(run("--config " + q(dir.path / "run.ini") + " --threads 1 --out " + q(dir.path / "t1") + " pipeline") == 0);
    CHECK(run("pipeline --config " + q(dir.path / "run.ini") + " --threads 4 --out " + q(dir.path / "t4")) == 0);
    const auto m = nlohmann::json::parse(slurp(dir.path / "t1" / "manifest.json"));
    REQUIRE(m["stages"].size() == 4);
    for (const auto& s : m["stages"]) CHECK(s["status"] == "completed");
    for (const auto& e : fs::directory_iterator(dir.path / "t1")) {
        CAPTURE(e.path().filename().string());
        CHECK(slurp(e.path()) == slurp(dir.path / "t4" / e.path().filename()));
    }
    CHECK(run("pipeline --out " + q(dir.path / "none")) == 2);
    const auto failed = nlohmann::json::parse(slurp(dir.path / "none" / "manifest.json"));
    CHECK(failed["stages"][0]["status"] == "failed");
    CHECK(failed["stages"][3]["status"] == "skipped");
}

TEST_CASE("usage errors") {
    CHECK(run("") == 2);
    CHECK(run("frobnicate") == 2);
    CHECK(run("--help") == 0);
    CHECK(run("--config /nonexistent.ini analyze") == 2);
}
