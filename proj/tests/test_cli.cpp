#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = fs::path(NHSE_SOURCE_DIR) / "configs";

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("nhse_test_cli_" + name);
    fs::remove_all(p);
    return p;
}

// Runs nhse-lab with the given arguments (and optional environment prefix);
// stdout and stderr go to files under the scratch area. Returns the exit code.
int lab(const std::string& args, const std::string& env = "")
{
    const std::string cmd = env + " \"" NHSE_LAB "\" " + args + " >" + (fs::temp_directory_path() / "nhse_cli_stdout").string() +
                            " 2>" + (fs::temp_directory_path() / "nhse_cli_stderr").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string stderr_text() { return slurp(fs::temp_directory_path() / "nhse_cli_stderr"); }

std::string cfg(const std::string& name) { return "--config \"" + (kConfigs / name).string() + "\""; }

}  // namespace

TEST_CASE("every shipped config runs end to end")
{
    for (const auto& entry : fs::directory_iterator(kConfigs)) {
        const std::string name = entry.path().stem().string();
        const std::string sub = name.substr(0, name.find('_'));
        CAPTURE(name);
        const auto out = scratch("all_" + name);
        const auto t0 = std::chrono::steady_clock::now();
        CHECK(lab(sub + " " + cfg(entry.path().filename().string()) + " --out \"" + out.string() + "\"") == 0);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        CHECK(secs < 60.0);
        CHECK(std::distance(fs::directory_iterator(out), fs::directory_iterator{}) >= 2);
        const auto listed = slurp(fs::temp_directory_path() / "nhse_cli_stdout");
        for (const auto& f : fs::directory_iterator(out)) CHECK(listed.find(f.path().filename().string()) != std::string::npos);
    }
}

TEST_CASE("validation errors exit with 1")
{
    const auto out = scratch("bad").string();
    CHECK(lab("spectrum --config /nonexistent.json --out " + out) == 1);
    CHECK(lab("evolve " + cfg("walk_two_pulse.json") + " --out " + out) == 1);
    CHECK(stderr_text().find("does not match") != std::string::npos);
    CHECK(lab("evolve " + cfg("evolve_hermitian_chain.json") + " --steps 10 --out " + out) == 1);
    CHECK(lab("spectrum " + cfg("spectrum_hermitian_chain.json") + " --nk 1001 --out " + out) == 1);
    CHECK(lab("walk " + cfg("walk_two_pulse.json") + " --out " + out, "NHSE_LAB_THREADS=zero") == 1);
    CHECK(lab("walk " + cfg("walk_two_pulse.json")) == 1);
    CHECK(lab("frobnicate --out " + out) == 1);
    CHECK(lab("") == 1);

    const auto dir = scratch("badcfg");
    fs::create_directories(dir);
    std::ofstream(dir / "typo.json") << R"({"schema": 1, "kind": "walk", "walk": {"beta": 1.0, "hh": 0.1}})";
    CHECK(lab("walk --config " + (dir / "typo.json").string() + " --out " + out) == 1);
    CHECK(stderr_text().find("hh") != std::string::npos);
}

TEST_CASE("numerical failure exits with 2")
{
    const auto dir = scratch("narrow");
    fs::create_directories(dir);
    std::ofstream(dir / "narrow.json") << R"({"schema": 1, "kind": "evolve", "window_halfwidth": 15, "t_final": 10,
        "model": {"hoppings": [{"r": 1, "re": 1.0}, {"r": -1, "re": 0.8}, {"r": 2, "re": 0.8}, {"r": -2, "re": 0.6}]}})";
    CHECK(lab("evolve --config " + (dir / "narrow.json").string() + " --out " + (dir / "out").string()) == 2);
    CHECK_FALSE(stderr_text().empty());
}

TEST_CASE("threshold breach exits with 3")
{
    const auto dir = scratch("breach");
    fs::create_directories(dir);
    std::ofstream(dir / "strict.json") << R"({"schema": 1, "kind": "accel_report", "seed": 1,
        "report": {"family": "general", "count": 2, "min_area": 0.3, "threshold": 1e-9}})";
    CHECK(lab("report --config " + (dir / "strict.json").string() + " --out " + (dir / "out").string()) == 3);
    CHECK(fs::exists(dir / "out" / "report.csv"));
}

TEST_CASE("overrides")
{
    const auto a = scratch("ov_a"), b = scratch("ov_b");
    CHECK(lab("spectrum " + cfg("spectrum_hermitian_chain.json") + " --nk 64 --out " + a.string()) == 0);
    const auto summary = nlohmann::json::parse(slurp(a / "summary.json"));
    CHECK(summary["nk"] == 64);

    CHECK(lab("walk " + cfg("walk_two_pulse.json") + " --steps 20 --out " + a.string()) == 0);
    const auto traj = slurp(a / "walk_trajectory.csv");
    CHECK(std::count(traj.begin(), traj.end(), '\n') == 22);

    CHECK(lab("report " + cfg("report_nhse.json") + " --seed 5 --out " + a.string()) == 0);
    CHECK(lab("report " + cfg("report_nhse.json") + " --seed 6 --out " + b.string()) == 0);
    CHECK(slurp(a / "report.csv") != slurp(b / "report.csv"));
}

TEST_CASE("output is independent of the thread cap")
{
    const auto a = scratch("thr_1"), b = scratch("thr_3");
    CHECK(lab("report " + cfg("report_nhse.json") + " --out " + a.string(), "NHSE_LAB_THREADS=1") == 0);
    CHECK(lab("report " + cfg("report_nhse.json") + " --out " + b.string(), "NHSE_LAB_THREADS=3") == 0);
    for (const char* f : {"report.csv", "report_summary.json"}) CHECK(slurp(a / f) == slurp(b / f));

    CHECK(lab("walk " + cfg("walk_two_pulse.json") + " --out " + a.string(), "NHSE_LAB_THREADS=1") == 0);
    CHECK(lab("walk " + cfg("walk_two_pulse.json") + " --out " + b.string(), "NHSE_LAB_THREADS=3") == 0);
    for (const char* f : {"walk_map.csv", "walk_trajectory.csv", "walk_fit.json", "walk.svg"})
        CHECK(slurp(a / f) == slurp(b / f));
}
