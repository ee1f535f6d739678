#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "nhse/experiments.hpp"
#include "nhse/kernels.hpp"
#include "support.hpp"

using namespace nhse;
using namespace nhse::experiments;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

// Rows of a numeric CSV, header dropped.
std::vector<std::vector<double>> read_csv(const fs::path& p)
{
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        rows.push_back(row);
    }
    return rows;
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("nhse_test_exp_" + name);
    fs::remove_all(p);
    return p;
}

io::ExperimentConfig load(const std::string& name) { return io::load_config(fs::path(NHSE_SOURCE_DIR) / "configs" / name); }

}  // namespace

TEST_CASE("relative error")
{
    const auto m = models::nonreciprocal_nnn();
    CHECK(relative_error(-1.9, -2.0, m) == doctest::Approx(0.05));
    CHECK(relative_error(1e-3, 0.0, m) == doctest::Approx(1e-3));
    CHECK(relative_error(-1e-9, 1e-8, m) == doctest::Approx(1.1e-8));
}

TEST_CASE("spectrum runs")
{
    SUBCASE("reciprocal nnn: no skin effect")
    {
        const auto out = scratch("spec_rec");
        const auto r = run(load("spectrum_reciprocal_nnn.json"), out);
        CHECK(r.exit_code == ok);
        CHECK(r.files == std::vector<std::string>{"pbc.csv", "obc.csv", "summary.json", "spectrum.svg"});
        const auto s = read_json(out / "summary.json");
        CHECK(s["nhse_flag"] == false);
        CHECK(std::abs(s["area"].get<double>()) < 1e-6);
        CHECK(read_csv(out / "pbc.csv").size() == 4096);
        CHECK(read_csv(out / "obc.csv").size() == 60);
    }
    SUBCASE("non-reciprocal nnn: area")
    {
        const auto out = scratch("spec_nr");
        run(load("spectrum_nonreciprocal_nnn.json"), out);
        const auto s = read_json(out / "summary.json");
        CHECK(s["nhse_flag"] == true);
        CHECK(std::abs(s["area"].get<double>() + 2.890) < 1e-3);
        CHECK(std::abs(s["area_closed_form"].get<double>() + 2.890) < 1e-3);
    }
    SUBCASE("Hermitian chain: real OBC spectrum")
    {
        const auto out = scratch("spec_herm");
        run(load("spectrum_hermitian_chain.json"), out);
        for (const auto& row : read_csv(out / "obc.csv")) CHECK(std::abs(row[2]) < 1e-10);
    }
}

TEST_CASE("evolve runs")
{
    SUBCASE("non-reciprocal nnn, short horizon")
    {
        auto cfg = load("evolve_nonreciprocal_nnn.json");
        cfg.t_final = 10.0;
        const auto out = scratch("evo_nr");
        const auto r = run(cfg, out);
        CHECK(r.exit_code == ok);
        const auto f = read_json(out / "fit.json");
        CHECK(f["rel_err"].get<double>() < 0.02);
        CHECK(f["bulk_valid"] == true);
        CHECK(testing::rel(f["a_predicted"].get<double>(), -1.840) < 1e-3);
        const auto tr = read_csv(out / "trajectory.csv");
        CHECK(tr.size() == 201);
        CHECK(std::abs(tr[0][1]) < 1e-15);
    }
    SUBCASE("reciprocal nnn: zero trajectory")
    {
        auto cfg = load("evolve_reciprocal_nnn.json");
        cfg.t_final = 10.0;
        const auto out = scratch("evo_rec");
        CHECK(run(cfg, out).exit_code == ok);
        for (const auto& row : read_csv(out / "trajectory.csv")) CHECK(std::abs(row[1]) < 1e-6);
    }
    SUBCASE("Hermitian chain: mirror-symmetric intensity map")
    {
        auto cfg = load("evolve_hermitian_chain.json");
        cfg.t_final = 10.0;
        const auto out = scratch("evo_herm");
        CHECK(run(cfg, out).exit_code == ok);
        std::map<std::pair<double, long>, double> map;
        for (const auto& row : read_csv(out / "intensity_map.csv")) map[{row[0], std::lround(row[1])}] = row[2];
        CHECK(map.size() > 1000);
        for (const auto& [key, value] : map) {
            const auto it = map.find({key.first, -key.second});
            REQUIRE(it != map.end());
            CHECK(std::abs(it->second - value) < 1e-8);
        }
    }
    SUBCASE("fixed window too narrow: numerical failure")
    {
        auto cfg = load("evolve_nonreciprocal_nnn.json");
        cfg.t_final = 10.0;
        cfg.window_halfwidth = 15;
        const auto r = run(cfg, scratch("evo_narrow"));
        CHECK(r.exit_code == numerical_failure);
        CHECK_FALSE(r.warnings.empty());
    }
    SUBCASE("rk4 engine")
    {
        auto cfg = load("evolve_nonreciprocal_nnn.json");
        cfg.t_final = 2.0;
        cfg.engine = "rk4";
        const auto out = scratch("evo_rk4");
        CHECK(run(cfg, out).exit_code == ok);
        CHECK(read_json(out / "fit.json")["engine"] == "rk4");
    }
}

TEST_CASE("walk runs")
{
    SUBCASE("two-pulse parabola")
    {
        const auto out = scratch("walk2");
        const auto r = run(load("walk_two_pulse.json"), out);
        CHECK(r.exit_code == ok);
        const auto f = read_json(out / "walk_fit.json");
        CHECK(f["rel_err"].get<double>() < 0.05);
        CHECK(testing::rel(f["a_predicted"].get<double>(), -2.451e-3) < 1e-3);
        const auto map = read_csv(out / "walk_map.csv");
        CHECK(map.size() == 41 * 101);
    }
    SUBCASE("no gain: flat zero trajectory")
    {
        const auto out = scratch("walk0");
        CHECK(run(load("walk_no_gain.json"), out).exit_code == ok);
        for (const auto& row : read_csv(out / "walk_trajectory.csv")) CHECK(std::abs(row[1]) < 1e-12);
    }
    SUBCASE("walk fit helper")
    {
        const auto f = walk_acceleration_fit({0.9 * testing::pi / 2, 0.05}, "two_pulse", 40, 15);
        CHECK(f.history.size() == 41);
        CHECK(f.report.n_points == 16);
        CHECK_THROWS_AS(walk_acceleration_fit({1.0, 0.0}, "three_pulse", 40, 15), std::invalid_argument);
    }
}

TEST_CASE("acceleration reports")
{
    SUBCASE("case II models: no motion")
    {
        const auto out = scratch("rep_rec");
        const auto r = run(load("report_reciprocal.json"), out);
        CHECK(r.exit_code == ok);
        for (const auto& row : read_csv(out / "report.csv")) {
            CHECK(row[2] == 0.0);
            CHECK(std::abs(row[3]) < 1e-10);
        }
    }
    SUBCASE("NHSE models: law holds within 2%")
    {
        const auto out = scratch("rep_nhse");
        const auto r = run(load("report_nhse.json"), out);
        CHECK(r.exit_code == ok);
        const auto s = read_json(out / "report_summary.json");
        CHECK(s["max_rel_err"].get<double>() < 0.02);
        CHECK(s["failures"].empty());
        CHECK(read_csv(out / "report.csv").size() == 20);
    }
    SUBCASE("byte-identical across reruns and thread counts")
    {
        const auto cfg = load("report_nhse.json");
        const int saved = kernels::thread_limit();
        kernels::set_thread_limit(1);
        run(cfg, scratch("rep_a"));
        kernels::set_thread_limit(4);
        run(cfg, scratch("rep_b"));
        run(cfg, scratch("rep_c"));
        kernels::set_thread_limit(saved);
        for (const char* f : {"report.csv", "report_summary.json"}) {
            const auto a = slurp(fs::temp_directory_path() / "nhse_test_exp_rep_a" / f);
            CHECK(a == slurp(fs::temp_directory_path() / "nhse_test_exp_rep_b" / f));
            CHECK(a == slurp(fs::temp_directory_path() / "nhse_test_exp_rep_c" / f));
            CHECK_FALSE(a.empty());
        }
    }
    SUBCASE("threshold breach")
    {
        auto cfg = load("report_nhse.json");
        cfg.report->threshold = 1e-6;
        cfg.report->count = 3;
        const auto out = scratch("rep_breach");
        CHECK(run(cfg, out).exit_code == threshold_breach);
        CHECK(read_json(out / "report_summary.json")["breaches"].size() == 3);
    }
    SUBCASE("rows are indexed by model id")
    {
        const auto rows = accel_report_rows({"general", 5, 0.3, 3, 0.05, "with_cubic"}, 9, 4096, Engine::bloch);
        REQUIRE(rows.size() == 5);
        for (int i = 0; i < 5; ++i) {
            CHECK(rows[i].model_id == i);
            CHECK(rows[i].error.empty());
            CHECK(std::abs(rows[i].area) > 0.3);
        }
    }
}

TEST_CASE("determinism of figure outputs")
{
    for (const char* name : {"spectrum_nonreciprocal_nnn.json", "walk_single_pulse.json"}) {
        CAPTURE(name);
        const auto cfg = load(name);
        const auto a = scratch("det_a"), b = scratch("det_b");
        const auto ra = run(cfg, a);
        run(cfg, b);
        for (const auto& f : ra.files) CHECK(slurp(a / f) == slurp(b / f));
    }
}

TEST_CASE("unwritable output directory")
{
    const auto file = scratch("blocker");
    io::write_text(file, "x");
    CHECK_THROWS_AS(run(load("walk_two_pulse.json"), file / "sub"), std::invalid_argument);
    fs::remove(file);
}
