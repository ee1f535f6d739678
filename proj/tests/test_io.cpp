#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "nhse/io.hpp"
#include "support.hpp"

using namespace nhse;
using namespace nhse::io;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("nhse_test_io_" + name);
    fs::remove_all(p);
    return p;
}

const char* kEvolve = R"({
  "schema": 1, "kind": "evolve",
  "model": {"label": "hn", "hoppings": [{"r": 1, "re": 1.0}, {"r": -1, "re": 0.6, "im": 0.1}]},
  "t_final": 10, "sample_dt": 0.1, "fit_window": [0, 0.5], "drift_window": [8, 10], "fit_form": "with_cubic"
})";

}  // namespace

TEST_CASE("config parsing")
{
    SUBCASE("defaults and explicit fields")
    {
        const auto c = parse_config(kEvolve);
        CHECK(c.kind == Kind::evolve);
        REQUIRE(c.model);
        CHECK(c.model->label() == "hn");
        CHECK(c.model->hopping(-1) == cplx(0.6, 0.1));
        CHECK(c.nk == 4096);
        CHECK(c.dt == 0.005);
        CHECK(c.engine == "bloch");
        CHECK(c.fit_window->hi == 0.5);
        CHECK(c.drift_window->lo == 8.0);
        CHECK(c.fit_form == "with_cubic");
    }
    SUBCASE("round trip")
    {
        const auto c = parse_config(kEvolve);
        CHECK(parse_config(serialize_config(c)) == c);
        const auto w = parse_config(R"({"schema": 1, "kind": "walk", "walk": {"beta": 1.2, "h": -0.1, "protocol": "single_pulse"}})");
        CHECK(w.walk->steps == 40);
        CHECK(parse_config(serialize_config(w)) == w);
        const auto r = parse_config(R"({"schema": 1, "kind": "accel_report", "report": {"family": "case_i", "count": 3}, "seed": 18446744073709551615})");
        CHECK(r.seed == 18446744073709551615ull);
        CHECK(parse_config(serialize_config(r)) == r);
    }
    SUBCASE("model json round trip")
    {
        const LatticeModel m({{-2, cplx(0.1, 0.2)}, {1, 1.0 / 3.0}}, "m");
        CHECK(model_from_json(model_to_json(m)) == m);
    }
    SUBCASE("rejections")
    {
        auto bad = [](const std::string& text) { CHECK_THROWS_AS(parse_config(text), std::invalid_argument); };
        bad("{ not json");
        bad(R"({"kind": "evolve"})");
        bad(R"({"schema": 2, "kind": "walk", "walk": {"beta": 1.0}})");
        bad(R"({"schema": 1, "kind": "walk", "walk": {"beta": 1.0}, "colour": 3})");
        bad(R"({"schema": 1, "kind": "walk", "walk": {"beta": 1.0, "gain": 3}})");
        bad(R"({"schema": 1, "kind": "walk", "walk": {"beta": 4.0}})");
        bad(R"({"schema": 1, "kind": "walk", "walk": {"beta": 1.0, "protocol": "three_pulse"}})");
        bad(R"({"schema": 1, "kind": "walk", "walk": {"beta": 1.0, "steps": 10, "fit_max_step": 20}})");
        bad(R"({"schema": 1, "kind": "walk"})");
        bad(R"({"schema": 1, "kind": "evolve"})");
        bad(R"({"schema": 1, "kind": "magic"})");
        bad(R"({"schema": 1, "kind": "spectrum", "model": {"hoppings": [{"r": 1, "re": 1.0, "phase": 0}]}})");
        bad(R"({"schema": 1, "kind": "spectrum", "model": {"hoppings": [{"r": 1, "re": 1.0}, {"r": 1, "re": 2.0}]}})");
        bad(R"({"schema": 1, "kind": "spectrum", "model": {"hoppings": [{"r": 0, "re": 1.0}]}})");
        bad(R"({"schema": 1, "kind": "spectrum", "model": {"hoppings": [{"r": 3, "re": 1.0}]}, "obc_size": 10})");
        bad(R"({"schema": 1, "kind": "spectrum", "model": {"hoppings": [{"r": 1, "re": 1.0}]}, "nk": 1001})");
        bad(R"({"schema": 1, "kind": "evolve", "model": {"hoppings": [{"r": 1, "re": 1.0}]}, "engine": "euler"})");
        bad(R"({"schema": 1, "kind": "evolve", "model": {"hoppings": [{"r": 1, "re": 1.0}]}, "dt": -1})");
        bad(R"({"schema": 1, "kind": "evolve", "model": {"hoppings": [{"r": 1, "re": 1.0}]}, "t_final": 10, "fit_window": [0, 20]})");
        bad(R"({"schema": 1, "kind": "evolve", "model": {"hoppings": [{"r": 1, "re": 1.0}]}, "t_final": 10, "drift_window": [1, 10]})");
        bad(R"({"schema": 1, "kind": "evolve", "model": {"hoppings": [{"r": 1, "re": "one"}]}})");
        bad(R"({"schema": 1, "kind": "accel_report", "report": {"family": "reciprocal", "min_area": 0.3}})");
        bad(R"({"schema": 1, "kind": "accel_report", "report": {"family": "general", "count": 0}})");
        bad(R"({"schema": 1, "kind": "accel_report", "report": {"family": "odd"}})");
        bad(R"({"schema": 1, "kind": "accel_report", "report": {"fit_form": "quartic"}})");
    }
    SUBCASE("load from file")
    {
        const auto dir = scratch("load");
        fs::create_directories(dir);
        write_text(dir / "c.json", kEvolve);
        CHECK(load_config(dir / "c.json") == parse_config(kEvolve));
        CHECK_THROWS_AS(load_config(dir / "missing.json"), std::invalid_argument);
        fs::remove_all(dir);
    }
    SUBCASE("shipped configs parse")
    {
        const fs::path configs = fs::path(NHSE_SOURCE_DIR) / "configs";
        int n = 0;
        for (const auto& e : fs::directory_iterator(configs)) {
            CAPTURE(e.path().string());
            CHECK_NOTHROW(load_config(e.path()));
            ++n;
        }
        CHECK(n >= 10);
    }
    CHECK(parse_engine("rk4") == Engine::rk4);
    CHECK(parse_fit_form("pure") == analysis::ParabolaForm::pure);
}

TEST_CASE("number formatting and CSV")
{
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(format_double(NAN) == "nan");
    CHECK(format_double(-INFINITY) == "-inf");
    CHECK(format_double(2.0) == "2");
    CHECK(format_double(-0.0) == "0");

    const auto dir = scratch("csv");
    fs::create_directories(dir);
    CsvWriter w(dir / "t.csv", {"a", "b", "c"});
    w.cell(0.5).cell(7L).cell(std::string("x"));
    w.end_row();
    w.cell(-1e-300).cell(0L).cell(std::string("y"));
    w.end_row();
    w.close();
    CHECK(slurp(dir / "t.csv") == "a,b,c\n0.5,7,x\n-1e-300,0,y\n");
    fs::remove_all(dir);
}

TEST_CASE("output directory")
{
    const auto dir = scratch("out") / "nested" / "deeper";
    CHECK_NOTHROW(prepare_output_dir(dir));
    CHECK(fs::is_directory(dir));
    const auto file = scratch("file");
    write_text(file, "x");
    CHECK_THROWS_AS(prepare_output_dir(file), std::invalid_argument);
    fs::remove(file);
    fs::remove_all(scratch("out"));
}

TEST_CASE("svg document")
{
    SvgDocument svg(200, 100);
    const auto p = svg.panel(10, 10, 180, 80, 0.0, 1.0, -1.0, 1.0);
    svg.frame(p, "a < b & c");
    svg.polyline(p, {{0.0, 0.0}, {0.5, 1.0}, {1.0, -1.0}}, "#123456");
    svg.circles(p, {{0.5, 0.5}}, 2.0, "red");
    svg.heatmap(p, {{0.0, 0.5}, {1.0, 0.0005}});
    svg.text(5, 95, "label");
    const std::string s = svg.str();
    CHECK(s.rfind("<svg", 0) == 0);
    CHECK(s.find("</svg>") != std::string::npos);
    CHECK(s.find("a &lt; b &amp; c") != std::string::npos);
    CHECK(s.find("#123456") != std::string::npos);
    CHECK(s.find("<circle") != std::string::npos);
    // background, frame and two heat-map cells (0 and 5e-4 are skipped)
    std::size_t rects = 0;
    for (std::size_t pos = s.find("<rect"); pos != std::string::npos; pos = s.find("<rect", pos + 1)) ++rects;
    CHECK(rects == 4);
}
