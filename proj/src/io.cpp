#include "nhse/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "nhse/random_models.hpp"

namespace nhse::io {

namespace {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where)
{
    if (!obj.is_object()) throw std::invalid_argument(where + ": expected a JSON object");
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key)) throw std::invalid_argument(where + ": unknown field '" + key + "'");
}

template <class T>
void read(const json& obj, const char* key, T& out)
{
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

void require(bool ok, const std::string& msg)
{
    if (!ok) throw std::invalid_argument("config: " + msg);
}

LatticeModel model_from(const json& j)
{
    reject_unknown(j, {"label", "hoppings"}, "model");
    std::string label;
    read(j, "label", label);
    if (!j.contains("hoppings") || !j.at("hoppings").is_array())
        throw std::invalid_argument("model: 'hoppings' must be an array");
    std::map<int, cplx> hops;
    for (const auto& h : j.at("hoppings")) {
        reject_unknown(h, {"r", "re", "im"}, "model.hoppings");
        if (!h.contains("r") || !h.contains("re")) throw std::invalid_argument("model.hoppings: need 'r' and 're'");
        const int r = h.at("r").get<int>();
        const double re = h.at("re").get<double>();
        const double im = h.contains("im") ? h.at("im").get<double>() : 0.0;
        if (hops.count(r)) throw std::invalid_argument("model.hoppings: duplicate r = " + std::to_string(r));
        hops[r] = cplx(re, im);
    }
    return LatticeModel(std::move(hops), label);
}

ojson model_json(const LatticeModel& m)
{
    ojson hops = ojson::array();
    for (const auto& [r, t] : m.hoppings()) hops.push_back({{"r", r}, {"re", t.real()}, {"im", t.imag()}});
    return {{"label", m.label()}, {"hoppings", hops}};
}

WindowSpec window_from(const json& j, const char* where)
{
    if (!j.is_array() || j.size() != 2) throw std::invalid_argument(std::string(where) + ": expected [lo, hi]");
    return {j[0].get<double>(), j[1].get<double>()};
}

ExperimentConfig config_from(const json& j)
{
    reject_unknown(j,
                   {"schema", "kind", "model", "walk", "report", "nk", "obc_size", "dt", "t_final", "sample_dt",
                    "engine", "window_halfwidth", "fit_form", "fit_window", "drift_window", "seed", "output_dir"},
                   "config");
    ExperimentConfig c;
    if (!j.contains("schema")) throw std::invalid_argument("config: missing 'schema'");
    c.schema = j.at("schema").get<int>();
    if (c.schema != kSchemaVersion)
        throw std::invalid_argument("config: unsupported schema " + std::to_string(c.schema));
    if (!j.contains("kind")) throw std::invalid_argument("config: missing 'kind'");
    c.kind = parse_kind(j.at("kind").get<std::string>());
    if (j.contains("model")) c.model = model_from(j.at("model"));
    if (j.contains("walk")) {
        const json& w = j.at("walk");
        reject_unknown(w, {"beta", "h", "protocol", "steps", "window_halfwidth", "fit_max_step"}, "walk");
        WalkSpec s;
        if (!w.contains("beta")) throw std::invalid_argument("walk: missing 'beta'");
        read(w, "beta", s.beta);
        read(w, "h", s.h);
        read(w, "protocol", s.protocol);
        read(w, "steps", s.steps);
        read(w, "window_halfwidth", s.window_halfwidth);
        read(w, "fit_max_step", s.fit_max_step);
        c.walk = s;
    }
    if (j.contains("report")) {
        const json& r = j.at("report");
        reject_unknown(r, {"family", "count", "min_area", "max_range", "threshold", "fit_form"}, "report");
        ReportSpec s;
        read(r, "family", s.family);
        read(r, "count", s.count);
        read(r, "min_area", s.min_area);
        read(r, "max_range", s.max_range);
        read(r, "threshold", s.threshold);
        read(r, "fit_form", s.fit_form);
        c.report = s;
    }
    read(j, "nk", c.nk);
    read(j, "obc_size", c.obc_size);
    read(j, "dt", c.dt);
    read(j, "t_final", c.t_final);
    read(j, "sample_dt", c.sample_dt);
    read(j, "engine", c.engine);
    read(j, "window_halfwidth", c.window_halfwidth);
    read(j, "fit_form", c.fit_form);
    if (j.contains("fit_window")) c.fit_window = window_from(j.at("fit_window"), "fit_window");
    if (j.contains("drift_window")) c.drift_window = window_from(j.at("drift_window"), "drift_window");
    read(j, "seed", c.seed);
    read(j, "output_dir", c.output_dir);
    return c;
}

}  // namespace

const char* kind_name(Kind kind)
{
    switch (kind) {
        case Kind::spectrum: return "spectrum";
        case Kind::evolve: return "evolve";
        case Kind::walk: return "walk";
        case Kind::accel_report: return "accel_report";
    }
    return "unknown";
}

Kind parse_kind(const std::string& name)
{
    for (Kind k : {Kind::spectrum, Kind::evolve, Kind::walk, Kind::accel_report})
        if (name == kind_name(k)) return k;
    throw std::invalid_argument("config: unknown kind '" + name + "'");
}

Engine parse_engine(const std::string& name)
{
    for (Engine e : {Engine::bloch, Engine::rk4, Engine::spectral_formula})
        if (name == engine_name(e)) return e;
    throw std::invalid_argument("config: unknown engine '" + name + "'");
}

analysis::ParabolaForm parse_fit_form(const std::string& name)
{
    if (name == "pure") return analysis::ParabolaForm::pure;
    if (name == "with_cubic") return analysis::ParabolaForm::with_cubic;
    throw std::invalid_argument("config: unknown fit_form '" + name + "'");
}

void ExperimentConfig::validate() const
{
    require(schema == kSchemaVersion, "schema must be 1");
    require(nk >= kMinSpectrumSamples && nk % 2 == 0 && nk <= (1 << 20), "nk must be even and in [16, 2^20]");
    require(obc_size >= 4 && obc_size <= 4000, "obc_size must be in [4, 4000]");
    require(std::isfinite(dt) && dt > 0.0 && dt <= 1.0, "dt must be in (0, 1]");
    require(std::isfinite(t_final) && t_final > 0.0 && t_final <= 1e4, "t_final must be in (0, 1e4]");
    require(std::isfinite(sample_dt) && sample_dt > 0.0 && sample_dt <= t_final, "sample_dt must be in (0, t_final]");
    require(t_final / sample_dt <= 1e5, "t_final / sample_dt exceeds 1e5 samples");
    parse_engine(engine);
    parse_fit_form(fit_form);
    require(window_halfwidth >= 0 && window_halfwidth <= 1000000, "window_halfwidth must be in [0, 1e6]");
    if (fit_window)
        require(fit_window->lo >= 0.0 && fit_window->lo < fit_window->hi && fit_window->hi <= t_final,
                "fit_window must satisfy 0 <= lo < hi <= t_final");
    if (drift_window)
        require(drift_window->lo >= 0.5 * t_final && drift_window->lo < drift_window->hi &&
                    drift_window->hi <= t_final,
                "drift_window must satisfy t_final/2 <= lo < hi <= t_final");

    switch (kind) {
        case Kind::spectrum:
        case Kind::evolve:
            require(model.has_value(), std::string("kind '") + kind_name(kind) + "' needs a 'model' block");
            if (kind == Kind::spectrum)
                require(obc_size >= 4 * model->range() + 4, "obc_size must be at least 4R + 4");
            break;
        case Kind::walk: {
            require(walk.has_value(), "kind 'walk' needs a 'walk' block");
            const WalkSpec& w = *walk;
            require(std::isfinite(w.beta) && w.beta > 0.0 && w.beta < std::numbers::pi, "walk.beta must lie in (0, pi)");
            require(std::isfinite(w.h) && std::abs(w.h) <= 5.0, "walk.h must be finite with |h| <= 5");
            require(w.protocol == "two_pulse" || w.protocol == "single_pulse",
                    "walk.protocol must be two_pulse or single_pulse");
            require(w.steps >= 1 && w.steps <= 100000, "walk.steps must be in [1, 1e5]");
            require(w.window_halfwidth >= 0 && w.window_halfwidth <= 1000000, "walk.window_halfwidth must be >= 0");
            require(w.fit_max_step >= 2 && w.fit_max_step <= w.steps, "walk.fit_max_step must be in [2, steps]");
            break;
        }
        case Kind::accel_report: {
            require(report.has_value(), "kind 'accel_report' needs a 'report' block");
            const ReportSpec& r = *report;
            const auto fam = random::parse_family(r.family);
            require(r.count >= 1 && r.count <= 10000, "report.count must be in [1, 10000]");
            require(std::isfinite(r.min_area) && r.min_area >= 0.0, "report.min_area must be >= 0");
            require(r.min_area == 0.0 || (fam != random::Family::reciprocal && fam != random::Family::case_ii),
                    "report.min_area must be 0 for reciprocal families");
            require(r.max_range >= 1 && r.max_range <= 10, "report.max_range must be in [1, 10]");
            require(std::isfinite(r.threshold) && r.threshold > 0.0, "report.threshold must be positive");
            parse_fit_form(r.fit_form);
            break;
        }
    }
}

ExperimentConfig parse_config(const std::string& json_text)
{
    ExperimentConfig c;
    try {
        c = config_from(json::parse(json_text));
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c)
{
    ojson j;
    j["schema"] = c.schema;
    j["kind"] = kind_name(c.kind);
    if (c.model) j["model"] = model_json(*c.model);
    if (c.walk)
        j["walk"] = {{"beta", c.walk->beta},
                     {"h", c.walk->h},
                     {"protocol", c.walk->protocol},
                     {"steps", c.walk->steps},
                     {"window_halfwidth", c.walk->window_halfwidth},
                     {"fit_max_step", c.walk->fit_max_step}};
    if (c.report)
        j["report"] = {{"family", c.report->family},       {"count", c.report->count},
                       {"min_area", c.report->min_area},   {"max_range", c.report->max_range},
                       {"threshold", c.report->threshold}, {"fit_form", c.report->fit_form}};
    j["nk"] = c.nk;
    j["obc_size"] = c.obc_size;
    j["dt"] = c.dt;
    j["t_final"] = c.t_final;
    j["sample_dt"] = c.sample_dt;
    j["engine"] = c.engine;
    j["window_halfwidth"] = c.window_halfwidth;
    j["fit_form"] = c.fit_form;
    if (c.fit_window) j["fit_window"] = {c.fit_window->lo, c.fit_window->hi};
    if (c.drift_window) j["drift_window"] = {c.drift_window->lo, c.drift_window->hi};
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;
    return j.dump(2) + "\n";
}

std::string model_to_json(const LatticeModel& model) { return model_json(model).dump(2) + "\n"; }

LatticeModel model_from_json(const std::string& json_text)
{
    try {
        return model_from(json::parse(json_text));
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("model: ") + e.what());
    }
}

std::string format_double(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x + 0.0);  // no "-0"
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) : path_(path)
{
    for (std::size_t i = 0; i < header.size(); ++i) buffer_ += (i ? "," : "") + header[i];
    buffer_ += '\n';
}

CsvWriter& CsvWriter::cell(double x) { return cell(format_double(x)); }

CsvWriter& CsvWriter::cell(long x) { return cell(std::to_string(x)); }

CsvWriter& CsvWriter::cell(const std::string& s)
{
    if (row_open_) buffer_ += ',';
    buffer_ += s;
    row_open_ = true;
    return *this;
}

void CsvWriter::end_row()
{
    buffer_ += '\n';
    row_open_ = false;
}

void CsvWriter::close() { write_text(path_, buffer_); }

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

void prepare_output_dir(const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::invalid_argument("output directory " + dir.string() + ": " + ec.message());
    const auto probe = dir / ".nhse_write_probe";
    {
        std::ofstream out(probe);
        if (!out) throw std::invalid_argument("output directory " + dir.string() + " is not writable");
    }
    std::filesystem::remove(probe, ec);
}

// ---- SVG ----------------------------------------------------------------

namespace {

std::string num(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char ch : s) {
        if (ch == '<') out += "&lt;";
        else if (ch == '>') out += "&gt;";
        else if (ch == '&') out += "&amp;";
        else out += ch;
    }
    return out;
}

// white -> orange -> dark red
std::string ramp(double v)
{
    v = std::clamp(v, 0.0, 1.0);
    const double a[3] = {255, 255, 255}, b[3] = {253, 141, 60}, c[3] = {128, 0, 38};
    int rgb[3];
    for (int i = 0; i < 3; ++i)
        rgb[i] = static_cast<int>(v < 0.5 ? a[i] + (b[i] - a[i]) * 2 * v : b[i] + (c[i] - b[i]) * (2 * v - 1));
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
    return buf;
}

}  // namespace

SvgDocument::SvgDocument(int width, int height) : width_(width), height_(height) {}

SvgDocument::Panel SvgDocument::panel(double x0, double y0, double w, double h, double xmin, double xmax, double ymin,
                                      double ymax)
{
    if (!(xmax > xmin)) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (!(ymax > ymin)) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    return {x0, y0, w, h, xmin, xmax, ymin, ymax};
}

namespace {

std::pair<double, double> map(const SvgDocument::Panel& p, double x, double y)
{
    return {p.x0 + (x - p.xmin) / (p.xmax - p.xmin) * p.w, p.y0 + p.h - (y - p.ymin) / (p.ymax - p.ymin) * p.h};
}

}  // namespace

void SvgDocument::frame(const Panel& p, const std::string& title)
{
    body_ += "<rect x=\"" + num(p.x0) + "\" y=\"" + num(p.y0) + "\" width=\"" + num(p.w) + "\" height=\"" + num(p.h) +
             "\" fill=\"none\" stroke=\"#444\"/>\n";
    text(p.x0, p.y0 - 6, title);
    text(p.x0, p.y0 + p.h + 16, num(p.xmin), 10);
    text(p.x0 + p.w - 30, p.y0 + p.h + 16, num(p.xmax), 10);
    text(p.x0 - 44, p.y0 + p.h, num(p.ymin), 10);
    text(p.x0 - 44, p.y0 + 10, num(p.ymax), 10);
}

void SvgDocument::polyline(const Panel& p, const std::vector<std::pair<double, double>>& pts, const std::string& color,
                           double width, bool dashed)
{
    if (pts.empty()) return;
    body_ += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" + num(width) + "\"";
    if (dashed) body_ += " stroke-dasharray=\"6,4\"";
    body_ += " points=\"";
    for (const auto& [x, y] : pts) {
        const auto [px, py] = map(p, x, y);
        body_ += num(px) + "," + num(py) + " ";
    }
    body_ += "\"/>\n";
}

void SvgDocument::circles(const Panel& p, const std::vector<std::pair<double, double>>& pts, double radius,
                          const std::string& color)
{
    for (const auto& [x, y] : pts) {
        const auto [px, py] = map(p, x, y);
        body_ += "<circle cx=\"" + num(px) + "\" cy=\"" + num(py) + "\" r=\"" + num(radius) +
                 "\" fill=\"none\" stroke=\"" + color + "\"/>\n";
    }
}

void SvgDocument::heatmap(const Panel& p, const std::vector<std::vector<double>>& rows)
{
    if (rows.empty() || rows.front().empty()) return;
    const double ch = p.h / static_cast<double>(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double cw = p.w / static_cast<double>(rows[i].size());
        const double y = p.y0 + p.h - (i + 1) * ch;
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            if (rows[i][j] < 1e-3) continue;  // background shows through
            body_ += "<rect x=\"" + num(p.x0 + j * cw) + "\" y=\"" + num(y) + "\" width=\"" + num(cw + 0.3) +
                     "\" height=\"" + num(ch + 0.3) + "\" fill=\"" + ramp(rows[i][j]) + "\"/>\n";
        }
    }
}

void SvgDocument::text(double x, double y, const std::string& s, int size)
{
    body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"sans-serif\" font-size=\"" +
             std::to_string(size) + "\">" + escape(s) + "</text>\n";
}

std::string SvgDocument::str() const
{
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width_) + "\" height=\"" +
           std::to_string(height_) + "\" viewBox=\"0 0 " + std::to_string(width_) + " " + std::to_string(height_) +
           "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + body_ + "</svg>\n";
}

}  // namespace nhse::io
