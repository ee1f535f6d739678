#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nhse/analysis.hpp"
#include "nhse/lattice_model.hpp"
#include "nhse/spectrum.hpp"

namespace nhse::io {

inline constexpr int kSchemaVersion = 1;

enum class Kind { spectrum, evolve, walk, accel_report };

const char* kind_name(Kind kind);
Kind parse_kind(const std::string& name);

struct WindowSpec {
    double lo = 0.0;
    double hi = 0.0;
    friend bool operator==(const WindowSpec&, const WindowSpec&) = default;
};

struct WalkSpec {
    double beta = 0.0;
    double h = 0.0;
    std::string protocol = "two_pulse";  // two_pulse | single_pulse
    int steps = 40;
    int window_halfwidth = 0;  // 0: steps + 10
    int fit_max_step = 15;
    friend bool operator==(const WalkSpec&, const WalkSpec&) = default;
};

struct ReportSpec {
    std::string family = "general";
    int count = 20;
    double min_area = 0.3;
    int max_range = 3;
    double threshold = 0.05;
    std::string fit_form = "with_cubic";
    friend bool operator==(const ReportSpec&, const ReportSpec&) = default;
};

/// One experiment. Which blocks are required depends on `kind`:
/// spectrum/evolve need `model`, walk needs `walk`, accel_report needs
/// `report`.
struct ExperimentConfig {
    int schema = kSchemaVersion;
    Kind kind = Kind::spectrum;
    std::optional<LatticeModel> model;
    std::optional<WalkSpec> walk;
    std::optional<ReportSpec> report;

    int nk = kDefaultGridSize;
    int obc_size = kDefaultObcSize;
    double dt = 0.005;         // rk4 step
    double t_final = 40.0;
    double sample_dt = 0.05;   // trajectory spacing
    std::string engine = "bloch";  // bloch | rk4 | spectral_formula
    int window_halfwidth = 0;  // 0: light cone
    std::string fit_form = "pure";
    std::optional<WindowSpec> fit_window;    // default [0, t*]
    std::optional<WindowSpec> drift_window;  // default [0.8 t_final, t_final]
    std::uint64_t seed = 0;
    std::string output_dir;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses and validates. Unknown fields and a schema other than 1 are rejected.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const ExperimentConfig& cfg);

std::string model_to_json(const LatticeModel& model);
LatticeModel model_from_json(const std::string& json_text);

Engine parse_engine(const std::string& name);
analysis::ParabolaForm parse_fit_form(const std::string& name);

/// %.17g, with nan/inf spelled as such and -0 written as 0.
std::string format_double(double x);

/// Streams rows of a CSV file; numbers are written with format_double.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
    CsvWriter& cell(double x);
    CsvWriter& cell(long x);
    CsvWriter& cell(const std::string& s);
    void end_row();
    void close();

private:
    std::filesystem::path path_;
    std::string buffer_;
    bool row_open_ = false;
};

/// Writes `text` to `path`, throwing std::runtime_error on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

/// Creates the directory if needed and checks that a file can be written there.
void prepare_output_dir(const std::filesystem::path& dir);

/// Minimal SVG: axes-free panels with data-space transforms.
class SvgDocument {
public:
    SvgDocument(int width, int height);

    struct Panel {
        double x0, y0, w, h;          // pixel box
        double xmin, xmax, ymin, ymax;  // data range
    };

    Panel panel(double x0, double y0, double w, double h, double xmin, double xmax, double ymin, double ymax);
    void frame(const Panel& p, const std::string& title);
    void polyline(const Panel& p, const std::vector<std::pair<double, double>>& pts, const std::string& color,
                  double width = 1.5, bool dashed = false);
    void circles(const Panel& p, const std::vector<std::pair<double, double>>& pts, double radius,
                 const std::string& color);
    /// Heat map of values in [0, 1]; rows run along y, columns along x.
    void heatmap(const Panel& p, const std::vector<std::vector<double>>& rows);
    void text(double x, double y, const std::string& s, int size = 12);
    std::string str() const;

private:
    int width_, height_;
    std::string body_;
};

}  // namespace nhse::io
