#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nhse/analysis.hpp"
#include "nhse/io.hpp"
#include "nhse/quantum_walk.hpp"

namespace nhse::experiments {

enum ExitCode : int { ok = 0, validation_error = 1, numerical_failure = 2, threshold_breach = 3 };

struct RunResult {
    int exit_code = ok;
    std::vector<std::string> files;
    std::vector<std::string> warnings;
};

/// |fit - pred| / |pred|, or the absolute difference when |pred| is below
/// 1e-6 max|t|^2 (2/pi) (zero-area models).
double relative_error(double a_fit, double a_predicted, const LatticeModel& model);

struct EarlyFit {
    double a_fit = 0.0;
    double a_predicted = 0.0;
    double rel_err = 0.0;
    double t_star = 0.0;
    analysis::FitReport report;
    ComTrajectory trajectory;
};

/// Samples n_CM on `samples` equally spaced times over [0, window.hi] and fits
/// the early-time parabola. The default window is [0, t*], with t* capped at
/// `t_cap` when the horizon is unbounded.
EarlyFit early_acceleration_fit(const LatticeModel& model, Engine engine, analysis::ParabolaForm form,
                                std::optional<analysis::TimeWindow> window = std::nullopt,
                                int nk = kDefaultGridSize, int samples = 41, double t_cap = 40.0,
                                TrajectoryOptions options = {});

struct WalkFit {
    double a_fit = 0.0;
    double a_predicted = 0.0;
    double rel_err = 0.0;
    analysis::FitReport report;
    ComTrajectory trajectory;
    std::vector<walk::WalkState> history;
};

/// Runs the fiber-loop map and fits n_CM = c m^2 over m in [0, fit_max_step].
WalkFit walk_acceleration_fit(const walk::WalkParams& params, const std::string& protocol, int steps,
                              int fit_max_step, int window_halfwidth = 0);

struct ReportRow {
    int model_id = 0;
    double area = 0.0;
    double a_predicted = 0.0;
    double a_fit = 0.0;
    double rel_err = 0.0;
    std::string error;  // empty on success
};

/// One row per model, in model_id order, independent of the thread count.
std::vector<ReportRow> accel_report_rows(const io::ReportSpec& spec, std::uint64_t seed, int nk, Engine engine);

RunResult run_spectrum(const io::ExperimentConfig& cfg, const std::filesystem::path& out);
RunResult run_evolve(const io::ExperimentConfig& cfg, const std::filesystem::path& out);
RunResult run_walk(const io::ExperimentConfig& cfg, const std::filesystem::path& out);
RunResult run_accel_report(const io::ExperimentConfig& cfg, const std::filesystem::path& out);

/// Dispatches on cfg.kind.
RunResult run(const io::ExperimentConfig& cfg, const std::filesystem::path& out);

}  // namespace nhse::experiments
