#include "nhse/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "nhse/errors.hpp"
#include "nhse/random_models.hpp"

namespace nhse::experiments {

namespace {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr double kPi = std::numbers::pi;
constexpr int kMaxMapFrames = 100;

std::vector<double> linspace(double lo, double hi, int n)
{
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
    out.back() = hi;
    return out;
}

std::vector<double> sample_times(double t_final, double dt)
{
    const long n = std::lround(t_final / dt);
    std::vector<double> out;
    for (long i = 0; i <= n; ++i) out.push_back(std::min(i * dt, t_final));
    if (out.back() < t_final) out.push_back(t_final);
    return out;
}

double json_number(double x) { return std::isfinite(x) ? x : std::numeric_limits<double>::quiet_NaN(); }

void write_json(const fs::path& path, const ojson& j, RunResult& result)
{
    io::write_text(path, j.dump(2) + "\n");
    result.files.push_back(path.filename().string());
}

std::pair<double, double> bounds(const std::vector<double>& v)
{
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return {*lo, *hi};
}

}  // namespace

double relative_error(double a_fit, double a_predicted, const LatticeModel& model)
{
    const double t = model.max_abs_hopping();
    const double scale = 1e-6 * t * t * 2.0 / kPi;
    const double diff = std::abs(a_fit - a_predicted);
    return std::abs(a_predicted) > scale ? diff / std::abs(a_predicted) : diff;
}

EarlyFit early_acceleration_fit(const LatticeModel& model, Engine engine, analysis::ParabolaForm form,
                                std::optional<analysis::TimeWindow> window, int nk, int samples, double t_cap,
                                TrajectoryOptions options)
{
    if (samples < 3) throw std::invalid_argument("early_acceleration_fit: need at least 3 samples");
    EarlyFit fit;
    fit.t_star = early_fit_horizon(model, nk);
    const analysis::TimeWindow w = window.value_or(analysis::TimeWindow{0.0, std::min(fit.t_star, t_cap)});
    const auto amp = flat_amplitude(nk);
    fit.trajectory = com_trajectory(model, amp, linspace(0.0, w.hi, samples), engine, options);
    fit.report = analysis::fit_parabola(fit.trajectory, w, form);
    fit.a_fit = fit.report.coefficient;
    fit.a_predicted = predicted_acceleration(model);
    fit.rel_err = relative_error(fit.a_fit, fit.a_predicted, model);
    return fit;
}

WalkFit walk_acceleration_fit(const walk::WalkParams& params, const std::string& protocol, int steps,
                              int fit_max_step, int window_halfwidth)
{
    params.validate();
    if (fit_max_step < 2 || fit_max_step > steps)
        throw std::invalid_argument("walk_acceleration_fit: fit_max_step must be in [2, steps]");
    const SiteWindow window =
        window_halfwidth > 0 ? SiteWindow::symmetric(window_halfwidth) : walk::default_walk_window(steps);
    walk::WalkState init;
    if (protocol == "two_pulse") init = walk::two_pulse_initial(params, window);
    else if (protocol == "single_pulse") init = walk::single_pulse_initial(window);
    else throw std::invalid_argument("walk: unknown protocol '" + protocol + "'");

    WalkFit fit;
    fit.history = walk::walk_history(init, params, steps);
    fit.trajectory = walk::walk_trajectory(fit.history, "walk_" + protocol);
    fit.report = analysis::fit_parabola(fit.trajectory, {0.0, static_cast<double>(fit_max_step)});
    fit.a_fit = fit.report.coefficient;
    fit.a_predicted = walk::predicted_walk_acceleration(params);
    const double diff = std::abs(fit.a_fit - fit.a_predicted);
    fit.rel_err = std::abs(fit.a_predicted) > 1e-12 ? diff / std::abs(fit.a_predicted) : diff;
    return fit;
}

std::vector<ReportRow> accel_report_rows(const io::ReportSpec& spec, std::uint64_t seed, int nk, Engine engine)
{
    random::ModelOptions opts;
    opts.family = random::parse_family(spec.family);
    opts.max_range = spec.max_range;
    opts.min_area = spec.min_area;
    const auto form = io::parse_fit_form(spec.fit_form);

    std::vector<ReportRow> rows(spec.count);
    // each model writes only its own slot; the merge is the slot order
#pragma omp parallel for schedule(dynamic)
    for (int id = 0; id < spec.count; ++id) {
        ReportRow& row = rows[id];
        row.model_id = id;
        try {
            const auto model = random::random_model(seed, id, opts);
            row.area = spectral_area_quadrature(sample_pbc_spectrum(model, nk));
            const auto fit = early_acceleration_fit(model, engine, form, std::nullopt, nk);
            row.a_predicted = fit.a_predicted;
            row.a_fit = fit.a_fit;
            row.rel_err = fit.rel_err;
        } catch (const std::exception& e) {
            row.error = e.what();
            row.a_fit = row.rel_err = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return rows;
}

RunResult run_spectrum(const io::ExperimentConfig& cfg, const fs::path& out)
{
    cfg.validate();
    if (cfg.kind != io::Kind::spectrum) throw std::invalid_argument("run_spectrum: config kind is not spectrum");
    io::prepare_output_dir(out);
    RunResult result;
    const LatticeModel& model = *cfg.model;

    const auto curve = sample_pbc_spectrum(model, cfg.nk);
    io::CsvWriter pbc(out / "pbc.csv", {"k", "Re_E", "Im_E"});
    for (std::size_t j = 0; j < curve.size(); ++j) {
        pbc.cell(curve.k[j]).cell(curve.energy[j].real()).cell(curve.energy[j].imag());
        pbc.end_row();
    }
    pbc.close();
    result.files.push_back("pbc.csv");

    const auto obc = obc_spectrum(model, cfg.obc_size);
    io::CsvWriter obc_csv(out / "obc.csv", {"index", "Re_E", "Im_E"});
    for (std::size_t i = 0; i < obc.size(); ++i) {
        obc_csv.cell(static_cast<long>(i)).cell(obc[i].real()).cell(obc[i].imag());
        obc_csv.end_row();
    }
    obc_csv.close();
    result.files.push_back("obc.csv");

    const auto s = summarize(model, cfg.nk);
    ojson summary{{"model", model.label()},
                  {"nk", cfg.nk},
                  {"obc_size", cfg.obc_size},
                  {"area", s.area},
                  {"area_closed_form", spectral_area_closed_form(model)},
                  {"k_m", s.k_m},
                  {"lambda_max", s.lambda_max},
                  {"v_m", s.v_m},
                  {"accel", s.accel},
                  {"nhse_flag", s.nhse_flag},
                  {"degenerate_max", s.degenerate_max}};
    write_json(out / "summary.json", summary, result);

    std::vector<double> re, im;
    for (const cplx& e : curve.energy) re.push_back(e.real()), im.push_back(e.imag());
    for (const cplx& e : obc) re.push_back(e.real()), im.push_back(e.imag());
    const auto [xlo, xhi] = bounds(re);
    const auto [ylo, yhi] = bounds(im);
    const double pad = 0.05 * std::max(xhi - xlo, yhi - ylo) + 1e-3;
    io::SvgDocument svg(560, 520);
    const auto p = svg.panel(60, 40, 460, 420, xlo - pad, xhi + pad, ylo - pad, yhi + pad);
    svg.frame(p, model.label() + ": PBC (line), OBC (circles), Re E vs Im E");
    std::vector<std::pair<double, double>> line, dots;
    for (const cplx& e : curve.energy) line.emplace_back(e.real(), e.imag());
    line.push_back(line.front());
    for (const cplx& e : obc) dots.emplace_back(e.real(), e.imag());
    svg.polyline(p, line, "#1f5fa8");
    svg.circles(p, dots, 3.0, "#c0392b");
    io::write_text(out / "spectrum.svg", svg.str());
    result.files.push_back("spectrum.svg");
    return result;
}

RunResult run_evolve(const io::ExperimentConfig& cfg, const fs::path& out)
{
    cfg.validate();
    if (cfg.kind != io::Kind::evolve) throw std::invalid_argument("run_evolve: config kind is not evolve");
    io::prepare_output_dir(out);
    RunResult result;
    const LatticeModel& model = *cfg.model;
    const Engine engine = io::parse_engine(cfg.engine);
    const auto form = io::parse_fit_form(cfg.fit_form);

    const auto amp = flat_amplitude(cfg.nk);
    TrajectoryOptions opts;
    opts.dt = cfg.dt;
    if (cfg.window_halfwidth > 0) {
        opts.auto_window = false;
        opts.window = SiteWindow::symmetric(cfg.window_halfwidth);
    }
    const SiteWindow window = opts.auto_window ? adaptive_window(model, amp, cfg.t_final) : opts.window;
    opts.window = window;
    opts.auto_window = false;

    const auto times = sample_times(cfg.t_final, cfg.sample_dt);
    const auto traj = com_trajectory(model, amp, times, engine, opts);
    bool bulk_ok = traj.bulk_valid;

    io::CsvWriter tcsv(out / "trajectory.csv", {"t", "n_cm", "engine"});
    for (std::size_t i = 0; i < times.size(); ++i) {
        tcsv.cell(times[i]).cell(traj.com[i]).cell(std::string(engine_name(engine)));
        tcsv.end_row();
    }
    tcsv.close();
    result.files.push_back("trajectory.csv");

    // real-space frames for the intensity map always come from the Bloch integral
    const std::size_t stride = std::max<std::size_t>(1, (times.size() + kMaxMapFrames - 2) / kMaxMapFrames);
    std::vector<std::vector<double>> frames;
    std::vector<double> frame_times;
    io::CsvWriter map(out / "intensity_map.csv", {"t", "n", "intensity"});
    WaveState last;
    for (std::size_t i = 0; i < times.size(); i += stride) {
        const auto s = bloch_propagate(model, amp, times[i], window);
        bulk_ok = bulk_ok && s.bulk_valid();
        const double norm = std::sqrt(s.norm2());
        std::vector<double> row(s.amplitudes.size());
        for (std::size_t j = 0; j < row.size(); ++j) {
            row[j] = std::abs(s.amplitudes[j]) / norm;
            map.cell(times[i]).cell(static_cast<long>(window.lo + static_cast<long>(j))).cell(row[j]);
            map.end_row();
        }
        frames.push_back(std::move(row));
        frame_times.push_back(times[i]);
        if (i + stride >= times.size()) last = s;
    }
    map.close();
    result.files.push_back("intensity_map.csv");
    if (last.time != times.back()) last = bloch_propagate(model, amp, times.back(), window);

    {
        const double norm = std::sqrt(last.norm2());
        io::CsvWriter st(out / "state_final.csv", {"n", "Re_psi", "Im_psi", "abs2"});
        for (std::size_t j = 0; j < last.amplitudes.size(); ++j) {
            const cplx a = last.amplitudes[j] / norm;
            st.cell(static_cast<long>(window.lo + static_cast<long>(j))).cell(a.real()).cell(a.imag()).cell(std::norm(a));
            st.end_row();
        }
        st.close();
        result.files.push_back("state_final.csv");
    }

    std::optional<analysis::TimeWindow> fw;
    if (cfg.fit_window) fw = analysis::TimeWindow{cfg.fit_window->lo, cfg.fit_window->hi};
    const auto early = early_acceleration_fit(model, engine, form, fw, cfg.nk, 41, cfg.t_final, opts);
    bulk_ok = bulk_ok && early.trajectory.bulk_valid;

    const analysis::TimeWindow dw = cfg.drift_window ? analysis::TimeWindow{cfg.drift_window->lo, cfg.drift_window->hi}
                                                     : analysis::TimeWindow{0.8 * cfg.t_final, cfg.t_final};
    double v_fit = std::numeric_limits<double>::quiet_NaN();
    try {
        v_fit = analysis::fit_drift(traj, dw).coefficient;
    } catch (const std::invalid_argument& e) {
        result.warnings.push_back(std::string("drift fit skipped: ") + e.what());
    }
    const auto drift = drift_velocity(model, cfg.nk);

    ojson fitj{{"model", model.label()},
               {"engine", engine_name(engine)},
               {"a_fit", early.a_fit},
               {"a_predicted", early.a_predicted},
               {"rel_err", early.rel_err},
               {"t_star", json_number(early.t_star)},
               {"fit_window", {early.report.window.lo, early.report.window.hi}},
               {"fit_form", cfg.fit_form},
               {"past_regime", early.report.past_regime},
               {"v_fit", json_number(v_fit)},
               {"v_m", drift.v_m},
               {"k_m", drift.k_m},
               {"degenerate_max", drift.degenerate},
               {"drift_window", {dw.lo, dw.hi}},
               {"window", {window.lo, window.hi}},
               {"bulk_valid", bulk_ok}};
    write_json(out / "fit.json", fitj, result);

    io::SvgDocument svg(900, 460);
    const auto heat = svg.panel(60, 40, 480, 380, window.lo, window.hi, 0.0, cfg.t_final);
    std::vector<std::vector<double>> scaled = frames;
    for (auto& row : scaled) {
        const double m = *std::max_element(row.begin(), row.end());
        if (m > 0.0)
            for (double& x : row) x /= m;
    }
    svg.heatmap(heat, scaled);
    svg.frame(heat, model.label() + ": |psi_n(t)| (row-normalized), n across, t up");
    const auto [clo, chi] = bounds(traj.com);
    const double span = std::max(chi - clo, 1e-9);
    const auto inset = svg.panel(600, 40, 260, 200, 0.0, cfg.t_final, clo - 0.05 * span, chi + 0.05 * span);
    svg.frame(inset, "n_cm(t); dashed: a t^2 / 2");
    std::vector<std::pair<double, double>> line, parabola;
    for (std::size_t i = 0; i < times.size(); ++i) line.emplace_back(times[i], traj.com[i]);
    for (double t : times) {
        const double y = 0.5 * early.a_predicted * t * t;
        if (y < clo - 0.05 * span || y > chi + 0.05 * span) break;
        parabola.emplace_back(t, y);
    }
    svg.polyline(inset, line, "#1f5fa8");
    svg.polyline(inset, parabola, "#c0392b", 1.5, true);
    io::write_text(out / "evolution.svg", svg.str());
    result.files.push_back("evolution.svg");

    if (!bulk_ok) {
        result.warnings.push_back("wave packet reached the edge of the site window; trajectory is contaminated");
        result.exit_code = numerical_failure;
    }
    return result;
}

RunResult run_walk(const io::ExperimentConfig& cfg, const fs::path& out)
{
    cfg.validate();
    if (cfg.kind != io::Kind::walk) throw std::invalid_argument("run_walk: config kind is not walk");
    io::prepare_output_dir(out);
    RunResult result;
    const io::WalkSpec& w = *cfg.walk;
    const walk::WalkParams params{w.beta, w.h};
    const auto fit = walk_acceleration_fit(params, w.protocol, w.steps, w.fit_max_step, w.window_halfwidth);

    io::CsvWriter map(out / "walk_map.csv", {"m", "n", "intensity_u", "intensity_v"});
    std::vector<std::vector<double>> frames;
    bool bulk_ok = true;
    for (const auto& s : fit.history) {
        const double total = s.total_intensity();
        std::vector<double> row(s.u.size());
        for (std::size_t j = 0; j < s.u.size(); ++j) {
            const double iu = std::norm(s.u[j]) / total, iv = std::norm(s.v[j]) / total;
            map.cell(static_cast<long>(s.step))
                .cell(static_cast<long>(s.window.lo + static_cast<long>(j)))
                .cell(iu)
                .cell(iv);
            map.end_row();
            row[j] = iu + iv;
        }
        frames.push_back(std::move(row));
        bulk_ok = bulk_ok && s.bulk_valid();
    }
    map.close();
    result.files.push_back("walk_map.csv");

    io::CsvWriter tr(out / "walk_trajectory.csv", {"m", "n_cm", "n_cm_predicted"});
    for (std::size_t i = 0; i < fit.trajectory.times.size(); ++i) {
        const double m = fit.trajectory.times[i];
        tr.cell(static_cast<long>(std::lround(m))).cell(fit.trajectory.com[i]).cell(0.5 * fit.a_predicted * m * m);
        tr.end_row();
    }
    tr.close();
    result.files.push_back("walk_trajectory.csv");

    ojson fj{{"protocol", w.protocol},
             {"beta", w.beta},
             {"h", w.h},
             {"a_fit", fit.a_fit},
             {"a_predicted", fit.a_predicted},
             {"rel_err", fit.rel_err},
             {"fit_window", {0, w.fit_max_step}},
             {"past_regime", fit.report.past_regime},
             {"bulk_valid", bulk_ok}};
    write_json(out / "walk_fit.json", fj, result);

    const SiteWindow win = fit.history.front().window;
    io::SvgDocument svg(900, 460);
    const auto heat = svg.panel(60, 40, 480, 380, win.lo, win.hi, 0.0, w.steps);
    auto scaled = frames;
    for (auto& row : scaled) {
        const double m = *std::max_element(row.begin(), row.end());
        if (m > 0.0)
            for (double& x : row) x /= m;
    }
    svg.heatmap(heat, scaled);
    svg.frame(heat, "walk intensity |u|^2 + |v|^2 (step-normalized), n across, m up");
    std::vector<std::pair<double, double>> line, parabola;
    std::vector<double> ys;
    for (std::size_t i = 0; i < fit.trajectory.times.size(); ++i) {
        const double m = fit.trajectory.times[i];
        line.emplace_back(m, fit.trajectory.com[i]);
        parabola.emplace_back(m, 0.5 * fit.a_predicted * m * m);
        ys.push_back(fit.trajectory.com[i]);
        ys.push_back(parabola.back().second);
    }
    const auto [lo, hi] = bounds(ys);
    const double span = std::max(hi - lo, 1e-9);
    const auto inset = svg.panel(600, 40, 260, 200, 0.0, w.steps, lo - 0.05 * span, hi + 0.05 * span);
    svg.frame(inset, "n_cm(m); dashed: a m^2 / 2");
    svg.polyline(inset, line, "#1f5fa8");
    svg.polyline(inset, parabola, "#c0392b", 1.5, true);
    io::write_text(out / "walk.svg", svg.str());
    result.files.push_back("walk.svg");

    if (!bulk_ok) {
        result.warnings.push_back("walk reached the edge of the site window");
        result.exit_code = numerical_failure;
    }
    return result;
}

RunResult run_accel_report(const io::ExperimentConfig& cfg, const fs::path& out)
{
    cfg.validate();
    if (cfg.kind != io::Kind::accel_report)
        throw std::invalid_argument("run_accel_report: config kind is not accel_report");
    io::prepare_output_dir(out);
    RunResult result;
    const io::ReportSpec& spec = *cfg.report;
    const auto rows = accel_report_rows(spec, cfg.seed, cfg.nk, io::parse_engine(cfg.engine));

    io::CsvWriter csv(out / "report.csv", {"model_id", "area", "a_predicted", "a_fit", "rel_err"});
    ojson failures = ojson::array(), breaches = ojson::array();
    double worst = 0.0;
    for (const auto& r : rows) {
        csv.cell(static_cast<long>(r.model_id)).cell(r.area).cell(r.a_predicted).cell(r.a_fit).cell(r.rel_err);
        csv.end_row();
        if (!r.error.empty()) {
            failures.push_back({{"model_id", r.model_id}, {"error", r.error}});
            continue;
        }
        worst = std::max(worst, r.rel_err);
        if (r.rel_err > spec.threshold) breaches.push_back(r.model_id);
    }
    csv.close();
    result.files.push_back("report.csv");

    ojson summary{{"family", spec.family},
                  {"count", spec.count},
                  {"seed", cfg.seed},
                  {"threshold", spec.threshold},
                  {"max_rel_err", worst},
                  {"breaches", breaches},
                  {"failures", failures}};
    write_json(out / "report_summary.json", summary, result);

    if (!breaches.empty()) {
        result.warnings.push_back(std::to_string(breaches.size()) + " model(s) exceed rel_err threshold " +
                                  io::format_double(spec.threshold));
        result.exit_code = threshold_breach;
    } else if (!failures.empty()) {
        result.warnings.push_back(std::to_string(failures.size()) + " model(s) failed");
        result.exit_code = numerical_failure;
    }
    return result;
}

RunResult run(const io::ExperimentConfig& cfg, const fs::path& out)
{
    switch (cfg.kind) {
        case io::Kind::spectrum: return run_spectrum(cfg, out);
        case io::Kind::evolve: return run_evolve(cfg, out);
        case io::Kind::walk: return run_walk(cfg, out);
        case io::Kind::accel_report: return run_accel_report(cfg, out);
    }
    throw std::invalid_argument("run: unknown kind");
}

}  // namespace nhse::experiments
