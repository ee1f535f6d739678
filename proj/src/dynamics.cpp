#include "nhse/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "nhse/errors.hpp"
#include "nhse/kernels.hpp"

namespace nhse {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<kernels::Hop> hop_list(const LatticeModel& model)
{
    std::vector<kernels::Hop> hops;
    for (const auto& [r, t] : model.hoppings()) hops.push_back({r, t});
    return hops;
}

std::vector<cplx> dispersion_on(const LatticeModel& model, const std::vector<double>& k)
{
    std::vector<cplx> e(k.size());
    kernels::active().dispersion(hop_list(model), k, e);
    return e;
}

std::vector<double> group_velocity_on(const LatticeModel& model, const std::vector<double>& k)
{
    std::vector<double> d(k.size());
    for (std::size_t j = 0; j < k.size(); ++j) d[j] = dispersion_derivative(model, k[j]).real();
    return d;
}

// exp(-2 pi i (j n mod N) / N) without accumulating phase error for large n
cplx grid_phase(long j, long n, long nk, double sign)
{
    long q = (j * (n % nk)) % nk;
    if (q < 0) q += nk;
    return std::polar(1.0, sign * 2.0 * kPi * static_cast<double>(q) / static_cast<double>(nk));
}

// F* F' for the amplitude. The linear phase c k contributes i c |F|^2.
std::vector<cplx> conj_times_derivative(const SpectralAmplitude& amp)
{
    const auto g = amp.periodic_values();
    const auto dg = periodic_derivative(std::span<const cplx>(g));
    std::vector<cplx> out(g.size());
    for (std::size_t j = 0; j < g.size(); ++j)
        out[j] = std::conj(g[j]) * dg[j] + cplx(0.0, amp.phase_slope * std::norm(g[j]));
    return out;
}

void check_grid(const SpectralAmplitude& amp)
{
    if (amp.size() < static_cast<std::size_t>(kMinSpectrumSamples) || amp.modulus.size() != amp.size() ||
        amp.phase.size() != amp.size())
        throw std::invalid_argument("SpectralAmplitude: inconsistent or too small grid");
}

}  // namespace

WaveState WaveState::single_site(SiteWindow window, int site)
{
    if (!window.contains(site)) throw std::invalid_argument("WaveState::single_site: site outside window");
    WaveState s{window, std::vector<cplx>(window.size()), 0.0, 0.0};
    s.amplitudes[site - window.lo] = 1.0;
    return s;
}

double WaveState::norm2() const
{
    double s = 0.0;
    for (const cplx& a : amplitudes) s += std::norm(a);
    return s;
}

double WaveState::max_abs() const
{
    double m = 0.0;
    for (const cplx& a : amplitudes) m = std::max(m, std::abs(a));
    return m;
}

bool WaveState::bulk_valid(double tolerance) const
{
    if (amplitudes.empty()) return false;
    const double limit = tolerance * max_abs();
    return std::abs(amplitudes.front()) < limit && std::abs(amplitudes.back()) < limit;
}

double SpectralAmplitude::dk() const { return 2.0 * kPi / static_cast<double>(k.size()); }

std::vector<cplx> SpectralAmplitude::values() const
{
    std::vector<cplx> out(size());
    for (std::size_t j = 0; j < size(); ++j) out[j] = std::polar(modulus[j], phase[j]);
    return out;
}

std::vector<cplx> SpectralAmplitude::periodic_values() const
{
    std::vector<cplx> out(size());
    for (std::size_t j = 0; j < size(); ++j) out[j] = std::polar(modulus[j], phase[j] - phase_slope * k[j]);
    return out;
}

double SpectralAmplitude::norm() const
{
    double s = 0.0;
    for (double h : modulus) s += h * h;
    return 2.0 * kPi * s * dk();
}

double SpectralAmplitude::mean_phase_gradient() const
{
    const auto ffp = conj_times_derivative(*this);
    double s = 0.0;
    for (const cplx& z : ffp) s += z.imag();
    return s * dk();
}

SpectralAmplitude flat_amplitude(int nk)
{
    SpectralAmplitude a;
    a.k = brillouin_grid(nk);
    a.modulus.assign(nk, 1.0 / (2.0 * kPi));
    a.phase.assign(nk, 0.0);
    a.flat = true;
    return a;
}

SpectralAmplitude amplitude_from_values(std::vector<double> k, std::span<const cplx> values)
{
    if (k.size() != values.size()) throw std::invalid_argument("amplitude_from_values: size mismatch");
    SpectralAmplitude a;
    a.k = std::move(k);
    const std::size_t n = values.size();
    a.modulus.resize(n);
    a.phase.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        a.modulus[j] = std::abs(values[j]);
        double p = std::arg(values[j]);
        if (j > 0) p += 2.0 * kPi * std::round((a.phase[j - 1] - p) / (2.0 * kPi));
        a.phase[j] = p;
    }
    const double h0 = n ? a.modulus[0] : 0.0;
    bool flat = n > 0;
    for (std::size_t j = 0; j < n && flat; ++j)
        flat = std::abs(a.modulus[j] - h0) <= 1e-12 && std::abs(a.phase[j]) <= 1e-12;
    a.flat = flat;
    return a;
}

SpectralAmplitude gaussian_amplitude(double sigma_k, int nk)
{
    if (!(sigma_k > 0.0)) throw std::invalid_argument("gaussian_amplitude: sigma_k must be positive");
    SpectralAmplitude a;
    a.k = brillouin_grid(nk);
    a.modulus.resize(nk);
    a.phase.assign(nk, 0.0);
    // H^2 is a Gaussian of variance sigma_k^2
    for (int j = 0; j < nk; ++j) a.modulus[j] = std::exp(-a.k[j] * a.k[j] / (4.0 * sigma_k * sigma_k));
    const double scale = 1.0 / std::sqrt(a.norm());
    for (double& h : a.modulus) h *= scale;
    return a;
}

SpectralAmplitude spectral_amplitude_of(const WaveState& state, int nk)
{
    const double norm = state.norm2() * std::exp(2.0 * state.log_scale);
    if (std::abs(norm - 1.0) > 1e-10)
        throw std::invalid_argument("spectral_amplitude_of: state is not normalized (norm = " +
                                    std::to_string(norm) + ")");
    auto k = brillouin_grid(nk);
    std::vector<cplx> f(nk);
    const double pref = std::exp(state.log_scale) / (2.0 * kPi);
    for (int j = 0; j < nk; ++j) {
        cplx acc{};
        for (std::size_t i = 0; i < state.amplitudes.size(); ++i) {
            const long n = state.window.lo + static_cast<long>(i);
            if (state.amplitudes[i] == cplx{}) continue;
            // exp(-i k_j n) = (-1)^n exp(-2 pi i j n / N)
            const double parity = (n % 2 == 0) ? 1.0 : -1.0;
            acc += parity * state.amplitudes[i] * grid_phase(j, n, nk, -1.0);
        }
        f[j] = pref * acc;
    }
    return amplitude_from_values(std::move(k), f);
}

double center_phase_gradient(SpectralAmplitude& amplitude)
{
    check_grid(amplitude);
    // n_CM(0) = -int H^2 phi' / int H^2; adding c k to the phase moves it by -c
    double w = 0.0;
    for (double h : amplitude.modulus) w += h * h;
    w *= amplitude.dk();
    const double shift = -amplitude.mean_phase_gradient() / w;
    amplitude.phase_slope += shift;
    for (std::size_t j = 0; j < amplitude.size(); ++j) amplitude.phase[j] += shift * amplitude.k[j];
    amplitude.flat = false;
    return shift;
}

SiteWindow light_cone_window(const LatticeModel& model, double t_final, int nk)
{
    const auto k = brillouin_grid(nk);
    double vmax = 0.0;
    for (double kj : k) vmax = std::max(vmax, std::abs(dispersion_derivative(model, kj)));
    return SiteWindow::symmetric(static_cast<int>(std::ceil(vmax * std::max(t_final, 0.0))) + 40);
}

WaveState bloch_propagate(const LatticeModel& model, const SpectralAmplitude& amplitude, double t, SiteWindow window)
{
    check_grid(amplitude);
    if (!(t >= 0.0)) throw std::invalid_argument("bloch_propagate: t must be >= 0");
    if (amplitude.phase_slope != 0.0)
        throw std::invalid_argument("bloch_propagate: amplitude carries a fractional translation");
    if (!window.contains(0)) throw std::invalid_argument("bloch_propagate: window must contain site 0");
    const long nk = static_cast<long>(amplitude.size());
    if (static_cast<long>(window.size()) > nk)
        throw std::invalid_argument("bloch_propagate: window wider than the k-grid period");

    const auto e = dispersion_on(model, amplitude.k);
    double growth = -std::numeric_limits<double>::infinity();
    for (const cplx& ej : e) growth = std::max(growth, ej.imag() * t);

    const auto f = amplitude.values();
    std::vector<cplx> coeff(nk);
    for (long j = 0; j < nk; ++j) coeff[j] = f[j] * std::exp(cplx(e[j].imag() * t - growth, -e[j].real() * t));

    WaveState out{window, std::vector<cplx>(window.size()), t, growth};
    const auto twiddle = kernels::twiddle_table(static_cast<int>(nk));
    kernels::active().bloch_sum(coeff, twiddle, window.lo, out.amplitudes);
    const double dk = amplitude.dk();
    for (std::size_t i = 0; i < out.amplitudes.size(); ++i) {
        const long n = window.lo + static_cast<long>(i);
        out.amplitudes[i] *= (n % 2 == 0 ? dk : -dk);
    }
    return out;
}

SiteWindow adaptive_window(const LatticeModel& model, const SpectralAmplitude& amplitude, double t_final)
{
    SiteWindow w = light_cone_window(model, t_final, static_cast<int>(amplitude.size()));
    const int cap = static_cast<int>(amplitude.size() / 2) - 1;
    while (w.hi < cap && !bloch_propagate(model, amplitude, t_final, w).bulk_valid())
        w = SiteWindow::symmetric(std::min(cap, w.hi + w.hi / 2));
    return w;
}

WaveState rk4_evolve(const LatticeModel& model, const WaveState& initial, double t_final, double dt)
{
    if (!(t_final >= 0.0)) throw std::invalid_argument("rk4_evolve: t_final must be >= 0");
    if (!(dt > 0.0)) throw std::invalid_argument("rk4_evolve: dt must be positive");
    const auto curve = sample_pbc_spectrum(model, kDefaultGridSize);
    double emax = 0.0;
    for (const cplx& e : curve.energy) emax = std::max(emax, std::abs(e));
    if (dt * emax > kRk4StepBudget)
        throw std::invalid_argument("rk4_evolve: dt * max|E| = " + std::to_string(dt * emax) + " exceeds 0.1");

    WaveState s = initial;
    if (t_final == 0.0) return s;

    const long steps = static_cast<long>(std::ceil(t_final / dt - 1e-12));
    const double h = t_final / static_cast<double>(steps);
    const auto hops = hop_list(model);
    const auto& kern = kernels::active();
    const std::size_t n = s.amplitudes.size();
    std::vector<cplx> k1(n), k2(n), k3(n), k4(n), tmp(n);
    auto& psi = s.amplitudes;

    for (long step = 1; step <= steps; ++step) {
        kern.banded_apply(hops, psi, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = psi[i] + 0.5 * h * k1[i];
        kern.banded_apply(hops, tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = psi[i] + 0.5 * h * k2[i];
        kern.banded_apply(hops, tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = psi[i] + h * k3[i];
        kern.banded_apply(hops, tmp, k4);
        for (std::size_t i = 0; i < n; ++i) psi[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

        if (step % 100 == 0 || step == steps) {
            const double m = s.max_abs();
            if (!std::isfinite(m) || m == 0.0) throw NumericalError("rk4_evolve: state overflowed or vanished");
            for (auto& a : psi) a /= m;
            s.log_scale += std::log(m);
        }
    }
    s.time = initial.time + t_final;
    return s;
}

double center_of_mass(const WaveState& state)
{
    double w = 0.0, nw = 0.0;
    for (std::size_t i = 0; i < state.amplitudes.size(); ++i) {
        const double p = std::norm(state.amplitudes[i]);
        w += p;
        nw += static_cast<double>(state.window.lo + static_cast<long>(i)) * p;
    }
    if (!(w > std::numeric_limits<double>::min())) throw std::invalid_argument("center_of_mass: zero state");
    return nw / w;
}

double center_of_mass_spectral(const LatticeModel& model, const SpectralAmplitude& amplitude, double t)
{
    check_grid(amplitude);
    if (!(t >= 0.0)) throw std::invalid_argument("center_of_mass_spectral: t must be >= 0");
    const auto e = dispersion_on(model, amplitude.k);
    const auto vg = group_velocity_on(model, amplitude.k);
    const auto ffp = conj_times_derivative(amplitude);
    double top = -std::numeric_limits<double>::infinity();
    for (const cplx& ej : e) top = std::max(top, 2.0 * ej.imag() * t);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < amplitude.size(); ++j) {
        const double w = std::exp(2.0 * e[j].imag() * t - top);
        const double h2 = amplitude.modulus[j] * amplitude.modulus[j];
        num += (-ffp[j].imag() + t * h2 * vg[j]) * w;
        den += h2 * w;
    }
    if (!(den > 0.0)) throw std::invalid_argument("center_of_mass_spectral: zero amplitude");
    return num / den;
}

const char* engine_name(Engine engine)
{
    switch (engine) {
    case Engine::bloch: return "bloch";
    case Engine::rk4: return "rk4";
    case Engine::spectral_formula: return "spectral_formula";
    case Engine::walk: return "walk";
    }
    return "unknown";
}

ComTrajectory com_trajectory(const LatticeModel& model, const SpectralAmplitude& amplitude,
                             const std::vector<double>& times, Engine engine, TrajectoryOptions options)
{
    if (times.empty() || times.front() != 0.0)
        throw std::invalid_argument("com_trajectory: times must start at 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw std::invalid_argument("com_trajectory: times must increase");

    ComTrajectory traj{times, std::vector<double>(times.size()), engine, model.label(), true};
    const SiteWindow window = options.auto_window ? adaptive_window(model, amplitude, times.back()) : options.window;

    switch (engine) {
    case Engine::bloch:
        for (std::size_t i = 0; i < times.size(); ++i) {
            const auto s = bloch_propagate(model, amplitude, times[i], window);
            traj.bulk_valid = traj.bulk_valid && s.bulk_valid();
            traj.com[i] = center_of_mass(s);
        }
        break;
    case Engine::rk4: {
        auto s = bloch_propagate(model, amplitude, 0.0, window);
        traj.com[0] = center_of_mass(s);
        for (std::size_t i = 1; i < times.size(); ++i) {
            s = rk4_evolve(model, s, times[i] - times[i - 1], options.dt);
            traj.bulk_valid = traj.bulk_valid && s.bulk_valid();
            traj.com[i] = center_of_mass(s);
        }
        break;
    }
    case Engine::spectral_formula:
        for (std::size_t i = 0; i < times.size(); ++i) traj.com[i] = center_of_mass_spectral(model, amplitude, times[i]);
        break;
    case Engine::walk: throw std::invalid_argument("com_trajectory: walk engine belongs to the quantum walk");
    }
    return traj;
}

double early_fit_horizon(const LatticeModel& model, int nk, double budget)
{
    const auto curve = sample_pbc_spectrum(model, nk);
    double mean = 0.0;
    for (const cplx& e : curve.energy) mean += e.imag();
    mean /= static_cast<double>(curve.size());
    double dev = 0.0;
    for (const cplx& e : curve.energy) dev = std::max(dev, std::abs(e.imag() - mean));
    if (dev == 0.0) return std::numeric_limits<double>::infinity();
    return budget / (2.0 * dev);
}

LyapunovEstimate lyapunov_exponent(const LatticeModel& model, double v, double T, int nk)
{
    if (!(T > 0.0)) throw std::invalid_argument("lyapunov_exponent: T must be positive");
    const auto k = brillouin_grid(nk);
    const auto e = dispersion_on(model, k);
    const long period = nk;
    bool underflow = false;

    auto probe = [&](double time) {
        const long n = std::lround(v * time);
        if (std::abs(n) >= period / 2) throw std::invalid_argument("lyapunov_exponent: probe site beyond grid period");
        double top = -std::numeric_limits<double>::infinity();
        for (const cplx& ej : e) top = std::max(top, ej.imag() * time);
        cplx acc{};
        double mass = 0.0;
        for (long j = 0; j < period; ++j) {
            const double mag = std::exp(e[j].imag() * time - top);
            mass += mag;
            acc += std::polar(mag, k[j] * static_cast<double>(n) - e[j].real() * time);
        }
        double a = std::abs(acc);
        // round-off floor of the k-sum
        const double floor = 1e3 * std::numeric_limits<double>::epsilon() * mass;
        if (a < floor) {
            underflow = true;
            a = floor;
        }
        const double log_psi = std::log(a / static_cast<double>(period)) + top;
        return (log_psi + 0.5 * std::log(time)) / time;
    };

    LyapunovEstimate est;
    est.at_T = probe(T);
    est.at_half_T = probe(0.5 * T);
    est.value = 2.0 * est.at_T - est.at_half_T;
    est.underflow = underflow;
    est.stable = !underflow && std::abs(est.value - est.at_T) < 0.1 * std::abs(est.value);
    if (underflow) est.value = std::min(est.value, est.at_T);
    return est;
}

double initial_acceleration_general(const LatticeModel& model, const SpectralAmplitude& amplitude)
{
    check_grid(amplitude);
    if (std::abs(amplitude.norm() - 1.0) > 1e-8)
        throw std::invalid_argument("initial_acceleration_general: amplitude not normalized");
    if (std::abs(amplitude.mean_phase_gradient()) > 1e-8)
        throw std::invalid_argument("initial_acceleration_general: phase gradient has nonzero mean");

    const auto e = dispersion_on(model, amplitude.k);
    const auto vg = group_velocity_on(model, amplitude.k);
    const auto ffp = conj_times_derivative(amplitude);

    double t1 = 0.0, t2 = 0.0, w_ei = 0.0, p_ei = 0.0, er_hh = 0.0;
    for (std::size_t j = 0; j < amplitude.size(); ++j) {
        const double h2 = amplitude.modulus[j] * amplitude.modulus[j];
        const double h2_dphi = ffp[j].imag();
        const double h_dh = ffp[j].real();
        const double ei = e[j].imag();
        t1 += h2_dphi * ei * ei;
        t2 += h2 * ei * vg[j];
        w_ei += h2 * ei;
        p_ei += h2_dphi * ei;
        er_hh += e[j].real() * h_dh;
    }
    const double dk = amplitude.dk();
    return -8.0 * kPi * t1 * dk + 8.0 * kPi * t2 * dk + 32.0 * kPi * kPi * (w_ei * dk) * (p_ei * dk + er_hh * dk);
}

LongwaveAcceleration longwave_acceleration(const LatticeModel& model, const SpectralAmplitude& amplitude)
{
    check_grid(amplitude);
    double s1 = 0.0, s2 = 0.0;
    for (const auto& [l, t] : model.hoppings())
        if (t.imag() != 0.0) throw std::invalid_argument("longwave_acceleration: hoppings must be real");
    // +-l pairs, so reciprocal models give an exact zero
    for (int l = 1; l <= model.range(); ++l) {
        s1 += l * (model.hopping(l).real() - model.hopping(-l).real());
        s2 += static_cast<double>(l) * l * (model.hopping(l).real() + model.hopping(-l).real());
    }
    double var = 0.0, total = 0.0, tail = 0.0;
    for (std::size_t j = 0; j < amplitude.size(); ++j) {
        const double h2 = amplitude.modulus[j] * amplitude.modulus[j];
        var += amplitude.k[j] * amplitude.k[j] * h2;
        total += h2;
        if (std::abs(amplitude.k[j]) > 0.5) tail += h2;
    }
    const double dk = amplitude.dk();
    LongwaveAcceleration out;
    out.value = -8.0 * kPi * s2 * s1 * var * dk;
    out.narrow = tail <= 1e-6 * total;
    return out;
}

}  // namespace nhse
