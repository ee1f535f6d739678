#pragma once

#include <string>
#include <vector>

#include "nhse/lattice_model.hpp"
#include "nhse/spectrum.hpp"

namespace nhse {

/// Inclusive range of integer site indices [lo, hi].
struct SiteWindow {
    int lo = 0;
    int hi = 0;

    static SiteWindow symmetric(int half_width) { return {-half_width, half_width}; }
    std::size_t size() const { return static_cast<std::size_t>(hi - lo + 1); }
    bool contains(int n) const { return n >= lo && n <= hi; }
    friend bool operator==(const SiteWindow&, const SiteWindow&) = default;
};

inline constexpr double kBoundaryTolerance = 1e-10;

/// Amplitudes psi_n on a finite window. The physical wave function is
/// exp(log_scale) * amplitudes; propagators factor out the exponential growth
/// so that amplitudes stay O(1).
struct WaveState {
    SiteWindow window;
    std::vector<cplx> amplitudes;
    double time = 0.0;
    double log_scale = 0.0;

    static WaveState single_site(SiteWindow window, int site = 0);

    cplx at(int n) const { return window.contains(n) ? amplitudes[n - window.lo] : cplx{}; }
    double norm2() const;
    double max_abs() const;

    /// Edge amplitudes below tolerance * max |psi_n|.
    bool bulk_valid(double tolerance = kBoundaryTolerance) const;
};

/// F(k) = H(k) exp(i phi(k)) on the Brillouin-zone grid.
struct SpectralAmplitude {
    std::vector<double> k;
    std::vector<double> modulus;  // H(k) >= 0
    std::vector<double> phase;    // unwrapped, anchored at k = -pi
    bool flat = false;
    /// Linear phase c k added by center_phase_gradient (a fractional site
    /// translation); the rest of the phase is periodic.
    double phase_slope = 0.0;

    std::size_t size() const { return k.size(); }
    double dk() const;
    std::vector<cplx> values() const;
    /// F with the linear phase c k removed; periodic on the grid.
    std::vector<cplx> periodic_values() const;

    /// 2 pi sum H^2 dk, which is 1 for a normalized initial state.
    double norm() const;
    /// sum phi' H^2 dk, zero when n_CM(0) = 0.
    double mean_phase_gradient() const;
};

/// Single-site excitation: F = 1/(2 pi).
SpectralAmplitude flat_amplitude(int nk = kDefaultGridSize);

/// Builds the amplitude from samples of F; modulus and unwrapped phase.
SpectralAmplitude amplitude_from_values(std::vector<double> k, std::span<const cplx> values);

/// Even Gaussian modulus of width sigma_k (in k), zero phase, normalized.
SpectralAmplitude gaussian_amplitude(double sigma_k, int nk = kDefaultGridSize);

/// F(k) = (1/2 pi) sum_n psi_n(0) exp(-i k n). Rejects states whose norm
/// differs from 1 by more than 1e-10.
SpectralAmplitude spectral_amplitude_of(const WaveState& state, int nk = kDefaultGridSize);

/// Shifts the site origin so that the H^2-weighted mean of phi' vanishes
/// (required by initial_acceleration_general). Returns the shift n_CM(0).
double center_phase_gradient(SpectralAmplitude& amplitude);

/// Half-width covering the light cone up to t_final plus a 40-site skirt,
/// using v_max = max_k |dE/dk| on the grid.
SiteWindow light_cone_window(const LatticeModel& model, double t_final, int nk = kDefaultGridSize);

/// Starts from light_cone_window and widens it by half until the state at
/// t_final is bulk-valid (non-Hermitian fronts carry an evanescent skirt well
/// beyond v_max t). Stops at the k-grid period; the caller then sees
/// bulk_valid() == false.
SiteWindow adaptive_window(const LatticeModel& model, const SpectralAmplitude& amplitude, double t_final);

/// psi_n(t) = int dk F(k) exp(i k n - i E(k) t), trapezoid rule on the grid.
/// Aliasing shows up as `bulk_valid() == false` on the result. Rejects
/// amplitudes with a nonzero phase_slope.
WaveState bloch_propagate(const LatticeModel& model, const SpectralAmplitude& amplitude, double t,
                          SiteWindow window);

inline constexpr double kRk4StepBudget = 0.1;

/// Classical RK4 on d psi_n/dt = i sum_r t_r psi_{n+r} within the state's
/// window (zero outside). Advances `initial` by t_final (the result's time is
/// initial.time + t_final); dt is shortened so the last step lands there.
/// Rejects dt * max|E| > 0.1. Renormalizes every 100 steps.
WaveState rk4_evolve(const LatticeModel& model, const WaveState& initial, double t_final, double dt);

/// n_CM = sum n |psi_n|^2 / sum |psi_n|^2. Throws on an all-zero state.
double center_of_mass(const WaveState& state);

/// n_CM(t) from the k-space ratio of two quadratures with weight
/// exp(2 E_I t), rescaled by its maximum. F' is obtained spectrally.
double center_of_mass_spectral(const LatticeModel& model, const SpectralAmplitude& amplitude, double t);

enum class Engine { bloch, rk4, spectral_formula, walk };

const char* engine_name(Engine engine);

struct ComTrajectory {
    std::vector<double> times;
    std::vector<double> com;
    Engine engine = Engine::bloch;
    std::string model_label;
    bool bulk_valid = true;  // false when any real-space state touched the window edge
};

struct TrajectoryOptions {
    double dt = 0.005;
    SiteWindow window{};    // defaults to adaptive_window(model, amplitude, times.back())
    bool auto_window = true;
};

/// n_CM at each time (increasing, starting at 0) with the chosen engine.
ComTrajectory com_trajectory(const LatticeModel& model, const SpectralAmplitude& amplitude,
                             const std::vector<double>& times, Engine engine, TrajectoryOptions options = {});

/// Largest t with max_k 2 |E_I(k) - <E_I>| t <= budget (default 0.2).
double early_fit_horizon(const LatticeModel& model, int nk = kDefaultGridSize, double budget = 0.2);

struct LyapunovEstimate {
    double value = 0.0;      ///< extrapolated exponent
    double at_T = 0.0;       ///< (log|psi| + log(T)/2) / T at T
    double at_half_T = 0.0;  ///< same at T/2
    bool stable = false;     ///< |value - at_T| < 10% |value|
    bool underflow = false;  ///< probe amplitude at the round-off floor (value is then a cap)
};

/// Growth rate along n = v t, sampled at the nearest integer site, with the
/// saddle-point 1/sqrt(T) prefactor removed and a T/2 Richardson step.
LyapunovEstimate lyapunov_exponent(const LatticeModel& model, double v, double T, int nk = kDefaultGridSize);

/// Early-time acceleration lim_{t->0} d^2 n_CM/dt^2 for a general amplitude:
///   a = -8 pi int H^2 phi' E_I^2 + 8 pi int H^2 E_I E_R'
///       + 32 pi^2 (int H^2 E_I) [int phi' H^2 E_I + int E_R H H'].
/// Rejects amplitudes that are not normalized or have nonzero mean phi'.
double initial_acceleration_general(const LatticeModel& model, const SpectralAmplitude& amplitude);

struct LongwaveAcceleration {
    double value = 0.0;
    bool narrow = true;  ///< false when H^2 carries more than 1e-6 of its weight beyond |k| = 0.5
};

/// a ~ -8 pi (sum l^2 t_l)(sum l t_l) int k^2 H^2 dk, real hoppings only.
LongwaveAcceleration longwave_acceleration(const LatticeModel& model, const SpectralAmplitude& amplitude);

}  // namespace nhse
