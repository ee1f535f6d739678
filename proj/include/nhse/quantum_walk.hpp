#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "nhse/dynamics.hpp"
#include "nhse/lattice_model.hpp"

namespace nhse::walk {

/// Coupler angle beta in (0, pi) and balanced gain/loss h.
struct WalkParams {
    double beta = 0.0;
    double h = 0.0;

    void validate() const;
    friend bool operator==(const WalkParams&, const WalkParams&) = default;
};

/// Short-loop (u) and long-loop (v) amplitudes at round trip `step`.
struct WalkState {
    SiteWindow window;
    std::vector<cplx> u;
    std::vector<cplx> v;
    int step = 0;

    double total_intensity() const;
    bool bulk_valid(double tolerance = kBoundaryTolerance) const;
};

/// u'_n = e^h (cos b u_{n+1} + i sin b v_n), v'_n = e^-h (cos b v_{n-1} + i sin b u_n).
WalkState walk_step(const WalkState& state, const WalkParams& p);

/// States for m = 0..steps (inclusive).
std::vector<WalkState> walk_history(const WalkState& initial, const WalkParams& p, int steps);

/// One-step Bloch matrix acting on (U, V) for the ansatz exp(i k n).
Eigen::Matrix2cd bloch_step_matrix(double k, const WalkParams& p);

struct BandPoint {
    double k = 0.0;
    cplx theta_plus, theta_minus;
    std::array<cplx, 2> eigvec_plus{}, eigvec_minus{};  // (U, V) with U = 1
    bool singular = false;                              // sin beta ~ 0: eigenvectors withheld
};

/// theta_{+-} = +-acos(cos b cos(k - i h)) on the principal branch, with
/// V_{+-} = (exp(-h - i theta) - cos b e^{ik}) / (i sin b).
BandPoint quasienergy_bands(double k, const WalkParams& p);

/// u_0 = 1, v_0 = e^{-h}: excites only the theta_- band near beta = pi/2.
WalkState two_pulse_initial(const WalkParams& p, SiteWindow window);

/// u_0 = 1, v_0 = 0: both bands with equal weight.
WalkState single_pulse_initial(SiteWindow window);

/// Default window +-(steps + 10); the walk's light cone is one site per step.
SiteWindow default_walk_window(int steps);

/// Hatano-Nelson reduction t_{+-1} = -(cos b / 2) e^{+-h}, E(k) = cos b cos(k - i h).
LatticeModel effective_model(const WalkParams& p);

/// Center of mass of u and v intensities. Throws on a zero state.
double walk_com(const WalkState& state);

struct WalkMoments {
    double norm = 0.0;
    double first_moment = 0.0;
};

/// Single-pulse norm (1/2pi) int cosh(2 E_I m) dk and first moment
/// (m/2pi) int E_R' sinh(2 E_I m) dk for E = cos b cos(k - i h).
/// Requires |cos b| <= 0.25.
WalkMoments closed_form_moments(int m, const WalkParams& p, int nk = kDefaultGridSize);

/// a = -cos^2 b sinh(2h).
double predicted_walk_acceleration(const WalkParams& p);

/// Exact k-space solution: applies bloch_step_matrix^m to the Fourier
/// transform of the initial state and transforms back onto its window.
WalkState bloch_reconstruct(const WalkState& initial, const WalkParams& p, int m, int nk = 1024);

/// n_CM(m) for m = 0..steps as a trajectory (engine = walk, times = m).
ComTrajectory walk_trajectory(const std::vector<WalkState>& history, std::string label = {});

}  // namespace nhse::walk
