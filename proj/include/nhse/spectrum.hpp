#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nhse/lattice_model.hpp"

namespace nhse {

inline constexpr int kMinSpectrumSamples = 16;
inline constexpr int kDefaultGridSize = 4096;
inline constexpr int kDefaultObcSize = 60;

/// N_k uniformly spaced wavenumbers k_j = -pi + 2 pi j / N_k.
std::vector<double> brillouin_grid(int nk);

/// Derivative of a periodic function sampled on a uniform grid over [-pi, pi),
/// by FFT. The Nyquist mode is dropped.
std::vector<cplx> periodic_derivative(std::span<const cplx> samples);
std::vector<double> periodic_derivative(std::span<const double> samples);

/// PBC dispersion sampled on the Brillouin-zone grid.
struct SpectrumCurve {
    std::vector<double> k;
    std::vector<cplx> energy;
    std::string model_label;

    std::size_t size() const { return k.size(); }
    double dk() const;
    /// Same samples traversed with k -> -k (reverses the loop orientation).
    SpectrumCurve reversed() const;
};

/// Requires nk >= 16 and even.
SpectrumCurve sample_pbc_spectrum(const LatticeModel& model, int nk);

/// Dense N x N banded Toeplitz truncation H_{n,l} = -t_{l-n}.
Eigen::MatrixXcd obc_hamiltonian(const LatticeModel& model, int n);

struct ObcEigenpairs {
    std::vector<cplx> values;
    Eigen::MatrixXcd vectors;   // columns match `values`
    double max_residual = 0.0;  // max_j |H x_j - E_j x_j| / |H|
};

/// OBC eigenvalues sorted by real part, then imaginary part. Requires
/// n >= 4R + 4. Throws NumericalError when the solver does not converge.
std::vector<cplx> obc_spectrum(const LatticeModel& model, int n = kDefaultObcSize);

/// Eigenvalues and unit eigenvectors; throws NumericalError when a pair
/// misses the residual bound 1e-8 |H|.
ObcEigenpairs obc_eigenpairs(const LatticeModel& model, int n = kDefaultObcSize);

/// Signed area A = 1/2 int (E_I E_R' - E_R E_I') dk of the sampled loop, with
/// spectrally differentiated samples and the trapezoid rule.
double spectral_area_quadrature(const SpectrumCurve& curve);

/// A = -pi sum_n n |t_n|^2, summed in +-n pairs.
double spectral_area_closed_form(const LatticeModel& model);

struct MaxImag {
    double k_m = 0.0;
    double lambda_max = 0.0;
    bool degenerate = false;
};

/// Grid argmax of E_I refined by a three-point parabola. Ties go to the
/// smallest k; `degenerate` is set when a second local maximum matches the
/// global one within 1e-9.
MaxImag locate_max_imag(const SpectrumCurve& curve);

struct DriftVelocity {
    double v_m = 0.0;   // 0 when degenerate
    double k_m = 0.0;
    bool degenerate = false;
};

/// v_m = dE_R/dk at the maximum of E_I.
DriftVelocity drift_velocity(const LatticeModel& model, int nk = kDefaultGridSize);

/// a = (2/pi) A from the closed-form area.
double predicted_acceleration(const LatticeModel& model);

/// 1e-6 (max_r |t_r|)^2.
double default_area_tolerance(const LatticeModel& model);

struct SpectralSummary {
    double area = 0.0;
    double k_m = 0.0;
    double lambda_max = 0.0;
    double v_m = 0.0;
    double accel = 0.0;
    bool nhse_flag = false;
    bool degenerate_max = false;
};

SpectralSummary summarize(const LatticeModel& model, int nk, double area_tolerance);
SpectralSummary summarize(const LatticeModel& model, int nk = kDefaultGridSize);

}  // namespace nhse
