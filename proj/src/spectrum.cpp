#include "nhse/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

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

}  // namespace

std::vector<double> brillouin_grid(int nk)
{
    if (nk <= 0) throw std::invalid_argument("brillouin_grid: nk must be positive");
    std::vector<double> k(nk);
    for (int j = 0; j < nk; ++j) k[j] = -kPi + 2.0 * kPi * j / nk;
    return k;
}

std::vector<cplx> periodic_derivative(std::span<const cplx> samples)
{
    const int n = static_cast<int>(samples.size());
    Eigen::FFT<double> fft;
    std::vector<cplx> in(samples.begin(), samples.end());
    std::vector<cplx> spec;
    fft.fwd(spec, in);
    for (int m = 0; m < n; ++m) {
        int freq = m <= n / 2 ? m : m - n;
        if (n % 2 == 0 && m == n / 2) freq = 0;
        spec[m] *= cplx(0.0, freq);
    }
    std::vector<cplx> out;
    fft.inv(out, spec);
    return out;
}

std::vector<double> periodic_derivative(std::span<const double> samples)
{
    std::vector<cplx> z(samples.begin(), samples.end());
    auto d = periodic_derivative(std::span<const cplx>(z));
    std::vector<double> out(d.size());
    for (std::size_t j = 0; j < d.size(); ++j) out[j] = d[j].real();
    return out;
}

double SpectrumCurve::dk() const { return 2.0 * kPi / static_cast<double>(k.size()); }

SpectrumCurve SpectrumCurve::reversed() const
{
    SpectrumCurve r{{}, {}, model_label};
    r.k.resize(k.size());
    r.energy.resize(energy.size());
    // sample j of the reversed curve sits at -k_j; k_0 = -pi maps to itself
    const std::size_t n = k.size();
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = (n - j) % n;
        r.k[j] = k[j];
        r.energy[j] = energy[src];
    }
    return r;
}

SpectrumCurve sample_pbc_spectrum(const LatticeModel& model, int nk)
{
    if (nk < kMinSpectrumSamples || nk % 2 != 0)
        throw std::invalid_argument("sample_pbc_spectrum: N_k must be even and >= 16, got " + std::to_string(nk));
    SpectrumCurve curve{brillouin_grid(nk), std::vector<cplx>(nk), model.label()};
    const auto hops = hop_list(model);
    kernels::active().dispersion(hops, curve.k, curve.energy);
    return curve;
}

Eigen::MatrixXcd obc_hamiltonian(const LatticeModel& model, int n)
{
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& [r, t] : model.hoppings()) {
        for (int row = 0; row < n; ++row) {
            const int col = row + r;
            if (col >= 0 && col < n) h(row, col) = -t;
        }
    }
    return h;
}

namespace {

void check_obc_size(const LatticeModel& model, int n)
{
    if (n < 4 * model.range() + 4)
        throw std::invalid_argument("obc_spectrum: N = " + std::to_string(n) + " below 4R + 4 for '" +
                                    model.label() + "'");
}

std::vector<int> sorted_order(const Eigen::VectorXcd& values)
{
    std::vector<int> idx(values.size());
    for (int i = 0; i < values.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (values[a].real() != values[b].real()) return values[a].real() < values[b].real();
        return values[a].imag() < values[b].imag();
    });
    return idx;
}

}  // namespace

std::vector<cplx> obc_spectrum(const LatticeModel& model, int n)
{
    check_obc_size(model, n);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(obc_hamiltonian(model, n), false);
    if (solver.info() != Eigen::Success)
        throw NumericalError("obc_spectrum: eigensolver did not converge (N = " + std::to_string(n) + ", model '" +
                             model.label() + "')");
    const Eigen::VectorXcd& ev = solver.eigenvalues();
    std::vector<cplx> out;
    out.reserve(n);
    for (int i : sorted_order(ev)) out.push_back(ev[i]);
    return out;
}

ObcEigenpairs obc_eigenpairs(const LatticeModel& model, int n)
{
    check_obc_size(model, n);
    const Eigen::MatrixXcd h = obc_hamiltonian(model, n);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(h, true);
    if (solver.info() != Eigen::Success)
        throw NumericalError("obc_eigenpairs: eigensolver did not converge (N = " + std::to_string(n) +
                             ", model '" + model.label() + "')");
    const double hnorm = h.norm();
    ObcEigenpairs result;
    result.vectors.resize(n, n);
    const auto order = sorted_order(solver.eigenvalues());
    for (int c = 0; c < n; ++c) {
        const int src = order[c];
        const cplx e = solver.eigenvalues()[src];
        Eigen::VectorXcd x = solver.eigenvectors().col(src);
        x.normalize();
        const double res = (h * x - e * x).norm() / hnorm;
        result.max_residual = std::max(result.max_residual, res);
        result.values.push_back(e);
        result.vectors.col(c) = x;
    }
    if (result.max_residual > 1e-8)
        throw NumericalError("obc_eigenpairs: residual " + std::to_string(result.max_residual) +
                             " exceeds 1e-8 |H| (N = " + std::to_string(n) + ", model '" + model.label() + "')");
    return result;
}

double spectral_area_quadrature(const SpectrumCurve& curve)
{
    const auto de = periodic_derivative(std::span<const cplx>(curve.energy));
    double acc = 0.0;
    for (std::size_t j = 0; j < curve.size(); ++j) {
        const cplx e = curve.energy[j];
        acc += e.imag() * de[j].real() - e.real() * de[j].imag();
    }
    return 0.5 * acc * curve.dk();
}

double spectral_area_closed_form(const LatticeModel& model)
{
    double acc = 0.0;
    for (int n = 1; n <= model.range(); ++n) acc += n * (std::norm(model.hopping(n)) - std::norm(model.hopping(-n)));
    return -kPi * acc + 0.0;  // no negative zero
}

MaxImag locate_max_imag(const SpectrumCurve& curve)
{
    const std::size_t n = curve.size();
    std::vector<double> ei(n);
    for (std::size_t j = 0; j < n; ++j) ei[j] = curve.energy[j].imag();

    auto refine = [&](std::size_t j) {
        const double ym = ei[(j + n - 1) % n], y0 = ei[j], yp = ei[(j + 1) % n];
        const double denom = ym - 2.0 * y0 + yp;
        double delta = 0.0;
        if (denom < 0.0) delta = std::clamp(0.5 * (ym - yp) / denom, -0.5, 0.5);
        const double value = y0 - 0.25 * (ym - yp) * delta;
        return std::pair{curve.k[j] + delta * curve.dk(), std::max(value, y0)};
    };

    // first index wins ties, which is the smallest k
    std::size_t best = 0;
    for (std::size_t j = 1; j < n; ++j)
        if (ei[j] > ei[best]) best = j;
    const auto [k_best, lambda] = refine(best);

    MaxImag out{k_best, lambda, false};
    if (out.k_m >= kPi) out.k_m -= 2.0 * kPi;
    if (out.k_m < -kPi) out.k_m += 2.0 * kPi;

    for (std::size_t j = 0; j < n && !out.degenerate; ++j) {
        if (j == best) continue;
        const double ym = ei[(j + n - 1) % n], yp = ei[(j + 1) % n];
        if (ei[j] < ym || ei[j] < yp) continue;
        const auto [kj, vj] = refine(j);
        double sep = std::abs(kj - k_best);
        sep = std::min(sep, 2.0 * kPi - sep);
        if (sep > 1.5 * curve.dk() && std::abs(vj - lambda) <= 1e-9) out.degenerate = true;
    }
    return out;
}

DriftVelocity drift_velocity(const LatticeModel& model, int nk)
{
    const auto mx = locate_max_imag(sample_pbc_spectrum(model, nk));
    DriftVelocity d{0.0, mx.k_m, mx.degenerate};
    if (!mx.degenerate) d.v_m = dispersion_derivative(model, mx.k_m).real();
    return d;
}

double predicted_acceleration(const LatticeModel& model) { return 2.0 / kPi * spectral_area_closed_form(model); }

double default_area_tolerance(const LatticeModel& model)
{
    const double t = model.max_abs_hopping();
    return 1e-6 * t * t;
}

SpectralSummary summarize(const LatticeModel& model, int nk, double area_tolerance)
{
    if (!(area_tolerance > 0.0)) throw std::invalid_argument("summarize: area_tolerance must be positive");
    const auto curve = sample_pbc_spectrum(model, nk);
    const auto mx = locate_max_imag(curve);
    SpectralSummary s;
    s.area = spectral_area_quadrature(curve);
    s.k_m = mx.k_m;
    s.lambda_max = mx.lambda_max;
    s.degenerate_max = mx.degenerate;
    s.v_m = mx.degenerate ? 0.0 : dispersion_derivative(model, mx.k_m).real();
    s.accel = 2.0 / kPi * s.area;
    s.nhse_flag = std::abs(s.area) > area_tolerance;
    return s;
}

SpectralSummary summarize(const LatticeModel& model, int nk)
{
    return summarize(model, nk, default_area_tolerance(model));
}

}  // namespace nhse
