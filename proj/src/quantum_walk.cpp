#include "nhse/quantum_walk.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nhse/kernels.hpp"

namespace nhse::walk {

namespace {

constexpr double kPi = std::numbers::pi;

// exp(i 2 pi q / N) with q reduced mod N
cplx ring_phase(long j, long n, long nk, double sign)
{
    long q = (j * (n % nk)) % nk;
    if (q < 0) q += nk;
    return std::polar(1.0, sign * 2.0 * kPi * static_cast<double>(q) / static_cast<double>(nk));
}

}  // namespace

void WalkParams::validate() const
{
    if (!(beta > 0.0 && beta < kPi)) throw std::invalid_argument("WalkParams: beta must lie in (0, pi)");
    if (!std::isfinite(h)) throw std::invalid_argument("WalkParams: h must be finite");
}

double WalkState::total_intensity() const
{
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += std::norm(u[i]) + std::norm(v[i]);
    return s;
}

bool WalkState::bulk_valid(double tolerance) const
{
    if (u.empty()) return false;
    double m = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) m = std::max({m, std::abs(u[i]), std::abs(v[i])});
    const double limit = tolerance * m;
    return std::abs(u.front()) < limit && std::abs(u.back()) < limit && std::abs(v.front()) < limit &&
           std::abs(v.back()) < limit;
}

WalkState walk_step(const WalkState& state, const WalkParams& p)
{
    p.validate();
    if (state.u.size() != state.window.size() || state.v.size() != state.window.size())
        throw std::invalid_argument("walk_step: arrays do not match the window");
    WalkState next{state.window, std::vector<cplx>(state.u.size()), std::vector<cplx>(state.v.size()), state.step + 1};
    const kernels::WalkCoefficients w{std::cos(p.beta), std::sin(p.beta), std::exp(p.h), std::exp(-p.h)};
    kernels::active().walk_map(w, state.u, state.v, next.u, next.v);
    return next;
}

std::vector<WalkState> walk_history(const WalkState& initial, const WalkParams& p, int steps)
{
    if (steps < 0) throw std::invalid_argument("walk_history: steps must be >= 0");
    std::vector<WalkState> out;
    out.reserve(steps + 1);
    out.push_back(initial);
    for (int m = 0; m < steps; ++m) out.push_back(walk_step(out.back(), p));
    return out;
}

Eigen::Matrix2cd bloch_step_matrix(double k, const WalkParams& p)
{
    const double c = std::cos(p.beta), s = std::sin(p.beta);
    const double gain = std::exp(p.h), loss = std::exp(-p.h);
    Eigen::Matrix2cd m;
    m(0, 0) = gain * c * std::polar(1.0, k);
    m(0, 1) = cplx(0.0, gain * s);
    m(1, 0) = cplx(0.0, loss * s);
    m(1, 1) = loss * c * std::polar(1.0, -k);
    return m;
}

BandPoint quasienergy_bands(double k, const WalkParams& p)
{
    const double c = std::cos(p.beta), s = std::sin(p.beta);
    const cplx z = c * std::cos(cplx(k, -p.h));
    BandPoint b;
    b.k = k;
    b.theta_plus = std::acos(z);
    b.theta_minus = -b.theta_plus;
    if (std::abs(s) < 1e-12) {
        b.singular = true;
        return b;
    }
    auto eigvec = [&](cplx theta) {
        const cplx num = std::exp(cplx(-p.h, 0.0) - cplx(0.0, 1.0) * theta) - c * std::polar(1.0, k);
        return std::array<cplx, 2>{1.0, num / cplx(0.0, s)};
    };
    b.eigvec_plus = eigvec(b.theta_plus);
    b.eigvec_minus = eigvec(b.theta_minus);
    return b;
}

WalkState two_pulse_initial(const WalkParams& p, SiteWindow window)
{
    if (!window.contains(0)) throw std::invalid_argument("two_pulse_initial: window must contain site 0");
    WalkState s{window, std::vector<cplx>(window.size()), std::vector<cplx>(window.size()), 0};
    s.u[-window.lo] = 1.0;
    s.v[-window.lo] = std::exp(-p.h);
    return s;
}

WalkState single_pulse_initial(SiteWindow window)
{
    if (!window.contains(0)) throw std::invalid_argument("single_pulse_initial: window must contain site 0");
    WalkState s{window, std::vector<cplx>(window.size()), std::vector<cplx>(window.size()), 0};
    s.u[-window.lo] = 1.0;
    return s;
}

SiteWindow default_walk_window(int steps) { return SiteWindow::symmetric(steps + 10); }

LatticeModel effective_model(const WalkParams& p)
{
    const double half = -0.5 * std::cos(p.beta);
    return LatticeModel({{1, half * std::exp(p.h)}, {-1, half * std::exp(-p.h)}}, "walk_effective");
}

double walk_com(const WalkState& state)
{
    double w = 0.0, nw = 0.0;
    for (std::size_t i = 0; i < state.u.size(); ++i) {
        const double p = std::norm(state.u[i]) + std::norm(state.v[i]);
        w += p;
        nw += static_cast<double>(state.window.lo + static_cast<long>(i)) * p;
    }
    if (!(w > 0.0)) throw std::invalid_argument("walk_com: zero state");
    return nw / w;
}

WalkMoments closed_form_moments(int m, const WalkParams& p, int nk)
{
    p.validate();
    if (m < 0) throw std::invalid_argument("closed_form_moments: m must be >= 0");
    const double c = std::cos(p.beta);
    if (std::abs(c) > 0.25)
        throw std::invalid_argument("closed_form_moments: |cos beta| > 0.25 is outside the single-band regime");
    const auto k = brillouin_grid(nk);
    const double dk = 2.0 * kPi / nk;
    double norm = 0.0, first = 0.0;
    for (double kj : k) {
        const double ei = c * std::sin(kj) * std::sinh(p.h);
        const double der = -c * std::sin(kj) * std::cosh(p.h);
        norm += std::cosh(2.0 * ei * m);
        first += der * std::sinh(2.0 * ei * m);
    }
    return {norm * dk / (2.0 * kPi), m * first * dk / (2.0 * kPi)};
}

double predicted_walk_acceleration(const WalkParams& p)
{
    const double c = std::cos(p.beta);
    return -c * c * std::sinh(2.0 * p.h);
}

WalkState bloch_reconstruct(const WalkState& initial, const WalkParams& p, int m, int nk)
{
    p.validate();
    if (static_cast<int>(initial.window.size()) > nk)
        throw std::invalid_argument("bloch_reconstruct: window wider than the k-grid period");
    const long period = nk;
    std::vector<Eigen::Vector2cd> coeff(nk, Eigen::Vector2cd::Zero());
    for (long j = 0; j < period; ++j) {
        for (std::size_t i = 0; i < initial.u.size(); ++i) {
            const long n = initial.window.lo + static_cast<long>(i);
            const cplx ph = ring_phase(j, n, period, -1.0);
            coeff[j](0) += initial.u[i] * ph;
            coeff[j](1) += initial.v[i] * ph;
        }
        const Eigen::Matrix2cd step = bloch_step_matrix(2.0 * kPi * static_cast<double>(j) / nk, p);
        for (int s = 0; s < m; ++s) coeff[j] = step * coeff[j];
    }
    WalkState out{initial.window, std::vector<cplx>(initial.u.size()), std::vector<cplx>(initial.v.size()),
                  initial.step + m};
    for (std::size_t i = 0; i < out.u.size(); ++i) {
        const long n = initial.window.lo + static_cast<long>(i);
        cplx au{}, av{};
        for (long j = 0; j < period; ++j) {
            const cplx ph = ring_phase(j, n, period, 1.0);
            au += coeff[j](0) * ph;
            av += coeff[j](1) * ph;
        }
        out.u[i] = au / static_cast<double>(nk);
        out.v[i] = av / static_cast<double>(nk);
    }
    return out;
}

ComTrajectory walk_trajectory(const std::vector<WalkState>& history, std::string label)
{
    ComTrajectory traj;
    traj.engine = Engine::walk;
    traj.model_label = std::move(label);
    for (const auto& s : history) {
        traj.times.push_back(static_cast<double>(s.step - history.front().step));
        traj.com.push_back(walk_com(s));
        traj.bulk_valid = traj.bulk_valid && s.bulk_valid();
    }
    return traj;
}

}  // namespace nhse::walk
