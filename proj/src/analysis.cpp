#include "nhse/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nhse::analysis {

namespace {

constexpr double kTimeSlack = 1e-12;

struct Samples {
    std::vector<double> t, n;
};

Samples select(const ComTrajectory& traj, TimeWindow window)
{
    if (traj.times.size() != traj.com.size()) throw std::invalid_argument("trajectory: length mismatch");
    if (traj.times.empty()) throw std::invalid_argument("trajectory: empty");
    if (!(window.hi > window.lo)) throw std::invalid_argument("fit window: hi must exceed lo");
    const double slack = kTimeSlack * std::max(1.0, std::abs(traj.times.back()));
    if (window.lo < traj.times.front() - slack || window.hi > traj.times.back() + slack)
        throw std::invalid_argument("fit window lies outside the trajectory time span");
    Samples s;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        if (traj.times[i] >= window.lo - slack && traj.times[i] <= window.hi + slack) {
            s.t.push_back(traj.times[i]);
            s.n.push_back(traj.com[i]);
        }
    }
    if (s.t.size() < 3) throw std::invalid_argument("fit window holds fewer than 3 samples");
    return s;
}

}  // namespace

FitReport fit_parabola(const ComTrajectory& traj, TimeWindow window, ParabolaForm form)
{
    if (!traj.com.empty() && std::abs(traj.com.front()) > 1e-8)
        throw std::invalid_argument("fit_parabola: trajectory must start at n_CM = 0");
    const Samples s = select(traj, window);
    FitReport r;
    r.window = window;
    r.n_points = static_cast<int>(s.t.size());

    if (form == ParabolaForm::pure) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < s.t.size(); ++i) {
            const double t2 = s.t[i] * s.t[i];
            num += s.n[i] * t2;
            den += t2 * t2;
        }
        if (!(den > 0.0)) throw std::invalid_argument("fit_parabola: degenerate time samples");
        r.quadratic = num / den;
        r.convention = "n_cm = c t^2, a = 2c";
    } else {
        // normal equations in (c, d) for the basis t^2, t^3
        double s4 = 0.0, s5 = 0.0, s6 = 0.0, b2 = 0.0, b3 = 0.0;
        for (std::size_t i = 0; i < s.t.size(); ++i) {
            const double t = s.t[i], t2 = t * t, t3 = t2 * t;
            s4 += t2 * t2;
            s5 += t2 * t3;
            s6 += t3 * t3;
            b2 += s.n[i] * t2;
            b3 += s.n[i] * t3;
        }
        const double det = s4 * s6 - s5 * s5;
        if (!(std::abs(det) > 0.0)) throw std::invalid_argument("fit_parabola: degenerate time samples");
        r.quadratic = (b2 * s6 - b3 * s5) / det;
        r.cubic = (s4 * b3 - s5 * b2) / det;
        r.convention = "n_cm = c t^2 + d t^3, a = 2c";
    }
    r.coefficient = 2.0 * r.quadratic;

    double ss = 0.0;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        const double t = s.t[i];
        const double res = s.n[i] - (r.quadratic * t * t + r.cubic * t * t * t);
        ss += res * res;
    }
    r.residual_rms = std::sqrt(ss / static_cast<double>(s.t.size()));
    r.past_regime = r.residual_rms > std::max(0.1 * std::abs(r.quadratic) * window.hi * window.hi, 1e-12);
    return r;
}

FitReport fit_drift(const ComTrajectory& traj, TimeWindow window)
{
    if (traj.times.empty()) throw std::invalid_argument("fit_drift: empty trajectory");
    if (window.lo < 0.5 * traj.times.back())
        throw std::invalid_argument("fit_drift: window must start in the late-time half of the trajectory");
    const Samples s = select(traj, window);
    const double n = static_cast<double>(s.t.size());
    double mt = 0.0, mn = 0.0;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        mt += s.t[i];
        mn += s.n[i];
    }
    mt /= n;
    mn /= n;
    double stt = 0.0, stn = 0.0;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        stt += (s.t[i] - mt) * (s.t[i] - mt);
        stn += (s.t[i] - mt) * (s.n[i] - mn);
    }
    FitReport r;
    r.window = window;
    r.n_points = static_cast<int>(s.t.size());
    r.coefficient = stn / stt;
    r.convention = "n_cm = v t + b";
    const double b = mn - r.coefficient * mt;
    double ss = 0.0;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        const double res = s.n[i] - (r.coefficient * s.t[i] + b);
        ss += res * res;
    }
    r.residual_rms = std::sqrt(ss / n);
    return r;
}

std::vector<std::pair<double, double>> finite_difference_accel(const ComTrajectory& traj)
{
    const auto& t = traj.times;
    if (t.size() < 3 || traj.com.size() != t.size())
        throw std::invalid_argument("finite_difference_accel: need at least 3 samples");
    const double dt = t[1] - t[0];
    for (std::size_t i = 1; i + 1 < t.size(); ++i)
        if (std::abs((t[i + 1] - t[i]) - dt) > 1e-9 * std::abs(dt))
            throw std::invalid_argument("finite_difference_accel: times are not uniformly spaced");
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 1; i + 1 < t.size(); ++i)
        out.emplace_back(t[i], (traj.com[i + 1] - 2.0 * traj.com[i] + traj.com[i - 1]) / (dt * dt));
    return out;
}

double shoelace_area(std::span<const cplx> polygon)
{
    if (polygon.size() < 3) throw std::invalid_argument("shoelace_area: need at least 3 points");
    const std::size_t n = polygon.size();
    auto edge = [&](std::size_t j) {
        const cplx a = polygon[j], b = polygon[(j + 1) % n];
        return 0.5 * (a.imag() + b.imag()) * (b.real() - a.real());
    };
    // Reversal maps edge j to edge n-2-j (mod n). Summing those pairs in a
    // fixed order makes the reversed polygon give exactly the negated area.
    double acc = 0.0;
    std::size_t i = 0, j = n - 2;
    for (; i < j; ++i, --j) acc += edge(i) + edge(j);
    if (i == j) acc += edge(i);
    return acc + edge(n - 1);
}

int winding_number(cplx z, std::span<const cplx> polygon)
{
    int wn = 0;
    const std::size_t n = polygon.size();
    for (std::size_t j = 0; j < n; ++j) {
        const cplx a = polygon[j], b = polygon[(j + 1) % n];
        const double side = (b.real() - a.real()) * (z.imag() - a.imag()) - (z.real() - a.real()) * (b.imag() - a.imag());
        if (a.imag() <= z.imag()) {
            if (b.imag() > z.imag() && side > 0.0) ++wn;
        } else if (b.imag() <= z.imag() && side < 0.0) {
            --wn;
        }
    }
    return wn;
}

double distance_to_polyline(cplx z, std::span<const cplx> polygon)
{
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = polygon.size();
    for (std::size_t j = 0; j < n; ++j) {
        const cplx a = polygon[j], b = polygon[(j + 1) % n];
        const cplx ab = b - a;
        const double len2 = std::norm(ab);
        double s = len2 > 0.0 ? ((z - a) * std::conj(ab)).real() / len2 : 0.0;
        s = std::clamp(s, 0.0, 1.0);
        best = std::min(best, std::abs(z - (a + s * ab)));
    }
    return best;
}

bool strictly_inside(cplx z, std::span<const cplx> polygon, double edge_tolerance)
{
    return winding_number(z, polygon) != 0 && distance_to_polyline(z, polygon) > edge_tolerance;
}

bool inside_or_on(cplx z, std::span<const cplx> polygon, double edge_tolerance)
{
    return winding_number(z, polygon) != 0 || distance_to_polyline(z, polygon) <= edge_tolerance;
}

double directed_distance(std::span<const cplx> points, std::span<const cplx> polygon)
{
    double d = 0.0;
    for (const cplx& z : points) d = std::max(d, distance_to_polyline(z, polygon));
    return d;
}

}  // namespace nhse::analysis
