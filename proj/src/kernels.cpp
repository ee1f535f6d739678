#include "nhse/kernels.hpp"

#include <cmath>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nhse::kernels {

namespace {

inline cplx dispersion_at(std::span<const Hop> hops, double k)
{
    cplx e{};
    for (const Hop& h : hops) e -= h.t * std::polar(1.0, k * h.r);
    return e;
}

inline cplx bloch_sum_at(std::span<const cplx> coeff, std::span<const cplx> twiddle, long n)
{
    const long nk = static_cast<long>(coeff.size());
    long step = n % nk;
    if (step < 0) step += nk;
    cplx acc{};
    long q = 0;
    for (long j = 0; j < nk; ++j) {
        acc += coeff[j] * twiddle[q];
        q += step;
        if (q >= nk) q -= nk;
    }
    return acc;
}

inline cplx banded_at(std::span<const Hop> hops, std::span<const cplx> in, long i)
{
    const long size = static_cast<long>(in.size());
    cplx acc{};
    for (const Hop& h : hops) {
        const long j = i + h.r;
        if (j >= 0 && j < size) acc += h.t * in[j];
    }
    return cplx(-acc.imag(), acc.real());
}

inline void walk_at(const WalkCoefficients& w, std::span<const cplx> u, std::span<const cplx> v,
                    std::span<cplx> u_out, std::span<cplx> v_out, long n)
{
    const long size = static_cast<long>(u.size());
    const cplx is{0.0, w.s};
    const cplx u_next = n + 1 < size ? u[n + 1] : cplx{};
    const cplx v_prev = n - 1 >= 0 ? v[n - 1] : cplx{};
    u_out[n] = w.gain * (w.c * u_next + is * v[n]);
    v_out[n] = w.loss * (w.c * v_prev + is * u[n]);
}

}  // namespace

namespace serial {

void dispersion(std::span<const Hop> hops, std::span<const double> k, std::span<cplx> out)
{
    for (std::size_t j = 0; j < k.size(); ++j) out[j] = dispersion_at(hops, k[j]);
}

void bloch_sum(std::span<const cplx> coeff, std::span<const cplx> twiddle, long site_lo, std::span<cplx> out)
{
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = bloch_sum_at(coeff, twiddle, site_lo + static_cast<long>(i));
}

void banded_apply(std::span<const Hop> hops, std::span<const cplx> in, std::span<cplx> out)
{
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = banded_at(hops, in, static_cast<long>(i));
}

void walk_map(const WalkCoefficients& w, std::span<const cplx> u, std::span<const cplx> v, std::span<cplx> u_out,
              std::span<cplx> v_out)
{
    for (std::size_t n = 0; n < u.size(); ++n) walk_at(w, u, v, u_out, v_out, static_cast<long>(n));
}

}  // namespace serial

namespace parallel {

void dispersion(std::span<const Hop> hops, std::span<const double> k, std::span<cplx> out)
{
    const long n = static_cast<long>(k.size());
#pragma omp parallel for schedule(static)
    for (long j = 0; j < n; ++j) out[j] = dispersion_at(hops, k[j]);
}

void bloch_sum(std::span<const cplx> coeff, std::span<const cplx> twiddle, long site_lo, std::span<cplx> out)
{
    const long n = static_cast<long>(out.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) out[i] = bloch_sum_at(coeff, twiddle, site_lo + i);
}

void banded_apply(std::span<const Hop> hops, std::span<const cplx> in, std::span<cplx> out)
{
    const long n = static_cast<long>(in.size());
    // small windows are not worth a fork
#pragma omp parallel for schedule(static) if (n > 2048)
    for (long i = 0; i < n; ++i) out[i] = banded_at(hops, in, i);
}

void walk_map(const WalkCoefficients& w, std::span<const cplx> u, std::span<const cplx> v, std::span<cplx> u_out,
              std::span<cplx> v_out)
{
    const long n = static_cast<long>(u.size());
#pragma omp parallel for schedule(static) if (n > 2048)
    for (long i = 0; i < n; ++i) walk_at(w, u, v, u_out, v_out, i);
}

}  // namespace parallel

const KernelSet& serial_kernels()
{
    static const KernelSet set{serial::dispersion, serial::bloch_sum, serial::banded_apply, serial::walk_map};
    return set;
}

const KernelSet& parallel_kernels()
{
    static const KernelSet set{parallel::dispersion, parallel::bloch_sum, parallel::banded_apply,
                               parallel::walk_map};
    return set;
}

const KernelSet& active() { return parallel_kernels(); }

std::vector<cplx> twiddle_table(int n)
{
    std::vector<cplx> w(n);
    for (int q = 0; q < n; ++q) w[q] = std::polar(1.0, 2.0 * std::numbers::pi * q / n);
    return w;
}

void set_thread_limit(int n)
{
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

int thread_limit()
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace nhse::kernels
