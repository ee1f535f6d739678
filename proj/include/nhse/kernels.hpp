#pragma once

// Data-parallel inner loops. Every kernel exists twice: a plain serial loop
// kept as the reference, and an OpenMP version that computes each output
// element with the same arithmetic in the same order, so the two agree
// bit-for-bit. Reductions stay serial in the callers to keep results
// independent of the thread count.

#include <complex>
#include <span>
#include <vector>

namespace nhse::kernels {

using cplx = std::complex<double>;

struct Hop {
    int r;
    cplx t;
};

/// out[j] = -sum_r t_r exp(i k_j r)
using DispersionFn = void (*)(std::span<const Hop>, std::span<const double>, std::span<cplx>);

/// out[i] = sum_j coeff[j] * twiddle[(j * (site_lo + i)) mod N], N = coeff.size(),
/// twiddle[q] = exp(2 pi i q / N).
using BlochSumFn = void (*)(std::span<const cplx> coeff, std::span<const cplx> twiddle, long site_lo,
                            std::span<cplx> out);

/// out[i] = i * sum_r t_r in[i + r], entries outside the window count as zero.
using BandedApplyFn = void (*)(std::span<const Hop>, std::span<const cplx> in, std::span<cplx> out);

/// One step of the fiber-loop map on a window (outside sites are zero):
///   u'_n = gain (c u_{n+1} + i s v_n),  v'_n = loss (c v_{n-1} + i s u_n).
struct WalkCoefficients {
    double c, s, gain, loss;
};
using WalkMapFn = void (*)(const WalkCoefficients&, std::span<const cplx> u, std::span<const cplx> v,
                           std::span<cplx> u_out, std::span<cplx> v_out);

struct KernelSet {
    DispersionFn dispersion;
    BlochSumFn bloch_sum;
    BandedApplyFn banded_apply;
    WalkMapFn walk_map;
};

namespace serial {
void dispersion(std::span<const Hop>, std::span<const double>, std::span<cplx>);
void bloch_sum(std::span<const cplx>, std::span<const cplx>, long, std::span<cplx>);
void banded_apply(std::span<const Hop>, std::span<const cplx>, std::span<cplx>);
void walk_map(const WalkCoefficients&, std::span<const cplx>, std::span<const cplx>, std::span<cplx>,
              std::span<cplx>);
}  // namespace serial

namespace parallel {
void dispersion(std::span<const Hop>, std::span<const double>, std::span<cplx>);
void bloch_sum(std::span<const cplx>, std::span<const cplx>, long, std::span<cplx>);
void banded_apply(std::span<const Hop>, std::span<const cplx>, std::span<cplx>);
void walk_map(const WalkCoefficients&, std::span<const cplx>, std::span<const cplx>, std::span<cplx>,
              std::span<cplx>);
}  // namespace parallel

const KernelSet& serial_kernels();
const KernelSet& parallel_kernels();

/// The set used by the library (parallel). Results do not depend on it.
const KernelSet& active();

/// twiddle[q] = exp(2 pi i q / n), q = 0..n-1.
std::vector<cplx> twiddle_table(int n);

/// Caps OpenMP worker threads; n <= 0 leaves the runtime default.
void set_thread_limit(int n);
int thread_limit();

}  // namespace nhse::kernels
