// Serial vs OpenMP timings of the inner kernels.
// usage: bench_kernels [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

#include "nhse/kernels.hpp"
#include "nhse/spectrum.hpp"

using namespace nhse;
using kernels::cplx;

namespace {

double time_ms(const std::function<void()>& fn, int repeats)
{
    fn();  // warm-up
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < repeats; ++i) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / repeats;
}

void report(const char* name, double serial, double parallel)
{
    std::printf("%-14s serial %9.3f ms   parallel %9.3f ms   speedup %5.2f\n", name, serial, parallel,
                serial / parallel);
}

}  // namespace

int main(int argc, char** argv)
{
    const int repeats = argc > 1 ? std::atoi(argv[1]) : 5;
    const auto& s = kernels::serial_kernels();
    const auto& p = kernels::parallel_kernels();
    std::printf("threads: %d, repeats: %d\n", kernels::thread_limit(), repeats);

    const std::vector<kernels::Hop> hops{{-2, 0.6}, {-1, 0.8}, {1, 1.0}, {2, 0.8}};

    {
        const int nk = 1 << 16;
        const auto k = brillouin_grid(nk);
        std::vector<cplx> out(nk);
        report("dispersion", time_ms([&] { s.dispersion(hops, k, out); }, repeats),
               time_ms([&] { p.dispersion(hops, k, out); }, repeats));
    }
    {
        const int nk = 4096, width = 449;
        std::vector<cplx> coeff(nk, cplx(1.0 / nk, 0.0)), out(width);
        const auto tw = kernels::twiddle_table(nk);
        report("bloch_sum", time_ms([&] { s.bloch_sum(coeff, tw, -224, out); }, repeats),
               time_ms([&] { p.bloch_sum(coeff, tw, -224, out); }, repeats));
    }
    {
        const int n = 1 << 18;
        std::vector<cplx> in(n, cplx(1.0, 0.5)), out(n);
        report("banded_apply", time_ms([&] { s.banded_apply(hops, in, out); }, repeats),
               time_ms([&] { p.banded_apply(hops, in, out); }, repeats));
    }
    {
        const int n = 1 << 18;
        const kernels::WalkCoefficients w{0.156, 0.988, 1.05, 0.95};
        std::vector<cplx> u(n, 1.0), v(n, 0.5), uo(n), vo(n);
        report("walk_map", time_ms([&] { s.walk_map(w, u, v, uo, vo); }, repeats),
               time_ms([&] { p.walk_map(w, u, v, uo, vo); }, repeats));
    }
    return 0;
}
