#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "nhse/lattice_model.hpp"

namespace testing {

inline constexpr double pi = std::numbers::pi;

inline double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

inline double max_abs_diff(const std::vector<std::complex<double>>& a, const std::vector<std::complex<double>>& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace testing
