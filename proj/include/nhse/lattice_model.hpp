#pragma once

#include <complex>
#include <map>
#include <string>

namespace nhse {

using cplx = std::complex<double>;

/// Single-band tight-binding lattice with hopping amplitudes t_r indexed by the
/// signed hop distance r. The real-space Hamiltonian is H_{n,l} = -t_{l-n}.
///
/// Entries that are absent are zero. A nonzero on-site term t_0 is allowed; it
/// shifts the band rigidly.
class LatticeModel {
public:
    LatticeModel() = default;

    /// Throws std::invalid_argument unless some t_r with r != 0 is nonzero.
    explicit LatticeModel(std::map<int, cplx> hoppings, std::string label = {});

    const std::map<int, cplx>& hoppings() const { return hoppings_; }
    const std::string& label() const { return label_; }

    cplx hopping(int r) const;

    /// Largest |r| carrying a nonzero amplitude.
    int range() const { return range_; }

    double max_abs_hopping() const;

    /// Sum of |t_r|, an upper bound for |E(k)|.
    double abs_sum() const;

    /// Sum of |r| |t_r|, an upper bound for |dE/dk|.
    double weighted_abs_sum() const;

    LatticeModel scaled(double s) const;

    friend bool operator==(const LatticeModel&, const LatticeModel&) = default;

private:
    std::map<int, cplx> hoppings_;
    std::string label_;
    int range_ = 0;
};

/// PBC dispersion E(k) = -sum_r t_r exp(i k r).
cplx dispersion_pbc(const LatticeModel& model, double k);

/// dE/dk by term-wise differentiation of the Laurent sum.
cplx dispersion_derivative(const LatticeModel& model, double k);

namespace models {

LatticeModel hermitian_chain(double t = 1.0);

/// Nearest-neighbour model with t_1 = right, t_{-1} = left.
LatticeModel hatano_nelson(cplx right, cplx left);

/// Reciprocal complex next-nearest-neighbour lattice, t_{+-1} = 1 - 0.6i,
/// t_{+-2} = 0.5 + 0.1i. Open-arc spectrum, zero area.
LatticeModel reciprocal_complex_nnn();

/// Non-reciprocal next-nearest-neighbour lattice, t_1 = 1, t_{-1} = 0.8,
/// t_2 = 0.8, t_{-2} = 0.6. Self-intersecting PBC loop with area -0.92 pi.
LatticeModel nonreciprocal_nnn();

}  // namespace models

}  // namespace nhse
