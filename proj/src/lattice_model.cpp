#include "nhse/lattice_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace nhse {

LatticeModel::LatticeModel(std::map<int, cplx> hoppings, std::string label)
    : label_(std::move(label))
{
    for (const auto& [r, t] : hoppings) {
        if (!std::isfinite(t.real()) || !std::isfinite(t.imag()))
            throw std::invalid_argument("LatticeModel: non-finite hopping at r = " + std::to_string(r));
        if (t == cplx{}) continue;
        hoppings_.emplace(r, t);
        if (r != 0) range_ = std::max(range_, std::abs(r));
    }
    if (range_ == 0)
        throw std::invalid_argument("LatticeModel '" + label_ + "': needs a nonzero hopping with r != 0");
}

cplx LatticeModel::hopping(int r) const
{
    auto it = hoppings_.find(r);
    return it == hoppings_.end() ? cplx{} : it->second;
}

double LatticeModel::max_abs_hopping() const
{
    double m = 0.0;
    for (const auto& [r, t] : hoppings_) m = std::max(m, std::abs(t));
    return m;
}

double LatticeModel::abs_sum() const
{
    double s = 0.0;
    for (const auto& [r, t] : hoppings_) s += std::abs(t);
    return s;
}

double LatticeModel::weighted_abs_sum() const
{
    double s = 0.0;
    for (const auto& [r, t] : hoppings_) s += std::abs(r) * std::abs(t);
    return s;
}

LatticeModel LatticeModel::scaled(double s) const
{
    std::map<int, cplx> h;
    for (const auto& [r, t] : hoppings_) h.emplace(r, s * t);
    return LatticeModel(std::move(h), label_);
}

cplx dispersion_pbc(const LatticeModel& model, double k)
{
    cplx e{};
    for (const auto& [r, t] : model.hoppings()) e -= t * std::polar(1.0, k * r);
    return e;
}

cplx dispersion_derivative(const LatticeModel& model, double k)
{
    cplx d{};
    for (const auto& [r, t] : model.hoppings()) d -= cplx(0.0, r) * t * std::polar(1.0, k * r);
    return d;
}

namespace models {

LatticeModel hermitian_chain(double t)
{
    return LatticeModel({{1, t}, {-1, t}}, "hermitian_chain");
}

LatticeModel hatano_nelson(cplx right, cplx left)
{
    return LatticeModel({{1, right}, {-1, left}}, "hatano_nelson");
}

LatticeModel reciprocal_complex_nnn()
{
    const cplx t1{1.0, -0.6};
    const cplx t2{0.5, 0.1};
    return LatticeModel({{1, t1}, {-1, t1}, {2, t2}, {-2, t2}}, "reciprocal_complex_nnn");
}

LatticeModel nonreciprocal_nnn()
{
    return LatticeModel({{1, 1.0}, {-1, 0.8}, {2, 0.8}, {-2, 0.6}}, "nonreciprocal_nnn");
}

}  // namespace models

}  // namespace nhse
