#include "nhse/random_models.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "nhse/spectrum.hpp"

namespace nhse::random {

namespace {

constexpr int kMaxAttempts = 10000;

// 53 random bits mapped to [0, 1); avoids the implementation-defined
// std::uniform_real_distribution so streams match across standard libraries
double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& g, double lo, double hi) { return lo + (hi - lo) * uniform01(g); }

cplx unit_disk(std::mt19937_64& g)
{
    const double r = std::sqrt(uniform01(g));
    const double phi = 2.0 * std::numbers::pi * uniform01(g);
    return std::polar(r, phi);
}

// t_{-r} with exactly the same modulus as t_r
cplx reciprocal_partner(cplx t, std::mt19937_64& g)
{
    const cplx c = std::conj(t);
    switch (g() % 8) {
        case 0: return t;
        case 1: return c;
        case 2: return -t;
        case 3: return -c;
        case 4: return cplx(-t.imag(), t.real());
        case 5: return cplx(-c.imag(), c.real());
        case 6: return cplx(t.imag(), -t.real());
        default: return cplx(c.imag(), -c.real());
    }
}

std::map<int, cplx> draw(std::mt19937_64& g, const ModelOptions& o)
{
    const int range = 1 + static_cast<int>(g() % static_cast<std::uint64_t>(o.max_range));
    std::map<int, cplx> hops;
    if (o.onsite) hops[0] = o.family == Family::case_i ? cplx(uniform(g, -1.0, 1.0)) : unit_disk(g);
    for (int r = 1; r <= range; ++r) {
        switch (o.family) {
            case Family::general:
                hops[r] = unit_disk(g);
                hops[-r] = unit_disk(g);
                break;
            case Family::reciprocal:
                hops[r] = unit_disk(g);
                hops[-r] = reciprocal_partner(hops[r], g);
                break;
            case Family::case_i:
                hops[r] = uniform(g, -1.0, 1.0);
                hops[-r] = uniform(g, -1.0, 1.0);
                break;
            case Family::case_ii:
                hops[r] = unit_disk(g);
                hops[-r] = hops[r];
                break;
        }
    }
    return hops;
}

}  // namespace

const char* family_name(Family family)
{
    switch (family) {
        case Family::general: return "general";
        case Family::reciprocal: return "reciprocal";
        case Family::case_i: return "case_i";
        case Family::case_ii: return "case_ii";
    }
    return "unknown";
}

Family parse_family(const std::string& name)
{
    for (Family f : {Family::general, Family::reciprocal, Family::case_i, Family::case_ii})
        if (name == family_name(f)) return f;
    throw std::invalid_argument("unknown model family '" + name + "'");
}

LatticeModel random_model(std::uint64_t seed, int id, const ModelOptions& options)
{
    if (options.max_range < 1) throw std::invalid_argument("random_model: max_range must be >= 1");
    if (options.min_area < 0.0) throw std::invalid_argument("random_model: min_area must be >= 0");
    if (options.min_area > 0.0 && (options.family == Family::reciprocal || options.family == Family::case_ii))
        throw std::invalid_argument("random_model: reciprocal families have zero area, min_area must be 0");

    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(id)};
    std::mt19937_64 g(seq);
    const std::string label = std::string(family_name(options.family)) + "_" + std::to_string(seed) + "_" +
                              std::to_string(id);
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        auto hops = draw(g, options);
        bool hopping = false;
        for (const auto& [r, t] : hops) hopping = hopping || (r != 0 && t != cplx{});
        if (!hopping) continue;
        LatticeModel m(std::move(hops), label);
        if (options.min_area == 0.0 || std::abs(spectral_area_closed_form(m)) > options.min_area) return m;
    }
    throw std::invalid_argument("random_model: no model with |A| > min_area after " + std::to_string(kMaxAttempts) +
                                " draws");
}

std::vector<LatticeModel> random_models(std::uint64_t seed, int count, const ModelOptions& options)
{
    if (count < 0) throw std::invalid_argument("random_models: count must be >= 0");
    std::vector<LatticeModel> out;
    out.reserve(count);
    for (int id = 0; id < count; ++id) out.push_back(random_model(seed, id, options));
    return out;
}

}  // namespace nhse::random
