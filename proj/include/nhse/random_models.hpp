#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nhse/lattice_model.hpp"

namespace nhse::random {

enum class Family {
    general,     ///< every t_r uniform in the complex unit disk
    reciprocal,  ///< |t_{-r}| = |t_r| exactly, so the area vanishes
    case_i,      ///< real hoppings, t_{-r} independent of t_r
    case_ii,     ///< complex hoppings with t_{-r} = t_r
};

const char* family_name(Family family);
Family parse_family(const std::string& name);

struct ModelOptions {
    Family family = Family::general;
    int max_range = 3;       ///< R drawn uniformly from 1..max_range
    double min_area = 0.0;   ///< rejection threshold on |A|; 0 disables it
    bool onsite = true;      ///< draw t_0 as well
};

/// Model number `id` of the stream identified by `seed`. Each (seed, id)
/// pair is an independent generator, so models can be drawn in any order
/// or in parallel.
LatticeModel random_model(std::uint64_t seed, int id, const ModelOptions& options = {});

std::vector<LatticeModel> random_models(std::uint64_t seed, int count, const ModelOptions& options = {});

}  // namespace nhse::random
