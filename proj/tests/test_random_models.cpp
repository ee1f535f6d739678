#include <doctest.h>

#include <set>
#include <stdexcept>

#include "nhse/random_models.hpp"
#include "nhse/spectrum.hpp"
#include "support.hpp"

using namespace nhse;
using namespace nhse::random;

TEST_CASE("random models are deterministic per (seed, id)")
{
    CHECK(random_model(5, 3) == random_model(5, 3));
    CHECK_FALSE(random_model(5, 3) == random_model(5, 4));
    CHECK_FALSE(random_model(5, 3) == random_model(6, 3));
    // high seed bits matter
    CHECK_FALSE(random_model(5, 0) == random_model(5 + (1ull << 40), 0));
    const auto batch = random_models(5, 6);
    REQUIRE(batch.size() == 6);
    for (int id = 0; id < 6; ++id) CHECK(batch[id] == random_model(5, id));
    CHECK(random_model(5, 3).label() == "general_5_3");
}

TEST_CASE("families")
{
    SUBCASE("general: unit disk, range bounded, on-site optional")
    {
        std::set<int> ranges;
        for (int id = 0; id < 60; ++id) {
            const auto m = random_model(1, id);
            ranges.insert(m.range());
            for (auto [r, t] : m.hoppings()) CHECK(std::abs(t) <= 1.0);
            CHECK(m.range() <= 3);
            const auto off = random_model(1, id, {Family::general, 2, 0.0, false});
            CHECK(off.hopping(0) == cplx{});
            CHECK(off.range() <= 2);
        }
        CHECK(ranges == std::set<int>{1, 2, 3});
    }
    SUBCASE("reciprocal: equal moduli and exactly zero area")
    {
        for (int id = 0; id < 40; ++id) {
            const auto m = random_model(2, id, {Family::reciprocal, 3, 0.0, true});
            for (int r = 1; r <= m.range(); ++r) CHECK(std::norm(m.hopping(r)) == std::norm(m.hopping(-r)));
            CHECK(spectral_area_closed_form(m) == 0.0);
        }
    }
    SUBCASE("case I: real hoppings")
    {
        for (int id = 0; id < 20; ++id) {
            const auto m = random_model(3, id, {Family::case_i, 3, 0.0, true});
            for (auto [r, t] : m.hoppings()) {
                CHECK(t.imag() == 0.0);
                CHECK(std::abs(t.real()) <= 1.0);
            }
        }
    }
    SUBCASE("case II: t_{-r} = t_r")
    {
        for (int id = 0; id < 20; ++id) {
            const auto m = random_model(4, id, {Family::case_ii, 3, 0.0, true});
            for (int r = 1; r <= m.range(); ++r) CHECK(m.hopping(r) == m.hopping(-r));
        }
    }
    SUBCASE("area threshold")
    {
        for (int id = 0; id < 30; ++id)
            CHECK(std::abs(spectral_area_closed_form(random_model(6, id, {Family::general, 3, 0.3, true}))) > 0.3);
    }
    SUBCASE("names")
    {
        for (Family f : {Family::general, Family::reciprocal, Family::case_i, Family::case_ii})
            CHECK(parse_family(family_name(f)) == f);
        CHECK_THROWS_AS(parse_family("hermitian"), std::invalid_argument);
    }
}

TEST_CASE("invalid options")
{
    CHECK_THROWS_AS(random_model(1, 0, {Family::general, 0, 0.0, true}), std::invalid_argument);
    CHECK_THROWS_AS(random_model(1, 0, {Family::general, 3, -1.0, true}), std::invalid_argument);
    CHECK_THROWS_AS(random_model(1, 0, {Family::reciprocal, 3, 0.1, true}), std::invalid_argument);
    CHECK_THROWS_AS(random_model(1, 0, {Family::case_ii, 3, 0.1, true}), std::invalid_argument);
    // unreachable area for R = 1 unit-disk hoppings (|A| <= pi)
    CHECK_THROWS_AS(random_model(1, 0, {Family::general, 1, 4.0, true}), std::invalid_argument);
    CHECK_THROWS_AS(random_models(1, -1), std::invalid_argument);
}
