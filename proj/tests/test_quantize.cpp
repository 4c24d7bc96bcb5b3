#include "doctest.h"

#include "irs/am_solver.hpp"
#include "irs/quantize.hpp"

#include <cmath>
#include <numbers>

using namespace irs;
using Eigen::VectorXcd;
constexpr double pi = std::numbers::pi;

TEST_CASE("nearest level, circular distance")
{
    CHECK(quantize_phase(1.0, 4) == doctest::Approx(pi / 2));
    CHECK(nearest_level(1.0, 4) == 1);
    CHECK(nearest_level(2 * pi - 0.01, 4) == 0);
    CHECK(quantize_phase(-0.01, 4) == 0.0);
    CHECK(nearest_level(3 * pi, 2) == 1);
    for (int F : {2, 4, 8, 16})
        for (int l = 0; l < F; ++l) CHECK(nearest_level(2 * pi * l / F, F) == l);
}

TEST_CASE("ties go to the lower level")
{
    CHECK(nearest_level(pi / 4, 4) == 0);
    CHECK(nearest_level(pi / 2, 2) == 0);
}

TEST_CASE("quantization error never exceeds pi / F")
{
    auto rng = make_rng(31, 0, 0);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int F : {2, 3, 4, 8, 64}) {
        for (int i = 0; i < 500; ++i) {
            const double t = u(rng);
            const double q = quantize_phase(t, F);
            double d = std::abs(std::remainder(t - q, 2 * pi));
            CHECK(d <= pi / F + 1e-12);
        }
    }
}

TEST_CASE("linear distance does not wrap")
{
    const double t = 2 * pi - 0.01;
    CHECK(nearest_level(t, 4, PhaseDistance::Linear) == 3);
    CHECK(nearest_level(t, 4, PhaseDistance::Circular) == 0);
    CHECK(nearest_level(1.0, 4, PhaseDistance::Linear) == 1);
}

TEST_CASE("fewer than two levels is rejected")
{
    CHECK_THROWS_AS(nearest_level(0.3, 1), std::invalid_argument);
    VectorXcd u = VectorXcd::Ones(3);
    CHECK_THROWS_AS(quantize_phases(u, 0), std::invalid_argument);
}

TEST_CASE("quantized vectors keep unit modulus")
{
    auto rng = make_rng(32, 0, 0);
    const VectorXcd u = random_phases(16, rng);
    const VectorXcd q = quantize_phases(u, 8);
    CHECK(is_unit_modulus(q));
    for (int n = 0; n < 16; ++n) CHECK(std::abs(std::arg(q(n) * std::conj(u(n)))) <= pi / 8 + 1e-12);
}

TEST_CASE("margin loss")
{
    ScenarioConfig c;
    c.M = c.L = 4;
    c.N = 8;
    c.K = c.U = 2;
    auto rng = make_rng(1, 0, 0);
    const Positions p = place_nodes(c, rng);
    const Instance inst = make_instance(c, synthesize(c, p, rng));

    // a reflect vector already on the 4-level grid loses nothing
    VectorXcd grid(8);
    for (int n = 0; n < 8; ++n) grid(n) = std::polar(1.0, 2 * pi * (n % 4) / 4.0);
    const JtbpsResult r = solve_jtbps_sdp(inst, effective(inst.ch, grid), grid);
    REQUIRE(r.feasible);
    const auto d = design_from(r, grid, 1e-4);
    REQUIRE(d.has_value());
    CHECK(margin_loss(inst, *d, 4) == doctest::Approx(0.0).scale(1.0));

    // off-grid design: a fine grid costs almost nothing
    auto r2 = make_rng(1, 0, 1);
    const VectorXcd u = random_phases(8, r2);
    const JtbpsResult s = solve_jtbps_sdp(inst, effective(inst.ch, u), u);
    const auto e = design_from(s, u, 1e-4);
    REQUIRE(e.has_value());
    CHECK(std::abs(margin_loss(inst, *e, 4096)) < 1e-3);
}
