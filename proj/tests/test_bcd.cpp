#include "doctest.h"

#include "irs/bcd_solver.hpp"

#include <cmath>
#include <numbers>

using namespace irs;
using Eigen::VectorXcd;

namespace {

Instance desk(std::uint64_t seed, int N = 8)
{
    ScenarioConfig c;
    c.M = c.L = 4;
    c.N = N;
    c.K = c.U = 2;
    auto rng = make_rng(seed, 0, 0);
    const Positions p = place_nodes(c, rng);
    return make_instance(c, synthesize(c, p, rng));
}

VectorXcd phases(std::uint64_t seed, int N)
{
    auto r = make_rng(seed, 0, 1);
    return random_phases(N, r);
}

BcdData normalized(const Instance& inst, const VectorXcd& ups)
{
    const EffectiveChannels e = effective(inst.ch, ups);
    const double a2 = inst.q_rf(0);
    return make_bcd_data(inst, std::sqrt(a2), std::sqrt(a2 / e.h[0].squaredNorm()));
}

AuxiliaryBlocks random_aux(const BcdData& d, std::mt19937_64& rng)
{
    std::normal_distribution<double> n;
    AuxiliaryBlocks a;
    a.t.assign(d.K, std::vector<cplx>(d.K));
    a.psi.assign(d.U, std::vector<cplx>(d.K));
    a.lambda.assign(d.U, std::vector<cplx>(d.c.empty() ? 0 : d.c[0].size()));
    for (auto& r : a.t)
        for (auto& x : r) x = {n(rng), n(rng)};
    for (auto& r : a.psi)
        for (auto& x : r) x = {1e-3 * n(rng), 1e-3 * n(rng)};
    for (auto& r : a.lambda)
        for (auto& x : r) x = {1e-3 * n(rng), 1e-3 * n(rng)};
    return a;
}

VectorXcd randn(int n, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    VectorXcd v(n);
    for (int i = 0; i < n; ++i) v(i) = {g(rng), g(rng)};
    return v;
}

} // namespace

TEST_CASE("closed-form beamformer step is stationary")
{
    const Instance inst = desk(1);
    const VectorXcd ups = phases(1, 8);
    const BcdData d = normalized(inst, ups);
    auto rng = make_rng(7, 0, 0);
    const AuxiliaryBlocks aux = random_aux(d, rng);
    const double omega = 0.05;
    const auto w = tb_closed_form(d, ups, aux, omega);
    const double f0 = penalized_objective(d, ups, w, aux, omega);
    for (int trial = 0; trial < 5; ++trial) {
        auto wp = w, wm = w;
        const double h = 1e-4;
        for (int k = 0; k < d.K; ++k) {
            const VectorXcd dir = randn(d.M, rng);
            wp[k] += h * dir;
            wm[k] -= h * dir;
        }
        const double fp = penalized_objective(d, ups, wp, aux, omega);
        const double fm = penalized_objective(d, ups, wm, aux, omega);
        CHECK(fp >= f0);
        CHECK(fm >= f0);
        // first-order term vanishes
        CHECK(std::abs(fp - fm) < 1e-6 * (fp + fm - 2 * f0 + 1e-300) + 1e-12 * f0);
    }
}

TEST_CASE("Riemannian gradient matches finite differences along the circle")
{
    const Instance inst = desk(2);
    const VectorXcd ups = phases(2, 8);
    const BcdData d = normalized(inst, ups);
    auto rng = make_rng(8, 0, 0);
    const AuxiliaryBlocks aux = random_aux(d, rng);
    std::vector<VectorXcd> w = {randn(4, rng), randn(4, rng)};
    const RbObjective f = rb_objective(d, w, aux);
    const VectorXcd rg = riemannian_gradient(f.gradient(ups), ups);
    // tangent: real part of conj(ups) .* rg is zero
    for (int n = 0; n < 8; ++n) CHECK(std::abs((std::conj(ups(n)) * rg(n)).real()) < 1e-10 * rg.norm());
    std::uniform_real_distribution<double> u(-1, 1);
    for (int t = 0; t < 4; ++t) {
        Eigen::VectorXd phi(8);
        for (int n = 0; n < 8; ++n) phi(n) = u(rng);
        auto curve = [&](double s) {
            VectorXcd x = ups;
            for (int n = 0; n < 8; ++n) x(n) *= std::polar(1.0, s * phi(n));
            return x;
        };
        const double h = 1e-6;
        const double fd = (f.value(curve(h)) - f.value(curve(-h))) / (2 * h);
        VectorXcd tangent(8);
        for (int n = 0; n < 8; ++n) tangent(n) = cplx(0, phi(n)) * ups(n);
        const double an = rg.dot(tangent).real();
        CHECK(fd == doctest::Approx(an).epsilon(1e-5).scale(rg.norm()));
    }
}

TEST_CASE("conjugate gradient recovers a planted reflect vector")
{
    auto rng = make_rng(11, 0, 0);
    const int N = 6;
    const VectorXcd star = random_phases(N, rng);
    RbObjective f;
    for (int i = 0; i < 24; ++i) {
        f.a.push_back(randn(N, rng));
        f.b0.push_back(-star.dot(f.a.back()));
    }
    BcdSettings st;
    st.rcg_tol = 1e-10;
    st.rcg_max = 5000;
    const RcgResult r = rb_rcg(f, random_phases(N, rng), st);
    CHECK(is_unit_modulus(r.upsilon));
    CHECK(r.value < 1e-10);
    CHECK(std::abs(r.upsilon.dot(star)) == doctest::Approx(N).epsilon(1e-6));
}

TEST_CASE("single-element reflect step against an exhaustive phase search")
{
    auto rng = make_rng(12, 0, 0);
    for (int rep = 0; rep < 5; ++rep) {
        RbObjective f;
        std::normal_distribution<double> g;
        for (int i = 0; i < 5; ++i) {
            f.a.push_back(randn(1, rng));
            f.b0.push_back({g(rng), g(rng)});
        }
        double best = INFINITY;
        for (int i = 0; i < 100000; ++i) {
            VectorXcd x(1);
            x(0) = std::polar(1.0, 2 * std::numbers::pi * i / 100000.0);
            best = std::min(best, f.value(x));
        }
        VectorXcd x0(1);
        x0(0) = std::polar(1.0, 2 * std::numbers::pi * (rep + 0.5) / 5.0);
        const RcgResult r = rb_rcg(f, x0);
        CHECK(r.value <= best * 1.001 + 1e-12);
    }
}

TEST_CASE("ball projection: closed form against bisection")
{
    auto rng = make_rng(13, 0, 0);
    std::normal_distribution<double> g;
    for (double r2 : {0.01, 0.5, 3.0, 100.0}) {
        std::vector<cplx> v(7);
        for (auto& x : v) x = {g(rng), g(rng)};
        const auto a = psi_lambda_projection(v, r2);
        const auto b = psi_lambda_projection_bisection(v, r2);
        double n2 = 0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            CHECK(std::abs(a[i] - b[i]) < 1e-8);
            n2 += std::norm(a[i]);
        }
        CHECK(n2 <= r2 * (1 + 1e-12));
    }
    // inside the ball nothing moves
    const std::vector<cplx> small = {{0.1, 0.0}, {0.0, 0.1}};
    const auto p = psi_lambda_projection(small, 1.0);
    CHECK(p[0] == small[0]);
    CHECK(p[1] == small[1]);
}

TEST_CASE("mismatch vanishes at exact targets")
{
    const Instance inst = desk(3);
    const VectorXcd ups = phases(3, 8);
    const BcdData d = normalized(inst, ups);
    auto rng = make_rng(14, 0, 0);
    std::vector<VectorXcd> w = {randn(4, rng), randn(4, rng)};
    AuxiliaryBlocks aux;
    aux.t = couplings(d, ups, w);
    aux.psi.assign(d.U, std::vector<cplx>(d.K));
    aux.lambda.assign(d.U, std::vector<cplx>(d.c[0].size()));
    for (int u = 0; u < d.U; ++u) {
        for (int k = 0; k < d.K; ++k) aux.psi[u][k] = d.vd[u].dot(w[k]);
        for (std::size_t j = 0; j < d.c[u].size(); ++j) aux.lambda[u][j] = ups.dot(d.c[u][j]);
    }
    CHECK(mismatch(d, ups, w, aux) < 1e-12);
    aux.t[0][0] += 1.0;
    CHECK(mismatch(d, ups, w, aux) > 0.1);
}

TEST_CASE("penalty BCD on the desk instance")
{
    const Instance inst = desk(1);
    const DesignSolution s = bcd_solve(inst, BcdSettings{}, phases(1, 8));
    REQUIRE(s.feasible);
    CHECK(s.status == "ok");
    CHECK(check_feasibility(inst, s.design).ok(1e-5));
    CHECK(is_unit_modulus(s.design.upsilon));
    CHECK(s.outer_iters <= BcdSettings{}.outer_max);
    // regression anchor
    CHECK(watt_to_dbm(s.power()) == doctest::Approx(35.4763).epsilon(1e-3 / 35.5));
}

TEST_CASE("BCD without IRS elements reduces to the beamforming problem")
{
    const Instance inst = desk(2, 0);
    const DesignSolution s = bcd_solve(inst, BcdSettings{}, VectorXcd(0));
    REQUIRE(s.feasible);
    const JtbpsResult r = solve_jtbps_sdp(inst, direct_only(inst.ch), VectorXcd(0));
    CHECK(s.design.power() == doctest::Approx(r.power).epsilon(1e-4));
}
