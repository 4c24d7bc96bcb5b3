#include "doctest.h"

#include "irs/am_solver.hpp"

#include <cmath>

using namespace irs;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

Instance make(std::uint64_t seed, int K = 2, int U = 2, int N = 8)
{
    ScenarioConfig c;
    c.M = c.L = 4;
    c.N = N;
    c.K = K;
    c.U = U;
    auto rng = make_rng(seed, 0, 0);
    const Positions p = place_nodes(c, rng);
    return make_instance(c, synthesize(c, p, rng));
}

VectorXcd init_phases(std::uint64_t seed, int N)
{
    auto r = make_rng(seed, 0, 1);
    return random_phases(N, r);
}

// K = 1 with a slack FISI: matched filter, power as a function of rho only
double rho_grid_oracle(const Instance& inst, const EffectiveChannels& e)
{
    const double g = e.h[0].squaredNorm();
    const double ri = risi(inst, e, 0);
    const double G = inst.gamma(0), Q = inst.q_rf(0);
    const double s2 = inst.cfg.sigma2_k(0), sc2 = inst.cfg.sigma2_c_k(0);
    auto p = [&](double rho) { return std::max(G * (ri + s2 + sc2 / rho), Q / (1.0 - rho) - ri) / g; };
    double best = INFINITY, arg = 0.5;
    const int n = 100000;
    for (int i = 1; i < n; ++i) {
        const double r = static_cast<double>(i) / n;
        if (p(r) < best) {
            best = p(r);
            arg = r;
        }
    }
    // golden refinement around the grid minimum
    double a = std::max(arg - 1.0 / n, 1e-9), b = std::min(arg + 1.0 / n, 1 - 1e-9);
    for (int i = 0; i < 200; ++i) {
        const double m1 = a + (b - a) * 0.381966, m2 = b - (b - a) * 0.381966;
        if (p(m1) < p(m2)) b = m2;
        else a = m1;
    }
    return std::min(best, p(0.5 * (a + b)));
}

} // namespace

TEST_CASE("rank ratio and beamformer extraction")
{
    VectorXcd w(3);
    w << std::complex<double>(1, 2), 0.5, std::complex<double>(0, -1);
    const MatrixXcd W = w * w.adjoint();
    CHECK(rank_ratio(W) < 1e-14);
    const VectorXcd x = extract_beamformer(W);
    CHECK((x * x.adjoint() - W).norm() < 1e-12);
    CHECK(rank_ratio(MatrixXcd::Zero(3, 3)) == 0.0);
    CHECK(rank_ratio(MatrixXcd::Identity(3, 3)) == doctest::Approx(1.0));
    CHECK_THROWS_AS(extract_beamformer(MatrixXcd::Identity(3, 3)), NotRankOne);
}

TEST_CASE("lifting round trip")
{
    auto r = make_rng(1, 0, 9);
    const VectorXcd u = random_phases(6, r);
    CHECK(is_unit_modulus(u));
    const MatrixXcd V = lift(u);
    CHECK(V.rows() == 7);
    CHECK(lifted_rank_residual(V) < 1e-12);
    CHECK((recover_upsilon(V) - u).norm() < 1e-10);
    CHECK(lifted_rank_residual(MatrixXcd::Identity(7, 7)) == doctest::Approx(6.0 / 7.0));
}

TEST_CASE("lifted quadratic forms reproduce the effective gains")
{
    const Instance inst = make(2);
    const VectorXcd u = init_phases(2, 8);
    std::vector<VectorXcd> w = {VectorXcd::Constant(4, {0.2, -0.1}), VectorXcd::Constant(4, {0.05, 0.3})};
    const LiftedForms lf = lifted_forms(inst, w);
    const MatrixXcd V = lift(u);
    const EffectiveChannels e = effective(inst.ch, u);
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i) {
            const double direct = std::norm(e.h[k].dot(w[i]));
            const double lifted = lf.c[k][i].dot(V * lf.c[k][i]).real();
            CHECK(lifted == doctest::Approx(direct).epsilon(1e-10));
        }
    for (int u2 = 0; u2 < 2; ++u2) {
        const double c = ciusi(inst.ch, u, inst.f, u2, 1.0);
        CHECK((V * lf.Omega[u2]).trace().real() == doctest::Approx(c).epsilon(1e-8));
    }
}

TEST_CASE("K = 1 joint beamforming and splitting matches the rho grid")
{
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const Instance inst = make(seed, 1, 1);
        const VectorXcd u = init_phases(seed, 8);
        const EffectiveChannels e = effective(inst.ch, u);
        const JtbpsResult r = solve_jtbps_sdp(inst, e, u);
        REQUIRE(r.feasible);
        const double oracle = rho_grid_oracle(inst, e);
        CHECK(r.power == doctest::Approx(oracle).epsilon(5e-3));
        CHECK(rank_ratio(r.W[0]) <= 1e-4);
        // the oracle assumes a slack interference constraint
        Design d;
        d.w = {extract_beamformer(r.W[0])};
        d.rho = r.rho;
        d.upsilon = u;
        CHECK(fisi(inst.ch, d, 0, 1.0) < 0.99 * inst.cfg.e_iet_u(0));
    }
}

TEST_CASE("fixed splitting ratios never beat the joint optimum")
{
    const Instance inst = make(4);
    const VectorXcd u = init_phases(4, 8);
    const EffectiveChannels e = effective(inst.ch, u);
    const JtbpsResult free = solve_jtbps_sdp(inst, e, u);
    JtbpsOptions o;
    o.fixed_rho = std::vector<double>{0.3, 0.6};
    const JtbpsResult fixed = solve_jtbps_sdp(inst, e, u, o);
    REQUIRE(free.feasible);
    REQUIRE(fixed.feasible);
    CHECK(fixed.power >= free.power * (1 - 1e-6));
    CHECK(fixed.rho[1] == 0.6);
}

TEST_CASE("an IRS that violates the CIUSI cap is rejected")
{
    Instance inst = make(5);
    inst.cfg.e_ciusi = 1e-30;
    const VectorXcd u = init_phases(5, 8);
    const JtbpsResult r = solve_jtbps_sdp(inst, effective(inst.ch, u), u);
    CHECK_FALSE(r.feasible);
    CHECK(r.status == conic::Status::Infeasible);
}

TEST_CASE("alternating minimization on the desk instance")
{
    const Instance inst = make(1);
    AmSettings st;
    st.j_max = 5; // the rank-penalized reflect step creeps; five rounds are enough here
    const DesignSolution s = am_solve(inst, st, init_phases(1, 8));
    REQUIRE(s.feasible);
    CHECK((s.status == "ok" || s.status == "max_iter"));
    CHECK(check_feasibility(inst, s.design).ok(1e-5));
    REQUIRE(s.trace.size() >= 2);
    for (std::size_t i = 1; i < s.trace.size(); ++i) CHECK(s.trace[i] <= s.trace[i - 1] + 1e-7);
    CHECK(s.trace.back() < s.trace.front());
    CHECK(s.rank_residual <= 1e-4);
    // regression anchor
    CHECK(watt_to_dbm(s.power()) == doctest::Approx(35.7807).epsilon(1e-3 / 35.8));
}

TEST_CASE("settings from a config file")
{
    const ConfigFile f = ConfigFile::parse("am_eps = 1e-5\nsca_mu0 = 0.01\nconic_tol = 1e-7\n");
    const AmSettings s = AmSettings::from_config(f);
    CHECK(s.eps == 1e-5);
    CHECK(s.mu0 == 0.01);
    CHECK(s.conic.tol == 1e-7);
    CHECK(s.j_max == 30);
}
