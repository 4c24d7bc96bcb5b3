#include "doctest.h"

#include "../src/conic/cones.hpp"
#include "irs/conic.hpp"
#include "irs/model.hpp"

#include <Eigen/Eigenvalues>

#include <random>
#include <sstream>

using namespace irs::conic;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace {

VectorXcd random_cvec(std::mt19937_64& g, int n)
{
    std::normal_distribution<double> nd;
    VectorXcd v(n);
    for (int i = 0; i < n; ++i) v(i) = {nd(g), nd(g)};
    return v;
}

MatrixXcd random_herm(std::mt19937_64& g, int n)
{
    MatrixXcd A(n, n);
    for (int j = 0; j < n; ++j) A.col(j) = random_cvec(g, n);
    return 0.5 * (A + A.adjoint());
}

// min tr(W) s.t. tr(h h^H W) >= 1, W psd
ModelResult trace_sdp(const VectorXcd& h, HermVar& W)
{
    Model m;
    W = m.add_hermitian(static_cast<int>(h.size()));
    m.minimize(W.trace());
    m.add_ge(W.trace_with(h * h.adjoint()) - 1.0);
    m.add_psd(HermAffine::from_var(W));
    return m.solve();
}

} // namespace

TEST_CASE("orthant: min x subject to x >= 1")
{
    Problem p;
    p.c = VectorXd::Ones(1);
    p.G = -MatrixXd::Ones(1, 1);
    p.h = -VectorXd::Ones(1);
    p.A = MatrixXd(0, 1);
    p.b = VectorXd(0);
    p.cones.nonneg = 1;
    const Solution s = solve(p);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.x(0) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(s.primal_objective >= s.dual_objective - 1e-8);
}

TEST_CASE("single-constraint SDP has the matched-filter solution")
{
    VectorXcd h(3);
    h << std::complex<double>(1, 1), std::complex<double>(0, 1), 1.0; // |h|^2 = 4
    HermVar W;
    const ModelResult r = trace_sdp(h, W);
    REQUIRE(r.optimal());
    CHECK(r.objective == doctest::Approx(0.25).epsilon(1e-7));
    const MatrixXcd Wv = W.value(r.x);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(Wv);
    const VectorXd ev = es.eigenvalues();
    CHECK(ev(1) <= 1e-6 * ev(2));
    const VectorXcd u = es.eigenvectors().col(2);
    CHECK(std::abs(u.dot(h)) / h.norm() == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("random rank-one SDP family")
{
    std::mt19937_64 g(7);
    for (int t = 0; t < 10; ++t) {
        const VectorXcd h = random_cvec(g, 4);
        HermVar W;
        const ModelResult r = trace_sdp(h, W);
        REQUIRE(r.optimal());
        CHECK(r.objective == doctest::Approx(1.0 / h.squaredNorm()).epsilon(1e-6));
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(W.value(r.x));
        CHECK(es.eigenvalues()(2) <= 1e-6 * es.eigenvalues()(3));
    }
}

TEST_CASE("infeasible pair is detected")
{
    Model m;
    const int x = m.add_var();
    m.minimize(LinExpr::var(x));
    m.add_ge(LinExpr::var(x) - 1.0);
    m.add_ge(-LinExpr::var(x));
    CHECK(m.solve().status == Status::Infeasible);
}

TEST_CASE("unbounded problem is detected")
{
    Model m;
    const int x = m.add_var();
    m.minimize(-LinExpr::var(x));
    m.add_ge(LinExpr::var(x));
    CHECK(m.solve().status == Status::Unbounded);
}

TEST_CASE("second-order cone and equality")
{
    Model m;
    const int a = m.add_var();
    const int b = m.add_var();
    m.minimize(LinExpr::var(a) + LinExpr::var(b));
    m.add_soc(1.0, {LinExpr::var(a), LinExpr::var(b)});
    ModelResult r = m.solve();
    REQUIRE(r.optimal());
    CHECK(r.objective == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-7));

    Model e;
    const int u = e.add_var();
    const int v = e.add_var();
    e.minimize(LinExpr::var(u) + 2.0 * LinExpr::var(v));
    e.add_eq(LinExpr::var(u) + LinExpr::var(v) - 3.0);
    e.add_ge(LinExpr::var(u));
    e.add_ge(LinExpr::var(v));
    r = e.solve();
    REQUIRE(r.optimal());
    CHECK(r.objective == doctest::Approx(3.0).epsilon(1e-7));
}

TEST_CASE("rotated cone gives the reciprocal epigraph")
{
    // min s subject to s * rho >= 4, rho <= 0.5  ->  s = 8
    Model m;
    const int s = m.add_var();
    const int rho = m.add_var();
    m.minimize(LinExpr::var(s));
    m.add_rotated_soc(LinExpr::var(s), LinExpr::var(rho), {2.0});
    m.add_ge(0.5 - LinExpr::var(rho));
    const ModelResult r = m.solve();
    REQUIRE(r.optimal());
    CHECK(r.objective == doctest::Approx(8.0).epsilon(1e-7));
}

TEST_CASE("weak duality and determinism")
{
    std::mt19937_64 g(3);
    const VectorXcd h1 = random_cvec(g, 3);
    const VectorXcd h2 = random_cvec(g, 3);
    auto run = [&] {
        Model m;
        const HermVar W = m.add_hermitian(3);
        m.minimize(W.trace());
        m.add_ge(W.trace_with(h1 * h1.adjoint()) - 1.0);
        m.add_ge(W.trace_with(h2 * h2.adjoint()) - 2.0);
        m.add_psd(HermAffine::from_var(W));
        return m.solve();
    };
    const ModelResult a = run();
    const ModelResult b = run();
    REQUIRE(a.optimal());
    CHECK(a.raw.primal_objective >= a.raw.dual_objective - 1e-8 * std::abs(a.objective));
    CHECK(std::abs(a.objective - b.objective) <= 1e-9);
}

TEST_CASE("hermitian vectorization round trip and inner product")
{
    std::mt19937_64 g(11);
    const MatrixXcd X = random_herm(g, 4);
    const MatrixXcd Y = random_herm(g, 4);
    CHECK((mat_hermitian(vec_hermitian(X), 4) - X).norm() <= 1e-12);
    CHECK(vec_hermitian(X).dot(vec_hermitian(Y)) ==
          doctest::Approx((X * Y).trace().real()).epsilon(1e-12));
}

TEST_CASE("affine hermitian helpers match dense evaluation")
{
    std::mt19937_64 g(5);
    Model m;
    const HermVar W = m.add_hermitian(3);
    VectorXd x(m.num_vars());
    std::normal_distribution<double> nd;
    for (int i = 0; i < x.size(); ++i) x(i) = nd(g);
    const MatrixXcd Wv = W.value(x);
    MatrixXcd C(3, 3);
    for (int j = 0; j < 3; ++j) C.col(j) = random_cvec(g, 3);
    CHECK(W.trace_with(C).eval(x) == doctest::Approx((C * Wv).trace().real()).epsilon(1e-12));

    MatrixXcd T(3, 2);
    for (int j = 0; j < 2; ++j) T.col(j) = random_cvec(g, 3);
    const HermAffine Y = HermAffine::from_var(W).congruence(T);
    const MatrixXcd Yd = T.adjoint() * Wv * T;
    for (int j = 0; j < 2; ++j)
        for (int i = j; i < 2; ++i) {
            CHECK(Y.re(i, j).eval(x) == doctest::Approx(Yd(i, j).real()).epsilon(1e-10));
            if (i > j) CHECK(Y.im(i, j).eval(x) == doctest::Approx(Yd(i, j).imag()).epsilon(1e-10));
        }
    CHECK(HermAffine::from_var(W).trace_with(C).eval(x) ==
          doctest::Approx((C * Wv).trace().real()).epsilon(1e-12));
}

TEST_CASE("NT scaling identities")
{
    Cones K;
    K.nonneg = 2;
    K.soc = {3};
    K.hpsd = {3};
    std::mt19937_64 g(9);
    auto interior = [&] {
        VectorXd v(K.dim());
        std::uniform_real_distribution<double> u(0.5, 2.0);
        v(0) = u(g);
        v(1) = u(g);
        v.segment(2, 3) << 3.0, u(g) - 1.0, u(g) - 1.0;
        MatrixXcd A(3, 3);
        for (int j = 0; j < 3; ++j) A.col(j) = random_cvec(g, 3);
        v.segment(5, 9) = vec_hermitian(A * A.adjoint() + MatrixXcd::Identity(3, 3));
        return v;
    };
    const VectorXd s = interior();
    const VectorXd z = interior();
    detail::Scaling sc;
    REQUIRE(detail::compute_scaling(K, s, z, sc));
    VectorXd wz = z;
    detail::apply_W(K, sc, wz);
    VectorXd ws = s;
    detail::apply_Winvt(K, sc, ws);
    CHECK((wz - sc.lambda).norm() <= 1e-9 * sc.lambda.norm());
    CHECK((ws - sc.lambda).norm() <= 1e-9 * sc.lambda.norm());

    VectorXd v = VectorXd::Random(K.dim());
    VectorXd t = v;
    detail::apply_W(K, sc, t);
    detail::apply_Winv(K, sc, t);
    CHECK((t - v).norm() <= 1e-10 * v.norm());
    t = v;
    detail::apply_Wt(K, sc, t);
    detail::apply_Winvt(K, sc, t);
    CHECK((t - v).norm() <= 1e-10 * v.norm());

    // inverse product
    const VectorXd r = detail::jordan_product(K, sc.lambda, v);
    CHECK((detail::inverse_product(K, sc, r) - v).norm() <= 1e-9 * v.norm());
}

TEST_CASE("problem dump lists every nonzero")
{
    Model m;
    const int x = m.add_var();
    m.minimize(LinExpr::var(x));
    m.add_ge(LinExpr::var(x) - 1.0);
    std::ostringstream os;
    dump(m.build(), os);
    CHECK(os.str() == "1 1 0\nc 0 1\nh 0 -1\nG 0 0 -1\ncones l 1 q s\n");
}
