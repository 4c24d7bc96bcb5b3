#include "irs/robust_solver.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace irs {

using conic::CExpr;
using conic::HermAffine;
using conic::LinExpr;
using conic::Model;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using cd = std::complex<double>;

namespace {

double bti_a(double p) { return std::sqrt(2.0 * std::log(1.0 / p)); }

MatrixXcd herm(const MatrixXcd& X) { return 0.5 * (X + X.adjoint()); }

double noise_floor(const Instance& est, const EffectiveChannels& eff, double rho, int k)
{
    return risi(est, eff, k) + est.cfg.sigma2_k(k) + est.cfg.sigma2_c_k(k) / rho;
}

MatrixXcd sum_outer(const std::vector<VectorXcd>& w)
{
    MatrixXcd S = MatrixXcd::Zero(w.front().size(), w.front().size());
    for (const auto& x : w) S += x * x.adjoint();
    return S;
}

EffectiveChannels channels_of(const Instance& est, const VectorXcd& ups)
{
    return ups.size() > 0 ? effective(est.ch, ups) : direct_only(est.ch);
}

} // namespace

BtiCertificate bti_certificate(const BtiTerms& t, double p, BtiDirection dir)
{
    BtiCertificate c;
    const MatrixXcd Q = herm(t.Q);
    c.x = std::sqrt(Q.squaredNorm() + 2.0 * t.r.squaredNorm());
    const double tr = Q.trace().real();
    if (Q.size() > 0) {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(Q, Eigen::EigenvaluesOnly);
        const auto& ev = es.eigenvalues();
        c.y = dir == BtiDirection::AtLeast ? std::max(0.0, -ev(0)) : std::max(0.0, ev(ev.size() - 1));
    }
    const double a = bti_a(p), lp = std::log(p);
    if (dir == BtiDirection::AtLeast)
        c.slack = tr - a * c.x + lp * c.y + t.s;
    else
        c.slack = -(tr + a * c.x - lp * c.y + t.s);
    return c;
}

std::vector<CExpr> times(const HermAffine& B, const VectorXcd& x)
{
    const int n = B.order();
    std::vector<CExpr> out(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            CExpr e;
            if (i >= j) {
                e.re = B.re(i, j);
                e.im = B.im(i, j);
            } else {
                e.re = B.re(j, i);
                e.im = -B.im(j, i);
            }
            out[i] += x(j) * e;
        }
    }
    return out;
}

namespace {

void emit_norm(Model& m, int x, const std::vector<LinExpr>& vq, const std::vector<CExpr>& r)
{
    std::vector<LinExpr> v = vq;
    const double s2 = std::sqrt(2.0);
    for (const auto& e : r) {
        v.push_back(s2 * e.re);
        v.push_back(s2 * e.im);
    }
    m.add_soc(LinExpr::var(x), v);
}

void emit_main(Model& m, const LinExpr& trQ, int x, const LinExpr& ylin, const LinExpr& s, double p,
               BtiDirection dir, const LinExpr& margin)
{
    const double a = bti_a(p), lp = std::log(p);
    if (dir == BtiDirection::AtLeast)
        m.add_ge(trQ - a * LinExpr::var(x) + lp * ylin + s - margin);
    else
        m.add_ge(-(trQ + a * LinExpr::var(x) - lp * ylin + s) - margin);
}

} // namespace

void add_bti(Model& m, const HermAffine& Q, const std::vector<CExpr>& r, const LinExpr& s, double p,
             BtiDirection dir, const LinExpr& margin)
{
    const int x = m.add_var();
    const int y = m.add_var();
    emit_norm(m, x, Q.vectorized(), r);
    HermAffine shift = Q;
    if (dir == BtiDirection::AtMost) shift *= -1.0;
    shift.add_identity(LinExpr::var(y));
    m.add_psd(shift);
    m.add_ge(LinExpr::var(y));
    emit_main(m, Q.trace(), x, LinExpr::var(y), s, p, dir, margin);
}

void add_bti(Model& m, const MatrixXcd& Qc, const std::vector<CExpr>& r, const LinExpr& s, double p,
             BtiDirection dir, const LinExpr& margin)
{
    const MatrixXcd Q = herm(Qc);
    const int x = m.add_var();
    // y enters with a negative weight, so its smallest admissible value is optimal
    BtiTerms t{Q, VectorXcd::Zero(0), 0.0};
    const double y = bti_certificate(t, p, dir).y;
    emit_norm(m, x, HermAffine::constant(Q).vectorized(), r);
    emit_main(m, Q.trace().real(), x, y, s, p, dir, margin);
}

RobustContext make_robust_context(const Instance& est, const CsiErrors& csi, const std::vector<double>& rho)
{
    RobustContext c;
    const ErrorVariances v = error_variances(est.ch, csi);
    const int N = est.N();
    for (int k = 0; k < est.K(); ++k) c.eps2_h.push_back(v.hd[k] + N * v.Hk[k]);
    for (int u = 0; u < est.U(); ++u) {
        c.eps2_v.push_back(v.vd[u]);
        c.eps2_g.push_back(N * v.Gu[u]);
    }
    c.rho = rho;
    c.spec = est.cfg.outage;
    return c;
}

BtiTerms sinr_terms(const Instance& est, const RobustContext& ctx, const Design& d, int k)
{
    const EffectiveChannels eff = channels_of(est, d.upsilon);
    const double I = noise_floor(est, eff, d.rho[k], k);
    MatrixXcd B = d.w[k] * d.w[k].adjoint() / est.gamma(k);
    for (int i = 0; i < static_cast<int>(d.w.size()); ++i)
        if (i != k) B -= d.w[i] * d.w[i].adjoint();
    B /= I;
    const double e = std::sqrt(ctx.eps2_h[k]);
    const VectorXcd& h = eff.h[k];
    return {ctx.eps2_h[k] * B, e * (B * h), h.dot(B * h).real() - 1.0};
}

BtiTerms eh_terms(const Instance& est, const RobustContext& ctx, const Design& d, int k)
{
    const EffectiveChannels eff = channels_of(est, d.upsilon);
    const double f = (1.0 - d.rho[k]) / est.q_rf(k);
    const MatrixXcd S = f * sum_outer(d.w);
    const double e = std::sqrt(ctx.eps2_h[k]);
    const VectorXcd& h = eff.h[k];
    return {ctx.eps2_h[k] * S, e * (S * h), h.dot(S * h).real() + f * risi(est, eff, k) - 1.0};
}

BtiTerms fisi_terms(const Instance& est, const RobustContext& ctx, const Design& d, int u)
{
    const MatrixXcd L = sum_outer(d.w) / est.cfg.e_iet_u(u);
    const VectorXcd& v = est.ch.v_d[u];
    const double e = std::sqrt(ctx.eps2_v[u]);
    return {ctx.eps2_v[u] * L, e * (L * v), v.dot(L * v).real() - 1.0};
}

BtiTerms ciusi_terms(const Instance& est, const RobustContext& ctx, const VectorXcd& ups, int u)
{
    const MatrixXcd F = sum_outer(est.f.f) / est.cfg.e_ciusi;
    const VectorXcd g = est.ch.Gu[u].adjoint() * ups;
    const double e = std::sqrt(ctx.eps2_g[u]);
    return {ctx.eps2_g[u] * F, e * (F * g), g.dot(F * g).real() - 1.0};
}

namespace {

MatrixXcd psd_sqrt(const MatrixXcd& C)
{
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(herm(C));
    const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

} // namespace

BtiTerms sinr_terms_general(const Instance& est, const Design& d, int k, const MatrixXcd& C_hd,
                            const MatrixXcd& C_H)
{
    const int M = est.M(), N = est.N();
    const EffectiveChannels eff = channels_of(est, d.upsilon);
    const double I = noise_floor(est, eff, d.rho[k], k);
    MatrixXcd B = d.w[k] * d.w[k].adjoint() / est.gamma(k);
    for (int i = 0; i < static_cast<int>(d.w.size()); ++i)
        if (i != k) B -= d.w[i] * d.w[i].adjoint();
    B /= I;

    // h error = J i with i standard, J = [C_hd^1/2, (I_M kron ups^T) conj(C_H^1/2)]
    MatrixXcd J(M, M + N * M);
    J.leftCols(M) = psd_sqrt(C_hd);
    if (N > 0) {
        MatrixXcd S(M, N * M);
        S.setZero();
        for (int m = 0; m < M; ++m) S.block(m, m * N, 1, N) = d.upsilon.transpose();
        J.rightCols(N * M) = S * psd_sqrt(C_H).conjugate();
    }
    const VectorXcd& h = eff.h[k];
    return {J.adjoint() * B * J, J.adjoint() * (B * h), h.dot(B * h).real() - 1.0};
}

double worst_bti_slack(const Instance& est, const RobustContext& ctx, const Design& d)
{
    double w = std::numeric_limits<double>::infinity();
    const auto& sp = ctx.spec;
    for (int k = 0; k < est.K(); ++k) {
        if (est.gamma(k) > 0.0)
            w = std::min(w, bti_certificate(sinr_terms(est, ctx, d, k), sp.p, BtiDirection::AtLeast).slack);
        if (est.q_rf(k) > 0.0)
            w = std::min(w, bti_certificate(eh_terms(est, ctx, d, k), sp.q, BtiDirection::AtLeast).slack);
    }
    if (!est.isolated) {
        for (int u = 0; u < est.U(); ++u) {
            w = std::min(w, bti_certificate(fisi_terms(est, ctx, d, u), sp.varsigma, BtiDirection::AtMost).slack);
            if (d.upsilon.size() > 0)
                w = std::min(w, bti_certificate(ciusi_terms(est, ctx, d.upsilon, u), sp.varrho,
                                                BtiDirection::AtMost).slack);
        }
    }
    return w;
}

std::vector<double> fixed_ps_ratios(const std::vector<double>& gamma, const std::vector<double>& q, double wR,
                                    double wE)
{
    std::vector<double> rho;
    for (std::size_t k = 0; k < gamma.size(); ++k) {
        const double a = std::sqrt(wR * gamma[k]), b = std::sqrt(wE * q[k]);
        rho.push_back(a + b > 0.0 ? a / (a + b) : 0.5);
    }
    return rho;
}

std::vector<double> fixed_ps_ratios(const Instance& inst)
{
    std::vector<double> g, q;
    for (int k = 0; k < inst.K(); ++k) {
        g.push_back(inst.gamma(k));
        q.push_back(inst.q_rf(k) * 1e3);
    }
    return fixed_ps_ratios(g, q, inst.cfg.omega_R, inst.cfg.omega_E);
}

} // namespace irs
