#include "irs/robust_solver.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace irs {

using conic::CExpr;
using conic::CVecVar;
using conic::HermAffine;
using conic::HermVar;
using conic::LinExpr;
using conic::Model;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using cd = std::complex<double>;

RobustSettings RobustSettings::from_config(const ConfigFile& f, RobustSettings s)
{
    if (auto v = f.get_double("robust_eps")) s.eps = *v;
    if (auto v = f.get_int("robust_j_max")) s.j_max = *v;
    if (auto v = f.get_double("robust_delta")) s.delta = *v;
    if (auto v = f.get_int("robust_sca_max")) s.sca_max = *v;
    if (auto v = f.get_double("rank_tol")) s.rank_tol = *v;
    if (auto v = f.get_double("ccp_varpi0")) s.varpi0 = *v;
    if (auto v = f.get_double("ccp_eta")) s.eta = *v;
    if (auto v = f.get_double("ccp_varpi_max")) s.varpi_max = *v;
    if (auto v = f.get_double("ccp_chi")) s.chi = *v;
    if (auto v = f.get_double("ccp_nu")) s.nu = *v;
    if (auto v = f.get_int("ccp_r_max")) s.r_max = *v;
    if (auto v = f.get_int("ccp_restarts")) s.restarts = *v;
    if (auto v = f.get_double("conic_tol")) s.conic.tol = *v;
    if (auto v = f.get_int("conic_max_iter")) s.conic.max_iter = *v;
    return s;
}

namespace {

EffectiveChannels channels_of(const Instance& est, const VectorXcd& ups)
{
    return ups.size() > 0 ? effective(est.ch, ups) : direct_only(est.ch);
}

double noise_floor(const Instance& est, const EffectiveChannels& eff, double rho, int k)
{
    return risi(est, eff, k) + est.cfg.sigma2_k(k) + est.cfg.sigma2_c_k(k) / rho;
}

double scale_of(const Instance& est, const EffectiveChannels& eff)
{
    double p = 0.0;
    for (int k = 0; k < est.K(); ++k) {
        const double need = std::max(est.gamma(k) * (est.cfg.sigma2_k(k) + est.cfg.sigma2_c_k(k)), est.q_rf(k));
        p = std::max(p, need / std::max(eff.h[k].squaredNorm(), 1e-300));
    }
    return p > 0.0 ? p : 1.0;
}

std::vector<CExpr> scaled(std::vector<CExpr> v, double a)
{
    for (auto& e : v) {
        e.re *= a;
        e.im *= a;
    }
    return v;
}

double worst_rank(const std::vector<MatrixXcd>& W)
{
    double r = 0.0;
    for (const auto& X : W) r = std::max(r, rank_ratio(X));
    return r;
}

VectorXcd principal(const MatrixXcd& W)
{
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(W);
    return es.eigenvectors().col(W.rows() - 1);
}

// conj(a^H v) = v^H a
CExpr conj_inner(const CVecVar& v, const VectorXcd& a)
{
    CExpr e = v.inner(a);
    e.im = -e.im;
    return e;
}

// 2 Re(conj(z0) z) - |z0|^2, a global under-estimator of |z|^2
LinExpr lin_sq(const CExpr& z, cd z0)
{
    return 2.0 * z0.real() * z.re + 2.0 * z0.imag() * z.im - std::norm(z0);
}

std::vector<CExpr> affine_times(const MatrixXcd& A, const VectorXcd& c, const CVecVar& v)
{
    std::vector<CExpr> out;
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        CExpr e = v.inner(A.row(i).adjoint());
        e.re += c(i).real();
        e.im += c(i).imag();
        out.push_back(e);
    }
    return out;
}

} // namespace

RobustTbResult robust_tb_step(const Instance& est, const RobustContext& ctx, const VectorXcd& ups,
                              const RobustSettings& st)
{
    RobustTbResult res;
    const int K = est.K(), M = est.M();
    const auto& sp = ctx.spec;
    const EffectiveChannels eff = channels_of(est, ups);

    if (!est.isolated && ups.size() > 0) {
        for (int u = 0; u < est.U(); ++u)
            if (bti_certificate(ciusi_terms(est, ctx, ups, u), sp.varrho, BtiDirection::AtMost).slack < 0.0)
                return res;
    }

    const double P0 = scale_of(est, eff);
    std::vector<VectorXcd> dir; // principal directions of the previous iterate
    for (int it = 0; it <= st.sca_max; ++it) {
        Model m;
        std::vector<HermVar> W;
        for (int k = 0; k < K; ++k) W.push_back(m.add_hermitian(M));
        HermAffine S(M);
        for (int k = 0; k < K; ++k) S += HermAffine::from_var(W[k]);

        LinExpr obj;
        for (int k = 0; k < K; ++k) {
            if (dir.empty()) {
                obj += W[k].trace();
            } else {
                obj += (1.0 + st.delta) * W[k].trace();
                obj -= st.delta * W[k].trace_with(dir[k] * dir[k].adjoint());
            }
        }
        m.minimize(obj);

        for (int k = 0; k < K; ++k) {
            const double e2 = ctx.eps2_h[k];
            const double gam = est.gamma(k);
            if (gam > 0.0) {
                const double c = P0 / noise_floor(est, eff, ctx.rho[k], k);
                const VectorXcd h = std::sqrt(c) * eff.h[k];
                HermAffine B = HermAffine::from_var(W[k]);
                B *= 1.0 / gam;
                for (int i = 0; i < K; ++i)
                    if (i != k) B -= HermAffine::from_var(W[i]);
                HermAffine Q = B;
                Q *= c * e2;
                add_bti(m, Q, scaled(times(B, h), std::sqrt(c * e2)), B.trace_with(h * h.adjoint()) - 1.0, sp.p,
                        BtiDirection::AtLeast);
            }
            const double q = est.q_rf(k);
            if (q > 0.0) {
                const double f = (1.0 - ctx.rho[k]) / q;
                const double c = P0 * f;
                const VectorXcd h = std::sqrt(c) * eff.h[k];
                HermAffine Q = S;
                Q *= c * e2;
                add_bti(m, Q, scaled(times(S, h), std::sqrt(c * e2)),
                        S.trace_with(h * h.adjoint()) + f * risi(est, eff, k) - 1.0, sp.q, BtiDirection::AtLeast);
            }
        }
        if (!est.isolated) {
            for (int u = 0; u < est.U(); ++u) {
                const double c = P0 / est.cfg.e_iet_u(u);
                const double e2 = ctx.eps2_v[u];
                const VectorXcd v = std::sqrt(c) * est.ch.v_d[u];
                HermAffine Q = S;
                Q *= c * e2;
                add_bti(m, Q, scaled(times(S, v), std::sqrt(c * e2)), S.trace_with(v * v.adjoint()) - 1.0,
                        sp.varsigma, BtiDirection::AtMost);
            }
        }
        for (int k = 0; k < K; ++k) m.add_psd(HermAffine::from_var(W[k]));

        const conic::ModelResult r = m.solve(st.conic);
        if (!conic::near_optimal(r.raw)) break; // keep the previous iterate, if any
        std::vector<MatrixXcd> Wn;
        for (int k = 0; k < K; ++k) {
            MatrixXcd X = P0 * W[k].value(r.x);
            Wn.push_back(0.5 * (X + X.adjoint()));
        }
        res.feasible = true;
        res.W = Wn;
        res.rank = worst_rank(Wn);
        res.iterations = it + 1;
        if (res.rank <= st.rank_tol) break;
        dir.clear();
        for (const auto& X : Wn) dir.push_back(principal(X));
    }
    if (!res.feasible) return res;
    res.power = 0.0;
    for (const auto& X : res.W) {
        res.w.push_back(extract_beamformer(X, 1.0));
        res.power += res.w.back().squaredNorm();
    }
    return res;
}

namespace {

struct CcpRun {
    bool ok = false;
    VectorXcd upsilon;
    double zeta = std::numeric_limits<double>::infinity();
    int iterations = 0;
};

CcpRun ccp_from(const Instance& est, const RobustContext& ctx, const std::vector<VectorXcd>& w,
                const VectorXcd& start, const RobustSettings& st)
{
    CcpRun run;
    const int K = est.K(), N = est.N(), U = est.U();
    const auto& sp = ctx.spec;
    MatrixXcd Wsum = MatrixXcd::Zero(est.M(), est.M());
    for (const auto& x : w) Wsum += x * x.adjoint();

    VectorXcd u0 = start;
    double varpi = st.varpi0;
    double prev_margin = std::numeric_limits<double>::quiet_NaN();
    for (int r = 1; r <= st.r_max; ++r) {
        // risi uses the direct PT path unless configured otherwise; that one is taken at u0
        Eigen::VectorXcd u0n = u0;
        for (int n = 0; n < N; ++n) u0n(n) = std::abs(u0(n)) > 0.0 ? u0(n) / std::abs(u0(n)) : cd(1.0);
        const EffectiveChannels eff0 = effective(est.ch, u0n);

        Model m;
        const CVecVar v = m.add_cvec(N);
        const std::vector<int> zeta = m.add_vars(N);
        LinExpr margins, penalty;
        for (int n = 0; n < N; ++n) {
            const CExpr x = v.at(n);
            m.add_soc(1.0, {x.re, x.im});
            m.add_ge(lin_sq(x, u0(n)) - 1.0 + LinExpr::var(zeta[n]));
            m.add_ge(LinExpr::var(zeta[n]));
            penalty += LinExpr::var(zeta[n]);
        }
        auto margin_var = [&]() {
            const int t = m.add_var();
            m.add_ge(LinExpr::var(t));
            margins += LinExpr::var(t);
            return LinExpr::var(t);
        };

        for (int k = 0; k < K; ++k) {
            const double eps = std::sqrt(ctx.eps2_h[k]);
            const VectorXcd& hd = est.ch.h_d[k];
            const MatrixXcd& Hk = est.ch.Hk[k];
            const VectorXcd h0 = hd + Hk.adjoint() * u0;
            const double gam = est.gamma(k);
            if (gam > 0.0) {
                const double I = noise_floor(est, eff0, ctx.rho[k], k);
                const double a = 1.0 / std::sqrt(I);
                // z_i = h^H w_i / sqrt(I) = (hd^H w_i + ups^H H_k w_i) / sqrt(I)
                std::vector<LinExpr> interf;
                LinExpr own;
                for (int i = 0; i < K; ++i) {
                    CExpr z = conj_inner(v, a * (Hk * w[i]));
                    const cd c0 = a * hd.dot(w[i]);
                    z.re += c0.real();
                    z.im += c0.imag();
                    if (i == k) {
                        own = lin_sq(z, a * h0.dot(w[i]));
                    } else {
                        interf.push_back(z.re);
                        interf.push_back(z.im);
                    }
                }
                const int t = m.add_var();
                m.add_rotated_soc(LinExpr::var(t), 1.0, interf);
                MatrixXcd B = w[k] * w[k].adjoint() / gam;
                for (int i = 0; i < K; ++i)
                    if (i != k) B -= w[i] * w[i].adjoint();
                B /= I;
                const auto r_aff = affine_times(eps * B * Hk.adjoint(), eps * B * hd, v);
                add_bti(m, MatrixXcd(eps * eps * B), r_aff, (1.0 / gam) * own - LinExpr::var(t) - 1.0, sp.p,
                        BtiDirection::AtLeast, margin_var());
            }
            const double q = est.q_rf(k);
            if (q > 0.0) {
                const double f = (1.0 - ctx.rho[k]) / q;
                const double a = std::sqrt(f);
                LinExpr s = f * risi(est, eff0, k) - 1.0;
                for (int i = 0; i < K; ++i) {
                    CExpr z = conj_inner(v, a * (Hk * w[i]));
                    const cd c0 = a * hd.dot(w[i]);
                    z.re += c0.real();
                    z.im += c0.imag();
                    s += lin_sq(z, a * h0.dot(w[i]));
                }
                const MatrixXcd Sg = f * Wsum;
                const auto r_aff = affine_times(eps * Sg * Hk.adjoint(), eps * Sg * hd, v);
                add_bti(m, MatrixXcd(eps * eps * Sg), r_aff, s, sp.q, BtiDirection::AtLeast, margin_var());
            }
        }
        if (!est.isolated) {
            MatrixXcd F = MatrixXcd::Zero(est.cfg.L, est.cfg.L);
            for (const auto& fj : est.f.f) F += fj * fj.adjoint();
            F /= est.cfg.e_ciusi;
            for (int u = 0; u < U; ++u) {
                const MatrixXcd& Gu = est.ch.Gu[u];
                const double eps = std::sqrt(ctx.eps2_g[u]);
                std::vector<LinExpr> comps;
                for (const auto& fj : est.f.f) {
                    const CExpr c = v.inner(Gu * fj / std::sqrt(est.cfg.e_ciusi));
                    comps.push_back(c.re);
                    comps.push_back(c.im);
                }
                const int t = m.add_var();
                m.add_rotated_soc(LinExpr::var(t), 1.0, comps);
                const auto r_aff = affine_times(eps * F * Gu.adjoint(), VectorXcd::Zero(F.rows()), v);
                add_bti(m, MatrixXcd(eps * eps * F), r_aff, LinExpr::var(t) - 1.0, sp.varrho,
                        BtiDirection::AtMost, margin_var());
            }
        }
        m.minimize(varpi * penalty - margins);

        const conic::ModelResult res = m.solve(st.conic);
        // each step only has to be feasible; the reflect vector is re-checked by the next TB step
        if (!conic::near_optimal(res.raw, 1e-5)) break;
        run.upsilon = v.value(res.x);
        run.zeta = penalty.eval(res.x);
        run.iterations = r;
        const double mg = margins.eval(res.x);
        const bool settled = std::isfinite(prev_margin) && std::abs(mg - prev_margin) <= st.nu * std::max(1.0, std::abs(mg));
        prev_margin = mg;
        u0 = run.upsilon;
        if (run.zeta <= st.chi && settled) break;
        varpi = std::min(st.eta * varpi, st.varpi_max);
    }
    run.ok = run.upsilon.size() == N && run.zeta <= st.chi;
    return run;
}

} // namespace

RobustRbResult robust_rb_ccp(const Instance& est, const RobustContext& ctx, const std::vector<VectorXcd>& w,
                             const VectorXcd& upsilon_prev, const RobustSettings& st, std::mt19937_64& rng)
{
    RobustRbResult out;
    for (int a = 0; a <= st.restarts; ++a) {
        const VectorXcd start = a == 0 ? upsilon_prev : random_phases(est.N(), rng);
        const CcpRun run = ccp_from(est, ctx, w, start, st);
        out.iterations += run.iterations;
        if (!run.ok) continue;
        out.restarts = a;
        out.zeta = run.zeta;
        out.upsilon = run.upsilon;
        for (Eigen::Index n = 0; n < out.upsilon.size(); ++n) {
            const double r = std::abs(out.upsilon(n));
            out.upsilon(n) = r > 0.0 ? out.upsilon(n) / r : cd(1.0);
        }
        return out;
    }
    throw CcpStalled("robust_rb_ccp: unit-modulus slack did not vanish");
}

DesignSolution robust_solve(const Instance& est, const CsiErrors& csi, const RobustSettings& st,
                            const VectorXcd& init_upsilon, std::mt19937_64& rng)
{
    DesignSolution sol;
    const std::vector<double> rho = fixed_ps_ratios(est);
    const RobustContext ctx = make_robust_context(est, csi, rho);
    const bool has_irs = est.N() > 0 && init_upsilon.size() == est.N();
    VectorXcd ups = has_irs ? init_upsilon : VectorXcd();

    RobustTbResult tb = robust_tb_step(est, ctx, ups, st);
    sol.design.rho = rho;
    sol.design.upsilon = ups;
    if (!tb.feasible) {
        sol.status = "infeasible";
        for (int k = 0; k < est.K(); ++k) sol.design.w.push_back(VectorXcd::Zero(est.M()));
        return sol;
    }
    const double tb_bar = est.tau_bar();
    sol.trace.push_back(tb_bar * tb.power);
    sol.status = "ok";
    int inner = tb.iterations;

    for (int j = 1; has_irs && j <= st.j_max; ++j) {
        RobustRbResult rb;
        try {
            rb = robust_rb_ccp(est, ctx, tb.w, ups, st, rng);
        } catch (const CcpStalled&) {
            sol.status = "ccp_stalled";
            break;
        }
        inner += rb.iterations;
        RobustTbResult next = robust_tb_step(est, ctx, rb.upsilon, st);
        sol.outer_iters = j;
        if (!next.feasible || next.power > tb.power) break; // a worse pair is never accepted
        const double rel = (tb.power - next.power) / tb.power;
        tb = next;
        ups = rb.upsilon;
        inner += next.iterations;
        sol.trace.push_back(tb_bar * tb.power);
        if (rel <= st.eps) break;
    }

    sol.design.w = tb.w;
    sol.design.upsilon = ups;
    sol.inner_iters = inner;
    sol.rank_residual = tb.rank;
    sol.objective = tb_bar * tb.power;
    sol.feasible = worst_bti_slack(est, ctx, sol.design) >= -1e-5;
    if (!sol.feasible && sol.status == "ok") sol.status = "bti_violated";
    return sol;
}

} // namespace irs
