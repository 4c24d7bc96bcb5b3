#include "irs/am_solver.hpp"

#include "irs/model.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace irs {

using conic::HermAffine;
using conic::HermVar;
using conic::LinExpr;
using conic::Model;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using cd = std::complex<double>;

AmSettings AmSettings::from_config(const ConfigFile& f, AmSettings s)
{
    if (auto v = f.get_double("am_eps")) s.eps = *v;
    if (auto v = f.get_int("am_j_max")) s.j_max = *v;
    if (auto v = f.get_int("sca_t_max")) s.t_max = *v;
    if (auto v = f.get_double("sca_mu0")) s.mu0 = *v;
    if (auto v = f.get_double("sca_mu_floor")) s.mu_floor = *v;
    if (auto v = f.get_double("rank_tol")) s.rank_tol = *v;
    if (auto v = f.get_double("conic_tol")) s.conic.tol = *v;
    if (auto v = f.get_int("conic_max_iter")) s.conic.max_iter = *v;
    return s;
}

namespace {

double power_scale(const Instance& inst, const EffectiveChannels& eff)
{
    double p = 0.0;
    for (int k = 0; k < inst.K(); ++k) {
        const double need = std::max(inst.gamma(k) * (inst.cfg.sigma2_k(k) + inst.cfg.sigma2_c_k(k)),
                                     inst.q_rf(k));
        const double g = std::max(eff.h[k].squaredNorm(), 1e-300);
        p = std::max(p, need / g);
    }
    return p > 0.0 ? p : 1.0;
}

} // namespace

JtbpsResult solve_jtbps_sdp(const Instance& inst, const EffectiveChannels& eff, const VectorXcd& ups,
                            const JtbpsOptions& opt)
{
    JtbpsResult res;
    const int K = inst.K(), M = inst.M();
    const bool fixed = opt.fixed_rho.has_value();

    if (!inst.isolated && ups.size() > 0) {
        for (int u = 0; u < inst.U(); ++u)
            if (ciusi(inst.ch, ups, inst.f, u, 1.0) > inst.cfg.e_ciusi) {
                res.status = conic::Status::Infeasible;
                return res;
            }
    }

    const double P0 = power_scale(inst, eff);
    Model m;
    std::vector<HermVar> W;
    for (int k = 0; k < K; ++k) W.push_back(m.add_hermitian(M));
    std::vector<int> rho, s, e;
    if (!fixed) {
        rho = m.add_vars(K);
        s = m.add_vars(K);
        e = m.add_vars(K);
    }

    LinExpr obj;
    for (int k = 0; k < K; ++k) obj += W[k].trace();
    m.minimize(obj);

    for (int k = 0; k < K; ++k) {
        const MatrixXcd R = eff.h[k] * eff.h[k].adjoint();
        const double gam = inst.gamma(k);
        const double ri = risi(inst, eff, k);
        const double s2 = inst.cfg.sigma2_k(k), sc2 = inst.cfg.sigma2_c_k(k);
        if (gam > 0.0) {
            // tr(R W_k) - gam sum_{i!=k} tr(R W_i) >= gam (risi + s2 + sc2 / rho_k)
            const double scale = gam * (ri + s2 + sc2);
            LinExpr c = (P0 / scale) * W[k].trace_with(R);
            for (int i = 0; i < K; ++i)
                if (i != k) c -= (gam * P0 / scale) * W[i].trace_with(R);
            c -= gam * (ri + s2) / scale;
            if (fixed)
                c -= gam * sc2 / (*opt.fixed_rho)[k] / scale;
            else
                c -= (gam * sc2 / scale) * LinExpr::var(s[k]);
            m.add_ge(c);
            if (!fixed) m.add_rotated_soc(LinExpr::var(s[k]), LinExpr::var(rho[k]), {1.0}); // s rho >= 1
        }
        const double q = inst.q_rf(k);
        if (q > 0.0) {
            // (sum_i tr(R W_i) + risi) (1 - rho_k) >= q
            LinExpr c;
            for (int i = 0; i < K; ++i) c += (P0 / q) * W[i].trace_with(R);
            c += ri / q;
            if (fixed)
                c -= 1.0 / (1.0 - (*opt.fixed_rho)[k]);
            else
                c -= LinExpr::var(e[k]);
            m.add_ge(c);
            if (!fixed) m.add_rotated_soc(LinExpr::var(e[k]), 1.0 - LinExpr::var(rho[k]), {1.0});
        }
        if (!fixed) {
            m.add_ge(LinExpr::var(rho[k]));
            m.add_ge(1.0 - LinExpr::var(rho[k]));
        }
    }
    if (!inst.isolated) {
        for (int u = 0; u < inst.U(); ++u) {
            const MatrixXcd Vd = inst.ch.v_d[u] * inst.ch.v_d[u].adjoint();
            const double t = inst.cfg.e_iet_u(u);
            LinExpr c = 1.0;
            for (int k = 0; k < K; ++k) c -= (P0 / t) * W[k].trace_with(Vd);
            m.add_ge(c);
        }
    }
    for (int k = 0; k < K; ++k) m.add_psd(HermAffine::from_var(W[k]));

    const conic::ModelResult r = m.solve(opt.conic);
    res.status = r.status;
    if (!conic::near_optimal(r.raw, 1e-5)) return res; // rechecked downstream
    res.feasible = true;
    for (int k = 0; k < K; ++k) {
        MatrixXcd Wk = P0 * W[k].value(r.x);
        Wk = 0.5 * (Wk + Wk.adjoint());
        res.W.push_back(Wk);
        res.power += Wk.trace().real();
        if (fixed) {
            res.rho.push_back((*opt.fixed_rho)[k]);
        } else {
            double v = r.x(rho[k]);
            // a rho that only enters through an inactive constraint is arbitrary; keep it interior
            res.rho.push_back(std::clamp(v, 1e-12, 1.0 - 1e-12));
        }
    }
    return res;
}

double rank_ratio(const MatrixXcd& W)
{
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(W, Eigen::EigenvaluesOnly);
    const auto ev = es.eigenvalues();
    const Eigen::Index n = ev.size();
    if (n < 2) return 0.0;
    if (ev(n - 1) <= 0.0) return 0.0;
    return std::max(ev(n - 2), 0.0) / ev(n - 1);
}

VectorXcd extract_beamformer(const MatrixXcd& W, double tol)
{
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(W);
    const auto ev = es.eigenvalues();
    const Eigen::Index n = ev.size();
    if (n == 0) return VectorXcd();
    const double l1 = ev(n - 1);
    if (l1 <= 0.0) return VectorXcd::Zero(n);
    if (n > 1 && ev(n - 2) > tol * l1) throw NotRankOne("extract_beamformer: matrix is not rank one");
    VectorXcd w = std::sqrt(l1) * es.eigenvectors().col(n - 1);
    for (Eigen::Index i = 0; i < n; ++i)
        if (std::abs(w(i)) > 1e-12 * w.norm()) {
            w *= std::conj(w(i)) / std::abs(w(i));
            break;
        }
    return w;
}

LiftedForms lifted_forms(const Instance& inst, const std::vector<VectorXcd>& w)
{
    LiftedForms L;
    const int K = inst.K(), N = inst.N();
    L.c.resize(K);
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < static_cast<int>(w.size()); ++i) {
            VectorXcd c(N + 1);
            c.head(N) = inst.ch.Hk[k] * w[i];
            c(N) = inst.ch.h_d[k].dot(w[i]);
            L.c[k].push_back(c);
        }
    for (int u = 0; u < inst.U(); ++u) {
        MatrixXcd Om = MatrixXcd::Zero(N + 1, N + 1);
        for (const auto& fj : inst.f.f) {
            VectorXcd c = VectorXcd::Zero(N + 1);
            c.head(N) = inst.ch.Gu[u] * fj;
            Om += c * c.adjoint();
        }
        L.Omega.push_back(Om);
    }
    return L;
}

namespace {

VectorXcd principal(const MatrixXcd& V, double* lmax = nullptr, double* l2 = nullptr)
{
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(V);
    const Eigen::Index n = V.rows();
    if (lmax) *lmax = es.eigenvalues()(n - 1);
    if (l2) *l2 = n > 1 ? es.eigenvalues()(n - 2) : 0.0;
    return es.eigenvectors().col(n - 1);
}

} // namespace

double lifted_rank_residual(const MatrixXcd& V)
{
    double lmax = 0.0;
    principal(V, &lmax);
    const double nb = V.trace().real();
    return std::max(0.0, (nb - lmax) / nb);
}

RbStep rb_sca_step(const Instance& inst, const Design& d, const MatrixXcd& V_prev, double mu,
                   const conic::Settings& st)
{
    const int K = inst.K(), N = inst.N();
    const int Nb = N + 1;
    const LiftedForms L = lifted_forms(inst, d.w);
    const EffectiveChannels eff = effective(inst.ch, d.upsilon); // only RISI is used from here

    Model m;
    const HermVar V = m.add_hermitian(Nb);
    const std::vector<int> a = m.add_vars(K);
    const std::vector<int> b = m.add_vars(K);
    const VectorXcd u = principal(V_prev);

    LinExpr obj = (-1.0 / (2.0 * mu)) * V.trace_with(u * u.adjoint());
    for (int k = 0; k < K; ++k) obj -= LinExpr::var(a[k]) + LinExpr::var(b[k]);
    m.minimize(obj);

    for (int k = 0; k < K; ++k) {
        const double gam = inst.gamma(k);
        const double ri = risi(inst, eff, k);
        if (gam > 0.0) {
            const double Ik = ri + inst.cfg.sigma2_k(k) + inst.cfg.sigma2_c_k(k) / d.rho[k];
            const double sc = 1.0 / (gam * Ik);
            LinExpr c = sc * V.trace_with(L.c[k][k] * L.c[k][k].adjoint());
            for (int i = 0; i < K; ++i)
                if (i != k) c -= (gam * sc) * V.trace_with(L.c[k][i] * L.c[k][i].adjoint());
            c -= 1.0 + LinExpr::var(a[k]);
            m.add_ge(c);
        } else {
            m.add_eq(LinExpr::var(a[k]));
        }
        const double q = inst.q_rf(k);
        if (q > 0.0) {
            const double sc = (1.0 - d.rho[k]) / q;
            LinExpr c = sc * ri;
            for (int i = 0; i < K; ++i) c += sc * V.trace_with(L.c[k][i] * L.c[k][i].adjoint());
            c -= 1.0 + LinExpr::var(b[k]);
            m.add_ge(c);
        } else {
            m.add_eq(LinExpr::var(b[k]));
        }
        m.add_ge(LinExpr::var(a[k]));
        m.add_ge(LinExpr::var(b[k]));
    }
    if (!inst.isolated)
        for (int uu = 0; uu < inst.U(); ++uu)
            m.add_ge(1.0 - (1.0 / inst.cfg.e_ciusi) * V.trace_with(L.Omega[uu]));
    for (int n = 0; n < Nb; ++n) m.add_eq(LinExpr::var(V.diag(n)) - 1.0);
    m.add_psd(HermAffine::from_var(V));

    RbStep out;
    const conic::ModelResult r = m.solve(st);
    if (!conic::near_optimal(r.raw)) return out;
    out.feasible = true;
    out.V = V.value(r.x);
    double lmax = 0.0;
    principal(out.V, &lmax);
    out.objective = (Nb - lmax) / (2.0 * mu);
    for (int k = 0; k < K; ++k) {
        out.sinr_margin.push_back(r.x(a[k]));
        out.eh_margin.push_back(r.x(b[k]));
        out.objective -= r.x(a[k]) + r.x(b[k]);
    }
    return out;
}

MatrixXcd lift(const VectorXcd& ups, cd x)
{
    VectorXcd vb(ups.size() + 1);
    vb.head(ups.size()) = ups * x;
    vb(ups.size()) = x;
    return vb * vb.adjoint();
}

VectorXcd recover_upsilon(const MatrixXcd& V, double tol)
{
    double lmax = 0.0, l2 = 0.0;
    const VectorXcd vb = principal(V, &lmax, &l2);
    if (l2 > tol * lmax) throw NotRankOne("recover_upsilon: lifted matrix is not rank one");
    const Eigen::Index N = V.rows() - 1;
    VectorXcd ups(N);
    const cd ref = vb(N);
    for (Eigen::Index n = 0; n < N; ++n) {
        const cd r = vb(n) / ref;
        ups(n) = std::polar(1.0, std::arg(r));
    }
    return ups;
}

VectorXcd random_phases(int n, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
    VectorXcd v(n);
    for (int i = 0; i < n; ++i) v(i) = std::polar(1.0, u(rng));
    return v;
}

RbResult rb_sca(const Instance& inst, const Design& d, const AmSettings& st)
{
    RbResult res;
    const int Nb = inst.N() + 1;
    MatrixXcd V = lift(d.upsilon);
    double mu = st.mu0;
    double prev = 0.0; // objective of the rank-one start with zero margins
    res.V = V;
    for (int t = 1; t <= st.t_max; ++t) {
        const RbStep step = rb_sca_step(inst, d, V, mu, st.conic);
        res.iterations = t;
        if (!step.feasible) break;
        V = step.V;
        res.V = V;
        res.trace.push_back(step.objective);
        res.rank_residual = lifted_rank_residual(V);
        const double change = std::abs(prev - step.objective);
        prev = step.objective;
        if (res.rank_residual <= st.eps && change <= st.eps * std::max(1.0, std::abs(step.objective))) {
            res.converged = true;
            break;
        }
        if (change <= st.eps * std::max(1.0, std::abs(step.objective)) && res.rank_residual > st.eps) {
            mu = std::max(mu / 2.0, st.mu_floor);
            // the penalized objective is re-based when the weight changes
            double lmax = 0.0;
            principal(V, &lmax);
            prev = (Nb - lmax) / (2.0 * mu);
            for (std::size_t k = 0; k < step.sinr_margin.size(); ++k)
                prev -= step.sinr_margin[k] + step.eh_margin[k];
        }
    }
    if (res.rank_residual <= st.eps) {
        try {
            res.upsilon = recover_upsilon(res.V, 1.0);
        } catch (const NotRankOne&) {
            res.converged = false;
            res.upsilon.resize(0);
        }
    }
    return res;
}

std::optional<Design> design_from(const JtbpsResult& r, const VectorXcd& ups, double rank_tol,
                                  double* worst_rank)
{
    if (!r.feasible) return std::nullopt;
    Design d;
    d.upsilon = ups;
    d.rho = r.rho;
    double worst = 0.0;
    for (const auto& W : r.W) {
        worst = std::max(worst, rank_ratio(W));
        d.w.push_back(extract_beamformer(W, rank_tol));
    }
    if (worst_rank) *worst_rank = worst;
    return d;
}

DesignSolution am_solve(const Instance& inst, const AmSettings& st, const VectorXcd& init)
{
    DesignSolution sol;
    const double tb = inst.tau_bar();
    JtbpsOptions jo;
    jo.conic = st.conic;
    jo.fixed_rho = st.fixed_rho;

    auto p3 = [&](const VectorXcd& ups, double* rank) -> std::optional<Design> {
        const EffectiveChannels eff = ups.size() > 0 ? effective(inst.ch, ups) : direct_only(inst.ch);
        try {
            return design_from(solve_jtbps_sdp(inst, eff, ups, jo), ups, st.rank_tol, rank);
        } catch (const NotRankOne&) {
            return std::nullopt;
        }
    };

    double rank = 0.0;
    std::optional<Design> cur = p3(init, &rank);
    if (!cur) {
        sol.status = "infeasible";
        sol.design.upsilon = init;
        return sol;
    }
    sol.rank_residual = rank;
    double f = tb * cur->power();
    sol.trace.push_back(f);
    sol.status = "max_iter";
    for (int j = 1; j <= st.j_max; ++j) {
        sol.outer_iters = j;
        if (inst.N() == 0) {
            sol.status = "ok";
            break;
        }
        const RbResult rb = rb_sca(inst, *cur, st);
        sol.inner_iters += rb.iterations;
        std::optional<Design> next;
        double nrank = 0.0;
        // a rank-one iterate is usable even when the SCA ran out of iterations
        if (rb.upsilon.size() > 0) next = p3(rb.upsilon, &nrank);
        if (!next || tb * next->power() > f) {
            // the reflect update did not help; the current point is a fixed point of the loop
            sol.trace.push_back(f);
            sol.status = "ok";
            break;
        }
        const double fn = tb * next->power();
        sol.trace.push_back(fn);
        cur = next;
        sol.rank_residual = std::max(nrank, rb.rank_residual);
        const double change = (f - fn) / f;
        f = fn;
        if (change <= st.eps) {
            sol.status = "ok";
            break;
        }
    }
    sol.design = *cur;
    sol.objective = f;
    sol.feasible = true;
    return sol;
}

} // namespace irs
