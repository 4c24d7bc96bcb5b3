#include "irs/bcd_solver.hpp"

#include "irs/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace irs {

using conic::CVecVar;
using conic::LinExpr;
using conic::Model;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

BcdSettings BcdSettings::from_config(const ConfigFile& f, BcdSettings s)
{
    if (auto v = f.get_double("bcd_omega0")) s.omega0 = *v;
    if (auto v = f.get_double("bcd_c")) s.c = *v;
    if (auto v = f.get_double("bcd_omega_floor")) s.omega_floor = *v;
    if (auto v = f.get_double("bcd_eps1")) s.eps1 = *v;
    if (auto v = f.get_double("bcd_eps2")) s.eps2 = *v;
    if (auto v = f.get_int("bcd_inner_max")) s.inner_max = *v;
    if (auto v = f.get_int("bcd_outer_max")) s.outer_max = *v;
    if (auto v = f.get_double("rcg_tol")) s.rcg_tol = *v;
    if (auto v = f.get_int("rcg_max")) s.rcg_max = *v;
    if (auto v = f.get_double("rank_tol")) s.rank_tol = *v;
    if (auto v = f.get_double("conic_tol")) s.conic.tol = *v;
    if (auto v = f.get_int("conic_max_iter")) s.conic.max_iter = *v;
    return s;
}

VectorXcd BcdData::h(int k, const VectorXcd& ups) const
{
    if (N == 0) return hd[k];
    return hd[k] + Hk[k].adjoint() * ups;
}

BcdData make_bcd_data(const Instance& inst, double alpha, double beta)
{
    BcdData d;
    d.K = inst.K();
    d.U = inst.U();
    d.M = inst.M();
    d.N = inst.N();
    d.coupled = !inst.isolated;
    d.alpha = alpha;
    d.beta = beta;
    const double s = beta / alpha;
    const double a2 = alpha * alpha;
    const EffectiveChannels eff = direct_only(inst.ch);
    for (int k = 0; k < d.K; ++k) {
        d.hd.push_back(s * inst.ch.h_d[k]);
        d.Hk.push_back(d.N > 0 ? MatrixXcd(s * inst.ch.Hk[k]) : MatrixXcd(0, d.M));
        const double ri = risi(inst, eff, k);
        d.gamma.push_back(inst.gamma(k));
        d.q.push_back(inst.q_rf(k) / a2);
        d.i_hat.push_back((ri + inst.cfg.sigma2_k(k)) / a2);
        d.i_tilde.push_back(ri / a2);
        d.sigma2_c.push_back(inst.cfg.sigma2_c_k(k) / a2);
    }
    for (int u = 0; u < d.U; ++u) {
        d.vd.push_back(s * inst.ch.v_d[u]);
        std::vector<VectorXcd> cu;
        for (const auto& fj : inst.f.f)
            cu.push_back(d.N > 0 ? VectorXcd(inst.ch.Gu[u] * fj / alpha) : VectorXcd(0));
        d.c.push_back(cu);
        d.psi_radius2.push_back(inst.cfg.e_iet_u(u) / a2);
    }
    d.lambda_radius2 = inst.cfg.e_ciusi / a2;
    return d;
}

std::vector<VectorXcd> tb_closed_form(const BcdData& d, const VectorXcd& ups, const AuxiliaryBlocks& aux,
                                      double omega)
{
    const double g = 1.0 / (2.0 * omega);
    std::vector<VectorXcd> h;
    for (int k = 0; k < d.K; ++k) h.push_back(d.h(k, ups));
    MatrixXcd A = d.tau * MatrixXcd::Identity(d.M, d.M);
    for (const auto& hk : h) A += g * hk * hk.adjoint();
    if (d.coupled)
        for (const auto& v : d.vd) A += g * v * v.adjoint();
    const Eigen::LLT<MatrixXcd> llt(A);
    std::vector<VectorXcd> w;
    for (int k = 0; k < d.K; ++k) {
        VectorXcd r = VectorXcd::Zero(d.M);
        for (int i = 0; i < d.K; ++i) r += h[i] * aux.t[i][k];
        if (d.coupled)
            for (int u = 0; u < d.U; ++u) r += d.vd[u] * aux.psi[u][k];
        w.push_back(llt.solve(g * r));
    }
    return w;
}

double RbObjective::value(const VectorXcd& ups) const
{
    double f = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) f += std::norm(ups.dot(a[n]) + b0[n]);
    return f;
}

VectorXcd RbObjective::gradient(const VectorXcd& ups) const
{
    VectorXcd g = VectorXcd::Zero(ups.size());
    for (std::size_t n = 0; n < a.size(); ++n) g += 2.0 * a[n] * std::conj(ups.dot(a[n]) + b0[n]);
    return g;
}

RbObjective rb_objective(const BcdData& d, const std::vector<VectorXcd>& w, const AuxiliaryBlocks& aux)
{
    RbObjective f;
    for (int k = 0; k < d.K; ++k)
        for (int i = 0; i < d.K; ++i) {
            f.a.push_back(d.Hk[k] * w[i]);
            f.b0.push_back(d.hd[k].dot(w[i]) - aux.t[k][i]);
        }
    if (d.coupled)
        for (int u = 0; u < d.U; ++u)
            for (std::size_t j = 0; j < d.c[u].size(); ++j) {
                f.a.push_back(d.c[u][j]);
                f.b0.push_back(-aux.lambda[u][j]);
            }
    return f;
}

VectorXcd riemannian_gradient(const VectorXcd& egrad, const VectorXcd& ups)
{
    const Eigen::ArrayXd r = (egrad.array() * ups.array().conjugate()).real();
    return egrad.array() - r.cast<cplx>() * ups.array();
}

namespace {

VectorXcd retract(const VectorXcd& x)
{
    VectorXcd r(x.size());
    for (Eigen::Index n = 0; n < x.size(); ++n) {
        const double m = std::abs(x(n));
        r(n) = m > 0.0 ? x(n) / m : cplx(1.0, 0.0);
    }
    return r;
}

double real_inner(const VectorXcd& a, const VectorXcd& b) { return a.dot(b).real(); }

} // namespace

RcgResult rb_rcg(const RbObjective& f, const VectorXcd& init, const BcdSettings& st)
{
    RcgResult res;
    VectorXcd x = retract(init);
    double fx = f.value(x);
    VectorXcd g = riemannian_gradient(f.gradient(x), x);
    VectorXcd d = -g;
    res.upsilon = x;
    res.value = fx;
    res.grad_norm = g.norm();
    for (int it = 0; it < st.rcg_max && x.size() > 0; ++it) {
        if (g.norm() <= st.rcg_tol) break;
        double slope = real_inner(g, d);
        if (slope >= 0.0) {
            d = -g;
            slope = -g.squaredNorm();
        }
        double eta = st.armijo_step;
        VectorXcd xn;
        double fn = fx;
        bool accepted = false;
        for (int b = 0; b < 60; ++b) {
            xn = retract(x + eta * d);
            fn = f.value(xn);
            if (fn <= fx + st.armijo_c * eta * slope) {
                accepted = true;
                break;
            }
            eta *= st.armijo_contraction;
        }
        res.iterations = it + 1;
        if (!accepted) break;
        const VectorXcd gn = riemannian_gradient(f.gradient(xn), xn);
        // transport the old gradient and direction to the new tangent space
        const VectorXcd g_old = riemannian_gradient(g, xn);
        const VectorXcd d_old = riemannian_gradient(d, xn);
        const double pr = std::max(0.0, real_inner(gn, gn - g_old) / g.squaredNorm());
        d = -gn + pr * d_old;
        x = xn;
        fx = fn;
        g = gn;
        if (fx < res.value) {
            res.value = fx;
            res.upsilon = x;
        }
        res.grad_norm = g.norm();
    }
    return res;
}

PsAuxResult ps_aux_socp(const BcdData& d, const std::vector<std::vector<cplx>>& a,
                        const std::vector<std::vector<cplx>>& t0, const conic::Settings& st)
{
    const int K = d.K;
    Model m;
    std::vector<CVecVar> t;
    for (int k = 0; k < K; ++k) t.push_back(m.add_cvec(K));
    const std::vector<int> rho = m.add_vars(K);
    const std::vector<int> z = m.add_vars(K);
    const std::vector<int> e = m.add_vars(K);
    const int obj = m.add_var();
    m.minimize(LinExpr::var(obj));

    std::vector<LinExpr> diff;
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < K; ++i) {
            const auto ti = t[k].at(i);
            diff.push_back(a[k][i].real() - ti.re);
            diff.push_back(a[k][i].imag() - ti.im);
        }
    m.add_soc(LinExpr::var(obj), diff);

    // |t|^2 >= 2 Re(conj(t0) t) - |t0|^2
    auto lin = [&](int k, int i) {
        const auto ti = t[k].at(i);
        const cplx c = t0[k][i];
        return 2.0 * c.real() * ti.re + 2.0 * c.imag() * ti.im - std::norm(c);
    };

    for (int k = 0; k < K; ++k) {
        const double gam = d.gamma[k];
        if (gam > 0.0) {
            m.add_ge(LinExpr::var(z[k]));
            // gam (sum_i |t_ki|^2 + I_k) + z_k <= (1 + gam) |t_kk|^2
            LinExpr rhs = ((1.0 + gam) / gam) * lin(k, k) - (1.0 / gam) * LinExpr::var(z[k]) - d.i_hat[k];
            std::vector<LinExpr> v;
            for (int i = 0; i < K; ++i) {
                v.push_back(t[k].at(i).re);
                v.push_back(t[k].at(i).im);
            }
            m.add_rotated_soc(rhs, 1.0, v);
            m.add_rotated_soc(LinExpr::var(z[k]), LinExpr::var(rho[k]), {std::sqrt(gam * d.sigma2_c[k])});
        } else {
            m.add_eq(LinExpr::var(z[k]));
        }
        if (d.q[k] > 0.0) {
            LinExpr s = d.i_tilde[k];
            for (int i = 0; i < K; ++i) s += lin(k, i);
            m.add_le(LinExpr::var(e[k]), s);
            m.add_rotated_soc(LinExpr::var(e[k]), 1.0 - LinExpr::var(rho[k]), {std::sqrt(d.q[k])});
        } else {
            m.add_eq(LinExpr::var(e[k]));
        }
        m.add_ge(LinExpr::var(rho[k]));
        m.add_ge(1.0 - LinExpr::var(rho[k]));
    }

    const conic::ModelResult r = m.solve(st);
    if (!conic::near_optimal(r.raw))
        throw SubproblemInfeasible(std::string("ps_aux_socp: ") + conic::to_string(r.status));
    PsAuxResult out;
    for (int k = 0; k < K; ++k) {
        out.rho.push_back(std::clamp(r.x(rho[k]), 1e-12, 1.0 - 1e-12));
        out.z.push_back(r.x(z[k]));
        const VectorXcd tk = t[k].value(r.x);
        out.t.emplace_back(tk.data(), tk.data() + tk.size());
    }
    out.objective = r.x(obj) * r.x(obj);
    return out;
}

std::vector<cplx> psi_lambda_projection(const std::vector<cplx>& values, double r2)
{
    double n2 = 0.0;
    for (const auto& v : values) n2 += std::norm(v);
    if (n2 <= r2) return values;
    const double s = std::sqrt(r2 / n2);
    std::vector<cplx> out;
    for (const auto& v : values) out.push_back(s * v);
    return out;
}

std::vector<cplx> psi_lambda_projection_bisection(const std::vector<cplx>& values, double r2, double tol)
{
    // x = a / (1 + nu), nu >= 0 chosen so that ||x||^2 = r2 when the constraint binds
    double n2 = 0.0;
    for (const auto& v : values) n2 += std::norm(v);
    if (n2 <= r2) return values;
    double lo = 0.0, hi = 1.0;
    while (n2 / ((1.0 + hi) * (1.0 + hi)) > r2) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > tol * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (n2 / ((1.0 + mid) * (1.0 + mid)) > r2)
            lo = mid;
        else
            hi = mid;
    }
    std::vector<cplx> out;
    for (const auto& v : values) out.push_back(v / (1.0 + hi));
    return out;
}

std::vector<std::vector<cplx>> couplings(const BcdData& d, const VectorXcd& ups, const std::vector<VectorXcd>& w)
{
    std::vector<std::vector<cplx>> a(d.K, std::vector<cplx>(d.K));
    for (int k = 0; k < d.K; ++k) {
        const VectorXcd h = d.h(k, ups);
        for (int i = 0; i < d.K; ++i) a[k][i] = h.dot(w[i]);
    }
    return a;
}

namespace {

struct Residuals {
    double sum_t = 0.0, sum_psi = 0.0, sum_lambda = 0.0, max = 0.0;
};

Residuals residuals(const BcdData& d, const VectorXcd& ups, const std::vector<VectorXcd>& w,
                    const AuxiliaryBlocks& aux)
{
    Residuals r;
    const auto a = couplings(d, ups, w);
    for (int k = 0; k < d.K; ++k)
        for (int i = 0; i < d.K; ++i) {
            const double e = std::norm(a[k][i] - aux.t[k][i]);
            r.sum_t += e;
            r.max = std::max(r.max, e);
        }
    if (!d.coupled) return r;
    for (int u = 0; u < d.U; ++u) {
        for (int k = 0; k < d.K; ++k) {
            const double e = std::norm(d.vd[u].dot(w[k]) - aux.psi[u][k]);
            r.sum_psi += e;
            r.max = std::max(r.max, e);
        }
        for (std::size_t j = 0; j < d.c[u].size() && d.N > 0; ++j) {
            const double e = std::norm(ups.dot(d.c[u][j]) - aux.lambda[u][j]);
            r.sum_lambda += e;
            r.max = std::max(r.max, e);
        }
    }
    return r;
}

void project_targets(const BcdData& d, const VectorXcd& ups, const std::vector<VectorXcd>& w,
                     AuxiliaryBlocks& aux)
{
    aux.psi.assign(d.U, {});
    aux.lambda.assign(d.U, {});
    if (!d.coupled) return;
    for (int u = 0; u < d.U; ++u) {
        std::vector<cplx> p, l;
        for (int k = 0; k < d.K; ++k) p.push_back(d.vd[u].dot(w[k]));
        for (const auto& c : d.c[u]) l.push_back(d.N > 0 ? ups.dot(c) : cplx(0.0));
        aux.psi[u] = psi_lambda_projection(p, d.psi_radius2[u]);
        aux.lambda[u] = psi_lambda_projection(l, d.lambda_radius2);
    }
}

double sum_power(const std::vector<VectorXcd>& w)
{
    double p = 0.0;
    for (const auto& v : w) p += v.squaredNorm();
    return p;
}

} // namespace

double mismatch(const BcdData& d, const VectorXcd& ups, const std::vector<VectorXcd>& w, const AuxiliaryBlocks& aux)
{
    return residuals(d, ups, w, aux).max;
}

double penalized_objective(const BcdData& d, const VectorXcd& ups, const std::vector<VectorXcd>& w,
                           const AuxiliaryBlocks& aux, double omega)
{
    const Residuals r = residuals(d, ups, w, aux);
    return d.tau * sum_power(w) + (r.sum_t + r.sum_psi + r.sum_lambda) / (2.0 * omega);
}

DesignSolution bcd_solve(const Instance& inst, const BcdSettings& st, const VectorXcd& init)
{
    DesignSolution sol;
    const double tb = inst.tau_bar();
    JtbpsOptions jo;
    jo.conic = st.conic;

    auto p3 = [&](const VectorXcd& ups, double* rank) -> std::optional<Design> {
        const EffectiveChannels eff = ups.size() > 0 ? effective(inst.ch, ups) : direct_only(inst.ch);
        try {
            return design_from(solve_jtbps_sdp(inst, eff, ups, jo), ups, st.rank_tol, rank);
        } catch (const NotRankOne&) {
            return std::nullopt;
        }
    };

    double rank0 = 0.0;
    const std::optional<Design> d0 = p3(init, &rank0);
    if (!d0) {
        sol.status = "infeasible";
        sol.design.upsilon = init;
        return sol;
    }
    sol.trace.push_back(tb * d0->power());
    if (inst.N() == 0) {
        sol.design = *d0;
        sol.feasible = true;
        sol.status = "ok";
        sol.objective = tb * d0->power();
        sol.rank_residual = rank0;
        return sol;
    }

    // normalization: alpha^2 is the largest received-power requirement, beta^2
    // the power that meets it over the strongest initial channel
    const EffectiveChannels eff0 = effective(inst.ch, init);
    double a2 = 0.0, b2 = 0.0;
    for (int k = 0; k < inst.K(); ++k) {
        const double need = std::max(inst.gamma(k) * (inst.cfg.sigma2_k(k) + inst.cfg.sigma2_c_k(k)),
                                     inst.q_rf(k));
        a2 = std::max(a2, need);
        b2 = std::max(b2, need / std::max(eff0.h[k].squaredNorm(), 1e-300));
    }
    if (a2 <= 0.0) a2 = 1.0;
    if (b2 <= 0.0) b2 = 1.0;
    const BcdData D = make_bcd_data(inst, std::sqrt(a2), std::sqrt(b2));

    VectorXcd ups = init;
    std::vector<VectorXcd> w;
    for (const auto& v : d0->w) w.push_back(v / D.beta);
    std::vector<double> rho = d0->rho;
    AuxiliaryBlocks aux;
    aux.t = couplings(D, ups, w);
    project_targets(D, ups, w, aux);

    double omega = st.omega0;
    bool converged = false;
    for (int o = 1; o <= st.outer_max; ++o) {
        sol.outer_iters = o;
        double prev = penalized_objective(D, ups, w, aux, omega);
        for (int it = 0; it < st.inner_max; ++it) {
            w = tb_closed_form(D, ups, aux, omega);
            ups = rb_rcg(rb_objective(D, w, aux), ups, st).upsilon;
            const PsAuxResult ps = ps_aux_socp(D, couplings(D, ups, w), aux.t, st.conic);
            aux.t = ps.t;
            rho = ps.rho;
            project_targets(D, ups, w, aux);
            ++sol.inner_iters;
            const double f = penalized_objective(D, ups, w, aux, omega);
            const double dec = prev - f;
            prev = f;
            if (dec <= st.eps1 * std::abs(f)) break;
        }
        const double xi = mismatch(D, ups, w, aux);
        sol.xi.push_back(xi);
        const double f_outer = tb * D.beta * D.beta * sum_power(w);
        const double change = std::abs(f_outer - sol.trace.back()) / std::max(f_outer, 1e-300);
        sol.trace.push_back(f_outer);
        if (xi <= st.eps2 && change <= st.eps1) {
            converged = true;
            break;
        }
        omega = std::max(st.c * omega, st.omega_floor);
    }

    // Repair: the targets only match the couplings up to xi, so the raw design
    // can miss the constraints by a hair. Candidates are the raw design scaled up
    // until feasible, the exact beamforming at the final reflect vector, and the
    // starting point.
    Design raw;
    raw.upsilon = ups;
    raw.rho = rho;
    for (const auto& v : w) raw.w.push_back(D.beta * v);

    std::optional<Design> best;
    double best_rank = 0.0;
    auto consider = [&](const Design& d, double rank) {
        if (!check_feasibility(inst, d).ok()) return;
        if (!best || d.power() < best->power()) {
            best = d;
            best_rank = rank;
        }
    };
    for (double s : {1.0, 1.0 + 1e-6, 1.0 + 1e-5, 1.0 + 1e-4, 1.0 + 1e-3}) {
        Design d = raw;
        for (auto& v : d.w) v *= std::sqrt(s);
        if (check_feasibility(inst, d).ok()) {
            consider(d, 0.0);
            break;
        }
    }
    double rank1 = 0.0;
    if (const auto d1 = p3(ups, &rank1)) consider(*d1, rank1);
    consider(*d0, rank0);

    if (!best) {
        sol.status = "infeasible";
        sol.design = raw;
        return sol;
    }
    sol.design = *best;
    sol.rank_residual = best_rank;
    sol.objective = tb * best->power();
    sol.feasible = true;
    sol.status = converged ? "ok" : "max_iter";
    return sol;
}

} // namespace irs
