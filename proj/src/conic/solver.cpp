#include "cones.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace irs::conic {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string to_string(Status s)
{
    switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::MaxIter: return "max_iter";
    case Status::NumericalFailure: return "numerical_failure";
    }
    return "unknown";
}

bool near_optimal(const Solution& s, double tol)
{
    if (s.status == Status::Optimal) return true;
    if (s.status != Status::MaxIter && s.status != Status::NumericalFailure) return false;
    if (s.x.size() == 0 || !s.x.allFinite()) return false;
    const double scale = std::max({1.0, std::abs(s.primal_objective), std::abs(s.dual_objective)});
    return s.primal_residual <= tol && s.dual_residual <= tol &&
           std::abs(s.primal_objective - s.dual_objective) <= tol * scale;
}

void Problem::validate() const
{
    const Eigen::Index n = c.size();
    const Eigen::Index m = cones.dim();
    if (G.rows() != m || h.size() != m)
        throw std::invalid_argument("conic: G/h rows do not match cone dimension");
    if (G.cols() != n && m > 0) throw std::invalid_argument("conic: G columns != num vars");
    if (A.rows() != b.size()) throw std::invalid_argument("conic: A/b size mismatch");
    if (A.rows() > 0 && A.cols() != n) throw std::invalid_argument("conic: A columns != num vars");
    if (cones.nonneg < 0) throw std::invalid_argument("conic: negative orthant size");
    for (int q : cones.soc)
        if (q < 1) throw std::invalid_argument("conic: SOC dimension < 1");
    for (int k : cones.hpsd)
        if (k < 1) throw std::invalid_argument("conic: PSD order < 1");
}

// Format: first line "n m p", then one record per line:
//   c j v | h i v | b i v | G i j v | A i j v
// followed by "cones l <nonneg> q <d1> ... s <n1> ..." on the last line.
void dump(const Problem& pr, std::ostream& out)
{
    out.precision(17);
    out << pr.c.size() << ' ' << pr.h.size() << ' ' << pr.b.size() << '\n';
    for (Eigen::Index j = 0; j < pr.c.size(); ++j)
        if (pr.c(j) != 0.0) out << "c " << j << ' ' << pr.c(j) << '\n';
    for (Eigen::Index i = 0; i < pr.h.size(); ++i)
        if (pr.h(i) != 0.0) out << "h " << i << ' ' << pr.h(i) << '\n';
    for (Eigen::Index i = 0; i < pr.b.size(); ++i)
        if (pr.b(i) != 0.0) out << "b " << i << ' ' << pr.b(i) << '\n';
    for (Eigen::Index j = 0; j < pr.G.cols(); ++j)
        for (Eigen::Index i = 0; i < pr.G.rows(); ++i)
            if (pr.G(i, j) != 0.0) out << "G " << i << ' ' << j << ' ' << pr.G(i, j) << '\n';
    for (Eigen::Index j = 0; j < pr.A.cols(); ++j)
        for (Eigen::Index i = 0; i < pr.A.rows(); ++i)
            if (pr.A(i, j) != 0.0) out << "A " << i << ' ' << j << ' ' << pr.A(i, j) << '\n';
    out << "cones l " << pr.cones.nonneg << " q";
    for (int q : pr.cones.soc) out << ' ' << q;
    out << " s";
    for (int k : pr.cones.hpsd) out << ' ' << k;
    out << '\n';
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Scalings that keep the cone structure: one factor per cone block for the rows
// of G, one per row of A, one per variable.
struct Equilibration {
    VectorXd col;   // x = col .* x~
    VectorXd grow;  // G~ = diag(grow) G diag(col)
    VectorXd arow;
    double cscale = 1.0; // c~ = col .* c / cscale
    double bscale = 1.0; // h~ = grow .* h / bscale, b~ = arow .* b / bscale
};

Equilibration equilibrate(const Problem& p)
{
    const Eigen::Index n = p.c.size();
    const Eigen::Index m = p.h.size();
    const Eigen::Index q = p.b.size();
    Equilibration e;
    e.col = VectorXd::Ones(n);
    e.grow = VectorXd::Ones(m);
    e.arow = VectorXd::Ones(q);

    // block boundaries of G rows
    std::vector<std::pair<Eigen::Index, Eigen::Index>> blocks;
    for (Eigen::Index i = 0; i < p.cones.nonneg; ++i) blocks.emplace_back(i, 1);
    Eigen::Index off = p.cones.nonneg;
    for (int d : p.cones.soc) {
        blocks.emplace_back(off, d);
        off += d;
    }
    for (int k : p.cones.hpsd) {
        blocks.emplace_back(off, static_cast<Eigen::Index>(k) * k);
        off += static_cast<Eigen::Index>(k) * k;
    }

    // Rows are scaled together with their right-hand side and columns with
    // their cost, so near-constant rows do not get blown up.
    MatrixXd G(m, n + 1);
    MatrixXd A(q, n + 1);
    VectorXd c = p.c;
    if (m > 0) G << p.G, p.h;
    if (q > 0) A << p.A, p.b;
    for (int it = 0; it < 10; ++it) {
        for (auto [b0, len] : blocks) {
            const double mx = G.middleRows(b0, len).cwiseAbs().maxCoeff();
            const double f = mx > 0.0 ? 1.0 / std::sqrt(mx) : 1.0;
            G.middleRows(b0, len) *= f;
            e.grow.segment(b0, len) *= f;
        }
        for (Eigen::Index i = 0; i < q; ++i) {
            const double mx = A.row(i).cwiseAbs().maxCoeff();
            const double f = mx > 0.0 ? 1.0 / std::sqrt(mx) : 1.0;
            A.row(i) *= f;
            e.arow(i) *= f;
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            double mx = std::abs(c(j));
            if (m > 0) mx = std::max(mx, G.col(j).cwiseAbs().maxCoeff());
            if (q > 0) mx = std::max(mx, A.col(j).cwiseAbs().maxCoeff());
            const double f = mx > 0.0 ? 1.0 / std::sqrt(mx) : 1.0;
            G.col(j) *= f;
            A.col(j) *= f;
            c(j) *= f;
            e.col(j) *= f;
        }
    }
    const double cn = (e.col.cwiseProduct(p.c)).cwiseAbs().maxCoeff();
    e.cscale = cn > 0.0 ? cn : 1.0;
    double bn = 0.0;
    if (m > 0) bn = (e.grow.cwiseProduct(p.h)).cwiseAbs().maxCoeff();
    if (q > 0) bn = std::max(bn, (e.arow.cwiseProduct(p.b)).cwiseAbs().maxCoeff());
    e.bscale = bn > 0.0 ? bn : 1.0;
    return e;
}

// KKT system in scaled variables: with zh = W dz and Gh = W^{-T} G,
//   [0 A' Gh'; A 0 0; Gh 0 -I] (dx, dy, zh) = (r1, r2, W^{-T} r3),
// factored once per iteration. Avoids forming Gh'Gh, whose conditioning is the
// square of this one near the boundary of the cone.
class Kkt {
public:
    Kkt(const Problem& p, const detail::Scaling& sc) : p_(p), sc_(sc)
    {
        const Eigen::Index n = p.c.size();
        const Eigen::Index q = p.b.size();
        const Eigen::Index m = p.h.size();
        MatrixXd Ghat = p.G;
        for (Eigen::Index j = 0; j < n; ++j) {
            VectorXd col = Ghat.col(j);
            detail::apply_Winvt(p.cones, sc, col);
            Ghat.col(j) = col;
        }
        const Eigen::Index d = n + q + m;
        MatrixXd K = MatrixXd::Zero(d, d);
        K.block(0, n, n, q) = p.A.transpose();
        K.block(n, 0, q, n) = p.A;
        K.block(0, n + q, n, m) = Ghat.transpose();
        K.block(n + q, 0, m, n) = Ghat;
        K.block(n + q, n + q, m, m).diagonal().setConstant(-1.0);
        const double reg = 1e-12;
        K.topLeftCorner(n, n).diagonal().array() += reg;
        K.block(n, n, q, q).diagonal().array() -= reg;
        lu_.compute(K);
    }

    // Solves [0 A' G'; A 0 0; G 0 -W'W] (dx, dy, dz) = (r1, r2, r3).
    void solve(const VectorXd& r1, const VectorXd& r2, const VectorXd& r3, VectorXd& dx,
               VectorXd& dy, VectorXd& dz) const
    {
        solve_once(r1, r2, r3, dx, dy, dz);
        // refinement against the unscaled system
        for (int k = 0; k < 4; ++k) {
            const VectorXd e1 = r1 - p_.A.transpose() * dy - p_.G.transpose() * dz;
            const VectorXd e2 = r2 - p_.A * dx;
            VectorXd wwz = dz;
            detail::apply_W(p_.cones, sc_, wwz);
            detail::apply_Wt(p_.cones, sc_, wwz);
            const VectorXd e3 = r3 - p_.G * dx + wwz;
            const double err = std::max({e1.lpNorm<Eigen::Infinity>(), e2.lpNorm<Eigen::Infinity>(),
                                         e3.lpNorm<Eigen::Infinity>()});
            const double ref = std::max({1.0, r1.lpNorm<Eigen::Infinity>(),
                                         r2.lpNorm<Eigen::Infinity>(), r3.lpNorm<Eigen::Infinity>()});
            if (err <= 1e-14 * ref) break;
            VectorXd cx, cy, cz;
            solve_once(e1, e2, e3, cx, cy, cz);
            dx += cx;
            dy += cy;
            dz += cz;
        }
    }

private:
    void solve_once(const VectorXd& r1, const VectorXd& r2, const VectorXd& r3, VectorXd& dx,
                    VectorXd& dy, VectorXd& dz) const
    {
        const Eigen::Index n = p_.c.size();
        const Eigen::Index q = p_.b.size();
        const Eigen::Index m = p_.h.size();
        VectorXd rhs(n + q + m);
        rhs.head(n) = r1;
        rhs.segment(n, q) = r2;
        VectorXd w3 = r3;
        detail::apply_Winvt(p_.cones, sc_, w3);
        rhs.tail(m) = w3;
        const VectorXd sol = lu_.solve(rhs);
        dx = sol.head(n);
        dy = sol.segment(n, q);
        dz = sol.tail(m);
        detail::apply_Winv(p_.cones, sc_, dz);
    }

    const Problem& p_;
    const detail::Scaling& sc_;
    Eigen::PartialPivLU<MatrixXd> lu_;
};

struct Direction {
    VectorXd dx, dy, dz, ds;
    double dtau = 0.0, dkap = 0.0;
};

Solution solve_scaled(const Problem& p, const Settings& st, const Equilibration& eq, const Problem& orig)
{
    const Eigen::Index n = p.c.size();
    const Eigen::Index m = p.h.size();
    const Cones& K = p.cones;
    const VectorXd e = detail::identity(K);
    const double deg = K.degree();

    // Stopping tests use residuals mapped back to the caller's units.
    const double resx0 = std::max(1.0, orig.c.norm());
    const double resy0 = std::max(1.0, orig.b.norm());
    const double resz0 = std::max(1.0, orig.h.norm());
    const VectorXd ux = eq.cscale * eq.col.cwiseInverse();
    const VectorXd uy = eq.bscale * eq.arow.cwiseInverse();
    const VectorXd uz = eq.bscale * eq.grow.cwiseInverse();
    // certificates are scale-free and use the scaled data
    const double cres0 = std::max(1.0, p.c.norm());
    const double cresy0 = std::max(1.0, p.b.norm());
    const double cresz0 = std::max(1.0, p.h.norm());

    Solution out;
    VectorXd x, y, z, s;
    double tau = 1.0, kap = 1.0;

    // Starting point from the W = I system.
    {
        detail::Scaling sc;
        sc.d = VectorXd::Ones(K.nonneg);
        for (int dsoc : K.soc) {
            detail::SocScaling ss;
            ss.w = VectorXd::Zero(dsoc);
            ss.w(0) = 1.0;
            sc.soc.push_back(ss);
        }
        for (int k : K.hpsd) {
            detail::PsdScaling ps;
            ps.R = Eigen::MatrixXcd::Identity(k, k);
            ps.Rinv = ps.R;
            ps.l = VectorXd::Ones(k);
            sc.psd.push_back(ps);
        }
        sc.lambda = e;
        Kkt kkt(p, sc);
        VectorXd dx, dy, dz;
        kkt.solve(VectorXd::Zero(n), p.b, p.h, dx, dy, dz);
        x = dx;
        s = -dz;
        kkt.solve(-p.c, VectorXd::Zero(p.b.size()), VectorXd::Zero(m), dx, dy, dz);
        y = dy;
        z = dz;
        const double ts = detail::max_violation(K, s);
        const double tz = detail::max_violation(K, z);
        if (m > 0) {
            if (ts >= -1e-8 * std::max(1.0, s.norm())) s += (1.0 + ts) * e;
            if (tz >= -1e-8 * std::max(1.0, z.norm())) z += (1.0 + tz) * e;
        }
    }

    // on failure the least bad iterate is returned, not the last one
    double best_merit = kInf;
    Solution best;
    int stall = 0;
    for (int it = 0; it <= st.max_iter; ++it) {
        const VectorXd rx = p.A.transpose() * y + p.G.transpose() * z + tau * p.c;
        const VectorXd ry = p.A * x - tau * p.b;
        const VectorXd rz = s + p.G * x - tau * p.h;
        const double cx = p.c.dot(x);
        const double by_hz = p.b.dot(y) + p.h.dot(z);
        const double rt = kap + cx + by_hz;
        const double sz = s.dot(z);
        const double mu = (sz + tau * kap) / (deg + 1.0);

        const double pres =
            std::max(ry.cwiseProduct(uy).norm() / resy0, rz.cwiseProduct(uz).norm() / resz0) / tau;
        const double dres = rx.cwiseProduct(ux).norm() / resx0 / tau;
        const double pcost = cx / tau;
        const double dcost = -by_hz / tau;
        const double gap = sz / (tau * tau);
        double relgap = kInf;
        if (pcost < 0.0)
            relgap = gap / -pcost;
        else if (dcost > 0.0)
            relgap = gap / dcost;

        out.iterations = it;
        out.x = x / tau;
        out.y = y / tau;
        out.z = z / tau;
        out.s = s / tau;
        out.primal_objective = pcost;
        out.dual_objective = dcost;
        out.primal_residual = pres;
        out.dual_residual = dres;
        out.gap = gap;

        if (st.verbose)
            std::fprintf(stderr, "%3d pcost %+.6e dcost %+.6e gap %.2e pres %.2e dres %.2e tau %.2e kap %.2e\n",
                         it, pcost, dcost, gap, pres, dres, tau, kap);
        if (pres <= st.tol && dres <= st.tol && (gap * eq.cscale * eq.bscale <= st.abs_gap || relgap <= st.tol)) {
            out.status = Status::Optimal;
            return out;
        }
        // Infeasibility certificates.
        if (by_hz < 0.0) {
            const double pinf = (p.A.transpose() * y + p.G.transpose() * z).norm() / cres0 / -by_hz;
            if (pinf <= st.tol) {
                out.status = Status::Infeasible;
                out.y = y / -by_hz;
                out.z = z / -by_hz;
                return out;
            }
        }
        if (cx < 0.0) {
            const double dinf =
                std::max((p.A * x).norm() / cresy0, (s + p.G * x).norm() / cresz0) / -cx;
            if (dinf <= st.tol) {
                out.status = Status::Unbounded;
                out.x = x / -cx;
                out.s = s / -cx;
                return out;
            }
        }
        if (it == st.max_iter) break;

        const double merit = std::max({pres, dres, std::min(relgap, gap)});
        if (merit < best_merit) best = out;
        if (merit < 0.999 * best_merit) {
            best_merit = merit;
            stall = 0;
        } else if (++stall > 15) {
            best.status = Status::NumericalFailure;
            return best;
        }

        detail::Scaling sc;
        if (!detail::compute_scaling(K, s, z, sc)) {
            best.status = Status::NumericalFailure;
            return best;
        }
        Kkt kkt(p, sc);
        const VectorXd& lam = sc.lambda;

        Direction d2;
        kkt.solve(-p.c, p.b, p.h, d2.dx, d2.dy, d2.dz);
        const double den2 = -kap / tau + p.c.dot(d2.dx) + p.b.dot(d2.dy) + p.h.dot(d2.dz);

        auto direction = [&](double eta, const VectorXd& rc, double rk) {
            Direction d;
            const VectorXd qv = detail::inverse_product(K, sc, rc);
            VectorXd wtq = qv;
            detail::apply_Wt(K, sc, wtq);
            VectorXd dx1, dy1, dz1;
            kkt.solve(-eta * rx, -eta * ry, -eta * rz - wtq, dx1, dy1, dz1);
            const double num =
                -eta * rt - rk / tau - p.c.dot(dx1) - p.b.dot(dy1) - p.h.dot(dz1);
            d.dtau = num / den2;
            d.dkap = (rk - kap * d.dtau) / tau;
            d.dx = dx1 + d.dtau * d2.dx;
            d.dy = dy1 + d.dtau * d2.dy;
            d.dz = dz1 + d.dtau * d2.dz;
            // ds = W'(q - W dz)
            VectorXd wdz = d.dz;
            detail::apply_W(K, sc, wdz);
            d.ds = qv - wdz;
            detail::apply_Wt(K, sc, d.ds);
            return d;
        };

        auto step_length = [&](const Direction& d, VectorXd& sds, VectorXd& wdz) {
            sds = d.ds;
            detail::apply_Winvt(K, sc, sds);
            wdz = d.dz;
            detail::apply_W(K, sc, wdz);
            double a = std::min(detail::max_step(K, sc, sds), detail::max_step(K, sc, wdz));
            if (d.dtau < 0.0) a = std::min(a, -tau / d.dtau);
            if (d.dkap < 0.0) a = std::min(a, -kap / d.dkap);
            return a;
        };

        const VectorXd lam2 = detail::jordan_product(K, lam, lam);
        Direction da = direction(1.0, -lam2, -tau * kap);
        VectorXd sds_a, wdz_a;
        const double alpha_a = std::min(1.0, step_length(da, sds_a, wdz_a));
        const double sigma = std::pow(1.0 - alpha_a, 3.0);

        const VectorXd rc = -lam2 + sigma * mu * e - detail::jordan_product(K, sds_a, wdz_a);
        const double rk = -tau * kap + sigma * mu - da.dtau * da.dkap;
        Direction dc = direction(1.0 - sigma, rc, rk);
        VectorXd sds, wdz;
        const double amax = step_length(dc, sds, wdz);
        const double alpha = std::min(1.0, st.step_fraction * amax);
        if (!(alpha > 0.0) || !std::isfinite(alpha)) {
            best.status = Status::NumericalFailure;
            return best;
        }
        x += alpha * dc.dx;
        y += alpha * dc.dy;
        z += alpha * dc.dz;
        s += alpha * dc.ds;
        tau += alpha * dc.dtau;
        kap += alpha * dc.dkap;
    }
    best.status = Status::MaxIter;
    return best;
}

} // namespace

Solution solve(const Problem& problem, const Settings& settings)
{
    problem.validate();
    const Equilibration eq = equilibrate(problem);
    Problem sp;
    sp.cones = problem.cones;
    sp.c = eq.col.cwiseProduct(problem.c) / eq.cscale;
    if (problem.h.size() > 0)
        sp.G = eq.grow.asDiagonal() * problem.G * eq.col.asDiagonal();
    else
        sp.G.resize(0, problem.c.size());
    sp.h = eq.grow.cwiseProduct(problem.h) / eq.bscale;
    if (problem.b.size() > 0)
        sp.A = eq.arow.asDiagonal() * problem.A * eq.col.asDiagonal();
    else
        sp.A.resize(0, problem.c.size());
    sp.b = eq.arow.cwiseProduct(problem.b) / eq.bscale;

    Solution r = solve_scaled(sp, settings, eq, problem);

    const bool cert_p = r.status == Status::Infeasible;
    const bool cert_d = r.status == Status::Unbounded;
    const double xs = cert_d ? 1.0 : eq.bscale;
    const double ys = cert_p ? 1.0 : eq.cscale;
    r.x = xs * eq.col.cwiseProduct(r.x);
    r.s = xs * r.s.cwiseQuotient(eq.grow);
    r.z = ys * eq.grow.cwiseProduct(r.z);
    r.y = ys * eq.arow.cwiseProduct(r.y);
    r.primal_objective *= eq.cscale * eq.bscale;
    r.dual_objective *= eq.cscale * eq.bscale;
    r.gap *= eq.cscale * eq.bscale;
    return r;
}

} // namespace irs::conic
