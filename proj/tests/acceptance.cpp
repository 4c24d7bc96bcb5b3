// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Desk scale (M = L = 4, N = 8, K = U = 2), 20 seeded trials.

#include "irs/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#ifndef IRS_CONFIG_DIR
#define IRS_CONFIG_DIR "configs"
#endif

using namespace irs;
using Eigen::VectorXcd;

namespace {

constexpr int kTrials = 20;
constexpr std::uint64_t kSeed = 1;

ConfigFile cfg_file(const std::string& name) { return ConfigFile::load(std::string(IRS_CONFIG_DIR) + "/" + name); }

struct Line {
    int id;
    bool pass;
    std::string detail;
};
std::vector<Line> g_lines;

void report(int id, bool pass, const std::string& detail)
{
    g_lines.push_back({id, pass, detail});
    std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) { char b[128]; std::snprintf(b, sizeof b, f, a); return b; }

// solutions marked feasible and their independent re-check, pooled over every run
struct Pool {
    int feasible = 0, recheck_fail = 0;
    double worst_rank = 0.0;
    int rank_fail = 0, ranked = 0;
    void add(const Instance& inst, const DesignSolution& s)
    {
        if (!s.feasible) return;
        ++feasible;
        if (!check_feasibility(inst, s.design).ok(1e-5)) ++recheck_fail;
        ++ranked;
        worst_rank = std::max(worst_rank, s.rank_residual);
        if (s.rank_residual > 1e-4) ++rank_fail;
    }
} g_pool;

VectorXcd randn(int n, std::mt19937_64& rng, double sd = 1.0)
{
    std::normal_distribution<double> g(0.0, sd);
    VectorXcd v(n);
    for (int i = 0; i < n; ++i) v(i) = {g(rng), g(rng)};
    return v;
}

// ---------------------------------------------------------------- 1 - 4, 10
struct DeskRuns {
    std::vector<TrialInput> in;
    std::vector<DesignSolution> am, bcd;
};

DeskRuns desk_runs(const ScenarioConfig& cfg, const SolverSuite& suite)
{
    DeskRuns r;
    for (int t = 0; t < kTrials; ++t) {
        r.in.push_back(make_trial(cfg, kSeed, t));
        r.am.push_back(am_solve(r.in[t].est, suite.am, r.in[t].init));
        r.bcd.push_back(bcd_solve(r.in[t].est, suite.bcd, r.in[t].init));
        g_pool.add(r.in[t].est, r.am[t]);
        g_pool.add(r.in[t].est, r.bcd[t]);
    }
    return r;
}

void criterion1(const DeskRuns& r)
{
    int n = 0, bad = 0;
    double worst = -INFINITY;
    for (const auto& s : r.am) {
        if (!s.feasible) continue;
        ++n;
        bool ok = true;
        for (std::size_t i = 1; i < s.trace.size(); ++i) {
            worst = std::max(worst, s.trace[i] - s.trace[i - 1]);
            if (s.trace[i] > s.trace[i - 1] + 1e-7) ok = false;
        }
        if (!ok) ++bad;
    }
    std::ostringstream d;
    d << "AM trace non-increasing on " << n - bad << "/" << n << " feasible trials, largest step " << worst << " J";
    report(1, n > 0 && bad == 0, d.str());
}

void criterion2(const DeskRuns& r)
{
    int both = 0, am_ok = 0, bcd_ok = 0, fewer = 0, n = 0;
    double am_it = 0, bcd_it = 0;
    for (int t = 0; t < kTrials; ++t) {
        const auto& a = r.am[t];
        const auto& b = r.bcd[t];
        if (!a.feasible || !b.feasible) continue;
        ++n;
        const bool ca = a.status == "ok" && a.outer_iters <= 10;
        const bool cb = b.status == "ok" && b.outer_iters <= 10;
        am_ok += ca;
        bcd_ok += cb;
        both += ca && cb;
        fewer += b.outer_iters < a.outer_iters;
        am_it += a.outer_iters;
        bcd_it += b.outer_iters;
    }
    std::ostringstream d;
    d << "converged in <= 10 outer: AM " << am_ok << "/" << n << ", BCD " << bcd_ok << "/" << n
      << "; BCD fewer than AM in " << fewer << "/" << n << " (mean outer AM " << am_it / std::max(n, 1)
      << ", BCD " << bcd_it / std::max(n, 1) << ")";
    report(2, n > 0 && both == n && fewer >= 0.7 * n, d.str());
}

void criterion10(const DeskRuns& r)
{
    const std::vector<int> F = {4, 8, 16, 32, 64};
    std::vector<double> mean(F.size(), 0.0);
    int n = 0;
    for (int t = 0; t < kTrials; ++t) {
        const auto& s = r.bcd[t];
        if (!s.feasible) continue;
        ++n;
        for (std::size_t i = 0; i < F.size(); ++i) mean[i] += margin_loss(r.in[t].est, s.design, F[i]);
    }
    for (double& m : mean) m /= std::max(n, 1);
    bool shrink = true;
    for (std::size_t i = 1; i < F.size(); ++i) shrink = shrink && mean[i] < mean[i - 1];
    // moderate: positive, and F = 4 keeps the worst constraint within half its requirement
    const bool moderate = mean[0] > 0.0 && mean[0] <= 0.5;
    std::ostringstream d;
    d << "mean margin loss over " << n << " trials, F=4..64:";
    for (double m : mean) d << ' ' << m;
    report(10, n > 0 && shrink && moderate, d.str());
}

// ---------------------------------------------------------------- 5
void criterion5(const ScenarioConfig& cfg)
{
    int fd_ok = 0;
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        const TrialInput in = make_trial(cfg, kSeed + 100, t);
        const Instance& inst = in.est;
        const EffectiveChannels e = effective(inst.ch, in.init);
        const double a2 = inst.q_rf(0);
        const BcdData d = make_bcd_data(inst, std::sqrt(a2), std::sqrt(a2 / e.h[0].squaredNorm()));
        auto rng = make_rng(kSeed + 100, static_cast<std::uint64_t>(t), 7);
        AuxiliaryBlocks aux;
        aux.t.assign(d.K, std::vector<cplx>(d.K));
        aux.lambda.assign(d.U, std::vector<cplx>(inst.f.f.size()));
        aux.psi.assign(d.U, std::vector<cplx>(d.K));
        std::normal_distribution<double> g;
        for (auto& row : aux.t)
            for (auto& x : row) x = {g(rng), g(rng)};
        for (auto& row : aux.lambda)
            for (auto& x : row) x = {1e-2 * g(rng), 1e-2 * g(rng)};
        const std::vector<VectorXcd> w = {randn(d.M, rng), randn(d.M, rng)};
        const RbObjective f = rb_objective(d, w, aux);
        const VectorXcd x = random_phases(d.N, rng);
        const VectorXcd rg = riemannian_gradient(f.gradient(x), x);
        // move along the gradient on the circle: x_n exp(i s phi_n), phi = Im(conj(x) rg)
        Eigen::VectorXd phi(d.N);
        for (int n = 0; n < d.N; ++n) phi(n) = (std::conj(x(n)) * rg(n)).imag();
        auto curve = [&](double s) {
            VectorXcd y = x;
            for (int n = 0; n < d.N; ++n) y(n) *= std::polar(1.0, s * phi(n));
            return y;
        };
        const double h = 1e-6 / std::max(1.0, phi.cwiseAbs().maxCoeff());
        const double fd = (f.value(curve(h)) - f.value(curve(-h))) / (2 * h);
        const double an = rg.squaredNorm();
        const double rel = std::abs(fd - an) / an;
        worst = std::max(worst, rel);
        fd_ok += rel <= 1e-5;
    }

    int rec = 0;
    const int restarts = 50;
    for (int r = 0; r < restarts; ++r) {
        auto rng = make_rng(kSeed + 200, static_cast<std::uint64_t>(r), 0);
        const int N = 8;
        const VectorXcd star = random_phases(N, rng);
        RbObjective f;
        for (int i = 0; i < 2 * N; ++i) {
            f.a.push_back(randn(N, rng));
            f.b0.push_back(-star.dot(f.a.back()));
        }
        BcdSettings st;
        st.rcg_tol = 1e-12;
        st.rcg_max = 5000;
        rec += rb_rcg(f, random_phases(N, rng), st).value <= 1e-10;
    }
    std::ostringstream d;
    d << "gradient vs finite differences " << fd_ok << "/50 (worst rel " << worst << "); planted recovery " << rec
      << "/" << restarts;
    report(5, fd_ok == 50 && rec >= 0.9 * restarts, d.str());
}

// ---------------------------------------------------------------- 6
double rho_grid(const Instance& inst, const EffectiveChannels& e)
{
    const double g = e.h[0].squaredNorm(), ri = risi(inst, e, 0);
    const double G = inst.gamma(0), Q = inst.q_rf(0);
    const double s2 = inst.cfg.sigma2_k(0), sc2 = inst.cfg.sigma2_c_k(0);
    auto p = [&](double r) { return std::max(G * (ri + s2 + sc2 / r), Q / (1.0 - r) - ri) / g; };
    double best = INFINITY;
    const int n = 200000;
    for (int i = 1; i < n; ++i) best = std::min(best, p(static_cast<double>(i) / n));
    return best;
}

void criterion6(const ScenarioConfig& desk)
{
    // (a) one SR, one PR, slack interference cap
    ScenarioConfig c = desk;
    c.K = 1;
    c.U = 1;
    double worst_a = 0.0;
    int na = 0;
    bool ok_a = true;
    for (int t = 0; t < 10; ++t) {
        const TrialInput in = make_trial(c, kSeed, t);
        const EffectiveChannels e = effective(in.est.ch, in.init);
        const JtbpsResult r = solve_jtbps_sdp(in.est, e, in.init);
        if (!r.feasible) {
            ok_a = false;
            continue;
        }
        ++na;
        const double rel = std::abs(r.power - rho_grid(in.est, e)) / r.power;
        worst_a = std::max(worst_a, rel);
    }
    ok_a = ok_a && na > 0 && worst_a <= 5e-3;

    // (b) single-element reflect step
    double worst_b = 0.0;
    for (int t = 0; t < 20; ++t) {
        auto rng = make_rng(kSeed + 300, static_cast<std::uint64_t>(t), 0);
        std::normal_distribution<double> g;
        RbObjective f;
        for (int i = 0; i < 6; ++i) {
            f.a.push_back(randn(1, rng));
            f.b0.push_back({g(rng), g(rng)});
        }
        double best = INFINITY;
        for (int i = 0; i < 100000; ++i) {
            VectorXcd x(1);
            x(0) = std::polar(1.0, 2 * std::numbers::pi * i / 100000.0);
            best = std::min(best, f.value(x));
        }
        const double v = rb_rcg(f, random_phases(1, rng)).value;
        worst_b = std::max(worst_b, (v - best) / std::max(best, 1e-12));
    }
    const bool ok_b = worst_b <= 1e-3;

    // (c) norm-ball projection
    double worst_c = 0.0;
    for (int t = 0; t < 100; ++t) {
        auto rng = make_rng(kSeed + 400, static_cast<std::uint64_t>(t), 0);
        std::uniform_real_distribution<double> u(0.01, 4.0);
        std::normal_distribution<double> g;
        std::vector<cplx> v(6);
        for (auto& x : v) x = {g(rng), g(rng)};
        const double r2 = u(rng);
        const auto a = psi_lambda_projection(v, r2);
        const auto b = psi_lambda_projection_bisection(v, r2);
        for (std::size_t i = 0; i < v.size(); ++i) worst_c = std::max(worst_c, std::abs(a[i] - b[i]));
    }
    const bool ok_c = worst_c <= 1e-8;
    std::ostringstream d;
    d << "(a) rho grid worst rel " << worst_a << " over " << na << "; (b) phase search worst rel " << worst_b
      << "; (c) projection worst abs " << worst_c;
    report(6, ok_a && ok_b && ok_c, d.str());
}

// ---------------------------------------------------------------- 7
struct SweepCheck {
    std::vector<SweepRow> agg;
    double mean(double v, const std::string& alg) const
    {
        for (const auto& r : agg)
            if (r.value == v && r.algorithm == alg) return r.objective_dBm;
        return NAN;
    }
    double feas(double v, const std::string& alg) const
    {
        for (const auto& r : agg)
            if (r.value == v && r.algorithm == alg) return r.feasible;
        return 0.0;
    }
};

SweepCheck sweep(const std::string& spec_file, const ScenarioConfig& cfg, const SolverSuite& suite)
{
    SweepSpec s = SweepSpec::from_config(cfg_file("sweeps/" + spec_file));
    s.trials = kTrials;
    s.seed = kSeed;
    const auto rows = run_sweep(s, cfg, suite, Execution::Parallel);
    for (const auto& r : rows) {
        if (r.trial < 0) continue;
        if (r.status == "recheck_failed") {
            ++g_pool.feasible;
            ++g_pool.recheck_fail;
        }
        if (r.feasible > 0.0) {
            ++g_pool.feasible;
            ++g_pool.ranked;
            g_pool.worst_rank = std::max(g_pool.worst_rank, r.rank_residual);
            if (r.rank_residual > 1e-4) ++g_pool.rank_fail;
        }
    }
    SweepCheck c;
    c.agg = aggregates(rows);
    return c;
}

void criterion7(const ScenarioConfig& desk, const ScenarioConfig& coupled, const SolverSuite& suite)
{
    std::ostringstream d;
    bool pass = true;
    auto trend = [&](const std::string& file, const ScenarioConfig& cfg, int sign, const std::string& label) {
        const SweepCheck c = sweep(file, cfg, suite);
        std::vector<double> vals;
        for (const auto& r : c.agg)
            if (std::find(vals.begin(), vals.end(), r.value) == vals.end()) vals.push_back(r.value);
        bool mono = true, order = true, full = true;
        d << label << " [";
        for (std::size_t i = 0; i < vals.size(); ++i) {
            const double b = c.mean(vals[i], "BCD");
            d << (i ? " " : "") << fmt("%.2f", b);
            if (i > 0) {
                const double prev = c.mean(vals[i - 1], "BCD");
                mono = mono && (sign > 0 ? b > prev : b < prev);
            }
            const double nr = c.mean(vals[i], "NoIRS"), rr = c.mean(vals[i], "RandomRB");
            order = order && nr >= rr && rr >= b;
            full = full && c.feas(vals[i], "BCD") == 1.0;
            if (file == "pr_distance.cfg") order = order && c.mean(vals[i], "Isolated") <= b;
        }
        d << "] " << (mono ? "monotone" : "NOT monotone") << (order ? "" : ", ordering violated")
          << (full ? "" : ", infeasible trials") << "; ";
        pass = pass && mono && order;
    };
    trend("gamma.cfg", desk, +1, "gamma");
    trend("q_dc.cfg", desk, +1, "Q");
    trend("M.cfg", desk, -1, "M");
    trend("N.cfg", desk, -1, "N");
    // values listed far to near, so the objective must rise
    trend("pr_distance.cfg", coupled, +1, "PR distance (coupled)");
    report(7, pass, d.str());
}

// ---------------------------------------------------------------- 8, 9
void criterion8(const ScenarioConfig& cfg, const SolverSuite& suite)
{
    int solved = 0, within = 0, violates = 0, nominal = 0;
    double worst = -INFINITY;
    for (int t = 0; t < kTrials; ++t) {
        const ValidationRow r = validate_trial(cfg, suite, kSeed, t, 10000);
        const TrialInput in = make_trial(cfg, kSeed, t);
        g_pool.add(in.est, r.robust);
        g_pool.add(in.est, r.nominal);
        if (r.robust.feasible) {
            ++solved;
            within += r.robust_within;
            worst = std::max(worst, r.robust_outage.worst_excess(cfg.outage));
        }
        if (r.nominal.feasible) {
            ++nominal;
            violates += r.nominal_violates;
        }
    }
    std::ostringstream d;
    d << "robust within spec " << within << "/" << solved << " (worst excess " << worst << "); nominal violates "
      << violates << "/" << nominal;
    report(8, solved > 0 && within == solved && violates >= 0.5 * nominal, d.str());
}

void criterion9(const ScenarioConfig& base, const SolverSuite& suite)
{
    std::ostringstream d;
    bool pass = true;
    for (double e2 : {0.0, 1e-4, 1e-3, 1e-2}) {
        const ScenarioConfig cfg = apply_axis(base, "eps2", e2);
        int n = 0, bad = 0, unsolved = 0;
        double worst = 0.0, mr = 0.0, mn = 0.0;
        for (int t = 0; t < kTrials; ++t) {
            const TrialInput in = make_trial(cfg, kSeed, t);
            std::mt19937_64 rng = make_rng(kSeed, static_cast<std::uint64_t>(t), 3);
            const DesignSolution rob = robust_solve(in.est, in.csi, suite.robust, in.init, rng);
            AmSettings as = suite.am;
            as.fixed_rho = fixed_ps_ratios(in.est);
            const DesignSolution nom = am_solve(in.est, as, in.init);
            if (!nom.feasible) continue;
            if (!rob.feasible) {
                ++unsolved; // no robust design: its cost is unbounded
                continue;
            }
            g_pool.add(in.est, rob);
            g_pool.add(in.est, nom);
            ++n;
            const double r = rob.power() / nom.power() - 1.0;
            mr += watt_to_dbm(rob.power());
            mn += watt_to_dbm(nom.power());
            if (e2 == 0.0) {
                worst = std::max(worst, std::abs(r));
                bad += std::abs(r) > 0.01;
            } else {
                worst = std::min(worst, r);
                bad += r < 0.0;
            }
        }
        d << "eps2=" << e2 << ": " << n - bad << "/" << n << " ok";
        if (unsolved) d << " (" << unsolved << " robust infeasible)";
        if (n) d << ", mean " << fmt("%.3f", mr / n) << " vs " << fmt("%.3f", mn / n) << " dBm";
        d << (e2 == 0.0 ? ", worst |rel| " : ", worst rel ") << worst << "; ";
        pass = pass && n > 0 && bad == 0;
    }
    report(9, pass, d.str());
}

} // namespace

int main()
{
    const auto t0 = std::chrono::steady_clock::now();
    const ConfigFile desk_f = cfg_file("desk.cfg");
    const ScenarioConfig desk = scenario_from_config(desk_f);
    const ScenarioConfig coupled = scenario_from_config(cfg_file("coupled.cfg"));
    const ScenarioConfig robust = scenario_from_config(cfg_file("robust.cfg"));
    const SolverSuite suite = SolverSuite::from_config(desk_f);

    criterion5(desk);
    criterion6(desk);
    criterion8(robust, suite);
    criterion9(desk, suite);
    criterion7(desk, coupled, suite);
    const DeskRuns runs = desk_runs(desk, suite);
    criterion1(runs);
    criterion2(runs);
    {
        std::ostringstream d;
        d << "worst rank residual " << g_pool.worst_rank << " over " << g_pool.ranked << " solutions, "
          << g_pool.rank_fail << " above 1e-4";
        report(3, g_pool.rank_fail == 0, d.str());
    }
    {
        std::ostringstream d;
        d << g_pool.feasible - g_pool.recheck_fail << "/" << g_pool.feasible
          << " feasible-marked solutions re-pass the constraint check";
        report(4, g_pool.recheck_fail == 0, d.str());
    }
    criterion10(runs);

    std::sort(g_lines.begin(), g_lines.end(), [](const Line& a, const Line& b) { return a.id < b.id; });
    int failed = 0;
    std::printf("\nsummary\n");
    for (const auto& l : g_lines) {
        std::printf("criterion %2d: %s\n", l.id, l.pass ? "PASS" : "FAIL");
        failed += !l.pass;
    }
    std::printf("%d/%zu passed, %.0f s\n", static_cast<int>(g_lines.size()) - failed, g_lines.size(),
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    return failed ? 1 : 0;
}
