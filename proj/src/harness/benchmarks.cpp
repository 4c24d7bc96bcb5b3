#include "irs/harness.hpp"

#include <chrono>
#include <stdexcept>

namespace irs {

using Eigen::VectorXcd;

std::string AlgorithmSpec::name() const
{
    switch (alg) {
    case Algorithm::AM: return "AM";
    case Algorithm::BCD: return "BCD";
    case Algorithm::Robust: return "Robust";
    case Algorithm::RandomRB: return "RandomRB";
    case Algorithm::NoIRS: return "NoIRS";
    case Algorithm::Isolated: return "Isolated";
    case Algorithm::Quantized: return levels > 0 ? "Quantized-" + std::to_string(levels) : "Quantized";
    }
    return "?";
}

AlgorithmSpec AlgorithmSpec::parse(const std::string& s)
{
    if (s == "AM") return {Algorithm::AM};
    if (s == "BCD") return {Algorithm::BCD};
    if (s == "Robust") return {Algorithm::Robust};
    if (s == "RandomRB") return {Algorithm::RandomRB};
    if (s == "NoIRS") return {Algorithm::NoIRS};
    if (s == "Isolated") return {Algorithm::Isolated};
    if (s == "Quantized") return {Algorithm::Quantized, 0};
    if (s.rfind("Quantized-", 0) == 0) {
        const int F = std::stoi(s.substr(10));
        if (F < 2) throw std::invalid_argument("algorithm: Quantized needs F >= 2");
        return {Algorithm::Quantized, F};
    }
    throw std::invalid_argument("unknown algorithm '" + s + "'");
}

SolverSuite SolverSuite::from_config(const ConfigFile& f)
{
    SolverSuite s;
    s.am = AmSettings::from_config(f);
    s.bcd = BcdSettings::from_config(f);
    s.robust = RobustSettings::from_config(f);
    if (auto v = f.get_int("randomrb_draws")) s.random_draws = *v;
    if (auto v = f.get_bool("linear_phase_distance")) s.phase_distance = *v ? PhaseDistance::Linear : PhaseDistance::Circular;
    if (s.random_draws < 1) throw std::invalid_argument("randomrb_draws must be >= 1");
    return s;
}

namespace {

// (P3) alone at a fixed reflect vector (empty: no IRS path).
DesignSolution p3_only(const Instance& inst, const VectorXcd& ups, const SolverSuite& suite)
{
    DesignSolution sol;
    const EffectiveChannels eff = ups.size() > 0 ? effective(inst.ch, ups) : direct_only(inst.ch);
    JtbpsOptions opt;
    opt.conic = suite.am.conic;
    const JtbpsResult r = solve_jtbps_sdp(inst, eff, ups, opt);
    double rank = 0.0;
    const auto d = design_from(r, ups, suite.am.rank_tol, &rank);
    sol.outer_iters = 1;
    sol.inner_iters = 1;
    if (!d) {
        sol.status = "infeasible";
        sol.design.upsilon = ups;
        return sol;
    }
    sol.design = *d;
    sol.feasible = true;
    sol.status = "ok";
    sol.rank_residual = rank;
    sol.objective = inst.tau_bar() * d->power();
    sol.trace.push_back(sol.objective);
    return sol;
}

} // namespace

TrialOutcome run_benchmark(const AlgorithmSpec& spec, const TrialInput& in, const SolverSuite& suite, int levels)
{
    TrialOutcome out;
    Instance inst = in.est;
    if (spec.alg == Algorithm::Isolated) inst.isolated = true;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        switch (spec.alg) {
        case Algorithm::AM:
            out.sol = am_solve(inst, suite.am, in.init);
            break;
        case Algorithm::BCD:
        case Algorithm::Isolated:
            out.sol = bcd_solve(inst, suite.bcd, in.init);
            break;
        case Algorithm::Robust: {
            std::mt19937_64 rng = make_rng(in.seed, static_cast<std::uint64_t>(in.trial), 3);
            out.sol = robust_solve(inst, in.csi, suite.robust, in.init, rng);
            break;
        }
        case Algorithm::NoIRS:
            out.sol = p3_only(inst, VectorXcd(), suite);
            break;
        case Algorithm::RandomRB: {
            std::mt19937_64 rng = make_rng(in.seed, static_cast<std::uint64_t>(in.trial), 4);
            bool have = false;
            for (int d = 0; d < suite.random_draws; ++d) {
                const VectorXcd ups = d == 0 ? in.init : random_phases(inst.N(), rng);
                DesignSolution s = p3_only(inst, ups, suite);
                if (!have || (s.feasible && (!out.sol.feasible || s.objective < out.sol.objective))) {
                    out.sol = s;
                    have = true;
                }
            }
            out.sol.inner_iters = suite.random_draws;
            break;
        }
        case Algorithm::Quantized: {
            const int F = spec.levels > 0 ? spec.levels : levels;
            if (F < 2) throw std::invalid_argument("Quantized needs F >= 2");
            const DesignSolution cont = bcd_solve(inst, suite.bcd, in.init);
            if (!cont.feasible) {
                out.sol = cont;
                break;
            }
            out.sol = p3_only(inst, quantize_phases(cont.design.upsilon, F, suite.phase_distance), suite);
            out.sol.outer_iters = cont.outer_iters;
            out.sol.inner_iters = cont.inner_iters + 1;
            break;
        }
        }
        out.status = out.sol.status;
    } catch (const std::exception& e) {
        out.sol = DesignSolution();
        out.sol.status = std::string("error: ") + e.what();
        out.status = out.sol.status;
    }
    out.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (out.sol.feasible) {
        try {
            out.recheck_ok = check_feasibility(inst, out.sol.design).ok(1e-5);
        } catch (const std::exception&) {
            out.recheck_ok = false;
        }
    }
    return out;
}

} // namespace irs
