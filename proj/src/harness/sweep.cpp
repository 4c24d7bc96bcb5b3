#include "irs/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace irs {

void SweepSpec::validate() const
{
    if (values.empty()) throw std::invalid_argument("sweep: no values");
    if (algorithms.empty()) throw std::invalid_argument("sweep: no algorithms");
    if (trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");
    apply_axis(ScenarioConfig{}, axis, values.front()); // rejects unknown axes
}

SweepSpec SweepSpec::from_config(const ConfigFile& f)
{
    SweepSpec s;
    if (auto v = f.get_string("sweep_axis")) s.axis = *v;
    if (auto v = f.get_list("sweep_values")) s.values = *v;
    if (auto v = f.get_string("sweep_algorithms")) {
        std::stringstream ss(*v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto b = item.find_first_not_of(" \t");
            const auto e = item.find_last_not_of(" \t");
            if (b == std::string::npos) continue;
            s.algorithms.push_back(AlgorithmSpec::parse(item.substr(b, e - b + 1)));
        }
    }
    if (auto v = f.get_int("trials")) s.trials = *v;
    if (auto v = f.get_int("seed")) s.seed = static_cast<std::uint64_t>(*v);
    return s;
}

ScenarioConfig apply_axis(ScenarioConfig cfg, const std::string& axis, double v)
{
    if (axis == "gamma_dB") {
        cfg.gamma = {db_to_linear(v)};
        cfg.r_min.clear();
    } else if (axis == "q_dc_dBm") {
        cfg.q_dc = {dbm_to_watt(v)};
    } else if (axis == "M") {
        cfg.M = static_cast<int>(std::lround(v));
    } else if (axis == "N") {
        cfg.N = static_cast<int>(std::lround(v));
    } else if (axis == "T") {
        cfg.T = static_cast<int>(std::lround(v));
    } else if (axis == "pr_distance") {
        // PR cluster centre moved along y, keeping its x offset
        cfg.geo.pr_center.y = cfg.geo.st.y - v;
    } else if (axis == "eps2") {
        cfg.csi.eps2_hd = cfg.csi.eps2_Hk = cfg.csi.eps2_vd = cfg.csi.eps2_Vu = cfg.csi.eps2_Gu = v;
    } else if (axis != "F") {
        throw std::invalid_argument("unknown sweep axis '" + axis + "'");
    }
    return cfg;
}

namespace {

std::string clean(std::string s)
{
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

SweepRow one_job(const SweepSpec& spec, const ScenarioConfig& base, const SolverSuite& suite, std::size_t vi,
                 std::size_t ai, int t)
{
    SweepRow row;
    row.axis = spec.axis;
    row.value = spec.values[vi];
    row.algorithm = spec.algorithms[ai].name();
    row.trial = t;
    row.seed = spec.seed;
    row.objective_dBm = std::numeric_limits<double>::quiet_NaN();
    row.energy_J = std::numeric_limits<double>::quiet_NaN();
    try {
        const ScenarioConfig cfg = apply_axis(base, spec.axis, row.value);
        const TrialInput in = make_trial(cfg, spec.seed, t);
        const int F = spec.axis == "F" ? static_cast<int>(std::lround(row.value)) : 0;
        const TrialOutcome o = run_benchmark(spec.algorithms[ai], in, suite, F);
        const bool ok = o.sol.feasible && o.recheck_ok;
        row.feasible = ok ? 1.0 : 0.0;
        if (ok) {
            row.objective_dBm = watt_to_dbm(o.sol.power());
            row.energy_J = o.sol.objective;
        }
        row.outer_iters = o.sol.outer_iters;
        row.inner_iters = o.sol.inner_iters;
        row.runtime_ms = o.runtime_ms;
        row.rank_residual = o.sol.rank_residual;
        row.status = clean(o.sol.feasible && !o.recheck_ok ? "recheck_failed" : o.status);
    } catch (const std::exception& e) {
        row.status = clean(std::string("error: ") + e.what());
    }
    return row;
}

SweepRow aggregate(const std::vector<SweepRow>& g)
{
    SweepRow a = g.front();
    a.trial = -1;
    a.status = "mean";
    std::vector<double> obj, en;
    double runtime = 0.0, outer = 0.0, inner = 0.0, rank = 0.0;
    for (const auto& r : g) {
        runtime += r.runtime_ms;
        outer += r.outer_iters;
        inner += r.inner_iters;
        if (r.feasible > 0.0) {
            obj.push_back(r.objective_dBm);
            en.push_back(r.energy_J);
            rank = std::max(rank, r.rank_residual);
        }
    }
    const double n = static_cast<double>(g.size());
    a.feasible = obj.size() / n;
    a.runtime_ms = runtime / n;
    a.outer_iters = static_cast<int>(std::lround(outer / n));
    a.inner_iters = static_cast<int>(std::lround(inner / n));
    a.rank_residual = rank;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (obj.empty()) {
        a.objective_dBm = a.median_dBm = a.energy_J = nan;
        return a;
    }
    double s = 0.0, e = 0.0;
    for (std::size_t i = 0; i < obj.size(); ++i) {
        s += obj[i];
        e += en[i];
    }
    a.objective_dBm = s / obj.size();
    a.energy_J = e / obj.size();
    std::sort(obj.begin(), obj.end());
    const std::size_t m = obj.size();
    a.median_dBm = m % 2 ? obj[m / 2] : 0.5 * (obj[m / 2 - 1] + obj[m / 2]);
    return a;
}

} // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const ScenarioConfig& cfg, const SolverSuite& suite,
                                Execution ex)
{
    spec.validate();
    const std::size_t nv = spec.values.size(), na = spec.algorithms.size();
    const auto nt = static_cast<std::size_t>(spec.trials);
    const std::size_t jobs = nv * na * nt;
    std::vector<SweepRow> rows(jobs);
    auto job = [&](std::size_t j) {
        const std::size_t vi = j / (na * nt), ai = (j / nt) % na;
        rows[j] = one_job(spec, cfg, suite, vi, ai, static_cast<int>(j % nt));
    };
    if (ex == Execution::Parallel) {
        const auto n = static_cast<long long>(jobs);
#pragma omp parallel for schedule(dynamic, 1)
        for (long long j = 0; j < n; ++j) job(static_cast<std::size_t>(j));
    } else {
        for (std::size_t j = 0; j < jobs; ++j) job(j);
    }

    std::vector<SweepRow> out;
    for (std::size_t g = 0; g < nv * na; ++g) {
        const std::vector<SweepRow> grp(rows.begin() + g * nt, rows.begin() + (g + 1) * nt);
        out.insert(out.end(), grp.begin(), grp.end());
        out.push_back(aggregate(grp));
    }
    return out;
}

std::vector<SweepRow> aggregates(const std::vector<SweepRow>& rows)
{
    std::vector<SweepRow> a;
    for (const auto& r : rows)
        if (r.trial < 0) a.push_back(r);
    return a;
}

namespace {

std::string num(double v)
{
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

} // namespace

void write_csv(const std::vector<SweepRow>& rows, std::ostream& out, bool timing)
{
    out << "axis,value,algorithm,trial,seed,objective_dBm,feasible,outer_iters,inner_iters,runtime_ms,"
           "rank_residual,status,objective_median_dBm,energy_J\n";
    for (const auto& r : rows) {
        const bool agg = r.trial < 0;
        out << r.axis << ',' << num(r.value) << ',' << r.algorithm << ',' << (agg ? "mean" : std::to_string(r.trial))
            << ',' << r.seed << ',' << num(r.objective_dBm) << ',' << num(r.feasible) << ',' << r.outer_iters << ','
            << r.inner_iters << ',' << (timing ? num(r.runtime_ms) : "0") << ',' << num(r.rank_residual) << ','
            << r.status << ',' << (agg ? num(r.median_dBm) : "") << ',' << num(r.energy_J) << '\n';
    }
}

} // namespace irs
