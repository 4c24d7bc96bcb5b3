// Command-line front end: solve one instance, run a sweep, or validate robust
// designs by Monte-Carlo.

#include "irs/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

using namespace irs;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::string out;
};

void add_common(CLI::App* app, Common& c)
{
    app->add_option("-c,--config", c.config, "key = value configuration file");
    app->add_option("-s,--seed", c.seed, "base seed");
    app->add_option("-n,--trials", c.trials, "number of trials")->check(CLI::PositiveNumber);
    app->add_option("-o,--out", c.out, "output file (CSV)");
}

ConfigFile load_config(const std::string& path) { return path.empty() ? ConfigFile() : ConfigFile::load(path); }

// file keys first, then the overlay
ConfigFile merged(const ConfigFile& base, const ConfigFile& over)
{
    ConfigFile m = base;
    for (const auto& [k, v] : over.entries()) m.set(k, v);
    return m;
}

std::ostream& open_out(const std::string& path, std::unique_ptr<std::ofstream>& holder)
{
    if (path.empty() || path == "-") return std::cout;
    holder = std::make_unique<std::ofstream>(path);
    if (!*holder) throw std::runtime_error("cannot open " + path);
    return *holder;
}

int cmd_solve(const Common& c, const std::string& algo, int trial)
{
    const ConfigFile f = load_config(c.config);
    const ScenarioConfig cfg = scenario_from_config(f);
    const SolverSuite suite = SolverSuite::from_config(f);
    const std::uint64_t seed = c.seed.value_or(static_cast<std::uint64_t>(f.get_int("seed").value_or(1)));
    const AlgorithmSpec spec = AlgorithmSpec::parse(algo);
    const TrialInput in = make_trial(cfg, seed, trial);
    const TrialOutcome o = run_benchmark(spec, in, suite, cfg.discrete_levels.value_or(0));

    std::ostream& os = std::cout;
    os << std::setprecision(6);
    os << "algorithm   " << spec.name() << "\nseed        " << seed << "  trial " << trial << "\nstatus      "
       << o.status << "\nfeasible    " << (o.sol.feasible ? "yes" : "no")
       << "  (re-check " << (o.recheck_ok ? "passed" : "failed") << ")\n";
    if (o.sol.feasible) {
        os << "power       " << watt_to_dbm(o.sol.power()) << " dBm\n";
        os << "energy      " << o.sol.objective << " J  (tau_bar " << in.est.tau_bar() << ")\n";
        os << "iterations  outer " << o.sol.outer_iters << "  inner " << o.sol.inner_iters << "\n";
        os << "rank        " << o.sol.rank_residual << "\nruntime     " << o.runtime_ms << " ms\n";
        os << "rho        ";
        for (double r : o.sol.design.rho) os << ' ' << r;
        os << "\ntrace (dBm)";
        for (double t : o.sol.trace) os << ' ' << watt_to_dbm(t / in.est.tau_bar());
        os << "\n\nconstraint  index  value          threshold      slack\n";
        Instance inst = in.est;
        inst.isolated = spec.alg == Algorithm::Isolated;
        for (const auto& e : check_feasibility(inst, o.sol.design).entries)
            os << std::left << std::setw(12) << e.name << std::setw(7) << e.index << std::setw(15) << e.value
               << std::setw(15) << e.threshold << e.slack << '\n';
    }
    if (!c.out.empty()) {
        std::unique_ptr<std::ofstream> h;
        std::ostream& csv = open_out(c.out, h);
        SweepRow r;
        r.axis = "none";
        r.algorithm = spec.name();
        r.trial = trial;
        r.seed = seed;
        r.feasible = o.sol.feasible && o.recheck_ok;
        r.objective_dBm = r.feasible ? watt_to_dbm(o.sol.power()) : NAN;
        r.energy_J = r.feasible ? o.sol.objective : NAN;
        r.outer_iters = o.sol.outer_iters;
        r.inner_iters = o.sol.inner_iters;
        r.runtime_ms = o.runtime_ms;
        r.rank_residual = o.sol.rank_residual;
        r.status = o.status;
        write_csv({r}, csv);
    }
    return 0;
}

int cmd_sweep(const Common& c, const std::string& spec_path, bool serial, bool no_timing)
{
    const ConfigFile f = merged(load_config(c.config), load_config(spec_path));
    const ScenarioConfig cfg = scenario_from_config(f);
    const SolverSuite suite = SolverSuite::from_config(f);
    SweepSpec spec = SweepSpec::from_config(f);
    if (c.seed) spec.seed = *c.seed;
    if (c.trials) spec.trials = *c.trials;
    const auto rows = run_sweep(spec, cfg, suite, serial ? Execution::Serial : Execution::Parallel);
    std::unique_ptr<std::ofstream> h;
    write_csv(rows, open_out(c.out, h), !no_timing);
    if (!c.out.empty() && c.out != "-") {
        for (const auto& r : aggregates(rows))
            std::cerr << spec.axis << '=' << r.value << ' ' << r.algorithm << ": mean " << r.objective_dBm
                      << " dBm, feasible " << r.feasible << '\n';
    }
    return 0;
}

int cmd_validate(const Common& c, int draws, std::optional<double> eps2, bool serial)
{
    const ConfigFile f = load_config(c.config);
    ScenarioConfig cfg = scenario_from_config(f);
    if (eps2) cfg = apply_axis(cfg, "eps2", *eps2);
    const SolverSuite suite = SolverSuite::from_config(f);
    const std::uint64_t seed = c.seed.value_or(static_cast<std::uint64_t>(f.get_int("seed").value_or(1)));
    const int trials = c.trials.value_or(f.get_int("trials").value_or(5));
    std::vector<ValidationRow> rows;
    int within = 0, violating = 0, solved = 0;
    for (int t = 0; t < trials; ++t) {
        rows.push_back(validate_trial(cfg, suite, seed, t, draws, serial ? Execution::Serial : Execution::Parallel));
        const auto& r = rows.back();
        if (r.status == "ok") {
            ++solved;
            within += r.robust_within;
            violating += r.nominal_violates;
        }
        std::cerr << "trial " << t << ": " << r.status;
        if (r.status == "ok")
            std::cerr << "  robust " << watt_to_dbm(r.robust.power()) << " dBm "
                      << (r.robust_within ? "within spec" : "OUT OF SPEC") << ", nominal "
                      << watt_to_dbm(r.nominal.power()) << " dBm "
                      << (r.nominal_violates ? "violates" : "within spec");
        std::cerr << '\n';
    }
    std::cerr << "solved " << solved << "/" << trials << ", robust within spec " << within << ", nominal violating "
              << violating << '\n';
    std::unique_ptr<std::ofstream> h;
    write_validation_csv(rows, open_out(c.out, h));
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"IRS-assisted SWIPT underlay: beamforming design and experiments"};
    app.require_subcommand(1);

    Common sc, wc, vc;
    std::string algo = "BCD";
    int trial = 0;
    auto* solve = app.add_subcommand("solve", "solve one seeded instance and print a report");
    add_common(solve, sc);
    solve->add_option("-a,--algorithm", algo, "AM, BCD, Robust, RandomRB, NoIRS, Isolated, Quantized-F");
    solve->add_option("-t,--trial", trial, "trial index within the seed");

    std::string spec_path;
    bool serial = false, no_timing = false;
    auto* sweep = app.add_subcommand("sweep", "run a parameter sweep and write CSV");
    add_common(sweep, wc);
    sweep->add_option("spec", spec_path, "sweep specification file")->required()->check(CLI::ExistingFile);
    sweep->add_flag("--serial", serial, "run trials on one thread");
    sweep->add_flag("--no-timing", no_timing, "write runtime_ms as 0 (byte-stable output)");

    int draws = 10000;
    std::optional<double> eps2;
    bool vserial = false;
    auto* validate = app.add_subcommand("validate", "Monte-Carlo outage check of robust designs");
    add_common(validate, vc);
    validate->add_option("--draws", draws, "error draws per design")->check(CLI::PositiveNumber);
    validate->add_option("--eps2", eps2, "relative CSI error variance (all links)");
    validate->add_flag("--serial", vserial, "single-threaded Monte-Carlo");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*solve) return cmd_solve(sc, algo, trial);
        if (*sweep) return cmd_sweep(wc, spec_path, serial, no_timing);
        if (*validate) return cmd_validate(vc, draws, eps2, vserial);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
