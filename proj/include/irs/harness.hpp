#pragma once

// Experiment driver: benchmark modes, seeded trials and parameter sweeps with
// CSV output.

#include "irs/am_solver.hpp"
#include "irs/bcd_solver.hpp"
#include "irs/quantize.hpp"
#include "irs/robust_solver.hpp"
#include "irs/scenario.hpp"
#include "irs/sysmodel.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace irs {

enum class Algorithm { AM, BCD, Robust, RandomRB, NoIRS, Isolated, Quantized };

struct AlgorithmSpec {
    Algorithm alg = Algorithm::BCD;
    int levels = 0; // Quantized only; 0 takes F from the sweep axis

    std::string name() const;
    // "AM", "BCD", "Robust", "RandomRB", "NoIRS", "Isolated", "Quantized", "Quantized-8"
    static AlgorithmSpec parse(const std::string& s);
};

struct SolverSuite {
    AmSettings am;
    BcdSettings bcd;
    RobustSettings robust;
    int random_draws = 8; // RandomRB keeps the best of this many random reflect vectors
    PhaseDistance phase_distance = PhaseDistance::Circular;

    static SolverSuite from_config(const ConfigFile& f);
};

// One seeded realization: true channels, the estimate the solvers see and the
// initial reflect vector.
struct TrialInput {
    Instance truth;
    Instance est;
    CsiErrors csi;
    Eigen::VectorXcd init;
    std::uint64_t seed = 0;
    int trial = 0;
};

TrialInput make_trial(const ScenarioConfig& cfg, std::uint64_t seed, int trial);

struct TrialOutcome {
    DesignSolution sol;
    bool recheck_ok = false; // independent constraint evaluation on the solver's channels
    double runtime_ms = 0.0;
    std::string status;
};

// Runs one algorithm; solver exceptions become a status string, never escape.
TrialOutcome run_benchmark(const AlgorithmSpec& spec, const TrialInput& in, const SolverSuite& suite,
                           int levels = 0);

enum class Execution { Serial, Parallel };

struct SweepSpec {
    std::string axis; // gamma_dB, q_dc_dBm, M, N, pr_distance, eps2, F, T
    std::vector<double> values;
    std::vector<AlgorithmSpec> algorithms;
    int trials = 20;
    std::uint64_t seed = 1;

    void validate() const;
    // sweep_axis, sweep_values, sweep_algorithms, trials, seed
    static SweepSpec from_config(const ConfigFile& f);
};

// cfg with the axis set to value (F leaves cfg unchanged).
ScenarioConfig apply_axis(ScenarioConfig cfg, const std::string& axis, double value);

struct SweepRow {
    std::string axis;
    double value = 0.0;
    std::string algorithm;
    int trial = -1; // -1 marks the aggregate row
    std::uint64_t seed = 0;
    double objective_dBm = 0.0; // transmit sum power; aggregate: mean over feasible trials
    double feasible = 0.0;      // 0/1, aggregate: feasibility rate
    int outer_iters = 0;
    int inner_iters = 0;
    double runtime_ms = 0.0;
    double rank_residual = 0.0;
    std::string status;
    double median_dBm = 0.0; // aggregate only
    double energy_J = 0.0;   // tau_bar * power
};

// Rows ordered by (value, algorithm, trial) with one aggregate row after each
// (value, algorithm) group, whatever the execution order.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const ScenarioConfig& cfg, const SolverSuite& suite,
                                Execution ex = Execution::Parallel);

// Mean row of each (value, algorithm) group.
std::vector<SweepRow> aggregates(const std::vector<SweepRow>& rows);

void write_csv(const std::vector<SweepRow>& rows, std::ostream& out, bool timing = true);

// Robust design against the perfect-CSI design (fixed PS ratios, same
// estimate), both checked by Monte-Carlo over fresh error draws.
struct ValidationRow {
    int trial = 0;
    std::string status; // "ok" or the first failure
    DesignSolution robust;
    DesignSolution nominal;
    OutageReport robust_outage;
    OutageReport nominal_outage;
    bool robust_within = false;   // every constraint within spec + 2 sigma
    bool nominal_violates = false; // at least one constraint beyond spec + 2 sigma
};

ValidationRow validate_trial(const ScenarioConfig& cfg, const SolverSuite& suite, std::uint64_t seed, int trial,
                             int draws, Execution ex = Execution::Parallel);

void write_validation_csv(const std::vector<ValidationRow>& rows, std::ostream& out);

} // namespace irs
