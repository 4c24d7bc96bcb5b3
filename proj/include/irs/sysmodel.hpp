#pragma once

// Physical quantities of the secondary/primary system and the constraint
// report used to re-check every design independently of the solver that made it.
// Thresholds in ScenarioConfig are powers (energy divided by the block fraction),
// so constraints here are checked in power units; energies are tau_bar times that.

#include "irs/channel.hpp"
#include "irs/scenario.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace irs {

struct RankDeficient : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SaturationExceeded : std::domain_error {
    using std::domain_error::domain_error;
};

struct PrimaryPrecoder {
    std::vector<Eigen::VectorXcd> f; // one per PR, length L
};

// Zero-forcing on the direct PT->PR channels, primary_power/U per user.
PrimaryPrecoder zf_primary_precoder(const ChannelSet& set, const ScenarioConfig& cfg);

// Everything a solver needs for one realization.
struct Instance {
    ScenarioConfig cfg;
    OverheadBudget overhead;
    ChannelSet ch;
    PrimaryPrecoder f;
    // stand-alone secondary system: no RISI, no FISI/CIUSI constraints
    bool isolated = false;

    double tau_bar() const { return overhead.tau_bar; }
    double gamma(int k) const { return cfg.gamma_k(k, overhead.tau_bar); }
    // RF input power needed to harvest the DC target of SR k
    double q_rf(int k) const;
    int K() const { return cfg.K; }
    int U() const { return cfg.U; }
    int M() const { return cfg.M; }
    int N() const { return ch.N(); }
};

Instance make_instance(const ScenarioConfig& cfg, const ChannelSet& ch);

struct Design {
    std::vector<Eigen::VectorXcd> w;
    std::vector<double> rho;
    Eigen::VectorXcd upsilon;

    double power() const; // sum ||w_k||^2
};

struct DesignSolution {
    Design design;
    bool feasible = false;     // solver's own verdict
    std::string status;        // "ok", "infeasible", "max_iter", ...
    double objective = 0.0;    // tau_bar * power, Joules
    std::vector<double> trace; // objective per outer iteration
    std::vector<double> xi;    // penalty/coupling residual per outer iteration (BCD)
    int outer_iters = 0;
    int inner_iters = 0;
    double rank_residual = 0.0; // worst lambda2/lambda1 (or lifted residual)
    double power() const { return design.power(); }
};

// Interference received by SR k from the primary transmitter.
double risi(const ChannelSet& set, const EffectiveChannels& eff, const PrimaryPrecoder& f, int k,
            bool effective_path);
// RISI as seen by the solvers of `inst` (zero when isolated)
double risi(const Instance& inst, const EffectiveChannels& eff, int k);

double sinr(const Instance& inst, const EffectiveChannels& eff, const Design& d, int k);
double rate(double sinr_value, double tau_bar);

double eh_forward(double x, const EhParams& p);
double eh_inverse(double y, const EhParams& p);

// (1 - rho_k) times the total received RF power
double received_eh_input(const Instance& inst, const EffectiveChannels& eff, const Design& d, int k);

// Energies over the block (Joules): tau_bar times the interference power.
double fisi(const ChannelSet& set, const Design& d, int u, double tau_bar);
double ciusi(const ChannelSet& set, const Eigen::VectorXcd& upsilon, const PrimaryPrecoder& f, int u,
             double tau_bar);

struct ConstraintSlack {
    std::string name; // C1..C6
    int index = 0;
    double value = 0.0;
    double threshold = 0.0;
    double slack = 0.0; // relative, >= 0 when satisfied
};

struct FeasibilityReport {
    std::vector<ConstraintSlack> entries;
    double worst() const;
    bool ok(double tol = 1e-5) const { return worst() >= -tol; }
};

// Evaluates C1-C6 on the channels in `inst` (use a different instance for
// re-checking against true channels).
FeasibilityReport check_feasibility(const Instance& inst, const Design& d);

} // namespace irs
