#pragma once

// Penalty-based alternating minimization: the joint beamforming / power
// splitting SDP at a fixed reflect vector, a lifted reflect-beamforming SDP
// driven to rank one by successive convex approximation of a spectral-norm
// penalty, and the outer loop alternating the two.

#include "irs/conic.hpp"
#include "irs/scenario.hpp"
#include "irs/sysmodel.hpp"

#include <Eigen/Dense>

#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace irs {

struct NotRankOne : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SubproblemInfeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AmSettings {
    double eps = 1e-4;        // outer relative change and lifted rank residual
    int j_max = 30;           // outer iterations
    int t_max = 50;           // SCA iterations per reflect update
    double mu0 = 1e-3;        // rank penalty factor
    double mu_floor = 1e-6;
    double rank_tol = 1e-4;   // lambda2/lambda1 accepted when extracting w
    std::optional<std::vector<double>> fixed_rho; // PS ratios held fixed when set
    conic::Settings conic;

    static AmSettings from_config(const ConfigFile& f, AmSettings base);
    static AmSettings from_config(const ConfigFile& f) { return from_config(f, AmSettings()); }
};

struct JtbpsOptions {
    std::optional<std::vector<double>> fixed_rho;
    conic::Settings conic;
};

struct JtbpsResult {
    bool feasible = false;
    conic::Status status = conic::Status::NumericalFailure;
    std::vector<Eigen::MatrixXcd> W;
    std::vector<double> rho;
    double power = 0.0; // sum tr W_k
};

// Minimum-power beamforming and power splitting at fixed effective channels.
JtbpsResult solve_jtbps_sdp(const Instance& inst, const EffectiveChannels& eff,
                            const Eigen::VectorXcd& upsilon, const JtbpsOptions& opt = {});

double rank_ratio(const Eigen::MatrixXcd& W); // lambda2 / lambda1 (0 for W = 0)
Eigen::VectorXcd extract_beamformer(const Eigen::MatrixXcd& W, double tol = 1e-4);

// Quadratic forms of the lifted reflect vector [upsilon; 1] for fixed w.
struct LiftedForms {
    std::vector<std::vector<Eigen::VectorXcd>> c; // c[k][i]: |h_k^H w_i|^2 = c^H V c
    std::vector<Eigen::MatrixXcd> Omega;          // CIUSI per PR
};
LiftedForms lifted_forms(const Instance& inst, const std::vector<Eigen::VectorXcd>& w);

struct RbStep {
    bool feasible = false;
    Eigen::MatrixXcd V;
    double objective = 0.0; // true penalized objective at V (margins and rank term)
    std::vector<double> sinr_margin, eh_margin;
};

// One convexified reflect-beamforming SDP around V_prev.
RbStep rb_sca_step(const Instance& inst, const Design& d, const Eigen::MatrixXcd& V_prev, double mu,
                   const conic::Settings& st = {});

struct RbResult {
    bool converged = false;
    Eigen::MatrixXcd V;
    Eigen::VectorXcd upsilon;
    std::vector<double> trace;
    int iterations = 0;
    double rank_residual = 1.0; // (N+1 - lambda_max) / (N+1)
};

RbResult rb_sca(const Instance& inst, const Design& d, const AmSettings& st);

Eigen::MatrixXcd lift(const Eigen::VectorXcd& upsilon, std::complex<double> x = 1.0);
Eigen::VectorXcd recover_upsilon(const Eigen::MatrixXcd& V, double tol = 1e-3);
double lifted_rank_residual(const Eigen::MatrixXcd& V);

Eigen::VectorXcd random_phases(int n, std::mt19937_64& rng);

// Design from a solved JTBPS problem (extracting w_k) or std::nullopt if infeasible.
std::optional<Design> design_from(const JtbpsResult& r, const Eigen::VectorXcd& upsilon, double rank_tol,
                                  double* worst_rank = nullptr);

DesignSolution am_solve(const Instance& inst, const AmSettings& st, const Eigen::VectorXcd& init_upsilon);

} // namespace irs
