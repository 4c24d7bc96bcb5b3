#pragma once

// Outage-constrained design under Gaussian CSI errors. Every probabilistic
// constraint is a quadratic form in a standard complex Gaussian vector i,
//     i^H Q i + 2 Re(r^H i) + s  >= 0   (SINR, EH)   or   <= 0   (FISI, CIUSI),
// and is replaced by the Bernstein-type inequality (BTI) restriction
//     Tr Q - sqrt(2 ln(1/p)) x + ln(p) y + s >= 0,
//     || [vec Q; sqrt2 r] || <= x,   y I + Q >= 0,   y >= 0,
// applied to -Q, -r, -s for the <= events. All events are divided by their
// threshold so that s is a relative margin.

#include "irs/am_solver.hpp"
#include "irs/channel.hpp"
#include "irs/conic.hpp"
#include "irs/model.hpp"
#include "irs/sysmodel.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace irs {

struct CcpStalled : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class BtiDirection { AtLeast, AtMost };

struct BtiTerms {
    Eigen::MatrixXcd Q;
    Eigen::VectorXcd r;
    double s = 0.0;
};

// Smallest (x, y) for numeric terms and the slack of the main inequality
// (>= 0 means the BTI certifies the outage bound).
struct BtiCertificate {
    double x = 0.0;
    double y = 0.0;
    double slack = 0.0;
};
BtiCertificate bti_certificate(const BtiTerms& t, double p, BtiDirection dir);

// Emits the BTI restriction into a model. Q affine in the variables.
void add_bti(conic::Model& m, const conic::HermAffine& Q, const std::vector<conic::CExpr>& r,
             const conic::LinExpr& s, double p, BtiDirection dir, const conic::LinExpr& margin = {});
// Q constant: the PSD shift reduces to a bound on y.
void add_bti(conic::Model& m, const Eigen::MatrixXcd& Q, const std::vector<conic::CExpr>& r,
             const conic::LinExpr& s, double p, BtiDirection dir, const conic::LinExpr& margin = {});

// B x for Hermitian-affine B and constant x.
std::vector<conic::CExpr> times(const conic::HermAffine& B, const Eigen::VectorXcd& x);

// Error variances seen by each event after collapsing isotropic covariances.
struct RobustContext {
    std::vector<double> eps2_h; // SR k effective channel: eps_hd^2 + N eps_H^2
    std::vector<double> eps2_v; // PR u direct channel
    std::vector<double> eps2_g; // PR u cascaded PT path: N eps_G^2
    std::vector<double> rho;    // fixed PS ratios
    OutageSpec spec;
};
RobustContext make_robust_context(const Instance& est, const CsiErrors& csi, const std::vector<double>& rho);

// Numeric event terms of a design on the estimated channels.
BtiTerms sinr_terms(const Instance& est, const RobustContext& ctx, const Design& d, int k);
BtiTerms eh_terms(const Instance& est, const RobustContext& ctx, const Design& d, int k);
BtiTerms fisi_terms(const Instance& est, const RobustContext& ctx, const Design& d, int u);
BtiTerms ciusi_terms(const Instance& est, const RobustContext& ctx, const Eigen::VectorXcd& upsilon, int u);

// SINR terms from full covariances of h_d (M x M) and vec(H_k) (NM x NM);
// equal to sinr_terms (up to zero eigenvalues) when both are scaled identities.
BtiTerms sinr_terms_general(const Instance& est, const Design& d, int k, const Eigen::MatrixXcd& C_hd,
                            const Eigen::MatrixXcd& C_H);

// Worst BTI slack over all constraints of a design (>= 0: every outage bound certified).
double worst_bti_slack(const Instance& est, const RobustContext& ctx, const Design& d);

// rho_k = sqrt(wR G_k) / (sqrt(wR G_k) + sqrt(wE Q_k))
std::vector<double> fixed_ps_ratios(const std::vector<double>& gamma, const std::vector<double>& q,
                                    double omega_R, double omega_E);
// Instance version: Q_k is the RF requirement expressed in mW.
std::vector<double> fixed_ps_ratios(const Instance& inst);

struct RobustSettings {
    double eps = 1e-4;       // outer relative change
    int j_max = 20;
    double delta = 10.0;     // rank penalty
    int sca_max = 30;
    double rank_tol = 1e-4;
    double varpi0 = 5.0;
    double eta = 3.0;
    double varpi_max = 1e4;
    double chi = 1e-5;
    double nu = 1e-4;
    int r_max = 30;
    int restarts = 3;
    conic::Settings conic;

    static RobustSettings from_config(const ConfigFile& f, RobustSettings base);
    static RobustSettings from_config(const ConfigFile& f) { return from_config(f, RobustSettings()); }
};

struct RobustTbResult {
    bool feasible = false;
    std::vector<Eigen::VectorXcd> w;
    std::vector<Eigen::MatrixXcd> W;
    double power = 0.0;
    double rank = 0.0; // worst lambda2/lambda1
    int iterations = 0;
};
RobustTbResult robust_tb_step(const Instance& est, const RobustContext& ctx, const Eigen::VectorXcd& upsilon,
                              const RobustSettings& st = {});

struct RobustRbResult {
    Eigen::VectorXcd upsilon;
    double zeta = 0.0; // ||zeta||_1 at exit, before normalization
    int iterations = 0;
    int restarts = 0;
};
RobustRbResult robust_rb_ccp(const Instance& est, const RobustContext& ctx, const std::vector<Eigen::VectorXcd>& w,
                             const Eigen::VectorXcd& upsilon_prev, const RobustSettings& st, std::mt19937_64& rng);

DesignSolution robust_solve(const Instance& est, const CsiErrors& csi, const RobustSettings& st,
                            const Eigen::VectorXcd& init_upsilon, std::mt19937_64& rng);

// Monte-Carlo check: truth = estimate + fresh error draws.
struct OutageReport {
    int draws = 0;
    std::vector<double> sinr, eh, fisi, ciusi; // empirical outage per constraint
    double worst_excess(const OutageSpec& spec, double sigmas = 2.0) const; // <= 0 when every spec holds
    bool within(const OutageSpec& spec, double sigmas = 2.0) const { return worst_excess(spec, sigmas) <= 0.0; }
};
OutageReport validate_outage(const Instance& est, const Design& d, const CsiErrors& csi, int draws,
                             std::uint64_t seed);
// Single-threaded reference with identical draws.
OutageReport validate_outage_serial(const Instance& est, const Design& d, const CsiErrors& csi, int draws,
                                    std::uint64_t seed);

} // namespace irs
