#pragma once

// Penalty-based block coordinate descent. The couplings h_k^H w_i, v_u^H w_k
// and upsilon^H G_u f_j are replaced by free targets, the mismatch is penalized
// with weight 1/(2 omega), and omega is shrunk until the mismatch vanishes.
// Everything inside works on a normalized copy of the instance (BcdData) so
// that omega and the mismatch tolerance do not depend on path loss.

#include "irs/am_solver.hpp"
#include "irs/conic.hpp"
#include "irs/sysmodel.hpp"

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace irs {

using cplx = std::complex<double>;

struct AuxiliaryBlocks {
    std::vector<std::vector<cplx>> t;      // t[k][i] ~ h_k^H w_i
    std::vector<std::vector<cplx>> psi;    // psi[u][k] ~ v_u^H w_k
    std::vector<std::vector<cplx>> lambda; // lambda[u][j] ~ upsilon^H G_u f_j
};

// Normalized data: w = beta * w~, amplitudes divided by alpha.
struct BcdData {
    int K = 0, U = 0, M = 0, N = 0;
    bool coupled = true; // false for a stand-alone secondary system
    double alpha = 1.0, beta = 1.0;
    double tau = 1.0; // weight on ||w||^2 (1 after normalization)
    std::vector<Eigen::VectorXcd> hd; // scaled direct channels, M
    std::vector<Eigen::MatrixXcd> Hk; // scaled cascaded channels, N x M
    std::vector<Eigen::VectorXcd> vd; // scaled ST -> PR channels, M
    std::vector<std::vector<Eigen::VectorXcd>> c; // c[u][j] = G_u f_j / alpha, N
    std::vector<double> gamma, q, i_hat, i_tilde, sigma2_c; // normalized powers
    std::vector<double> psi_radius2;   // per PR
    double lambda_radius2 = 0.0;

    Eigen::VectorXcd h(int k, const Eigen::VectorXcd& upsilon) const; // h~_k
};

BcdData make_bcd_data(const Instance& inst, double alpha, double beta);

struct BcdSettings {
    double omega0 = 1e-2; // normalized units: requirement powers are 1
    double c = 0.3;
    double omega_floor = 1e-8;
    double eps1 = 1e-4; // inner relative decrease, and outer settling
    double eps2 = 1e-7; // mismatch (normalized)
    int inner_max = 50;
    int outer_max = 30;
    double rcg_tol = 1e-6;
    int rcg_max = 500;
    double armijo_step = 1.0;
    double armijo_contraction = 0.5;
    double armijo_c = 1e-4;
    double rank_tol = 1e-4;
    conic::Settings conic;

    static BcdSettings from_config(const ConfigFile& f, BcdSettings base);
    static BcdSettings from_config(const ConfigFile& f) { return from_config(f, BcdSettings()); }
};

// Exact minimizer of tau sum ||w_k||^2 + (1/2 omega)(sum |h_k^H w_i - t_ki|^2 + sum |v_u^H w_k - psi_uk|^2).
std::vector<Eigen::VectorXcd> tb_closed_form(const BcdData& d, const Eigen::VectorXcd& upsilon,
                                             const AuxiliaryBlocks& aux, double omega);

// f(upsilon) = sum |upsilon^H a_ki + b_ki - t_ki|^2 + sum |upsilon^H c_uj - lambda_uj|^2
struct RbObjective {
    std::vector<Eigen::VectorXcd> a; // flattened
    std::vector<cplx> b0;            // b - t
    double value(const Eigen::VectorXcd& upsilon) const;
    Eigen::VectorXcd gradient(const Eigen::VectorXcd& upsilon) const; // Euclidean, real-inner-product convention
};
RbObjective rb_objective(const BcdData& d, const std::vector<Eigen::VectorXcd>& w, const AuxiliaryBlocks& aux);

struct RcgResult {
    Eigen::VectorXcd upsilon;
    double value = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
};
Eigen::VectorXcd riemannian_gradient(const Eigen::VectorXcd& egrad, const Eigen::VectorXcd& upsilon);
RcgResult rb_rcg(const RbObjective& f, const Eigen::VectorXcd& upsilon_init, const BcdSettings& st = {});

struct PsAuxResult {
    std::vector<double> rho;
    std::vector<std::vector<cplx>> t;
    std::vector<double> z;
    double objective = 0.0;
};
// Convex restriction of the PS-ratio / target subproblem around the current
// targets t0 (which must satisfy the SINR and EH constraints). Throws
// SubproblemInfeasible.
PsAuxResult ps_aux_socp(const BcdData& d, const std::vector<std::vector<cplx>>& a,
                        const std::vector<std::vector<cplx>>& t0, const conic::Settings& st = {});

// Projection onto {x : ||x||^2 <= r2}.
std::vector<cplx> psi_lambda_projection(const std::vector<cplx>& values, double r2);
// Same projection through bisection on the Lagrange multiplier.
std::vector<cplx> psi_lambda_projection_bisection(const std::vector<cplx>& values, double r2, double tol = 1e-14);

// Couplings at the current point: a[k][i] = h~_k^H w~_i.
std::vector<std::vector<cplx>> couplings(const BcdData& d, const Eigen::VectorXcd& upsilon,
                                         const std::vector<Eigen::VectorXcd>& w);
double mismatch(const BcdData& d, const Eigen::VectorXcd& upsilon, const std::vector<Eigen::VectorXcd>& w,
                const AuxiliaryBlocks& aux); // xi
double penalized_objective(const BcdData& d, const Eigen::VectorXcd& upsilon,
                           const std::vector<Eigen::VectorXcd>& w, const AuxiliaryBlocks& aux, double omega);

DesignSolution bcd_solve(const Instance& inst, const BcdSettings& st, const Eigen::VectorXcd& init_upsilon);

} // namespace irs
