#pragma once

// Dense primal-dual interior-point solver for cone programs
//
//     minimize    c'x
//     subject to  G x + s = h,   A x = b,   s in K
//
// where K is a product of (in this order) the nonnegative orthant, second-order
// cones and Hermitian positive-semidefinite cones. The solver runs on the
// homogeneous self-dual embedding with Nesterov-Todd scaling and a Mehrotra
// predictor-corrector step, so infeasible and unbounded problems terminate with
// a certificate instead of stalling.
//
// Vectorization of a Hermitian n x n block uses n*n reals, column by column:
// the diagonal entry X(j,j) followed by sqrt(2)*Re X(i,j), sqrt(2)*Im X(i,j)
// for i > j. With this convention the Euclidean inner product of two vectorized
// blocks equals Re tr(X Y).

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

namespace irs::conic {

struct Cones {
    int nonneg = 0;
    std::vector<int> soc;  // dimensions, each >= 1
    std::vector<int> hpsd; // matrix orders, vectorized length n*n

    int dim() const;
    // Barrier degree: one per orthant entry and cone, n per PSD block.
    int degree() const;
};

struct Problem {
    Eigen::VectorXd c;
    Eigen::MatrixXd G;
    Eigen::VectorXd h;
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    Cones cones;

    int num_vars() const { return static_cast<int>(c.size()); }
    // Throws std::invalid_argument when dimensions are inconsistent.
    void validate() const;
};

enum class Status { Optimal, Infeasible, Unbounded, MaxIter, NumericalFailure };

std::string to_string(Status s);

struct Settings {
    double tol = 1e-8;      // primal/dual residual and relative gap tolerance
    double abs_gap = 1e-12; // absolute gap accepted when objectives are ~0
    int max_iter = 200;
    double step_fraction = 0.99;
    bool verbose = false; // per-iteration log on stderr
};

struct Solution {
    Status status = Status::NumericalFailure;
    Eigen::VectorXd x; // primal variables
    Eigen::VectorXd s; // primal slacks in K
    Eigen::VectorXd y; // multipliers of A x = b
    Eigen::VectorXd z; // multipliers of the cone constraints, in K
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double gap = 0.0;
    int iterations = 0;

    bool optimal() const { return status == Status::Optimal; }
};

Solution solve(const Problem& problem, const Settings& settings = {});

// Optimal, or stopped early (iteration cap, stall) at a point whose residuals
// and relative gap are all below `tol`.
bool near_optimal(const Solution& s, double tol = 1e-6);

// Hermitian <-> vector helpers for the documented vectorization.
Eigen::VectorXd vec_hermitian(const Eigen::MatrixXcd& X);
Eigen::MatrixXcd mat_hermitian(const Eigen::Ref<const Eigen::VectorXd>& v, int n);

// Writes the problem in a plain sparse text format (one nonzero per line) for
// cross-solver debugging. See conic/solver.cpp for the layout.
void dump(const Problem& problem, std::ostream& out);

} // namespace irs::conic
