#pragma once

// Cone algebra used by the interior-point iteration: Jordan products, NT
// scalings and step lengths for the orthant, second-order and Hermitian PSD
// cones. Vectors always cover the full product cone in the layout of Cones.

#include "irs/conic.hpp"

#include <vector>

namespace irs::conic::detail {

struct SocScaling {
    double beta = 1.0;
    Eigen::VectorXd w; // hyperbolic unit vector, w'Jw = 1
};

struct PsdScaling {
    Eigen::MatrixXcd R;    // W(X) = R^H X R
    Eigen::MatrixXcd Rinv;
    Eigen::VectorXd l;     // scaled point, lambda = diag(l)
};

struct Scaling {
    Eigen::VectorXd d; // orthant: W = diag(d)
    std::vector<SocScaling> soc;
    std::vector<PsdScaling> psd;
    Eigen::VectorXd lambda; // W z = W^{-T} s
};

// Identity element e of the product cone.
Eigen::VectorXd identity(const Cones& cones);

// Smallest t such that v + t e lies in K (negative when v is interior).
double max_violation(const Cones& cones, const Eigen::VectorXd& v);

// NT scaling of the interior pair (s, z). Returns false if either point is not
// strictly interior to numerical precision.
bool compute_scaling(const Cones& cones, const Eigen::VectorXd& s, const Eigen::VectorXd& z,
                     Scaling& out);

void apply_W(const Cones& cones, const Scaling& sc, Eigen::Ref<Eigen::VectorXd> v);
void apply_Wt(const Cones& cones, const Scaling& sc, Eigen::Ref<Eigen::VectorXd> v);
void apply_Winv(const Cones& cones, const Scaling& sc, Eigen::Ref<Eigen::VectorXd> v);
void apply_Winvt(const Cones& cones, const Scaling& sc, Eigen::Ref<Eigen::VectorXd> v);

// u o v
Eigen::VectorXd jordan_product(const Cones& cones, const Eigen::VectorXd& u,
                               const Eigen::VectorXd& v);

// Solves lambda o x = r for x, with lambda the scaled point of sc.
Eigen::VectorXd inverse_product(const Cones& cones, const Scaling& sc, const Eigen::VectorXd& r);

// Largest alpha with lambda + alpha d in K (infinity if unbounded).
double max_step(const Cones& cones, const Scaling& sc, const Eigen::VectorXd& d);

} // namespace irs::conic::detail
