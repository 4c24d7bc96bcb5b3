#pragma once

// F-level phase quantization of a reflect vector.

#include "irs/sysmodel.hpp"

#include <Eigen/Dense>

namespace irs {

enum class PhaseDistance {
    Circular, // distance modulo 2 pi
    Linear    // plain |theta - level| with theta in [0, 2 pi)
};

// Level index in {0, .., F-1} nearest to theta; ties go to the lower index.
int nearest_level(double theta, int F, PhaseDistance dist = PhaseDistance::Circular);
double quantize_phase(double theta, int F, PhaseDistance dist = PhaseDistance::Circular);
// Throws std::invalid_argument for F < 2.
Eigen::VectorXcd quantize_phases(const Eigen::VectorXcd& upsilon, int F,
                                 PhaseDistance dist = PhaseDistance::Circular);

// Drop of the worst relative constraint slack when only the reflect vector of
// `d` is quantized (w and rho kept).
double margin_loss(const Instance& inst, const Design& d, int F, PhaseDistance dist = PhaseDistance::Circular);

} // namespace irs
