#include "irs/quantize.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace irs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double t)
{
    t = std::fmod(t, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    return t >= kTwoPi ? 0.0 : t;
}

} // namespace

int nearest_level(double theta, int F, PhaseDistance dist)
{
    if (F < 2) throw std::invalid_argument("quantize: need at least two levels");
    const double t = wrap(theta);
    int best = 0;
    double best_d = INFINITY;
    for (int l = 0; l < F; ++l) {
        const double g = kTwoPi * l / F;
        double d = std::abs(t - g);
        if (dist == PhaseDistance::Circular) d = std::min(d, kTwoPi - d);
        if (d < best_d) { // strict: first (lower) index wins a tie
            best_d = d;
            best = l;
        }
    }
    return best;
}

double quantize_phase(double theta, int F, PhaseDistance dist) { return kTwoPi * nearest_level(theta, F, dist) / F; }

Eigen::VectorXcd quantize_phases(const Eigen::VectorXcd& ups, int F, PhaseDistance dist)
{
    if (F < 2) throw std::invalid_argument("quantize: need at least two levels");
    Eigen::VectorXcd q(ups.size());
    for (Eigen::Index n = 0; n < ups.size(); ++n) q(n) = std::polar(1.0, quantize_phase(std::arg(ups(n)), F, dist));
    return q;
}

double margin_loss(const Instance& inst, const Design& d, int F, PhaseDistance dist)
{
    Design q = d;
    q.upsilon = quantize_phases(d.upsilon, F, dist);
    return check_feasibility(inst, d).worst() - check_feasibility(inst, q).worst();
}

} // namespace irs
