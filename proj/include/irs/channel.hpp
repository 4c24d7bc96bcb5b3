#pragma once

// One realization of every link. Vectors are stored so that a transmitted
// vector x reaches the receiver as c^H x. Cascaded matrices follow
// H_k = diag(h_r[k]^H) H, so the effective channel is h_k = h_d[k] + H_k^H upsilon.

#include "irs/scenario.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace irs {

struct NonUnitModulus : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ChannelSet {
    std::vector<Eigen::VectorXcd> h_d; // ST -> SR_k, M
    std::vector<Eigen::VectorXcd> v_d; // ST -> PR_u, M
    std::vector<Eigen::VectorXcd> g_d; // PT -> PR_u, L
    std::vector<Eigen::VectorXcd> u_d; // PT -> SR_k, L
    std::vector<Eigen::VectorXcd> h_r; // IRS -> SR_k, N
    std::vector<Eigen::VectorXcd> g_r; // IRS -> PR_u, N
    Eigen::MatrixXcd H;                // ST -> IRS, N x M
    Eigen::MatrixXcd G;                // PT -> IRS, N x L

    std::vector<Eigen::MatrixXcd> Hk; // N x M
    std::vector<Eigen::MatrixXcd> Vu; // N x M
    std::vector<Eigen::MatrixXcd> Gu; // N x L
    std::vector<Eigen::MatrixXcd> Uk; // N x L

    // large-scale gains, used for relative CSI error variances
    std::vector<double> gain_hd, gain_vd, gain_hr, gain_gr;
    double gain_H = 0.0, gain_G = 0.0;

    int M() const { return static_cast<int>(H.cols()); }
    int L() const { return static_cast<int>(G.cols()); }
    int N() const { return static_cast<int>(H.rows()); }
    int K() const { return static_cast<int>(h_d.size()); }
    int U() const { return static_cast<int>(v_d.size()); }
};

struct EffectiveChannels {
    std::vector<Eigen::VectorXcd> h; // SR_k, M
    std::vector<Eigen::VectorXcd> v; // PR_u, M
    std::vector<Eigen::VectorXcd> g; // PR_u, L
    std::vector<Eigen::VectorXcd> u; // SR_k, L
};

// Uniform linear array response along the x axis, half-wavelength spacing.
Eigen::VectorXcd ula_response(int n, double angle);
// Rectangular array with ceil(sqrt(n)) columns, seen from within the plane.
Eigen::VectorXcd ura_response(int n, double angle);
// Exponential correlation r^|i-j|.
Eigen::MatrixXd exp_correlation(int n, double r);

ChannelSet synthesize(const ScenarioConfig& cfg, const Positions& pos, std::mt19937_64& rng);

// Fills Hk, Vu, Gu, Uk from the direct, incident and reflect links.
ChannelSet cascade(ChannelSet set);

EffectiveChannels effective(const ChannelSet& set, const Eigen::VectorXcd& upsilon);
// Channels with no IRS path at all.
EffectiveChannels direct_only(const ChannelSet& set);

struct CsiDraw {
    ChannelSet estimate; // truth minus error
    ChannelSet error;    // only the error-bearing families are populated
};

// Error variances of each family after applying the relative scaling.
struct ErrorVariances {
    std::vector<double> hd, Hk, vd, Vu, Gu;
};
ErrorVariances error_variances(const ChannelSet& set, const CsiErrors& model);

// Draws errors on h_d, H_k, v_d, V_u, G_u; other links are taken as known.
CsiDraw inject_errors(const ChannelSet& truth, const CsiErrors& model, std::mt19937_64& rng);

// Adds freshly sampled errors to `estimate` (estimate + delta).
ChannelSet sample_truth(const ChannelSet& estimate, const ErrorVariances& var, std::mt19937_64& rng);

// Text dump, column-major per matrix, headed by dimensions and seed.
void dump(const ChannelSet& set, std::uint64_t seed, std::ostream& out);

bool is_unit_modulus(const Eigen::VectorXcd& v, double tol = 1e-9);

} // namespace irs
