#include "irs/sysmodel.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace irs {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

PrimaryPrecoder zf_primary_precoder(const ChannelSet& set, const ScenarioConfig& cfg)
{
    PrimaryPrecoder p;
    const int U = set.U();
    const int L = set.L();
    if (U == 0) return p;
    if (U > L) throw RankDeficient("zf_primary_precoder: more primary users than PT antennas");
    MatrixXcd Gd(U, L); // rows g_d[u]^H
    for (int u = 0; u < U; ++u) Gd.row(u) = set.g_d[u].adjoint();
    Eigen::JacobiSVD<MatrixXcd> svd(Gd, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto sv = svd.singularValues();
    if (sv(U - 1) <= 1e-10 * sv(0)) throw RankDeficient("zf_primary_precoder: channel rank deficient");
    const MatrixXcd F = svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().adjoint();
    const double pu = cfg.primary_power / U;
    for (int u = 0; u < U; ++u) p.f.push_back(std::sqrt(pu) * F.col(u).normalized());
    return p;
}

double Instance::q_rf(int k) const { return eh_inverse(cfg.q_dc_k(k), cfg.eh); }

Instance make_instance(const ScenarioConfig& cfg, const ChannelSet& ch)
{
    Instance inst;
    inst.cfg = cfg;
    inst.overhead = compute_overhead(cfg);
    inst.ch = ch;
    inst.f = zf_primary_precoder(ch, cfg);
    return inst;
}

double Design::power() const
{
    double p = 0.0;
    for (const auto& v : w) p += v.squaredNorm();
    return p;
}

double risi(const ChannelSet& set, const EffectiveChannels& eff, const PrimaryPrecoder& f, int k,
            bool effective_path)
{
    const VectorXcd& u = effective_path ? eff.u[k] : set.u_d[k];
    double r = 0.0;
    for (const auto& fu : f.f) r += std::norm(u.dot(fu));
    return r;
}

double risi(const Instance& inst, const EffectiveChannels& eff, int k)
{
    if (inst.isolated) return 0.0;
    return risi(inst.ch, eff, inst.f, k, inst.cfg.risi_effective);
}

double sinr(const Instance& inst, const EffectiveChannels& eff, const Design& d, int k)
{
    const VectorXcd& h = eff.h[k];
    const double sig = std::norm(h.dot(d.w[k]));
    double den = risi(inst, eff, k) + inst.cfg.sigma2_k(k) +
                 inst.cfg.sigma2_c_k(k) / d.rho[k];
    for (int i = 0; i < static_cast<int>(d.w.size()); ++i)
        if (i != k) den += std::norm(h.dot(d.w[i]));
    return sig / den;
}

double rate(double s, double tau_bar) { return tau_bar * std::log2(1.0 + s); }

double eh_forward(double x, const EhParams& p) { return (p.a * x + p.b) / (x + p.c) - p.b / p.c; }

double eh_inverse(double y, const EhParams& p)
{
    const double sat = p.saturation();
    if (y >= sat) throw SaturationExceeded("eh_inverse: target at or above rectifier saturation");
    if (y < 0.0) throw std::domain_error("eh_inverse: negative target");
    return p.c * y / (sat - y);
}

double received_eh_input(const Instance& inst, const EffectiveChannels& eff, const Design& d, int k)
{
    double p = risi(inst, eff, k);
    for (const auto& wi : d.w) p += std::norm(eff.h[k].dot(wi));
    return (1.0 - d.rho[k]) * p;
}

double fisi(const ChannelSet& set, const Design& d, int u, double tau_bar)
{
    double e = 0.0;
    for (const auto& wk : d.w) e += std::norm(set.v_d[u].dot(wk));
    return tau_bar * e;
}

double ciusi(const ChannelSet& set, const VectorXcd& ups, const PrimaryPrecoder& f, int u, double tau_bar)
{
    double e = 0.0;
    for (const auto& fj : f.f) e += std::norm(ups.dot(set.Gu[u] * fj));
    return tau_bar * e;
}

double FeasibilityReport::worst() const
{
    double w = std::numeric_limits<double>::infinity();
    for (const auto& e : entries) w = std::min(w, e.slack);
    return w;
}

FeasibilityReport check_feasibility(const Instance& inst, const Design& d)
{
    FeasibilityReport r;
    const double tb = inst.tau_bar();
    const int K = inst.K();
    const bool has_irs = d.upsilon.size() > 0;
    const EffectiveChannels eff = has_irs ? effective(inst.ch, d.upsilon) : direct_only(inst.ch);
    auto rel = [](double v, double t) { return t != 0.0 ? v / std::abs(t) : v; };

    for (int k = 0; k < K; ++k) {
        const double g = inst.gamma(k);
        const double s = (d.rho[k] > 0.0) ? sinr(inst, eff, d, k) : 0.0;
        r.entries.push_back({"C1", k, s, g, g > 0.0 ? rel(s - g, g) : 0.0});
    }
    for (int k = 0; k < K; ++k) {
        const double q = inst.q_rf(k);
        const double e = received_eh_input(inst, eff, d, k);
        r.entries.push_back({"C2", k, e, q, rel(e - q, q)});
    }
    for (int u = 0; u < (inst.isolated ? 0 : inst.U()); ++u) {
        const double t = tb * inst.cfg.e_iet_u(u);
        const double e = fisi(inst.ch, d, u, tb);
        r.entries.push_back({"C3", u, e, t, rel(t - e, t)});
    }
    if (has_irs && !inst.isolated) {
        for (int u = 0; u < inst.U(); ++u) {
            const double t = tb * inst.cfg.e_ciusi;
            const double e = ciusi(inst.ch, d.upsilon, inst.f, u, tb);
            r.entries.push_back({"C4", u, e, t, rel(t - e, t)});
        }
    }
    for (int k = 0; k < K; ++k)
        r.entries.push_back({"C5", k, d.rho[k], 1.0, std::min(d.rho[k], 1.0 - d.rho[k])});
    double dev = 0.0;
    for (Eigen::Index n = 0; n < d.upsilon.size(); ++n)
        dev = std::max(dev, std::abs(std::abs(d.upsilon(n)) - 1.0));
    r.entries.push_back({"C6", 0, dev, 0.0, -dev});
    return r;
}

} // namespace irs
