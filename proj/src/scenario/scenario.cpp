#include "irs/scenario.hpp"

#include <cmath>
#include <numbers>

namespace irs {

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

double PathLoss::gain(double d, double alpha) const
{
    return std::pow(10.0, -c0_dB / 10.0) * std::pow(d, -alpha);
}

double ScenarioConfig::pick(const std::vector<double>& v, int i)
{
    if (v.empty()) throw std::invalid_argument("empty parameter list");
    return v.size() == 1 ? v[0] : v.at(static_cast<std::size_t>(i));
}

double ScenarioConfig::gamma_k(int k, double tau_bar) const
{
    if (!r_min.empty()) return sinr_threshold_from_rate(pick(r_min, k), tau_bar);
    return pick(gamma, k);
}

void ScenarioConfig::validate() const
{
    auto fail = [](const std::string& m) { throw std::invalid_argument("scenario: " + m); };
    if (M < 1 || L < 1 || N < 0 || K < 1 || U < 0) fail("counts must be positive");
    auto sized = [&](const std::vector<double>& v, int n, const char* name) {
        if (v.empty() || (v.size() != 1 && static_cast<int>(v.size()) != n))
            fail(std::string(name) + " must have 1 or " + std::to_string(n) + " entries");
    };
    if (r_min.empty()) sized(gamma, K, "gamma");
    else sized(r_min, K, "r_min");
    sized(q_dc, K, "q_dc");
    sized(sigma2, K, "sigma2");
    sized(sigma2_c, K, "sigma2_c");
    if (U > 0) sized(e_iet, U, "e_iet");
    for (int k = 0; k < K; ++k) {
        if (r_min.empty() && !(pick(gamma, k) > 0.0)) fail("gamma must be > 0");
        if (!r_min.empty() && pick(r_min, k) < 0.0) fail("r_min must be >= 0");
        if (!(q_dc_k(k) > 0.0)) fail("q_dc must be > 0");
        if (q_dc_k(k) >= eh.saturation()) fail("q_dc beyond EH saturation");
        if (!(sigma2_k(k) > 0.0) || !(sigma2_c_k(k) > 0.0)) fail("noise powers must be > 0");
    }
    for (int u = 0; u < U; ++u)
        if (!(e_iet_u(u) > 0.0)) fail("e_iet must be > 0");
    if (!(e_ciusi > 0.0)) fail("e_ciusi must be > 0");
    if (geo.sr_radius < 0.0 || geo.pr_radius < 0.0) fail("radii must be >= 0");
    if (T < 1) fail("T must be >= 1");
    if (!(primary_power > 0.0)) fail("primary_power must be > 0");
    if (discrete_levels && *discrete_levels < 2) fail("discrete_levels must be >= 2");
    if (corr < 0.0 || corr >= 1.0) fail("corr must be in [0, 1)");
}

namespace {
int ceil_div(int a, int b) { return (a + b - 1) / b; }
} // namespace

OverheadBudget compute_overhead(const ScenarioConfig& cfg)
{
    OverheadBudget o;
    const int K = cfg.K, U = cfg.U, N = cfg.N, M = cfg.M, L = cfg.L;
    o.tau_h = K + N + ceil_div((K - 1) * N, M);
    o.tau_v = U + N + ceil_div(std::max(U - 1, 0) * N, M);
    o.tau_g = U + N + ceil_div(std::max(U - 1, 0) * N, L);
    o.tau_u = K + N + ceil_div((K - 1) * N, L);
    o.tau_p = std::max({o.tau_h, o.tau_v, o.tau_g, o.tau_u});
    o.tau_s = cfg.tau_s.value_or(K + U + 1);
    o.tau = o.tau_p + o.tau_s;
    if (cfg.T <= o.tau)
        throw BlockTooShort("block of " + std::to_string(cfg.T) + " symbols leaves no room after " +
                            std::to_string(o.tau) + " overhead symbols");
    o.tau_bar = static_cast<double>(cfg.T - o.tau) / cfg.T;
    return o;
}

double sinr_threshold_from_rate(double r_min, double tau_bar)
{
    if (r_min < 0.0 || !(tau_bar > 0.0) || tau_bar > 1.0)
        throw std::invalid_argument("sinr_threshold_from_rate: bad arguments");
    return std::exp2(r_min / tau_bar) - 1.0;
}

Positions place_nodes(const ScenarioConfig& cfg, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
    Positions p;
    p.st = cfg.geo.st;
    p.pt = cfg.geo.pt;
    p.irs = cfg.geo.irs;
    auto on_circle = [&](const Point& c, double r) {
        const double a = ang(rng);
        return Point{c.x + r * std::cos(a), c.y + r * std::sin(a)};
    };
    for (int k = 0; k < cfg.K; ++k) p.sr.push_back(on_circle(cfg.geo.sr_center, cfg.geo.sr_radius));
    for (int u = 0; u < cfg.U; ++u) p.pr.push_back(on_circle(cfg.geo.pr_center, cfg.geo.pr_radius));
    return p;
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream)
{
    auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
    auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    std::seed_seq seq{lo(seed), hi(seed), lo(trial), hi(trial), lo(stream), hi(stream)};
    return std::mt19937_64(seq);
}

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

} // namespace irs
