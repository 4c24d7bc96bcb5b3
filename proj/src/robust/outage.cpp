#include "irs/robust_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace irs {

namespace {

constexpr std::uint64_t kOutageStream = 0x6f75u;

// violation flags per draw, laid out [C1 x K | C2 x K | C3 x U | C4 x U]
void one_draw(const Instance& est, const Design& d, const ErrorVariances& var, std::uint64_t seed, int draw,
              unsigned char* flags)
{
    std::mt19937_64 rng = make_rng(seed, static_cast<std::uint64_t>(draw), kOutageStream);
    Instance truth = est;
    truth.ch = sample_truth(est.ch, var, rng);
    const FeasibilityReport rep = check_feasibility(truth, d);
    const int K = est.K(), U = est.U();
    for (const auto& e : rep.entries) {
        int slot = -1;
        if (e.name == "C1") slot = e.index;
        else if (e.name == "C2") slot = K + e.index;
        else if (e.name == "C3") slot = 2 * K + e.index;
        else if (e.name == "C4") slot = 2 * K + U + e.index;
        if (slot >= 0) flags[slot] = e.slack < 0.0 ? 1 : 0;
    }
}

OutageReport summarize(const Instance& est, const std::vector<unsigned char>& flags, int draws)
{
    const int K = est.K(), U = est.U(), W = 2 * K + 2 * U;
    std::vector<long> count(W, 0);
    for (int i = 0; i < draws; ++i)
        for (int j = 0; j < W; ++j) count[j] += flags[static_cast<std::size_t>(i) * W + j];
    OutageReport r;
    r.draws = draws;
    const double n = std::max(draws, 1);
    for (int k = 0; k < K; ++k) {
        r.sinr.push_back(count[k] / n);
        r.eh.push_back(count[K + k] / n);
    }
    for (int u = 0; u < U; ++u) {
        r.fisi.push_back(count[2 * K + u] / n);
        r.ciusi.push_back(count[2 * K + U + u] / n);
    }
    return r;
}

} // namespace

double OutageReport::worst_excess(const OutageSpec& spec, double sigmas) const
{
    double w = -std::numeric_limits<double>::infinity();
    auto check = [&](const std::vector<double>& v, double target) {
        const double bound = target + sigmas * std::sqrt(target * (1.0 - target) / std::max(draws, 1));
        for (double x : v) w = std::max(w, x - bound);
    };
    check(sinr, spec.p);
    check(eh, spec.q);
    check(fisi, spec.varsigma);
    check(ciusi, spec.varrho);
    return w;
}

OutageReport validate_outage(const Instance& est, const Design& d, const CsiErrors& csi, int draws,
                             std::uint64_t seed)
{
    const ErrorVariances var = error_variances(est.ch, csi);
    const int W = 2 * est.K() + 2 * est.U();
    std::vector<unsigned char> flags(static_cast<std::size_t>(draws) * W, 0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < draws; ++i) one_draw(est, d, var, seed, i, flags.data() + static_cast<std::size_t>(i) * W);
    return summarize(est, flags, draws);
}

OutageReport validate_outage_serial(const Instance& est, const Design& d, const CsiErrors& csi, int draws,
                                    std::uint64_t seed)
{
    const ErrorVariances var = error_variances(est.ch, csi);
    const int W = 2 * est.K() + 2 * est.U();
    std::vector<unsigned char> flags(static_cast<std::size_t>(draws) * W, 0);
    for (int i = 0; i < draws; ++i) one_draw(est, d, var, seed, i, flags.data() + static_cast<std::size_t>(i) * W);
    return summarize(est, flags, draws);
}

} // namespace irs
