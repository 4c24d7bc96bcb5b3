#include "irs/harness.hpp"

namespace irs {

namespace {

bool has_errors(const CsiErrors& c)
{
    return c.eps2_hd > 0.0 || c.eps2_Hk > 0.0 || c.eps2_vd > 0.0 || c.eps2_Vu > 0.0 || c.eps2_Gu > 0.0;
}

} // namespace

// streams: 0 placement and channels, 1 initial reflect vector, 2 CSI errors,
// 3 CCP restarts, 4 RandomRB draws
TrialInput make_trial(const ScenarioConfig& cfg, std::uint64_t seed, int trial)
{
    cfg.validate();
    TrialInput in;
    in.seed = seed;
    in.trial = trial;
    in.csi = cfg.csi;
    const auto t = static_cast<std::uint64_t>(trial);
    std::mt19937_64 rng = make_rng(seed, t, 0);
    const Positions pos = place_nodes(cfg, rng);
    const ChannelSet ch = synthesize(cfg, pos, rng);
    in.truth = make_instance(cfg, ch);
    if (has_errors(cfg.csi)) {
        std::mt19937_64 erng = make_rng(seed, t, 2);
        in.est = make_instance(cfg, inject_errors(ch, cfg.csi, erng).estimate);
    } else {
        in.est = in.truth;
    }
    std::mt19937_64 urng = make_rng(seed, t, 1);
    in.init = random_phases(cfg.N, urng);
    return in;
}

} // namespace irs
