// Serial reference against the OpenMP kernels: Monte-Carlo outage validation
// and a small sweep. Prints wall times and checks that both paths agree.

#include "irs/harness.hpp"

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace irs;

namespace {

template <class F>
double time_ms(F&& f)
{
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

bool same(const OutageReport& a, const OutageReport& b)
{
    return a.sinr == b.sinr && a.eh == b.eh && a.fisi == b.fisi && a.ciusi == b.ciusi;
}

} // namespace

int main(int argc, char** argv)
{
    const int draws = argc > 1 ? std::atoi(argv[1]) : 20000;
    const int trials = argc > 2 ? std::atoi(argv[2]) : 4;
#ifdef _OPENMP
    std::cout << "threads " << omp_get_max_threads() << '\n';
#else
    std::cout << "threads 1 (no OpenMP)\n";
#endif

    ScenarioConfig cfg;
    cfg.M = cfg.L = 4;
    cfg.N = 8;
    cfg.csi.eps2_hd = cfg.csi.eps2_Hk = cfg.csi.eps2_vd = cfg.csi.eps2_Vu = cfg.csi.eps2_Gu = 1e-3;
    const TrialInput in = make_trial(cfg, 1, 0);
    const SolverSuite suite;
    const TrialOutcome o = run_benchmark({Algorithm::BCD}, in, suite);
    if (!o.sol.feasible) {
        std::cerr << "bench: design infeasible\n";
        return 1;
    }

    OutageReport rs, rp;
    const double ts = time_ms([&] { rs = validate_outage_serial(in.est, o.sol.design, in.csi, draws, 7); });
    const double tp = time_ms([&] { rp = validate_outage(in.est, o.sol.design, in.csi, draws, 7); });
    std::cout << "outage  draws " << draws << "  serial " << ts << " ms  parallel " << tp << " ms  speedup "
              << ts / tp << "  identical " << (same(rs, rp) ? "yes" : "NO") << '\n';

    SweepSpec spec;
    spec.axis = "gamma_dB";
    spec.values = {0.0, 5.0};
    spec.algorithms = {{Algorithm::BCD}, {Algorithm::NoIRS}};
    spec.trials = trials;
    cfg.csi = {};
    std::vector<SweepRow> a, b;
    const double ss = time_ms([&] { a = run_sweep(spec, cfg, suite, Execution::Serial); });
    const double sp = time_ms([&] { b = run_sweep(spec, cfg, suite, Execution::Parallel); });
    std::ostringstream ca, cb;
    write_csv(a, ca, false);
    write_csv(b, cb, false);
    std::cout << "sweep   jobs " << spec.values.size() * spec.algorithms.size() * trials << "  serial " << ss
              << " ms  parallel " << sp << " ms  speedup " << ss / sp << "  identical "
              << (ca.str() == cb.str() ? "yes" : "NO") << '\n';
    return same(rs, rp) && ca.str() == cb.str() ? 0 : 1;
}
