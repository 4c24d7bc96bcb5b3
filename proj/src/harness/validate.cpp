#include "irs/harness.hpp"

#include <algorithm>
#include <ostream>

namespace irs {

ValidationRow validate_trial(const ScenarioConfig& cfg, const SolverSuite& suite, std::uint64_t seed, int trial,
                             int draws, Execution ex)
{
    ValidationRow row;
    row.trial = trial;
    try {
        const TrialInput in = make_trial(cfg, seed, trial);
        std::mt19937_64 rng = make_rng(seed, static_cast<std::uint64_t>(trial), 3);
        row.robust = robust_solve(in.est, in.csi, suite.robust, in.init, rng);
        AmSettings am = suite.am;
        am.fixed_rho = fixed_ps_ratios(in.est);
        row.nominal = am_solve(in.est, am, in.init);
        if (!row.robust.feasible) {
            row.status = "robust_" + row.robust.status;
            return row;
        }
        if (!row.nominal.feasible) {
            row.status = "nominal_" + row.nominal.status;
            return row;
        }
        // error draws for validation live on their own seed, away from the solver streams
        const std::uint64_t vseed = seed * 1000003u + static_cast<std::uint64_t>(trial);
        auto check = ex == Execution::Parallel ? validate_outage : validate_outage_serial;
        row.robust_outage = check(in.est, row.robust.design, in.csi, draws, vseed);
        row.nominal_outage = check(in.est, row.nominal.design, in.csi, draws, vseed);
        row.robust_within = row.robust_outage.within(cfg.outage);
        row.nominal_violates = !row.nominal_outage.within(cfg.outage);
        row.status = "ok";
    } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
    }
    return row;
}

namespace {

double worst(const OutageReport& r)
{
    double w = 0.0;
    for (const auto* v : {&r.sinr, &r.eh, &r.fisi, &r.ciusi})
        for (double x : *v) w = std::max(w, x);
    return w;
}

} // namespace

void write_validation_csv(const std::vector<ValidationRow>& rows, std::ostream& out)
{
    out << "trial,status,robust_dBm,nominal_dBm,robust_worst_outage,nominal_worst_outage,robust_within,"
           "nominal_violates\n";
    for (const auto& r : rows) {
        std::string st = r.status;
        std::replace(st.begin(), st.end(), ',', ';');
        out << r.trial << ',' << st << ',' << (r.robust.feasible ? watt_to_dbm(r.robust.power()) : 0.0) << ','
            << (r.nominal.feasible ? watt_to_dbm(r.nominal.power()) : 0.0) << ',' << worst(r.robust_outage) << ','
            << worst(r.nominal_outage) << ',' << r.robust_within << ',' << r.nominal_violates << '\n';
    }
}

} // namespace irs
