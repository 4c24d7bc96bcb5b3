#include "doctest.h"

#include "irs/harness.hpp"

#include <cmath>
#include <sstream>

using namespace irs;

namespace {

ScenarioConfig desk()
{
    ScenarioConfig c;
    c.M = c.L = 4;
    c.N = 8;
    c.K = c.U = 2;
    return c;
}

} // namespace

TEST_CASE("algorithm names round trip")
{
    for (const char* n : {"AM", "BCD", "Robust", "RandomRB", "NoIRS", "Isolated", "Quantized", "Quantized-8"})
        CHECK(AlgorithmSpec::parse(n).name() == n);
    CHECK(AlgorithmSpec::parse("Quantized-16").levels == 16);
    CHECK_THROWS_AS(AlgorithmSpec::parse("Quantized-1"), std::invalid_argument);
    CHECK_THROWS_AS(AlgorithmSpec::parse("SDR"), std::invalid_argument);
}

TEST_CASE("sweep axes")
{
    const ScenarioConfig c = desk();
    CHECK(apply_axis(c, "M", 6).M == 6);
    CHECK(apply_axis(c, "N", 16).N == 16);
    CHECK(apply_axis(c, "T", 200).T == 200);
    CHECK(apply_axis(c, "gamma_dB", 10).gamma_k(0, 1.0) == doctest::Approx(10.0));
    CHECK(apply_axis(c, "q_dc_dBm", -20).q_dc_k(1) == doctest::Approx(1e-5));
    CHECK(apply_axis(c, "pr_distance", 30).geo.pr_center.y == doctest::Approx(c.geo.st.y - 30));
    CHECK(apply_axis(c, "eps2", 1e-3).csi.eps2_Gu == 1e-3);
    CHECK(apply_axis(c, "F", 4).N == c.N);
    CHECK_THROWS_AS(apply_axis(c, "K_users", 3), std::invalid_argument);
    SweepSpec s;
    s.axis = "bogus";
    s.values = {1};
    s.algorithms = {AlgorithmSpec::parse("BCD")};
    CHECK_THROWS(s.validate());
}

TEST_CASE("sweep spec from a config file")
{
    const auto f = ConfigFile::parse("sweep_axis = N\nsweep_values = 4, 8\nsweep_algorithms = BCD, NoIRS , Quantized-4\n"
                                     "trials = 3\nseed = 9\n");
    const SweepSpec s = SweepSpec::from_config(f);
    CHECK(s.axis == "N");
    CHECK(s.values == std::vector<double>{4, 8});
    REQUIRE(s.algorithms.size() == 3);
    CHECK(s.algorithms[2].levels == 4);
    CHECK(s.trials == 3);
    CHECK(s.seed == 9);
}

TEST_CASE("trials are reproducible and direct channels do not depend on N")
{
    const ScenarioConfig c = desk();
    const TrialInput a = make_trial(c, 5, 2), b = make_trial(c, 5, 2);
    CHECK(a.truth.ch.h_d[0].isApprox(b.truth.ch.h_d[0]));
    CHECK(a.init.isApprox(b.init));
    const TrialInput d = make_trial(apply_axis(c, "N", 16), 5, 2);
    CHECK(d.truth.ch.h_d[1].isApprox(a.truth.ch.h_d[1]));
    const TrialInput e = make_trial(c, 5, 3);
    CHECK_FALSE(e.truth.ch.h_d[0].isApprox(a.truth.ch.h_d[0]));
}

TEST_CASE("no-IRS benchmark without a direct link is infeasible")
{
    TrialInput in = make_trial(desk(), 1, 0);
    for (auto& h : in.est.ch.h_d) h.setZero();
    const TrialOutcome o = run_benchmark(AlgorithmSpec::parse("NoIRS"), in, SolverSuite{});
    CHECK_FALSE(o.sol.feasible);
    CHECK_FALSE(o.recheck_ok);
    CHECK(o.status == "infeasible");
}

TEST_CASE("benchmarks on one trial")
{
    const TrialInput in = make_trial(desk(), 1, 0);
    const SolverSuite suite;
    const TrialOutcome noirs = run_benchmark(AlgorithmSpec::parse("NoIRS"), in, suite);
    const TrialOutcome rnd = run_benchmark(AlgorithmSpec::parse("RandomRB"), in, suite);
    const TrialOutcome q = run_benchmark(AlgorithmSpec::parse("Quantized-4"), in, suite);
    REQUIRE(noirs.sol.feasible);
    REQUIRE(rnd.sol.feasible);
    REQUIRE(q.sol.feasible);
    CHECK(noirs.recheck_ok);
    CHECK(rnd.recheck_ok);
    CHECK(q.recheck_ok);
    CHECK(noirs.sol.design.upsilon.size() == 0);
    CHECK(rnd.sol.inner_iters == suite.random_draws);
    CHECK(is_unit_modulus(q.sol.design.upsilon));
    CHECK_THROWS_AS(AlgorithmSpec::parse("Quantized-0"), std::invalid_argument);
    const TrialOutcome bad = run_benchmark(AlgorithmSpec{Algorithm::Quantized, 0}, in, suite);
    CHECK(bad.status.rfind("error:", 0) == 0);
}

TEST_CASE("single-point sweep layout")
{
    SweepSpec s;
    s.axis = "N";
    s.values = {4};
    s.algorithms = {AlgorithmSpec::parse("NoIRS")};
    s.trials = 1;
    const auto rows = run_sweep(s, desk(), SolverSuite{}, Execution::Serial);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].trial == 0);
    CHECK(rows[1].trial == -1);
    CHECK(rows[1].objective_dBm == doctest::Approx(rows[0].objective_dBm));
    CHECK(rows[1].median_dBm == doctest::Approx(rows[0].objective_dBm));
    CHECK(aggregates(rows).size() == 1);
    std::ostringstream os;
    write_csv(rows, os);
    std::istringstream is(os.str());
    std::string header, line;
    std::getline(is, header);
    CHECK(header.rfind("axis,value,algorithm,trial,seed,objective_dBm,feasible", 0) == 0);
    int n = 0;
    while (std::getline(is, line)) ++n;
    CHECK(n == 2);
}

TEST_CASE("serial and parallel sweeps write identical files")
{
    SweepSpec s;
    s.axis = "gamma_dB";
    s.values = {0, 5};
    s.algorithms = {AlgorithmSpec::parse("NoIRS"), AlgorithmSpec::parse("RandomRB")};
    s.trials = 3;
    s.seed = 4;
    const SolverSuite suite;
    std::ostringstream a, b, c;
    write_csv(run_sweep(s, desk(), suite, Execution::Serial), a, false);
    write_csv(run_sweep(s, desk(), suite, Execution::Parallel), b, false);
    write_csv(run_sweep(s, desk(), suite, Execution::Parallel), c, false);
    CHECK(a.str() == b.str());
    CHECK(b.str() == c.str());
}

TEST_CASE("validation of one trial")
{
    ScenarioConfig c = desk();
    c = apply_axis(c, "eps2", 1e-3);
    const ValidationRow r = validate_trial(c, SolverSuite{}, 1, 0, 2000, Execution::Serial);
    CHECK(r.status == "ok");
    CHECK(r.robust.feasible);
    CHECK(r.robust_within);
    std::ostringstream os;
    write_validation_csv({r}, os);
    CHECK(os.str().find('\n') != std::string::npos);
}
