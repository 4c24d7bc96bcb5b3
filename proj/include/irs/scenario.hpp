#pragma once

// Scenario configuration, node placement and the coordination-protocol overhead.
// All powers are linear Watts; dB/dBm keys are converted when a config file is read.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace irs {

struct BlockTooShort : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

double distance(const Point& a, const Point& b);

struct EhParams {
    double a = 2.463;
    double b = 1.635;
    double c = 0.826;
    double saturation() const { return a - b / c; }
};

struct Geometry {
    Point st{0.0, 0.0};
    Point pt{0.0, -20.0};
    Point irs{5.0, 5.0};
    Point sr_center{5.0, 0.0};
    double sr_radius = 2.0;
    Point pr_center{5.0, -20.0};
    double pr_radius = 2.0;
};

struct PathLoss {
    double c0_dB = 30.0; // loss at d0 = 1 m
    double alpha_irs = 2.2;
    double alpha_rx = 3.6;
    double gain(double d, double alpha) const;
};

// CSI error variances, as multiples of the path gain of each link when
// `relative` is set, otherwise absolute.
struct CsiErrors {
    double eps2_hd = 0.0;
    double eps2_Hk = 0.0;
    double eps2_vd = 0.0;
    double eps2_Vu = 0.0;
    double eps2_Gu = 0.0;
    bool relative = true;
};

struct OutageSpec {
    double p = 0.05;        // SINR
    double q = 0.05;        // EH
    double varsigma = 0.05; // FISI
    double varrho = 0.05;   // CIUSI
};

struct ScenarioConfig {
    int M = 8;
    int L = 8;
    int N = 64;
    int K = 2;
    int U = 2;

    std::vector<double> gamma{1.0};   // per SR, a single entry broadcasts
    std::vector<double> r_min;        // optional; overrides gamma when set
    std::vector<double> q_dc{1e-5};   // DC target per SR
    std::vector<double> e_iet{1e-3};  // FISI power threshold per PR
    double e_ciusi = 1e-6;            // CIUSI power threshold
    std::vector<double> sigma2{1e-10};
    std::vector<double> sigma2_c{1e-8};

    EhParams eh;
    Geometry geo;
    PathLoss pathloss;
    double kappa = 3.1622776601683795; // 5 dB, vector channels
    double varpi = 3.1622776601683795; // 5 dB, matrix channels
    double corr = 0.0;                 // exponential correlation coefficient

    int T = 1000;
    std::optional<int> tau_s;
    std::optional<int> discrete_levels;
    double primary_power = 1.0;
    bool risi_effective = false;

    CsiErrors csi;
    OutageSpec outage;
    double omega_R = 0.015;
    double omega_E = 1.0;

    // Throws std::invalid_argument on violated invariants.
    void validate() const;

    double gamma_k(int k, double tau_bar) const;
    double q_dc_k(int k) const { return pick(q_dc, k); }
    double e_iet_u(int u) const { return pick(e_iet, u); }
    double sigma2_k(int k) const { return pick(sigma2, k); }
    double sigma2_c_k(int k) const { return pick(sigma2_c, k); }

    static double pick(const std::vector<double>& v, int i);
};

struct OverheadBudget {
    int tau_h = 0, tau_v = 0, tau_g = 0, tau_u = 0;
    int tau_p = 0, tau_s = 0, tau = 0;
    double tau_bar = 1.0;
};

OverheadBudget compute_overhead(const ScenarioConfig& cfg);

double sinr_threshold_from_rate(double r_min, double tau_bar);

struct Positions {
    Point st, pt, irs;
    std::vector<Point> sr, pr;
};

Positions place_nodes(const ScenarioConfig& cfg, std::mt19937_64& rng);

// Independent stream per (seed, trial, stream id).
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream);

double dbm_to_watt(double dbm);
double watt_to_dbm(double w);
double db_to_linear(double db);

// key = value file, '#' comments, comma-separated lists.
class ConfigFile {
public:
    static ConfigFile load(const std::string& path);
    static ConfigFile parse(const std::string& text);

    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    bool has(const std::string& key) const { return kv_.count(key) != 0; }
    const std::map<std::string, std::string>& entries() const { return kv_; }

    std::optional<std::string> get_string(const std::string& key) const;
    std::optional<double> get_double(const std::string& key) const;
    std::optional<int> get_int(const std::string& key) const;
    std::optional<bool> get_bool(const std::string& key) const;
    std::optional<std::vector<double>> get_list(const std::string& key) const;
    // Looks up key, key_dB and key_dBm, converting to linear (Watts for dBm).
    std::optional<std::vector<double>> get_linear_list(const std::string& key) const;
    std::optional<double> get_linear(const std::string& key) const;

private:
    std::map<std::string, std::string> kv_;
};

// Overrides the defaults with whatever keys the file sets.
ScenarioConfig scenario_from_config(const ConfigFile& file, ScenarioConfig base = {});

} // namespace irs
