#include "irs/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace irs {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v)
{
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (trim(v.substr(pos)).empty()) return d;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("config: key '" + key + "' expects a number, got '" + v + "'");
}

} // namespace

ConfigFile ConfigFile::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

ConfigFile ConfigFile::parse(const std::string& text)
{
    ConfigFile f;
    std::istringstream in(text);
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
        ++no;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(no) + " has no '='");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw std::invalid_argument("config: empty key on line " + std::to_string(no));
        f.kv_[key] = trim(line.substr(eq + 1));
    }
    return f;
}

std::optional<std::string> ConfigFile::get_string(const std::string& key) const
{
    const auto it = kv_.find(key);
    if (it == kv_.end()) return std::nullopt;
    return it->second;
}

std::optional<double> ConfigFile::get_double(const std::string& key) const
{
    const auto s = get_string(key);
    if (!s) return std::nullopt;
    return to_double(key, *s);
}

std::optional<int> ConfigFile::get_int(const std::string& key) const
{
    const auto d = get_double(key);
    if (!d) return std::nullopt;
    if (*d != std::floor(*d)) throw std::invalid_argument("config: key '" + key + "' expects an integer");
    return static_cast<int>(*d);
}

std::optional<bool> ConfigFile::get_bool(const std::string& key) const
{
    const auto s = get_string(key);
    if (!s) return std::nullopt;
    std::string v = *s;
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw std::invalid_argument("config: key '" + key + "' expects a boolean");
}

std::optional<std::vector<double>> ConfigFile::get_list(const std::string& key) const
{
    const auto s = get_string(key);
    if (!s) return std::nullopt;
    std::vector<double> out;
    std::stringstream ss(*s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
    if (out.empty()) throw std::invalid_argument("config: key '" + key + "' is an empty list");
    return out;
}

std::optional<std::vector<double>> ConfigFile::get_linear_list(const std::string& key) const
{
    const bool plain = has(key), db = has(key + "_dB"), dbm = has(key + "_dBm");
    if (plain + db + dbm > 1)
        throw std::invalid_argument("config: '" + key + "' given in more than one unit");
    if (plain) return get_list(key);
    if (db) {
        auto v = *get_list(key + "_dB");
        for (double& x : v) x = db_to_linear(x);
        return v;
    }
    if (dbm) {
        auto v = *get_list(key + "_dBm");
        for (double& x : v) x = dbm_to_watt(x);
        return v;
    }
    return std::nullopt;
}

std::optional<double> ConfigFile::get_linear(const std::string& key) const
{
    const auto v = get_linear_list(key);
    if (!v) return std::nullopt;
    if (v->size() != 1) throw std::invalid_argument("config: '" + key + "' expects a scalar");
    return v->front();
}

ScenarioConfig scenario_from_config(const ConfigFile& f, ScenarioConfig c)
{
    auto set_int = [&](const char* k, int& dst) {
        if (auto v = f.get_int(k)) dst = *v;
    };
    auto set_dbl = [&](const char* k, double& dst) {
        if (auto v = f.get_double(k)) dst = *v;
    };
    auto set_lin = [&](const char* k, double& dst) {
        if (auto v = f.get_linear(k)) dst = *v;
    };
    auto set_list = [&](const char* k, std::vector<double>& dst) {
        if (auto v = f.get_linear_list(k)) dst = *v;
    };
    set_int("M", c.M);
    set_int("L", c.L);
    set_int("N", c.N);
    set_int("K", c.K);
    set_int("U", c.U);
    set_list("gamma", c.gamma);
    if (auto v = f.get_list("r_min")) c.r_min = *v;
    set_list("q_dc", c.q_dc);
    set_list("e_iet", c.e_iet);
    set_lin("e_ciusi", c.e_ciusi);
    set_list("sigma2", c.sigma2);
    set_list("sigma2_c", c.sigma2_c);
    set_dbl("eh_a", c.eh.a);
    set_dbl("eh_b", c.eh.b);
    set_dbl("eh_c", c.eh.c);
    set_dbl("st_x", c.geo.st.x);
    set_dbl("st_y", c.geo.st.y);
    set_dbl("pt_x", c.geo.pt.x);
    set_dbl("pt_y", c.geo.pt.y);
    set_dbl("irs_x", c.geo.irs.x);
    set_dbl("irs_y", c.geo.irs.y);
    set_dbl("sr_x", c.geo.sr_center.x);
    set_dbl("sr_y", c.geo.sr_center.y);
    set_dbl("sr_radius", c.geo.sr_radius);
    set_dbl("pr_x", c.geo.pr_center.x);
    set_dbl("pr_y", c.geo.pr_center.y);
    set_dbl("pr_radius", c.geo.pr_radius);
    set_dbl("c0_dB", c.pathloss.c0_dB);
    set_dbl("alpha_irs", c.pathloss.alpha_irs);
    set_dbl("alpha_rx", c.pathloss.alpha_rx);
    if (auto v = f.get_linear("rician")) c.kappa = c.varpi = *v;
    set_lin("kappa", c.kappa);
    set_lin("varpi", c.varpi);
    set_dbl("corr", c.corr);
    set_int("T", c.T);
    if (auto v = f.get_int("tau_s")) c.tau_s = *v;
    if (auto v = f.get_int("discrete_levels")) c.discrete_levels = *v;
    set_lin("primary_power", c.primary_power);
    if (auto v = f.get_bool("risi_effective")) c.risi_effective = *v;

    if (auto v = f.get_double("eps2"))
        c.csi.eps2_hd = c.csi.eps2_Hk = c.csi.eps2_vd = c.csi.eps2_Vu = c.csi.eps2_Gu = *v;
    set_dbl("eps2_hd", c.csi.eps2_hd);
    set_dbl("eps2_Hk", c.csi.eps2_Hk);
    set_dbl("eps2_vd", c.csi.eps2_vd);
    set_dbl("eps2_Vu", c.csi.eps2_Vu);
    set_dbl("eps2_Gu", c.csi.eps2_Gu);
    if (auto v = f.get_bool("csi_error_relative")) c.csi.relative = *v;
    if (auto v = f.get_double("outage"))
        c.outage.p = c.outage.q = c.outage.varsigma = c.outage.varrho = *v;
    set_dbl("outage_p", c.outage.p);
    set_dbl("outage_q", c.outage.q);
    set_dbl("outage_varsigma", c.outage.varsigma);
    set_dbl("outage_varrho", c.outage.varrho);
    set_dbl("omega_R", c.omega_R);
    set_dbl("omega_E", c.omega_E);
    c.validate();
    return c;
}

} // namespace irs
