#pragma once

#include "forms.hpp"
#include "solver.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace chainform {

struct RunConfig {
    std::string calibration = "benchmark";
    Calibration cal = default_calibration();
    int nodes = 200;
    SolverOptions solver;

    std::string model = "dynamic"; // static | dynamic | links
    std::string variant = "baseline";
    double xi = 0.0;
    std::uint64_t seed = 20240601ULL;
    std::string out_dir;

    std::string sweep_param = "lambda";
    std::string sweep_target = "equilibrium"; // equilibrium | standard
    std::vector<std::string> sweep_values;

    int sim_finals = 10000;
    int sim_T = 2000;
    int sim_burn_in = 200;
    int sim_batches = 20;

    double scan_step = 0.01;
    int scan_n_min = 2, scan_n_max = 10;
    int scan_bins = 40;

    int standard_points = 24;
    double standard_lower_frac = 0.25;

    double labor_share = -1.0; // <0: take it from the solved equilibrium
    int recovery_months = 36;
};

namespace detail {

inline std::string trim(const std::string& s)
{
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline double to_double(const std::string& key, const std::string& v)
{
    size_t pos = 0;
    double x = 0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    require(pos == v.size() && !v.empty(), "type mismatch for " + key + ": expected a number, got '" + v + "'");
    return x;
}

inline long long to_int(const std::string& key, const std::string& v)
{
    size_t pos = 0;
    long long x = 0;
    try {
        x = std::stoll(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    require(pos == v.size() && !v.empty(), "type mismatch for " + key + ": expected an integer, got '" + v + "'");
    return x;
}

inline bool to_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ValidationError("type mismatch for " + key + ": expected a boolean, got '" + v + "'");
}

inline std::vector<std::string> split_list(const std::string& v)
{
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

} // namespace detail

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Bare keys are shorthand for model.<key>.
inline std::string canonical_key(const std::string& k)
{
    if (k.find('.') != std::string::npos) return k;
    if (k == "N") return "model.n_inputs";
    return "model." + k;
}

inline KeyValues parse_key_values(std::istream& in, const std::string& source)
{
    KeyValues kv;
    std::string line;
    int ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        require(eq != std::string::npos, source + ":" + std::to_string(ln) + ": expected key=value");
        kv.emplace_back(canonical_key(detail::trim(line.substr(0, eq))), detail::trim(line.substr(eq + 1)));
    }
    return kv;
}

inline KeyValues parse_assignment(const std::string& a)
{
    std::istringstream in(a);
    return parse_key_values(in, "argument");
}

inline void apply_key(RunConfig& c, const std::string& key, const std::string& v)
{
    using namespace detail;
    auto& p = c.cal.params;
    auto& k = c.cal.coefs;
    auto& d = c.cal.dist;
    if (key == "run.calibration") {
        require(v == "benchmark" || v == "resilience", "run.calibration must be benchmark or resilience");
        c.calibration = v;
    } else if (key == "model.lambda") p.lambda = to_double(key, v);
    else if (key == "model.delta") p.delta = to_double(key, v);
    else if (key == "model.beta") p.beta = to_double(key, v);
    else if (key == "model.n_inputs") p.n_inputs = int(to_int(key, v));
    else if (key == "model.n_real") p.n_real = to_double(key, v);
    else if (key == "model.psi") p.psi = to_double(key, v);
    else if (key == "model.m") p.m = to_double(key, v);
    else if (key == "model.z_low") p.z_low = to_double(key, v);
    else if (key == "model.z_high") p.z_high = to_double(key, v);
    else if (key == "forms.a0") k.a0 = to_double(key, v);
    else if (key == "forms.a1") k.a1 = to_double(key, v);
    else if (key == "forms.alpha") k.alpha = to_double(key, v);
    else if (key == "forms.kappa") k.kappa = to_double(key, v);
    else if (key == "forms.q0") k.q0 = to_double(key, v);
    else if (key == "forms.c0") k.c0 = to_double(key, v);
    else if (key == "dist.kind") {
        require(v == "uniform" || v == "beta", "dist.kind must be uniform or beta");
        d.kind = v == "uniform" ? DistKind::Uniform : DistKind::ShiftedBeta;
    } else if (key == "dist.alpha") d.alpha = to_double(key, v);
    else if (key == "dist.beta") d.beta = to_double(key, v);
    else if (key == "grid.nodes") c.nodes = int(to_int(key, v));
    else if (key == "solver.damping") c.solver.damping = to_double(key, v);
    else if (key == "solver.tol") c.solver.tol = to_double(key, v);
    else if (key == "solver.max_iter") c.solver.max_iter = int(to_int(key, v));
    else if (key == "solver.multistart") c.solver.multistart = to_bool(key, v);
    else if (key == "solver.scan_points") c.solver.scan_points = int(to_int(key, v));
    else if (key == "run.model") {
        require(v == "static" || v == "dynamic" || v == "links", "run.model must be static, dynamic or links");
        c.model = v;
    } else if (key == "run.variant") {
        require(v == "baseline" || v == "noncontingent" || v == "bargaining",
                "run.variant must be baseline, noncontingent or bargaining");
        c.variant = v;
    } else if (key == "run.xi") c.xi = to_double(key, v);
    else if (key == "run.seed") c.seed = std::uint64_t(to_int(key, v));
    else if (key == "run.out_dir") c.out_dir = v;
    else if (key == "sweep.param") c.sweep_param = v;
    else if (key == "sweep.target") {
        require(v == "equilibrium" || v == "standard", "sweep.target must be equilibrium or standard");
        c.sweep_target = v;
    } else if (key == "sweep.values") c.sweep_values = split_list(v);
    else if (key == "sim.n_finals") c.sim_finals = int(to_int(key, v));
    else if (key == "sim.T") c.sim_T = int(to_int(key, v));
    else if (key == "sim.burn_in") c.sim_burn_in = int(to_int(key, v));
    else if (key == "sim.batches") c.sim_batches = int(to_int(key, v));
    else if (key == "scan.step") c.scan_step = to_double(key, v);
    else if (key == "scan.n_min") c.scan_n_min = int(to_int(key, v));
    else if (key == "scan.n_max") c.scan_n_max = int(to_int(key, v));
    else if (key == "scan.bins") c.scan_bins = int(to_int(key, v));
    else if (key == "standard.points") c.standard_points = int(to_int(key, v));
    else if (key == "standard.lower_frac") c.standard_lower_frac = to_double(key, v);
    else if (key == "complexity.labor_share") c.labor_share = to_double(key, v);
    else if (key == "plot.recovery_months") c.recovery_months = int(to_int(key, v));
    else throw ValidationError("unknown key: " + key);
}

inline void validate(const RunConfig& c)
{
    c.cal.params.validate();
    require(c.cal.dist.alpha > 0 && c.cal.dist.beta > 0, "dist shape parameters must be > 0");
    require(c.nodes >= 8, "grid.nodes must be >= 8");
    require(c.solver.damping > 0 && c.solver.damping <= 1, "solver.damping must be in (0,1]");
    require(c.solver.tol > 0, "solver.tol must be > 0");
    require(c.solver.max_iter >= 1, "solver.max_iter must be >= 1");
    require(c.solver.scan_points >= 4, "solver.scan_points must be >= 4");
    require(c.xi >= 0 && c.xi < 1, "run.xi must be in [0,1)");
    require(c.sim_finals >= 1000, "sim.n_finals must be >= 1000");
    require(c.sim_burn_in >= 0 && c.sim_burn_in < c.sim_T, "sim.burn_in must be in [0, sim.T)");
    require(c.sim_batches >= 2, "sim.batches must be >= 2");
    require(c.scan_step > 0 && c.scan_step < 0.5, "scan.step must be in (0,0.5)");
    require(c.scan_n_min >= 2 && c.scan_n_max <= 10 && c.scan_n_min <= c.scan_n_max, "scan N range must be within 2..10");
    require(c.scan_bins >= 1, "scan.bins must be >= 1");
    require(c.standard_points >= 3, "standard.points must be >= 3");
    require(c.standard_lower_frac > 0 && c.standard_lower_frac <= 1, "standard.lower_frac must be in (0,1]");
    require(c.labor_share < 1, "complexity.labor_share must be < 1");
    require(c.recovery_months >= 1, "plot.recovery_months must be >= 1");
}

// defaults < file < flags; the calibration preset is chosen first from the merged run.calibration.
inline RunConfig resolve_config(const KeyValues& file_kv, const KeyValues& flag_kv)
{
    KeyValues all = file_kv;
    all.insert(all.end(), flag_kv.begin(), flag_kv.end());
    RunConfig c;
    for (const auto& [k, v] : all)
        if (k == "run.calibration") apply_key(c, k, v);
    c.cal = c.calibration == "resilience" ? resilience_calibration() : default_calibration();
    if (c.calibration == "resilience") c.model = "links";
    for (const auto& [k, v] : all) apply_key(c, k, v);
    validate(c);
    return c;
}

inline KeyValues read_config_file(const std::string& path)
{
    std::ifstream in(path);
    require(bool(in), "cannot read config file " + path);
    return parse_key_values(in, path);
}

inline std::string fmt_num(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Fully resolved configuration as key=value pairs (round-trips through resolve_config).
inline KeyValues resolved_keys(const RunConfig& c)
{
    const auto& p = c.cal.params;
    const auto& k = c.cal.coefs;
    const auto& d = c.cal.dist;
    auto join = [](const std::vector<std::string>& v) {
        std::string s;
        for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
        return s;
    };
    return {
        {"run.calibration", c.calibration},
        {"model.lambda", fmt_num(p.lambda)},
        {"model.delta", fmt_num(p.delta)},
        {"model.beta", fmt_num(p.beta)},
        {"model.n_inputs", std::to_string(p.n_inputs)},
        {"model.n_real", fmt_num(p.n_real)},
        {"model.psi", fmt_num(p.psi)},
        {"model.m", fmt_num(p.m)},
        {"model.z_low", fmt_num(p.z_low)},
        {"model.z_high", fmt_num(p.z_high)},
        {"forms.a0", fmt_num(k.a0)},
        {"forms.a1", fmt_num(k.a1)},
        {"forms.alpha", fmt_num(k.alpha)},
        {"forms.kappa", fmt_num(k.kappa)},
        {"forms.q0", fmt_num(k.q0)},
        {"forms.c0", fmt_num(k.c0)},
        {"dist.kind", d.kind == DistKind::Uniform ? "uniform" : "beta"},
        {"dist.alpha", fmt_num(d.alpha)},
        {"dist.beta", fmt_num(d.beta)},
        {"grid.nodes", std::to_string(c.nodes)},
        {"solver.damping", fmt_num(c.solver.damping)},
        {"solver.tol", fmt_num(c.solver.tol)},
        {"solver.max_iter", std::to_string(c.solver.max_iter)},
        {"solver.multistart", c.solver.multistart ? "true" : "false"},
        {"solver.scan_points", std::to_string(c.solver.scan_points)},
        {"run.model", c.model},
        {"run.variant", c.variant},
        {"run.xi", fmt_num(c.xi)},
        {"run.seed", std::to_string(c.seed)},
        {"run.out_dir", c.out_dir},
        {"sweep.param", c.sweep_param},
        {"sweep.target", c.sweep_target},
        {"sweep.values", join(c.sweep_values)},
        {"sim.n_finals", std::to_string(c.sim_finals)},
        {"sim.T", std::to_string(c.sim_T)},
        {"sim.burn_in", std::to_string(c.sim_burn_in)},
        {"sim.batches", std::to_string(c.sim_batches)},
        {"scan.step", fmt_num(c.scan_step)},
        {"scan.n_min", std::to_string(c.scan_n_min)},
        {"scan.n_max", std::to_string(c.scan_n_max)},
        {"scan.bins", std::to_string(c.scan_bins)},
        {"standard.points", std::to_string(c.standard_points)},
        {"standard.lower_frac", fmt_num(c.standard_lower_frac)},
        {"complexity.labor_share", fmt_num(c.labor_share)},
        {"plot.recovery_months", std::to_string(c.recovery_months)},
    };
}

} // namespace chainform
