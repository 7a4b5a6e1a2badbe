// SPDX-License-Identifier: Apache-2.0
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "aircomp/experiment.hpp"
#include "config_json.hpp"

namespace aircomp {

using nlohmann::json;

const char* to_string(SweepVariable v) {
    switch (v) {
        case SweepVariable::N: return "N";
        case SweepVariable::M: return "M";
        case SweepVariable::K: return "K";
        case SweepVariable::convergence: return "convergence";
    }
    return "unknown";
}

std::optional<SweepVariable> parse_sweep_variable(const std::string& s) {
    for (SweepVariable v : {SweepVariable::N, SweepVariable::M, SweepVariable::K, SweepVariable::convergence})
        if (s == to_string(v)) return v;
    return std::nullopt;
}

Scenario ExperimentConfig::scenario_at(int value) const {
    Scenario s = scenario;
    switch (sweep.variable) {
        case SweepVariable::N: s.N = value; break;
        case SweepVariable::M: s.M = value; break;
        case SweepVariable::K: s.K = value; break;
        case SweepVariable::convergence: break;
    }
    return s;
}

std::vector<int> ExperimentConfig::sweep_points() const {
    if (sweep.variable == SweepVariable::convergence) return {0};
    return sweep.values;
}

void ExperimentConfig::validate() const {
    if (name.empty()) throw InvalidInput("config: name must not be empty");
    for (char c : name)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.'))
            throw InvalidInput("config: name may only contain letters, digits, '_', '-', '.'");
    if (trials < 1) throw InvalidInput("config: trials must be >= 1");
    if (algorithms.empty()) throw InvalidInput("config: algorithms must not be empty");
    if (std::set<Algorithm>(algorithms.begin(), algorithms.end()).size() != algorithms.size())
        throw InvalidInput("config: duplicate algorithm");
    if (sweep.variable != SweepVariable::convergence) {
        if (sweep.values.empty()) throw InvalidInput("config: sweep values must not be empty");
        if (std::set<int>(sweep.values.begin(), sweep.values.end()).size() != sweep.values.size())
            throw InvalidInput("config: duplicate sweep value");
    } else if (!sweep.values.empty()) {
        throw InvalidInput("config: a convergence run takes no sweep values");
    }
    for (int v : sweep_points()) scenario_at(v).validate();
    params.validate();
    const auto& s = params.dc.solver;
    if (!(s.tol_abs > 0) || !(s.tol_rel >= 0)) throw InvalidInput("config: solver tolerances must be positive");
    if (s.max_iters < 1) throw InvalidInput("config: solver max_iters must be >= 1");
    if (!(s.penalty > 0)) throw InvalidInput("config: solver penalty must be > 0");
    if (!(s.relaxation > 0 && s.relaxation < 2)) throw InvalidInput("config: solver relaxation must be in (0, 2)");
    if (s.stagnation_window < 1) throw InvalidInput("config: solver stagnation_window must be >= 1");
}

namespace {

// Strict object reader: every key must be consumed.
class Reader {
public:
    Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw InvalidInput(where_ + ": expected an object");
    }

    template <typename T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end()) return;
        try {
            if constexpr (std::is_same_v<T, bool>) {
                if (!it->is_boolean()) throw InvalidInput("");
            } else if constexpr (std::is_integral_v<T>) {
                if (!it->is_number_integer()) throw InvalidInput("");
                if constexpr (std::is_unsigned_v<T>)
                    if (it->is_number_integer() && !it->is_number_unsigned()) throw InvalidInput("");
            } else if constexpr (std::is_floating_point_v<T>) {
                if (!it->is_number()) throw InvalidInput("");
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!it->is_string()) throw InvalidInput("");
            }
            out = it->template get<T>();
        } catch (const std::exception&) {
            throw InvalidInput(where_ + "." + key + ": wrong type");
        }
    }

    const json* child(const char* key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw InvalidInput(where_ + ": unknown key '" + it.key() + "'");
    }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

Point3 read_point(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3) throw InvalidInput(where + ": expected [x, y, z]");
    Point3 p;
    for (int i = 0; i < 3; ++i) {
        if (!j[static_cast<std::size_t>(i)].is_number()) throw InvalidInput(where + ": expected numbers");
        p(i) = j[static_cast<std::size_t>(i)].get<double>();
    }
    return p;
}

void read_scenario(const json& j, Scenario& s) {
    Reader r(j, "scenario");
    if (const json* p = r.child("ap_position")) s.ap_position = read_point(*p, "scenario.ap_position");
    if (const json* p = r.child("irs_position")) s.irs_position = read_point(*p, "scenario.irs_position");
    if (const json* p = r.child("user_region")) {
        Reader rr(*p, "scenario.user_region");
        rr.get("x_min", s.user_region.x_min);
        rr.get("x_max", s.user_region.x_max);
        rr.get("y_min", s.user_region.y_min);
        rr.get("y_max", s.user_region.y_max);
        rr.finish();
    }
    r.get("K", s.K);
    r.get("N", s.N);
    r.get("M", s.M);
    r.get("T0_db", s.T0_db);
    r.get("d0", s.d0);
    r.get("alpha_direct", s.alpha_direct);
    r.get("alpha_ap_irs", s.alpha_ap_irs);
    r.get("alpha_irs_user", s.alpha_irs_user);
    r.get("P0", s.P0);
    r.get("sigma2", s.sigma2);
    r.finish();
}

json point_json(const Point3& p) { return json::array({p(0), p(1), p(2)}); }

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidInput(std::string("config: malformed JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    Reader r(j, "config");
    r.get("name", cfg.name);
    if (const json* s = r.child("scenario")) read_scenario(*s, cfg.scenario);
    if (const json* s = r.child("sweep")) {
        Reader rs(*s, "sweep");
        std::string var = "convergence";
        rs.get("variable", var);
        const auto v = parse_sweep_variable(var);
        if (!v) throw InvalidInput("sweep.variable: expected one of N, M, K, convergence");
        cfg.sweep.variable = *v;
        if (const json* vals = rs.child("values")) {
            if (!vals->is_array()) throw InvalidInput("sweep.values: expected an array of integers");
            for (const auto& x : *vals) {
                if (!x.is_number_integer()) throw InvalidInput("sweep.values: expected an array of integers");
                cfg.sweep.values.push_back(x.get<int>());
            }
        }
        rs.finish();
    }
    if (const json* a = r.child("algorithms")) {
        if (!a->is_array()) throw InvalidInput("algorithms: expected an array of names");
        cfg.algorithms.clear();
        for (const auto& x : *a) {
            const auto alg = x.is_string() ? parse_algorithm(x.get<std::string>()) : std::nullopt;
            if (!alg) throw InvalidInput("algorithms: unknown algorithm " + x.dump());
            cfg.algorithms.push_back(*alg);
        }
    }
    r.get("trials", cfg.trials);
    r.get("base_seed", cfg.base_seed);
    r.get("record_traces", cfg.record_traces);
    r.get("output_dir", cfg.output_dir);
    if (const json* p = r.child("algorithm_params")) {
        Reader rp(*p, "algorithm_params");
        rp.get("eps", cfg.params.eps);
        rp.get("max_alt_iters", cfg.params.max_alt_iters);
        rp.get("sdr_randomizations", cfg.params.sdr_randomizations);
        rp.finish();
    }
    if (const json* p = r.child("dc")) {
        Reader rp(*p, "dc");
        rp.get("rho", cfg.params.dc.rho);
        rp.get("eps_dc", cfg.params.dc.eps_dc);
        rp.get("max_dc_iters", cfg.params.dc.max_dc_iters);
        rp.get("feas_tol", cfg.params.dc.feas_tol);
        rp.get("stagnation_iters", cfg.params.dc.stagnation_iters);
        rp.finish();
    }
    if (const json* p = r.child("solver")) {
        auto& s = cfg.params.dc.solver;
        Reader rp(*p, "solver");
        rp.get("tol_abs", s.tol_abs);
        rp.get("tol_rel", s.tol_rel);
        rp.get("max_iters", s.max_iters);
        rp.get("penalty", s.penalty);
        rp.get("adaptive_penalty", s.adaptive_penalty);
        rp.get("relaxation", s.relaxation);
        rp.get("stagnation_window", s.stagnation_window);
        rp.finish();
    }
    r.finish();
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

namespace detail {

json config_json(const ExperimentConfig& cfg) {
    const Scenario& s = cfg.scenario;
    json algs = json::array();
    for (Algorithm a : cfg.algorithms) algs.push_back(to_string(a));
    json sweep = {{"variable", to_string(cfg.sweep.variable)}, {"values", cfg.sweep.values}};
    const auto& sv = cfg.params.dc.solver;
    return json{
        {"name", cfg.name},
        {"scenario",
         {{"ap_position", point_json(s.ap_position)},
          {"irs_position", point_json(s.irs_position)},
          {"user_region",
           {{"x_min", s.user_region.x_min},
            {"x_max", s.user_region.x_max},
            {"y_min", s.user_region.y_min},
            {"y_max", s.user_region.y_max}}},
          {"K", s.K},
          {"N", s.N},
          {"M", s.M},
          {"T0_db", s.T0_db},
          {"d0", s.d0},
          {"alpha_direct", s.alpha_direct},
          {"alpha_ap_irs", s.alpha_ap_irs},
          {"alpha_irs_user", s.alpha_irs_user},
          {"P0", s.P0},
          {"sigma2", s.sigma2}}},
        {"sweep", sweep},
        {"algorithms", algs},
        {"trials", cfg.trials},
        {"base_seed", cfg.base_seed},
        {"record_traces", cfg.record_traces},
        {"output_dir", cfg.output_dir},
        {"algorithm_params",
         {{"eps", cfg.params.eps},
          {"max_alt_iters", cfg.params.max_alt_iters},
          {"sdr_randomizations", cfg.params.sdr_randomizations}}},
        {"dc",
         {{"rho", cfg.params.dc.rho},
          {"eps_dc", cfg.params.dc.eps_dc},
          {"max_dc_iters", cfg.params.dc.max_dc_iters},
          {"feas_tol", cfg.params.dc.feas_tol},
          {"stagnation_iters", cfg.params.dc.stagnation_iters}}},
        {"solver",
         {{"tol_abs", sv.tol_abs},
          {"tol_rel", sv.tol_rel},
          {"max_iters", sv.max_iters},
          {"penalty", sv.penalty},
          {"adaptive_penalty", sv.adaptive_penalty},
          {"relaxation", sv.relaxation},
          {"stagnation_window", sv.stagnation_window}}},
    };
}

}  // namespace detail

std::string config_to_json(const ExperimentConfig& cfg, int indent) { return detail::config_json(cfg).dump(indent); }

std::vector<std::string> preset_names() { return {"fig3a", "fig3b", "fig3c", "fig3d"}; }

ExperimentConfig preset(const std::string& figure) {
    ExperimentConfig cfg;
    cfg.name = figure;
    cfg.trials = 100;
    if (figure == "fig3a") {
        cfg.scenario.K = 16;
        cfg.scenario.M = 30;
        cfg.scenario.N = 20;
        cfg.sweep = {SweepVariable::convergence, {}};
        cfg.algorithms = {Algorithm::alternating_dc, Algorithm::alternating_sdr};
        cfg.trials = 1;
        cfg.record_traces = true;
    } else if (figure == "fig3b") {
        cfg.scenario.M = 15;
        cfg.scenario.K = 8;
        cfg.sweep = {SweepVariable::N, {4, 6, 8, 10, 12}};
        cfg.algorithms = {Algorithm::alternating_dc, Algorithm::alternating_sdr, Algorithm::random_phase};
    } else if (figure == "fig3c") {
        cfg.scenario.N = 10;
        cfg.scenario.K = 8;
        cfg.sweep = {SweepVariable::M, {5, 10, 15, 20, 25, 30}};
        cfg.algorithms = {Algorithm::alternating_dc, Algorithm::alternating_sdr, Algorithm::random_phase};
    } else if (figure == "fig3d") {
        cfg.scenario.N = 8;
        cfg.scenario.M = 15;
        cfg.sweep = {SweepVariable::K, {2, 4, 6, 8, 10, 12}};
        cfg.algorithms = {Algorithm::alternating_dc, Algorithm::random_phase, Algorithm::no_irs};
    } else {
        throw InvalidInput("unknown preset '" + figure + "' (expected fig3a, fig3b, fig3c or fig3d)");
    }
    cfg.output_dir = "results";
    return cfg;
}

}  // namespace aircomp
