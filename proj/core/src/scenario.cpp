#include "gfmlab/scenario.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "gfmlab/errors.hpp"

namespace gfm {

using nlohmann::json;

std::string_view to_string(ControllerKind kind) {
    return kind == ControllerKind::pf_gfm ? "pf_gfm" : "hybrid_fp_qv";
}

ControllerKind controller_from_string(std::string_view name) {
    if (name == "pf_gfm") {
        return ControllerKind::pf_gfm;
    }
    if (name == "hybrid_fp_qv") {
        return ControllerKind::hybrid_fp_qv;
    }
    throw InvalidScenario("unknown controller '" + std::string(name) + "' (expected pf_gfm or hybrid_fp_qv)");
}

void Scenario::sync_t_end() {
    if (t_end_auto) {
        t_end = profile.end_time() + kSettleAfterEvent;
    }
}

std::size_t Scenario::output_decimation() const {
    return static_cast<std::size_t>(std::max(1.0, std::round(output_interval / dt)));
}

void Scenario::validate() const {
    if (!(dt > 0.0) || !(dt <= 1e-3)) {
        throw InvalidScenario("scenario '" + name + "': dt must lie in (0, 1e-3] s");
    }
    if (!(t_end > 0.0) || !std::isfinite(t_end)) {
        throw InvalidScenario("scenario '" + name + "': t_end must be > 0");
    }
    if (!(pre_roll >= 0.0) || !std::isfinite(pre_roll)) {
        throw InvalidScenario("scenario '" + name + "': pre_roll must be >= 0");
    }
    if (!(initial_soc >= 0.0 && initial_soc <= 1.0)) {
        throw InvalidScenario("scenario '" + name + "': initial_soc must lie in [0, 1]");
    }
    if (!(output_interval >= dt) || !std::isfinite(output_interval)) {
        throw InvalidScenario("scenario '" + name + "': output_interval must be >= dt");
    }
    if (!(v_filter_tau >= 0.0) || !std::isfinite(v_filter_tau)) {
        throw InvalidScenario("scenario '" + name + "': v_filter_tau must be >= 0");
    }
    if (!std::isfinite(p_ref) || !std::isfinite(q_ref)) {
        throw InvalidScenario("scenario '" + name + "': references must be finite");
    }
    if (power_limits && !(power_limits->p_min <= power_limits->p_max)) {
        throw InvalidScenario("scenario '" + name + "': power_limits needs p_min <= p_max");
    }
    if (p_step && (!std::isfinite(p_step->time) || !std::isfinite(p_step->delta))) {
        throw InvalidScenario("scenario '" + name + "': p_step must be finite");
    }
    circuit.validate();
    pll.validate();
    inner.validate();
    pf.validate();
    hybrid.validate();
    ess.validate();
}

Scenario table1_scenario() {
    Scenario s;
    s.name = "table1";
    s.circuit = CircuitParams::table1(1.2);
    s.inner.x_ff = s.circuit.x_converter();
    s.sync_t_end();
    return s;
}

namespace {

Scenario make_builtin(std::string name, ControllerKind kind, double p_ref, double soc, double rocof, double f_final) {
    Scenario s = table1_scenario();
    s.name = std::move(name);
    s.controller = kind;
    s.p_ref = p_ref;
    s.initial_soc = soc;
    s.profile = FrequencyProfile::ramp_to(50.0, 1.0, rocof, f_final);
    s.sync_t_end();
    return s;
}

std::vector<BuiltinScenario> build_builtins() {
    std::vector<BuiltinScenario> out;

    out.push_back({"fig7", "P-f GFM near the power limit, -1 Hz/s to 48 Hz (loses synchronism)",
                   make_builtin("fig7", ControllerKind::pf_gfm, 0.9, 0.5, -1.0, 48.0), {}});

    Scenario fig8 = make_builtin("fig8", ControllerKind::pf_gfm, 0.0, 0.9, 1.0, 52.0);
    fig8.inner.i_lim = 0.012;
    out.push_back({"fig8", "P-f GFM at SoC 0.9 with a 0.012 p.u. current limit, +1 Hz/s to 52 Hz", fig8, {}});

    // A 5 p.u.s store cannot supply the post-event power for the whole run, so
    // fig9 and fig10a start full with the SoC policy off; the power response
    // is what they exercise.
    Scenario fig9 = make_builtin("fig9", ControllerKind::hybrid_fp_qv, 0.5, 1.0, -1.0, 48.0);
    fig9.soc_policy = false;
    out.push_back({"fig9", "hybrid f-P & Q-V, p_ref 0.5, -1 Hz/s to 48 Hz", fig9, {}});

    Scenario fig10a = make_builtin("fig10a", ControllerKind::hybrid_fp_qv, 0.9, 1.0, -1.0, 48.0);
    fig10a.soc_policy = false;
    fig10a.power_limits = PowerLimits{-1.0, 1.0};
    out.push_back({"fig10a", "hybrid, p_ref 0.9, power window [-1, 1], RoCoF family to 48 Hz", fig10a,
                   {-0.5, -1.0, -2.0}});

    Scenario fig10b = make_builtin("fig10b", ControllerKind::hybrid_fp_qv, 0.0, 0.9, 1.0, 52.0);
    fig10b.power_limits = PowerLimits{0.0, 0.0};
    out.push_back({"fig10b", "hybrid, p_ref 0 at SoC 0.9, power window [0, 0], RoCoF family to 52 Hz", fig10b,
                   {0.5, 1.0, 2.0}});
    return out;
}

}  // namespace

const std::vector<BuiltinScenario>& builtin_scenarios() {
    static const std::vector<BuiltinScenario> all = build_builtins();
    return all;
}

const BuiltinScenario& builtin_scenario(std::string_view name) {
    for (const auto& b : builtin_scenarios()) {
        if (b.name == name) {
            return b;
        }
    }
    std::string known;
    for (const auto& b : builtin_scenarios()) {
        known += (known.empty() ? "" : ", ") + b.name;
    }
    throw std::out_of_range("unknown scenario '" + std::string(name) + "'; available: " + known);
}

// ---------------------------------------------------------------------------
// JSON configuration
// ---------------------------------------------------------------------------

namespace {

/// Binds config keys of one JSON object to numeric fields.
class FieldTable {
public:
    FieldTable& add(std::string key, double& field) {
        fields_.emplace(std::move(key), &field);
        return *this;
    }

    void read(const json& obj, const std::string& where, const std::set<std::string>& extra = {}) const {
        if (!obj.is_object()) {
            throw InvalidScenario("config: '" + where + "' must be an object");
        }
        for (const auto& [key, value] : obj.items()) {
            if (extra.count(key) != 0) {
                continue;
            }
            const auto it = fields_.find(key);
            if (it == fields_.end()) {
                throw InvalidScenario("config: unknown key '" + where + (where.empty() ? "" : ".") + key + "'");
            }
            if (!value.is_number()) {
                throw InvalidScenario("config: '" + key + "' must be a number");
            }
            *it->second = value.get<double>();
        }
    }

    void write(json& obj) const {
        for (const auto& [key, ptr] : fields_) {
            obj[key] = *ptr;
        }
    }

private:
    std::map<std::string, double*> fields_;
};

FieldTable circuit_fields(CircuitParams& c) {
    FieldTable t;
    t.add("r_f", c.r_f).add("l_f", c.l_f).add("r_l", c.r_l).add("x_l", c.x_l).add("r_g", c.r_g).add("x_g", c.x_g).add(
        "u0", c.u0);
    return t;
}

FieldTable pll_fields(PllParams& p) {
    FieldTable t;
    t.add("kp", p.kp).add("ki", p.ki);
    return t;
}

FieldTable inner_fields(InnerParams& p) {
    FieldTable t;
    t.add("kp_i", p.kp_i).add("ki_i", p.ki_i).add("r_v", p.r_v).add("x_v", p.x_v).add("i_lim", p.i_lim).add(
        "x_ff", p.x_ff).add("e_windup", p.e_windup);
    return t;
}

FieldTable pf_fields(GfmPfParams& p) {
    FieldTable t;
    t.add("h", p.h).add("d", p.d);
    return t;
}

FieldTable hybrid_fields(HybridParams& p) {
    FieldTable t;
    t.add("h", p.h).add("d", p.d).add("kp_p", p.kp_p).add("ki_p", p.ki_p).add("nq", p.nq).add("tau_d", p.tau_d).add(
        "tau_f", p.tau_f).add(
        "delta_cmd_limit", p.delta_cmd_limit).add("u0", p.u0);
    return t;
}

FieldTable ess_fields(EssParams& p) {
    FieldTable t;
    t.add("e_cap", p.e_cap).add("soc_high", p.soc_high).add("soc_low", p.soc_low).add("p_rating", p.p_rating).add(
        "hysteresis_band", p.hysteresis_band);
    return t;
}

FieldTable top_fields(Scenario& s) {
    FieldTable t;
    t.add("p_ref", s.p_ref).add("q_ref", s.q_ref).add("initial_soc", s.initial_soc).add("dt", s.dt).add(
        "pre_roll", s.pre_roll).add("output_interval", s.output_interval).add("v_filter_tau", s.v_filter_tau).add(
        "i_lim", s.inner.i_lim);
    return t;
}

double number(const json& v, const std::string& key) {
    if (!v.is_number()) {
        throw InvalidScenario("config: '" + key + "' must be a number");
    }
    return v.get<double>();
}

/// A hold followed by one ramp, as built by FrequencyProfile::ramp_to.
bool is_ramp_form(const FrequencyProfile& p) {
    const auto& seg = p.segments();
    return seg.size() == 2 && seg[0].rocof == 0.0 && seg[1].rocof != 0.0;
}

FrequencyProfile profile_from_json(const json& j) {
    if (!j.is_object()) {
        throw InvalidScenario("config: 'profile' must be an object");
    }
    for (const auto& [key, value] : j.items()) {
        static const std::set<std::string> known = {"f0", "hold", "rocof", "f_final", "segments"};
        if (known.count(key) == 0) {
            throw InvalidScenario("config: unknown key 'profile." + key + "'");
        }
    }
    const double f0 = j.contains("f0") ? number(j["f0"], "profile.f0") : 50.0;
    try {
        if (j.contains("segments")) {
            if (j.contains("rocof") || j.contains("f_final") || j.contains("hold")) {
                throw InvalidScenario("config: profile takes either 'segments' or hold/rocof/f_final");
            }
            std::vector<ProfileSegment> segs;
            for (const auto& seg : j["segments"]) {
                if (!seg.is_array() || seg.size() != 2) {
                    throw InvalidScenario("config: profile segments are [rocof, duration] pairs");
                }
                segs.push_back({number(seg[0], "segment rocof"), number(seg[1], "segment duration")});
            }
            return FrequencyProfile(f0, std::move(segs));
        }
        if (j.contains("rocof") || j.contains("f_final")) {
            if (!j.contains("rocof") || !j.contains("f_final")) {
                throw InvalidScenario("config: profile ramp needs both 'rocof' and 'f_final'");
            }
            const double hold = j.contains("hold") ? number(j["hold"], "profile.hold") : 1.0;
            return FrequencyProfile::ramp_to(f0, hold, number(j["rocof"], "profile.rocof"),
                                             number(j["f_final"], "profile.f_final"));
        }
        return FrequencyProfile::flat(f0);
    } catch (const InvalidScenario&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw InvalidScenario(std::string("config: ") + e.what());
    }
}

json profile_to_json(const FrequencyProfile& p) {
    json j;
    j["f0"] = p.f0();
    if (is_ramp_form(p)) {
        j["hold"] = p.segments()[0].duration;
        j["rocof"] = p.segments()[1].rocof;
        j["f_final"] = p.final_frequency();
    } else {
        j["segments"] = json::array();
        for (const auto& seg : p.segments()) {
            j["segments"].push_back({seg.rocof, seg.duration});
        }
    }
    return j;
}

Scenario base_for(const std::string& name) {
    if (name == "table1") {
        return table1_scenario();
    }
    try {
        return builtin_scenario(name).scenario;
    } catch (const std::out_of_range& e) {
        throw InvalidScenario(std::string("config: base must be 'table1' or a builtin scenario; ") + e.what());
    }
}

Scenario scenario_from_json_value(const json& j) {
    if (!j.is_object()) {
        throw InvalidScenario("config: top level must be an object");
    }
    Scenario s = base_for(j.contains("base") ? j["base"].get<std::string>() : "table1");
    static const std::set<std::string> structured = {
        "base",    "name",  "controller", "profile", "power_limits", "soc_policy", "t_end", "p_step",
        "circuit", "pll",   "inner",      "pf",      "hybrid",       "ess",        "base_values"};
    top_fields(s).read(j, "", structured);

    if (j.contains("name")) {
        s.name = j["name"].get<std::string>();
    }
    if (j.contains("controller")) {
        s.controller = controller_from_string(j["controller"].get<std::string>());
    }
    if (j.contains("profile")) {
        s.profile = profile_from_json(j["profile"]);
    }
    if (j.contains("power_limits")) {
        const json& pl = j["power_limits"];
        if (pl.is_null()) {
            s.power_limits.reset();
        } else if (pl.is_array() && pl.size() == 2) {
            s.power_limits = PowerLimits{number(pl[0], "power_limits[0]"), number(pl[1], "power_limits[1]")};
        } else {
            throw InvalidScenario("config: power_limits must be null or [p_min, p_max]");
        }
    }
    if (j.contains("soc_policy")) {
        if (!j["soc_policy"].is_boolean()) {
            throw InvalidScenario("config: soc_policy must be a boolean");
        }
        s.soc_policy = j["soc_policy"].get<bool>();
    }
    if (j.contains("p_step")) {
        const json& ps = j["p_step"];
        if (ps.is_null()) {
            s.p_step.reset();
        } else {
            ReferenceStep step;
            FieldTable t;
            t.add("time", step.time).add("delta", step.delta);
            t.read(ps, "p_step");
            s.p_step = step;
        }
    }
    bool x_ff_given = false;
    if (j.contains("circuit")) {
        json c = j["circuit"];
        if (c.is_object() && c.contains("scr")) {
            if (c.contains("x_g")) {
                throw InvalidScenario("config: circuit takes either 'scr' or 'x_g'");
            }
            const double scr = number(c["scr"], "circuit.scr");
            if (!(scr > 0.0)) {
                throw InvalidScenario("config: circuit.scr must be > 0");
            }
            s.circuit.x_g = 1.0 / scr;
            c.erase("scr");
        }
        circuit_fields(s.circuit).read(c, "circuit");
    }
    if (j.contains("pll")) {
        pll_fields(s.pll).read(j["pll"], "pll");
    }
    if (j.contains("inner")) {
        inner_fields(s.inner).read(j["inner"], "inner");
        x_ff_given = j["inner"].contains("x_ff");
    }
    if (!x_ff_given && j.contains("circuit")) {
        s.inner.x_ff = s.circuit.x_converter();
    }
    if (j.contains("pf")) {
        pf_fields(s.pf).read(j["pf"], "pf");
    }
    if (j.contains("hybrid")) {
        const json& h = j["hybrid"];
        hybrid_fields(s.hybrid).read(h, "hybrid", {"support_enabled"});
        if (h.contains("support_enabled")) {
            if (!h["support_enabled"].is_boolean()) {
                throw InvalidScenario("config: hybrid.support_enabled must be a boolean");
            }
            s.hybrid.support_enabled = h["support_enabled"].get<bool>();
        }
    }
    if (j.contains("ess")) {
        ess_fields(s.ess).read(j["ess"], "ess");
    }
    if (j.contains("base_values")) {
        double f = s.base.f_base(), sb = s.base.s_base(), vb = s.base.v_base();
        FieldTable t;
        t.add("f_base", f).add("s_base", sb).add("v_base", vb);
        t.read(j["base_values"], "base_values");
        try {
            s.base = PerUnitBase(f, sb, vb);
        } catch (const std::invalid_argument& e) {
            throw InvalidScenario(std::string("config: ") + e.what());
        }
    }
    if (j.contains("t_end")) {
        const json& te = j["t_end"];
        if (te.is_string() && te.get<std::string>() == "auto") {
            s.t_end_auto = true;
        } else {
            s.t_end = number(te, "t_end");
            s.t_end_auto = false;
        }
    }
    s.sync_t_end();
    s.validate();
    return s;
}

}  // namespace

Scenario scenario_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidScenario(std::string("config: malformed JSON: ") + e.what());
    }
    try {
        return scenario_from_json_value(j);
    } catch (const json::exception& e) {
        throw InvalidScenario(std::string("config: ") + e.what());
    }
}

namespace {

json scenario_to_json_value(const Scenario& src) {
    Scenario s = src;
    json j;
    j["base"] = "table1";
    j["name"] = s.name;
    j["controller"] = std::string(to_string(s.controller));
    top_fields(s).write(j);
    j["profile"] = profile_to_json(s.profile);
    j["power_limits"] = s.power_limits ? json::array({s.power_limits->p_min, s.power_limits->p_max}) : json(nullptr);
    j["soc_policy"] = s.soc_policy;
    j["t_end"] = s.t_end_auto ? json("auto") : json(s.t_end);
    if (s.p_step) {
        j["p_step"] = {{"time", s.p_step->time}, {"delta", s.p_step->delta}};
    }
    circuit_fields(s.circuit).write(j["circuit"]);
    pll_fields(s.pll).write(j["pll"]);
    InnerParams inner = s.inner;
    inner_fields(inner).write(j["inner"]);
    j["inner"].erase("i_lim");  // carried at top level
    pf_fields(s.pf).write(j["pf"]);
    hybrid_fields(s.hybrid).write(j["hybrid"]);
    j["hybrid"]["support_enabled"] = s.hybrid.support_enabled;
    ess_fields(s.ess).write(j["ess"]);
    j["base_values"] = {{"f_base", s.base.f_base()}, {"s_base", s.base.s_base()}, {"v_base", s.base.v_base()}};
    return j;
}

}  // namespace

std::string scenario_to_json(const Scenario& s) { return scenario_to_json_value(s).dump(2); }

Scenario with_parameter(const Scenario& s, std::string_view path, double value) {
    json j = scenario_to_json_value(s);
    const std::string key(path);
    if (key == "circuit.scr") {
        j["circuit"].erase("x_g");
        j["circuit"]["scr"] = value;
        return scenario_from_json_value(j);
    }
    if (key == "t_end") {
        j["t_end"] = value;
        return scenario_from_json_value(j);
    }
    if (key.rfind("profile.", 0) == 0 && !is_ramp_form(s.profile)) {
        throw InvalidScenario("parameter '" + key + "' needs a hold-then-ramp profile");
    }
    json::json_pointer ptr("/" + [&] {
        std::string p = key;
        for (char& c : p) {
            if (c == '.') {
                c = '/';
            }
        }
        return p;
    }());
    if (key.rfind("p_step.", 0) == 0 && j["p_step"].is_null()) {
        j["p_step"] = {{"time", 0.0}, {"delta", 0.0}};
    }
    if (j.contains(ptr) && j[ptr].is_boolean()) {
        j[ptr] = value != 0.0;
        return scenario_from_json_value(j);
    }
    if (!j.contains(ptr) || !j[ptr].is_number()) {
        throw InvalidScenario("parameter '" + key + "' does not name a numeric scenario field");
    }
    j[ptr] = value;
    return scenario_from_json_value(j);
}

}  // namespace gfm
