#include "epmech/config.hpp"

#include <nlohmann/json.hpp>
#include <cmath>
#include <set>
#include <sstream>

#include "epmech/errors.hpp"

namespace epmech {

using json = nlohmann::json;

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "mode", "preset", "omega_b", "gamma1_over_omegab", "gamma2_over_gamma1",
        "j_over_gamma1", "delta_over_gamma1", "t_max_periods", "samples_per_period",
        "initial_state", "out", "format", "columns", "ep_model",
        "kappa_a_over_omegab",
        "kappa_m_over_omegab", "g_a_over_omegab", "g_m_over_omegab",
        "delta_a_over_omegab", "delta_m_over_omegab", "omega1_over_omegab",
        "omega2_over_omegab"};
    return keys;
}

int line_of_offset(const std::string& text, size_t byte) {
    int line = 1;
    for (size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

struct Violations {
    std::vector<std::string> items;
    void add(const std::string& msg) { items.push_back(msg); }
    void throw_if_any() const {
        if (items.empty()) return;
        std::ostringstream os;
        os << "config validation failed (" << items.size() << " problem"
           << (items.size() > 1 ? "s" : "") << "):";
        for (const auto& m : items) os << "\n  - " << m;
        throw ValidationError(os.str());
    }
};

bool get_number(const json& j, const char* key, double& out, Violations& v) {
    if (!j.contains(key)) return false;
    if (!j[key].is_number()) {
        v.add(std::string(key) + ": expected a number");
        return false;
    }
    out = j[key].get<double>();
    return true;
}

}  // namespace

std::string to_string(RunMode m) {
    switch (m) {
        case RunMode::Spectrum2: return "spectrum2";
        case RunMode::Spectrum3: return "spectrum3";
        case RunMode::Dynamics2: return "dynamics2";
        case RunMode::Dynamics3: return "dynamics3";
        case RunMode::DynamicsFull: return "dynamics_full";
        case RunMode::LocateEP: return "locate_ep";
        case RunMode::Preset: return "preset";
    }
    return "preset";
}

std::string to_string(OutputFormat f) {
    return f == OutputFormat::Csv ? "csv" : "json";
}

std::string to_string(ColumnSelection c) {
    switch (c) {
        case ColumnSelection::All: return "all";
        case ColumnSelection::Frequencies: return "frequencies";
        case ColumnSelection::Linewidths: return "linewidths";
    }
    return "all";
}

std::string to_string(EpModelKind k) {
    return k == EpModelKind::TwoMode ? "two_mode" : "three_mode";
}

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        std::ostringstream os;
        os << "config parse error at line " << line_of_offset(text, e.byte)
           << ": " << e.what();
        throw ParseError(os.str());
    }

    Violations v;
    if (!doc.is_object()) {
        v.add("document root must be an object");
        v.throw_if_any();
    }

    for (const auto& [key, _] : doc.items())
        if (!known_keys().count(key)) v.add("unknown key '" + key + "'");

    RunConfig c;

    if (!doc.contains("mode")) {
        // A bare {"preset": "figN"} document is preset mode by default.
        if (!doc.contains("preset")) v.add("missing required key 'mode'");
        c.mode = RunMode::Preset;
    } else if (!doc["mode"].is_string()) {
        v.add("mode: expected a string");
    } else {
        const std::string m = doc["mode"].get<std::string>();
        if (m == "spectrum2") c.mode = RunMode::Spectrum2;
        else if (m == "spectrum3") c.mode = RunMode::Spectrum3;
        else if (m == "dynamics2") c.mode = RunMode::Dynamics2;
        else if (m == "dynamics3") c.mode = RunMode::Dynamics3;
        else if (m == "dynamics_full") c.mode = RunMode::DynamicsFull;
        else if (m == "locate_ep") c.mode = RunMode::LocateEP;
        else if (m == "preset") c.mode = RunMode::Preset;
        else v.add("mode: unknown value '" + m + "'");
    }

    if (doc.contains("preset")) {
        if (c.mode != RunMode::Preset)
            v.add("preset: only allowed with mode 'preset'");
        if (!doc["preset"].is_string()) {
            v.add("preset: expected a string");
        } else {
            c.preset = doc["preset"].get<std::string>();
            if (c.preset != "fig2" && c.preset != "fig3" && c.preset != "fig4" &&
                c.preset != "fig5")
                v.add("preset: must be one of fig2, fig3, fig4, fig5");
        }
    } else if (c.mode == RunMode::Preset) {
        v.add("preset mode requires the 'preset' key");
    }

    get_number(doc, "omega_b", c.omega_b, v);
    get_number(doc, "gamma1_over_omegab", c.gamma1_over_omegab, v);
    get_number(doc, "gamma2_over_gamma1", c.gamma2_over_gamma1, v);
    get_number(doc, "delta_over_gamma1", c.delta_over_gamma1, v);
    get_number(doc, "t_max_periods", c.t_max_periods, v);
    get_number(doc, "kappa_a_over_omegab", c.kappa_a_over_omegab, v);
    get_number(doc, "kappa_m_over_omegab", c.kappa_m_over_omegab, v);
    get_number(doc, "g_a_over_omegab", c.g_a_over_omegab, v);
    get_number(doc, "g_m_over_omegab", c.g_m_over_omegab, v);
    get_number(doc, "delta_a_over_omegab", c.delta_a_over_omegab, v);
    get_number(doc, "delta_m_over_omegab", c.delta_m_over_omegab, v);
    get_number(doc, "omega1_over_omegab", c.omega1_over_omegab, v);
    get_number(doc, "omega2_over_omegab", c.omega2_over_omegab, v);

    if (doc.contains("samples_per_period")) {
        if (!doc["samples_per_period"].is_number_integer())
            v.add("samples_per_period: expected an integer");
        else
            c.samples_per_period = doc["samples_per_period"].get<int>();
    }

    if (doc.contains("j_over_gamma1")) {
        const auto& jj = doc["j_over_gamma1"];
        if (jj.is_number()) {
            c.j_over_gamma1 = jj.get<double>();
        } else if (jj.is_array() && jj.size() == 3 && jj[0].is_number() &&
                   jj[1].is_number() && jj[2].is_number_integer()) {
            c.j_over_gamma1 = JGrid{jj[0].get<double>(), jj[1].get<double>(),
                                    jj[2].get<int>()};
        } else {
            v.add("j_over_gamma1: expected a number or [lo, hi, count]");
        }
    }

    if (doc.contains("initial_state")) {
        if (!doc["initial_state"].is_array()) {
            v.add("initial_state: expected an array of numbers");
        } else {
            for (const auto& x : doc["initial_state"]) {
                if (!x.is_number()) {
                    v.add("initial_state: expected an array of numbers");
                    c.initial_state.clear();
                    break;
                }
                c.initial_state.push_back(x.get<double>());
            }
        }
    }

    if (doc.contains("out")) {
        if (!doc["out"].is_string()) v.add("out: expected a string");
        else c.out = doc["out"].get<std::string>();
    }
    if (doc.contains("format")) {
        const std::string f = doc["format"].is_string()
                                  ? doc["format"].get<std::string>() : "";
        if (f == "csv") c.format = OutputFormat::Csv;
        else if (f == "json") c.format = OutputFormat::Json;
        else v.add("format: must be 'csv' or 'json'");
    }
    if (doc.contains("columns")) {
        const std::string s = doc["columns"].is_string()
                                  ? doc["columns"].get<std::string>() : "";
        if (s == "all") c.columns = ColumnSelection::All;
        else if (s == "frequencies") c.columns = ColumnSelection::Frequencies;
        else if (s == "linewidths") c.columns = ColumnSelection::Linewidths;
        else v.add("columns: must be 'all', 'frequencies' or 'linewidths'");
        if (c.mode != RunMode::Spectrum2 && c.mode != RunMode::Spectrum3)
            v.add("columns: only meaningful for spectrum modes");
    }
    if (doc.contains("ep_model")) {
        const std::string s = doc["ep_model"].is_string()
                                  ? doc["ep_model"].get<std::string>() : "";
        if (s == "two_mode") c.ep_model = EpModelKind::TwoMode;
        else if (s == "three_mode") c.ep_model = EpModelKind::ThreeMode;
        else v.add("ep_model: must be 'two_mode' or 'three_mode'");
        if (c.mode != RunMode::LocateEP)
            v.add("ep_model: only meaningful for locate_ep mode");
    }

    // Cross-field constraints; collected, not short-circuited.
    if (!(std::isfinite(c.omega_b) && c.omega_b > 0))
        v.add("omega_b: must be a positive finite frequency");
    if (!std::isfinite(c.gamma1_over_omegab) || c.gamma1_over_omegab == 0.0)
        v.add("gamma1_over_omegab: must be finite and nonzero (ratios scale by gamma_1)");
    if (!std::isfinite(c.gamma2_over_gamma1))
        v.add("gamma2_over_gamma1: must be finite");
    if (!(std::isfinite(c.t_max_periods) && c.t_max_periods > 0))
        v.add("t_max_periods: must be positive");
    if (c.samples_per_period < 20)
        v.add("samples_per_period: must be >= 20");
    if (const auto* g = std::get_if<JGrid>(&c.j_over_gamma1)) {
        if (!(g->lo < g->hi)) v.add("j_over_gamma1: range must have lo < hi");
        if (g->count < 2) v.add("j_over_gamma1: range needs count >= 2");
    }
    if (c.mode == RunMode::LocateEP &&
        !std::holds_alternative<JGrid>(c.j_over_gamma1))
        v.add("locate_ep mode requires a j_over_gamma1 bracket [lo, hi, count]");
    if (!c.initial_state.empty()) {
        const size_t want = c.mode == RunMode::Dynamics2 ? 4
                            : c.mode == RunMode::Dynamics3 ? 6
                            : c.mode == RunMode::DynamicsFull ? 8 : 0;
        if (want == 0)
            v.add("initial_state: only meaningful for dynamics modes");
        else if (c.initial_state.size() != want)
            v.add("initial_state: expected " + std::to_string(want) + " entries");
        for (double x : c.initial_state)
            if (!std::isfinite(x)) {
                v.add("initial_state: entries must be finite");
                break;
            }
    }

    v.throw_if_any();
    return c;
}

std::string emit_config(const RunConfig& c) {
    json doc;
    doc["mode"] = to_string(c.mode);
    if (c.mode == RunMode::Preset) doc["preset"] = c.preset;
    doc["omega_b"] = c.omega_b;
    doc["gamma1_over_omegab"] = c.gamma1_over_omegab;
    doc["gamma2_over_gamma1"] = c.gamma2_over_gamma1;
    if (const auto* g = std::get_if<JGrid>(&c.j_over_gamma1))
        doc["j_over_gamma1"] = {g->lo, g->hi, g->count};
    else
        doc["j_over_gamma1"] = std::get<double>(c.j_over_gamma1);
    doc["delta_over_gamma1"] = c.delta_over_gamma1;
    doc["t_max_periods"] = c.t_max_periods;
    doc["samples_per_period"] = c.samples_per_period;
    if (!c.initial_state.empty()) doc["initial_state"] = c.initial_state;
    if (!c.out.empty()) doc["out"] = c.out;
    doc["format"] = to_string(c.format);
    if (c.mode == RunMode::Spectrum2 || c.mode == RunMode::Spectrum3)
        doc["columns"] = to_string(c.columns);
    if (c.mode == RunMode::LocateEP) doc["ep_model"] = to_string(c.ep_model);
    if (c.mode == RunMode::DynamicsFull) {
        doc["kappa_a_over_omegab"] = c.kappa_a_over_omegab;
        doc["kappa_m_over_omegab"] = c.kappa_m_over_omegab;
        doc["g_a_over_omegab"] = c.g_a_over_omegab;
        doc["g_m_over_omegab"] = c.g_m_over_omegab;
        doc["delta_a_over_omegab"] = c.delta_a_over_omegab;
        doc["delta_m_over_omegab"] = c.delta_m_over_omegab;
        doc["omega1_over_omegab"] = c.omega1_over_omegab;
        doc["omega2_over_omegab"] = c.omega2_over_omegab;
    }
    return doc.dump(2) + "\n";
}

TwoModeModel two_mode_from_config(const RunConfig& c, double j_ratio) {
    const double g1 = c.gamma_1();
    return TwoModeModel{c.omega_b, g1, c.gamma_2(), j_ratio * std::abs(g1)};
}

ThreeModeModel three_mode_from_config(const RunConfig& c, double j_ratio) {
    const double g1 = c.gamma_1();
    const double omega_2 = c.omega_b;
    const double omega_1 = omega_2 + c.delta_over_gamma1 * g1;
    const double j = j_ratio * std::abs(g1);
    return ThreeModeModel{omega_1, -g1, j, omega_1, g1, omega_2, j};
}

PhysicalParams physical_from_config(const RunConfig& c, double j_ratio) {
    PhysicalParams p;
    p.delta_a = c.delta_a_over_omegab * c.omega_b;
    p.delta_m = c.delta_m_over_omegab * c.omega_b;
    p.kappa_a = c.kappa_a_over_omegab * c.omega_b;
    p.kappa_m = c.kappa_m_over_omegab * c.omega_b;
    p.g_a_lin = c.g_a_over_omegab * c.omega_b;
    p.g_m_lin = c.g_m_over_omegab * c.omega_b;
    p.omega_1 = c.omega1_over_omegab * c.omega_b;
    p.omega_2 = c.omega2_over_omegab * c.omega_b;
    p.j = j_ratio * std::abs(c.gamma_1());
    return p;
}

}  // namespace epmech
