#include <nlohmann/json.hpp>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "epmech/dynamics.hpp"
#include "epmech/export.hpp"

// Figure presets. Each panel is an ordinary RunConfig pushed through
// run_config, so every file is reproducible from the explicit config embedded
// in the manifest.

namespace epmech {

using json = nlohmann::json;

namespace {

const double kSqrt2 = std::sqrt(2.0);

RunConfig base_config() {
    RunConfig c;  // defaults: omega_b = 2 pi * 1e7, gamma_1 = 0.1 omega_b
    return c;
}

RunConfig spectrum2_panel(double gamma2_ratio, ColumnSelection cols) {
    RunConfig c = base_config();
    c.mode = RunMode::Spectrum2;
    c.gamma2_over_gamma1 = gamma2_ratio;
    c.j_over_gamma1 = JGrid{0.0, 2.0, 201};
    c.columns = cols;
    return c;
}

RunConfig spectrum3_panel(double delta_ratio, ColumnSelection cols) {
    RunConfig c = base_config();
    c.mode = RunMode::Spectrum3;
    c.delta_over_gamma1 = delta_ratio;
    c.j_over_gamma1 = JGrid{0.0, 2.5, 251};
    c.columns = cols;
    return c;
}

RunConfig dynamics2_panel(double gamma2_ratio, double j_ratio) {
    RunConfig c = base_config();
    c.mode = RunMode::Dynamics2;
    c.gamma2_over_gamma1 = gamma2_ratio;
    c.j_over_gamma1 = j_ratio;
    c.t_max_periods = 100.0;
    c.initial_state = {1.0, 0.0, 1.0, 0.0};
    return c;
}

RunConfig dynamics3_panel(double delta_ratio, double j_ratio) {
    RunConfig c = base_config();
    c.mode = RunMode::Dynamics3;
    c.delta_over_gamma1 = delta_ratio;
    c.j_over_gamma1 = j_ratio;
    c.t_max_periods = 200.0;
    c.initial_state = {20.0, 0.0, 20.0, 0.0, 10.0, 0.0};
    return c;
}

}  // namespace

std::vector<PresetPanel> preset_panels(const std::string& name) {
    std::vector<PresetPanel> panels;
    if (name == "fig2") {
        panels.push_back({"fig2a", spectrum2_panel(-1.0, ColumnSelection::Frequencies),
                          "balanced gain-loss pair, supermode frequencies"});
        panels.push_back({"fig2b", spectrum2_panel(-1.0, ColumnSelection::Linewidths),
                          "balanced gain-loss pair, supermode linewidths"});
        panels.push_back({"fig2c", spectrum2_panel(2.0, ColumnSelection::Frequencies),
                          "purely dissipative pair, supermode frequencies"});
        panels.push_back({"fig2d", spectrum2_panel(2.0, ColumnSelection::Linewidths),
                          "purely dissipative pair, supermode linewidths"});
    } else if (name == "fig3") {
        panels.push_back({"fig3a", dynamics2_panel(2.0, 0.5),
                          "dissipative EP2: decaying oscillation"});
        panels.push_back({"fig3b", dynamics2_panel(-1.0, 0.9),
                          "broken gain-loss phase: exponential growth"});
        panels.push_back({"fig3c", dynamics2_panel(-1.0, 1.0),
                          "gain-loss EP2: linear growth"});
        panels.push_back({"fig3d", dynamics2_panel(-1.0, 1.1),
                          "unbroken gain-loss phase: beats"});
    } else if (name == "fig4") {
        panels.push_back({"fig4a", spectrum3_panel(0.0, ColumnSelection::Frequencies),
                          "degenerate mechanical modes, Re x"});
        panels.push_back({"fig4b", spectrum3_panel(0.0, ColumnSelection::Linewidths),
                          "degenerate mechanical modes, Im x"});
        panels.push_back({"fig4c", spectrum3_panel(2.0, ColumnSelection::Frequencies),
                          "nondegenerate mechanical modes, Re x"});
        panels.push_back({"fig4d", spectrum3_panel(2.0, ColumnSelection::Linewidths),
                          "nondegenerate mechanical modes, Im x"});
    } else if (name == "fig5") {
        panels.push_back({"fig5a", dynamics3_panel(0.0, 0.9 / kSqrt2),
                          "below the third-order coalescence"});
        panels.push_back({"fig5b", dynamics3_panel(0.0, 1.0 / kSqrt2),
                          "at the third-order coalescence"});
        panels.push_back({"fig5c", dynamics3_panel(0.0, 1.1 / kSqrt2),
                          "above the third-order coalescence"});
        panels.push_back({"fig5d", dynamics3_panel(2.0, 1.52),
                          "below the second-order coalescence"});
        panels.push_back({"fig5e", dynamics3_panel(2.0, 1.69),
                          "at the second-order coalescence"});
        panels.push_back({"fig5f", dynamics3_panel(2.0, 1.86),
                          "above the second-order coalescence"});
    } else {
        throw ValidationError("unknown preset '" + name +
                              "' (expected fig2, fig3, fig4 or fig5)");
    }
    return panels;
}

RunOutput run_preset(const std::string& name, const std::filesystem::path& out_dir,
                     OutputFormat format) {
    auto panels = preset_panels(name);
    std::filesystem::create_directories(out_dir);

    RunOutput out;
    json manifest;
    manifest["schema"] = "epmech/manifest/v1";
    manifest["preset"] = name;
    manifest["closed_form_coefficient"] = kClosedFormCoefficient;
    json jpanels = json::array();

    const std::string ext = format == OutputFormat::Csv ? ".csv" : ".json";
    for (auto& panel : panels) {
        panel.config.format = format;
        panel.config.out = (out_dir / (panel.file_stem + ext)).string();
        json entry;
        entry["file"] = panel.file_stem + ext;
        entry["comment"] = panel.comment;
        entry["config"] = json::parse(emit_config(panel.config));
        try {
            const RunOutput r = run_config(panel.config, out_dir);
            out.files.insert(out.files.end(), r.files.begin(), r.files.end());
            for (const auto& m : r.messages)
                out.messages.push_back(panel.file_stem + ": " + m);
            if (!r.messages.empty()) entry["notes"] = r.messages;
        } catch (const std::exception& e) {
            out.errors.push_back(panel.file_stem + ": " + e.what());
            entry["error"] = e.what();
        }
        jpanels.push_back(std::move(entry));
    }
    manifest["panels"] = std::move(jpanels);

    // Locate the exceptional points the preset revolves around.
    const RunConfig base = base_config();
    const double g1 = base.gamma_1();
    json eps = json::array();
    auto add_ep = [&](const char* which, const EpLocation& loc) {
        json e;
        e["case"] = which;
        e["j_over_gamma1"] = loc.param_value / g1;
        e["ep_order"] = loc.ep_order;
        eps.push_back(std::move(e));
    };
    try {
        if (name == "fig2" || name == "fig3") {
            RunConfig pt = base;
            pt.gamma2_over_gamma1 = -1.0;
            add_ep("balanced_gain_loss",
                   locate_ep(two_mode_from_config(pt, 0.5), "j", 0.3 * g1, 1.7 * g1));
            RunConfig diss = base;
            diss.gamma2_over_gamma1 = 2.0;
            add_ep("purely_dissipative",
                   locate_ep(two_mode_from_config(diss, 0.2), "j", 0.1 * g1, 1.2 * g1));
        } else {
            RunConfig deg = base;
            deg.delta_over_gamma1 = 0.0;
            add_ep("degenerate",
                   locate_ep(three_mode_from_config(deg, 0.3), "j", 0.3 * g1, 1.2 * g1));
            RunConfig nondeg = base;
            nondeg.delta_over_gamma1 = 2.0;
            add_ep("nondegenerate",
                   locate_ep(three_mode_from_config(nondeg, 1.3), "j", 1.2 * g1, 2.2 * g1));
        }
    } catch (const std::exception& e) {
        out.errors.push_back(std::string("ep location: ") + e.what());
    }
    manifest["ep_hits"] = std::move(eps);

    const auto manifest_path = out_dir / "manifest.json";
    std::ofstream os(manifest_path, std::ios::binary);
    if (!os) throw Error("run_preset: cannot write manifest");
    os << manifest.dump(2) << "\n";
    out.files.push_back(manifest_path);
    return out;
}

}  // namespace epmech
