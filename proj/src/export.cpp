#include "epmech/export.hpp"

#include <nlohmann/json.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace epmech {

using json = nlohmann::json;

namespace {

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void check_finite(const DataTable& t) {
    for (const auto& row : t.rows)
        for (double x : row)
            if (!std::isfinite(x))
                throw SerializationError(
                    "export: non-finite value outside the truncation protocol");
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("export: cannot open '" + path.string() + "' for writing");
    os << content;
    if (!os) throw Error("export: write failed for '" + path.string() + "'");
}

}  // namespace

DataTable to_table(const BranchSet& b) {
    DataTable t;
    t.kind = "branches";
    t.units_comment = "param and eigenvalues in rad/s; linewidth = -Im(lambda)";
    t.columns.push_back("param");
    for (size_t k = 0; k < b.branches.size(); ++k) {
        t.columns.push_back("freq_b" + std::to_string(k));
        t.columns.push_back("linewidth_b" + std::to_string(k));
    }
    for (size_t i = 0; i < b.param_values.size(); ++i) {
        std::vector<double> row{b.param_values[i]};
        for (const auto& br : b.branches) {
            row.push_back(br[i].frequency);
            row.push_back(br[i].linewidth);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

DataTable to_table(const Trajectory& tr) {
    DataTable t;
    t.kind = "trajectory";
    t.units_comment = "time in s; quadratures dimensionless";
    t.truncated = tr.truncated;
    t.columns.push_back("time_s");
    for (const auto& l : tr.labels) t.columns.push_back(l);
    for (size_t i = 0; i < tr.times.size(); ++i) {
        std::vector<double> row{tr.times[i]};
        for (Eigen::Index c = 0; c < tr.states.cols(); ++c)
            row.push_back(tr.states(static_cast<Eigen::Index>(i), c));
        t.rows.push_back(std::move(row));
    }
    return t;
}

void export_table(const DataTable& t, OutputFormat format,
                  const std::filesystem::path& path) {
    check_finite(t);
    if (format == OutputFormat::Csv) {
        std::ostringstream os;
        os << "# " << t.units_comment;
        if (t.truncated) os << " [truncated at overflow]";
        os << "\n";
        for (size_t c = 0; c < t.columns.size(); ++c)
            os << t.columns[c] << (c + 1 < t.columns.size() ? "," : "\n");
        for (const auto& row : t.rows) {
            for (size_t c = 0; c < row.size(); ++c)
                os << g17(row[c]) << (c + 1 < row.size() ? "," : "\n");
        }
        write_file(path, os.str());
        return;
    }
    json doc;
    doc["schema"] = "epmech/" + t.kind + "/v1";
    doc["units"] = t.units_comment;
    doc["columns"] = t.columns;
    doc["truncated"] = t.truncated;
    json data = json::object();
    for (size_t c = 0; c < t.columns.size(); ++c) {
        json col = json::array();
        for (const auto& row : t.rows) col.push_back(row[c]);
        data[t.columns[c]] = std::move(col);
    }
    doc["data"] = std::move(data);
    write_file(path, doc.dump(2) + "\n");
}

DataTable import_table_json(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw Error("import: cannot open '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(is);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("import: ") + e.what());
    }
    DataTable t;
    const std::string schema = doc.value("schema", "");
    if (schema.rfind("epmech/", 0) != 0)
        throw ParseError("import: unrecognized schema '" + schema + "'");
    t.kind = schema.substr(7, schema.rfind('/') - 7);
    t.units_comment = doc.value("units", "");
    t.truncated = doc.value("truncated", false);
    t.columns = doc["columns"].get<std::vector<std::string>>();
    const auto& data = doc["data"];
    size_t n_rows = 0;
    if (!t.columns.empty()) n_rows = data[t.columns[0]].size();
    t.rows.assign(n_rows, std::vector<double>(t.columns.size()));
    for (size_t c = 0; c < t.columns.size(); ++c) {
        const auto& col = data[t.columns[c]];
        for (size_t i = 0; i < n_rows; ++i) t.rows[i][c] = col[i].get<double>();
    }
    return t;
}

void export_result(const BranchSet& b, OutputFormat format,
                   const std::filesystem::path& path) {
    export_table(to_table(b), format, path);
}

void export_result(const Trajectory& t, OutputFormat format,
                   const std::filesystem::path& path) {
    export_table(to_table(t), format, path);
}

void export_result(const PhaseReport& r, OutputFormat format,
                   const std::filesystem::path& path) {
    if (format == OutputFormat::Csv) {
        std::ostringstream os;
        os << "# phase classification; coalescence in rad/s\n"
           << "symmetry,label,ep_order,coalescence\n"
           << to_string(r.symmetry) << "," << to_string(r.label) << ","
           << r.ep_order << "," << g17(r.coalescence) << "\n";
        write_file(path, os.str());
        return;
    }
    json doc;
    doc["schema"] = "epmech/phase_report/v1";
    doc["symmetry"] = to_string(r.symmetry);
    doc["label"] = to_string(r.label);
    doc["ep_order"] = r.ep_order;
    doc["coalescence"] = r.coalescence;
    write_file(path, doc.dump(2) + "\n");
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> sweep_values(const RunConfig& c) {
    const double g1 = std::abs(c.gamma_1());
    if (const auto* g = std::get_if<JGrid>(&c.j_over_gamma1)) {
        std::vector<double> v(g->count);
        for (int i = 0; i < g->count; ++i)
            v[i] = (g->lo + (g->hi - g->lo) * i / (g->count - 1)) * g1;
        return v;
    }
    return {std::get<double>(c.j_over_gamma1) * g1};
}

DataTable spectrum2_table(const RunConfig& c, const BranchSet& bs) {
    DataTable t;
    t.kind = "branches";
    t.units_comment =
        "j in units of gamma_1; supermode frequencies and linewidths in units of omega_b";
    const double g1 = std::abs(c.gamma_1());
    t.columns.push_back("j_over_gamma1");
    const char* names[2] = {"plus", "minus"};
    const bool freqs = c.columns != ColumnSelection::Linewidths;
    const bool lws = c.columns != ColumnSelection::Frequencies;
    for (size_t k = 0; k < bs.branches.size() && freqs; ++k)
        t.columns.push_back(std::string("freq_") + names[k] + "_over_omegab");
    for (size_t k = 0; k < bs.branches.size() && lws; ++k)
        t.columns.push_back(std::string("linewidth_") + names[k] + "_over_omegab");
    for (size_t i = 0; i < bs.param_values.size(); ++i) {
        std::vector<double> row{bs.param_values[i] / g1};
        for (size_t k = 0; k < bs.branches.size() && freqs; ++k)
            row.push_back(bs.branches[k][i].frequency / c.omega_b);
        for (size_t k = 0; k < bs.branches.size() && lws; ++k)
            row.push_back(bs.branches[k][i].linewidth / c.omega_b);
        t.rows.push_back(std::move(row));
    }
    return t;
}

DataTable spectrum3_table(const RunConfig& c, const BranchSet& bs) {
    DataTable t;
    t.kind = "branches";
    t.units_comment =
        "j in units of gamma_1; x = Lambda - omega_2 in units of gamma_1";
    const double g1 = std::abs(c.gamma_1());
    const double omega_2 = c.omega_b;
    t.columns.push_back("j_over_gamma1");
    const bool freqs = c.columns != ColumnSelection::Linewidths;
    const bool lws = c.columns != ColumnSelection::Frequencies;
    for (size_t k = 0; k < bs.branches.size() && freqs; ++k)
        t.columns.push_back("re_x" + std::to_string(k + 1) + "_over_gamma1");
    for (size_t k = 0; k < bs.branches.size() && lws; ++k)
        t.columns.push_back("im_x" + std::to_string(k + 1) + "_over_gamma1");
    for (size_t i = 0; i < bs.param_values.size(); ++i) {
        std::vector<double> row{bs.param_values[i] / g1};
        for (size_t k = 0; k < bs.branches.size() && freqs; ++k)
            row.push_back((bs.branches[k][i].frequency - omega_2) / g1);
        for (size_t k = 0; k < bs.branches.size() && lws; ++k)
            row.push_back(-bs.branches[k][i].linewidth / g1);  // Im(x)
        t.rows.push_back(std::move(row));
    }
    return t;
}

DataTable trajectory_table(const RunConfig& c, const Trajectory& tr) {
    DataTable t;
    t.kind = "trajectory";
    t.units_comment = "time in carrier periods (t * omega_b / 2 pi); quadratures dimensionless";
    t.truncated = tr.truncated;
    t.columns.push_back("t_periods");
    std::vector<Eigen::Index> cols;
    for (const char* l : {"q1", "q2", "qm", "qa"}) {
        for (size_t k = 0; k < tr.labels.size(); ++k)
            if (tr.labels[k] == l) {
                t.columns.push_back(l);
                cols.push_back(static_cast<Eigen::Index>(k));
            }
    }
    for (size_t i = 0; i < tr.times.size(); ++i) {
        std::vector<double> row{tr.times[i] * c.omega_b / kTwoPi};
        for (Eigen::Index k : cols)
            row.push_back(tr.states(static_cast<Eigen::Index>(i), k));
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::filesystem::path resolve_out(const RunConfig& c,
                                  const std::filesystem::path& out_base,
                                  const std::string& stem) {
    std::filesystem::path p = !c.out.empty() ? std::filesystem::path(c.out) : out_base;
    const std::string ext = c.format == OutputFormat::Csv ? ".csv" : ".json";
    if (p.empty()) p = stem + ext;
    else if (std::filesystem::is_directory(p) || p.extension().empty())
        p /= stem + ext;
    return p;
}

}  // namespace

RunOutput run_config(const RunConfig& c, const std::filesystem::path& out_base) {
    RunOutput out;
    const double g1 = c.gamma_1();
    const double abs_g1 = std::abs(g1);
    const double dt = kTwoPi / (c.samples_per_period * c.omega_b);
    const double t_max = c.t_max_periods * kTwoPi / c.omega_b;

    switch (c.mode) {
        case RunMode::Preset:
            return run_preset(c.preset, c.out.empty() ? out_base
                                                      : std::filesystem::path(c.out),
                              c.format);

        case RunMode::Spectrum2: {
            SweepSpec spec;
            const TwoModeModel base = two_mode_from_config(c, 1.0);
            spec.base_model = base;
            spec.param = "j";
            spec.values = sweep_values(c);
            spec.symmetry = infer_symmetry(base);
            const BranchSet bs = run_sweep(spec);
            const auto path = resolve_out(c, out_base, "spectrum2");
            export_table(spectrum2_table(c, bs), c.format, path);
            out.files.push_back(path);
            for (const auto& h : bs.ep_hits) {
                std::ostringstream os;
                os << "EP order " << h.ep_order << " at j/gamma_1 = "
                   << g17(h.param_value / abs_g1);
                out.messages.push_back(os.str());
            }
            break;
        }

        case RunMode::Spectrum3: {
            SweepSpec spec;
            spec.base_model = three_mode_from_config(c, 1.0);
            spec.param = "j";
            spec.values = sweep_values(c);
            spec.symmetry = SymmetryClass::PseudoHermitian;
            const BranchSet bs = run_sweep(spec);
            const auto path = resolve_out(c, out_base, "spectrum3");
            export_table(spectrum3_table(c, bs), c.format, path);
            out.files.push_back(path);
            for (const auto& h : bs.ep_hits) {
                std::ostringstream os;
                os << "EP order " << h.ep_order << " at j/gamma_1 = "
                   << g17(h.param_value / abs_g1);
                out.messages.push_back(os.str());
            }
            break;
        }

        case RunMode::Dynamics2:
        case RunMode::Dynamics3:
        case RunMode::DynamicsFull: {
            const double j_ratio = std::holds_alternative<double>(c.j_over_gamma1)
                                       ? std::get<double>(c.j_over_gamma1)
                                       : std::get<JGrid>(c.j_over_gamma1).lo;
            DynamicsMatrix A;
            if (c.mode == RunMode::Dynamics2)
                A = dynamics_matrix(two_mode_from_config(c, j_ratio));
            else if (c.mode == RunMode::Dynamics3)
                A = dynamics_matrix(three_mode_from_config(c, j_ratio));
            else
                A = dynamics_matrix(physical_from_config(c, j_ratio));

            InitialState x0;
            if (!c.initial_state.empty()) {
                x0.quadratures = Eigen::Map<const Eigen::VectorXd>(
                    c.initial_state.data(),
                    static_cast<Eigen::Index>(c.initial_state.size()));
            } else {
                x0.quadratures.setZero(A.dimension());
                x0.quadratures(0) = 1.0;  // q1
                x0.quadratures(2) = 1.0;  // q2
            }
            const Trajectory tr = integrate(A, x0, t_max, dt);
            const auto path = resolve_out(c, out_base, to_string(c.mode));
            export_table(trajectory_table(c, tr), c.format, path);
            out.files.push_back(path);
            if (tr.truncated)
                out.messages.push_back("trajectory truncated at overflow threshold");
            break;
        }

        case RunMode::LocateEP: {
            const auto& grid = std::get<JGrid>(c.j_over_gamma1);
            const double lo = grid.lo * abs_g1, hi = grid.hi * abs_g1;
            EpLocation loc;
            if (c.ep_model == EpModelKind::TwoMode)
                loc = locate_ep(two_mode_from_config(c, grid.lo), "j", lo, hi);
            else
                loc = locate_ep(three_mode_from_config(c, grid.lo), "j", lo, hi);
            std::ostringstream os;
            os << "EP order " << loc.ep_order << " at j/gamma_1 = "
               << g17(loc.param_value / abs_g1);
            out.messages.push_back(os.str());
            if (!c.out.empty()) {
                DataTable t;
                t.kind = "ep_location";
                t.units_comment = "exceptional point in units of gamma_1";
                t.columns = {"j_over_gamma1", "ep_order"};
                t.rows = {{loc.param_value / abs_g1, static_cast<double>(loc.ep_order)}};
                const auto path = resolve_out(c, out_base, "ep_location");
                export_table(t, c.format, path);
                out.files.push_back(path);
            }
            break;
        }
    }
    return out;
}

}  // namespace epmech
