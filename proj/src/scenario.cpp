#include "muxsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "muxsim/errors.hpp"

namespace muxsim {

const char* to_string(ScenarioMode m) {
    switch (m) {
        case ScenarioMode::siso: return "siso";
        case ScenarioMode::simo: return "simo";
        case ScenarioMode::replay: return "replay";
    }
    return "?";
}

void Scenario::validate() const {
    clutch.validate();
    motor.validate();
    screw.validate();
    loss.validate();
    latency.validate();
    budget.validate();
    sim.validate();
    if (drive_voltage_V < 0.0 || drive_voltage_V > clutch.voltage_ceiling_V) {
        throw ConfigError("scenario: drive_voltage_V outside [0, voltage ceiling]");
    }
    std::vector<int> ids;
    for (const auto& u : units) {
        if (std::find(ids.begin(), ids.end(), u.id) != ids.end()) {
            throw ConfigError("scenario: unit id " + std::to_string(u.id) + " defined twice");
        }
        ids.push_back(u.id);
        u.load.validate();
        if (!(u.travel.min_m <= u.travel.max_m)) {
            throw ConfigError("scenario: unit " + std::to_string(u.id) +
                              " travel limits are inverted");
        }
        if (u.start_m < u.travel.min_m || u.start_m > u.travel.max_m) {
            throw ConfigError("scenario: unit " + std::to_string(u.id) +
                              " start position outside travel limits");
        }
    }
    for (const auto& g : goals) {
        if (std::find(ids.begin(), ids.end(), g.unit_id) == ids.end()) {
            throw ConfigError("scenario: goal references undefined unit " +
                              std::to_string(g.unit_id));
        }
    }
    if (mode == ScenarioMode::replay && schedule_path.empty()) {
        throw ConfigError("scenario: replay mode requires a 'schedule' path");
    }
}

namespace {

struct Cursor {
    int lineno = 0;
    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("line " + std::to_string(lineno) + ": " + msg);
    }
    double num(const std::string& token) const {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(token, &used);
        } catch (const std::exception&) {
            fail("expected a number, got '" + token + "'");
        }
        if (used != token.size() || !std::isfinite(v)) {
            fail("expected a number, got '" + token + "'");
        }
        return v;
    }
    bool flag(const std::string& token) const {
        if (token == "true" || token == "1") return true;
        if (token == "false" || token == "0") return false;
        fail("expected true/false, got '" + token + "'");
    }
};

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
    Scenario s;
    s.latency.points.clear();  // defaults restored when the file sets none

    std::istringstream in(text);
    std::string raw;
    Cursor cur;
    std::string section;
    int section_id = 0;
    UnitConfig* unit = nullptr;
    Goal* goal = nullptr;
    bool mu_given = false;

    while (std::getline(in, raw)) {
        ++cur.lineno;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') cur.fail("unterminated section header");
            const auto inner = split(line.substr(1, line.size() - 2));
            if (inner.empty()) cur.fail("empty section header");
            section = inner[0];
            unit = nullptr;
            goal = nullptr;
            if (section == "unit") {
                if (inner.size() != 2) cur.fail("unit section needs an id: [unit <id>]");
                section_id = static_cast<int>(cur.num(inner[1]));
                s.units.push_back({});
                unit = &s.units.back();
                unit->id = section_id;
            } else if (section == "goal") {
                if (inner.size() != 1) cur.fail("goal sections carry no id");
                s.goals.push_back({});
                goal = &s.goals.back();
            } else if (inner.size() != 1) {
                cur.fail("section [" + section + "] carries no id");
            } else if (section != "clutch" && section != "motor" && section != "leadscrew" &&
                       section != "loss" && section != "latency" && section != "budget" &&
                       section != "sim") {
                cur.fail("unknown section [" + section + "]");
            }
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) cur.fail("expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const auto vals = split(line.substr(eq + 1));
        if (key.empty() || vals.empty()) cur.fail("expected 'key = value'");
        const std::string& v0 = vals[0];
        auto one = [&]() {
            if (vals.size() != 1) cur.fail("key '" + key + "' takes a single value");
            return cur.num(v0);
        };

        if (section.empty()) {
            if (key == "mode") {
                if (v0 == "siso") s.mode = ScenarioMode::siso;
                else if (v0 == "simo") s.mode = ScenarioMode::simo;
                else if (v0 == "replay") s.mode = ScenarioMode::replay;
                else cur.fail("mode must be siso, simo or replay");
            } else if (key == "schedule") {
                s.schedule_path = v0;
            } else {
                cur.fail("unknown top-level key '" + key + "'");
            }
        } else if (section == "clutch") {
            if (key == "shaft_radius_m") s.clutch.shaft_radius_m = one();
            else if (key == "dielectric_thickness_m") s.clutch.dielectric_thickness_m = one();
            else if (key == "air_gap_m") s.clutch.air_gap_m = one();
            else if (key == "rel_permittivity_dielectric") s.clutch.rel_permittivity_dielectric = one();
            else if (key == "rel_permittivity_gap") s.clutch.rel_permittivity_gap = one();
            else if (key == "electrode_width_m") s.clutch.electrode_width_m = one();
            else if (key == "wrap_angle_rad") s.clutch.wrap_angle_rad = one();
            else if (key == "friction_coefficient") { s.clutch.friction_coefficient = one(); mu_given = true; }
            else if (key == "pretension_torque_Nm") s.clutch.pretension_torque_Nm = one();
            else if (key == "voltage_ceiling_V") s.clutch.voltage_ceiling_V = one();
            else if (key == "engagement_time_s") s.clutch.engagement_time_s = one();
            else if (key == "disengagement_time_s") s.clutch.disengagement_time_s = one();
            else if (key == "slip_knee_rpm") s.clutch.slip_knee_rpm = one();
            else if (key == "slip_cutoff_rpm") s.clutch.slip_cutoff_rpm = one();
            else if (key == "drive_voltage_V") s.drive_voltage_V = one();
            else cur.fail("unknown clutch key '" + key + "'");
        } else if (section == "motor") {
            if (key == "speed_rpm") s.motor.speed_rpm = one();
            else if (key == "max_torque_Nm") s.motor.max_torque_Nm = one();
            else cur.fail("unknown motor key '" + key + "'");
        } else if (section == "leadscrew") {
            if (key == "effective_lead_m_per_rev") s.screw.effective_lead_m_per_rev = one();
            else if (key == "mean_diameter_m") s.screw.mean_diameter_m = one();
            else if (key == "thread_friction_coefficient") s.screw.thread_friction_coefficient = one();
            else if (key == "thread_lead_m_per_rev") s.screw.thread_lead_m_per_rev = one();
            else cur.fail("unknown leadscrew key '" + key + "'");
        } else if (section == "loss") {
            if (key == "coulomb_torque_Nm") s.loss.coulomb_torque_Nm = one();
            else if (key == "load_coefficient_Nm_per_N") s.loss.load_coefficient_Nm_per_N = one();
            else cur.fail("unknown loss key '" + key + "'");
        } else if (section == "latency") {
            if (key == "point") {
                if (vals.size() != 3) cur.fail("latency point = <load_N> <on_s> <off_s>");
                s.latency.points.push_back({cur.num(vals[0]), cur.num(vals[1]), cur.num(vals[2])});
            } else {
                cur.fail("unknown latency key '" + key + "'");
            }
        } else if (section == "budget") {
            if (key == "motor_max_power_W") s.budget.motor_max_power_W = one();
            else if (key == "per_clutch_max_power_W") s.budget.per_clutch_max_power_W = one();
            else cur.fail("unknown budget key '" + key + "'");
        } else if (section == "sim") {
            if (key == "dt_s") s.sim.dt_s = one();
            else if (key == "end_s") s.sim.end_s = one();
            else if (key == "strict_slip") s.sim.strict_slip = cur.flag(v0);
            else if (key == "allow_motor_braking") s.sim.allow_motor_braking = cur.flag(v0);
            else if (key == "idle_drag_torque_Nm") s.sim.idle_drag_torque_Nm = one();
            else if (key == "seed") s.sim.seed = static_cast<long>(one());
            else cur.fail("unknown sim key '" + key + "'");
        } else if (section == "unit") {
            if (key == "mass_kg") { unit->load.kind = LoadKind::hanging_mass; unit->load.mass_kg = one(); }
            else if (key == "tension_N") { unit->load.kind = LoadKind::constant_tension; unit->load.tension_N = one(); }
            else if (key == "gravity_m_s2") unit->load.gravity_m_s2 = one();
            else if (key == "travel_min_m") unit->travel.min_m = one();
            else if (key == "travel_max_m") unit->travel.max_m = one();
            else if (key == "start_m") unit->start_m = one();
            else cur.fail("unknown unit key '" + key + "'");
        } else if (section == "goal") {
            if (key == "unit") goal->unit_id = static_cast<int>(one());
            else if (key == "target_m") goal->target_position_m = one();
            else if (key == "deadline_s") goal->deadline_s = one();
            else cur.fail("unknown goal key '" + key + "'");
        }
    }

    if (s.latency.points.empty()) {
        s.latency = SwitchLatencyModel::defaults();
    }
    if (!mu_given) {
        // Keep the bench-calibrated default rather than recalibrating against
        // overridden geometry; explicit recalibration goes through `fit`.
        s.clutch.friction_coefficient = ClutchParams::defaults().friction_coefficient;
    }
    s.validate();
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open scenario file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& s) {
    std::ostringstream out;
    out.precision(17);
    out << "# muxsim scenario\n";
    out << "mode = " << to_string(s.mode) << "\n";
    if (!s.schedule_path.empty()) out << "schedule = " << s.schedule_path << "\n";

    out << "\n[clutch]\n";
    out << "shaft_radius_m = " << s.clutch.shaft_radius_m << "\n";
    out << "dielectric_thickness_m = " << s.clutch.dielectric_thickness_m << "\n";
    out << "air_gap_m = " << s.clutch.air_gap_m << "\n";
    out << "rel_permittivity_dielectric = " << s.clutch.rel_permittivity_dielectric << "\n";
    out << "rel_permittivity_gap = " << s.clutch.rel_permittivity_gap << "\n";
    out << "electrode_width_m = " << s.clutch.electrode_width_m << "\n";
    out << "wrap_angle_rad = " << s.clutch.wrap_angle_rad << "\n";
    out << "friction_coefficient = " << s.clutch.friction_coefficient << "\n";
    out << "pretension_torque_Nm = " << s.clutch.pretension_torque_Nm << "\n";
    out << "voltage_ceiling_V = " << s.clutch.voltage_ceiling_V << "\n";
    out << "engagement_time_s = " << s.clutch.engagement_time_s << "\n";
    out << "disengagement_time_s = " << s.clutch.disengagement_time_s << "\n";
    out << "slip_knee_rpm = " << s.clutch.slip_knee_rpm << "\n";
    out << "slip_cutoff_rpm = " << s.clutch.slip_cutoff_rpm << "\n";
    out << "drive_voltage_V = " << s.drive_voltage_V << "\n";

    out << "\n[motor]\n";
    out << "speed_rpm = " << s.motor.speed_rpm << "\n";
    out << "max_torque_Nm = " << s.motor.max_torque_Nm << "\n";

    out << "\n[leadscrew]\n";
    out << "effective_lead_m_per_rev = " << s.screw.effective_lead_m_per_rev << "\n";
    out << "mean_diameter_m = " << s.screw.mean_diameter_m << "\n";
    out << "thread_friction_coefficient = " << s.screw.thread_friction_coefficient << "\n";
    out << "thread_lead_m_per_rev = " << s.screw.thread_lead_m_per_rev << "\n";

    out << "\n[loss]\n";
    out << "coulomb_torque_Nm = " << s.loss.coulomb_torque_Nm << "\n";
    out << "load_coefficient_Nm_per_N = " << s.loss.load_coefficient_Nm_per_N << "\n";

    out << "\n[latency]\n";
    for (const auto& p : s.latency.points) {
        out << "point = " << p.load_N << " " << p.on_s << " " << p.off_s << "\n";
    }

    out << "\n[budget]\n";
    out << "motor_max_power_W = " << s.budget.motor_max_power_W << "\n";
    out << "per_clutch_max_power_W = " << s.budget.per_clutch_max_power_W << "\n";

    out << "\n[sim]\n";
    out << "dt_s = " << s.sim.dt_s << "\n";
    out << "end_s = " << s.sim.end_s << "\n";
    out << "strict_slip = " << (s.sim.strict_slip ? "true" : "false") << "\n";
    out << "allow_motor_braking = " << (s.sim.allow_motor_braking ? "true" : "false") << "\n";
    out << "idle_drag_torque_Nm = " << s.sim.idle_drag_torque_Nm << "\n";
    out << "seed = " << s.sim.seed << "\n";

    for (const auto& u : s.units) {
        out << "\n[unit " << u.id << "]\n";
        if (u.load.kind == LoadKind::hanging_mass) {
            out << "mass_kg = " << u.load.mass_kg << "\n";
        } else {
            out << "tension_N = " << u.load.tension_N << "\n";
        }
        out << "gravity_m_s2 = " << u.load.gravity_m_s2 << "\n";
        out << "travel_min_m = " << u.travel.min_m << "\n";
        out << "travel_max_m = " << u.travel.max_m << "\n";
        out << "start_m = " << u.start_m << "\n";
    }
    for (const auto& g : s.goals) {
        out << "\n[goal]\n";
        out << "unit = " << g.unit_id << "\n";
        out << "target_m = " << g.target_position_m << "\n";
        if (g.deadline_s) out << "deadline_s = " << *g.deadline_s << "\n";
    }
    return out.str();
}

std::vector<DofUnit> make_units(const Scenario& s) {
    std::vector<DofUnit> units;
    units.reserve(s.units.size());
    for (const auto& uc : s.units) {
        DofUnit u;
        u.id = uc.id;
        u.screw = s.screw;
        u.load = uc.load;
        u.travel_limits = uc.travel;
        u.slider_position_m = uc.start_m;
        units.push_back(u);
    }
    return units;
}

Plant make_plant(const Scenario& s) {
    return {s.clutch, s.loss, s.latency, s.drive_voltage_V};
}

namespace {

std::vector<std::vector<double>> read_csv_rows(std::istream& in, std::size_t columns,
                                               const char* what) {
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        std::vector<double> row;
        std::istringstream ls(t);
        std::string cell;
        bool numeric = true;
        while (std::getline(ls, cell, ',')) {
            cell = trim(cell);
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
                if (used != cell.size()) numeric = false;
            } catch (const std::exception&) {
                numeric = false;
            }
        }
        if (!numeric) {
            if (rows.empty()) continue;  // header row
            throw ConfigError(std::string(what) + " line " + std::to_string(lineno) +
                              ": non-numeric cell");
        }
        if (row.size() != columns) {
            throw ConfigError(std::string(what) + " line " + std::to_string(lineno) + ": expected " +
                              std::to_string(columns) + " columns");
        }
        rows.push_back(row);
    }
    if (rows.empty()) {
        throw ConfigError(std::string(what) + ": no data rows");
    }
    return rows;
}

}  // namespace

std::vector<TorqueVoltagePoint> read_torque_voltage_csv(std::istream& in) {
    std::vector<TorqueVoltagePoint> pts;
    for (const auto& row : read_csv_rows(in, 2, "torque-voltage CSV")) {
        pts.push_back({row[0], row[1]});
    }
    return pts;
}

std::vector<EfficiencyPoint> read_efficiency_csv(std::istream& in) {
    std::vector<EfficiencyPoint> pts;
    for (const auto& row : read_csv_rows(in, 3, "efficiency CSV")) {
        pts.push_back({row[0], row[1], row[2]});
    }
    return pts;
}

}  // namespace muxsim
