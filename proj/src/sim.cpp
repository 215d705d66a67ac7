#include "muxsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "muxsim/errors.hpp"

namespace muxsim {

void SimConfig::validate() const {
    if (!(dt_s > 0.0) || !std::isfinite(dt_s)) {
        throw ConfigError("sim: dt_s must be > 0");
    }
    if (idle_drag_torque_Nm < 0.0) {
        throw ConfigError("sim: idle_drag_torque_Nm must be >= 0");
    }
}

namespace {

constexpr double kTimeEps = 1e-9;

bool unit_braking(const DofUnit& u, double t) {
    using Phase = ClutchTransient::Phase;
    return u.commanded.c1 && u.commanded.c2 &&
           u.cw_transient.settled_phase(t) == Phase::closed &&
           u.ccw_transient.settled_phase(t) == Phase::closed;
}

}  // namespace

SimResult run(const Schedule& schedule, std::vector<DofUnit> units, const MotorSpec& motor,
              const Plant& plant, const SimConfig& cfg) {
    cfg.validate();
    motor.validate();
    plant.clutch.validate();
    plant.loss.validate();
    plant.latency.validate();
    for (auto& u : units) {
        u.screw.validate();
        u.load.validate();
    }

    auto commands = schedule.commands;
    std::stable_sort(commands.begin(), commands.end(),
                     [](const ScheduleCommand& a, const ScheduleCommand& b) {
                         return a.time_s < b.time_s;
                     });

    const double end_s = cfg.end_s >= 0.0 ? cfg.end_s : schedule.horizon_s;
    const long steps = static_cast<long>(std::ceil(end_s / cfg.dt_s - kTimeEps));
    const double omega = 2.0 * std::numbers::pi * motor.speed_rpm / 60.0;
    const double capacity =
        torque_capacity_at_speed(plant.clutch, plant.drive_voltage_V, motor.speed_rpm);
    const MuxPolicy policy{cfg.allow_motor_braking};

    // Per-unit constants. The CW shaft advances the slider, the
    // counter-rotating shaft retracts it.
    const ShaftPair shafts = ShaftPair::from_motor(motor);
    std::vector<double> tension(units.size()), demand(units.size());
    std::vector<double> v_cw(units.size()), v_ccw(units.size());
    for (std::size_t i = 0; i < units.size(); ++i) {
        tension[i] = load_tension(units[i].load);
        demand[i] = required_shaft_torque(units[i].screw, plant.loss, tension[i]);
        v_cw[i] = slider_velocity(units[i].screw, shafts.cw_speed_rpm);
        v_ccw[i] = slider_velocity(units[i].screw, shafts.ccw_speed_rpm);
    }

    SimResult result;
    result.trace.unit_ids.reserve(units.size());
    for (const auto& u : units) result.trace.unit_ids.push_back(u.id);
    result.trace.rows.reserve(static_cast<std::size_t>(steps) + 1);

    std::size_t next_cmd = 0;
    for (long k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * cfg.dt_s;

        while (next_cmd < commands.size() && commands[next_cmd].time_s <= t + kTimeEps) {
            const auto& cmd = commands[next_cmd];
            auto it = std::find_if(units.begin(), units.end(),
                                   [&cmd](const DofUnit& u) { return u.id == cmd.unit_id; });
            if (it == units.end()) {
                throw PhysicsError("sim: schedule references undefined unit " +
                                   std::to_string(cmd.unit_id));
            }
            // Transients anchor at the command's own timestamp so gate timing
            // does not depend on the grid.
            *it = command_unit(*it, cmd.state, cmd.time_s, plant.latency, policy);
            ++next_cmd;
        }

        TraceRow row;
        row.time_s = t;
        row.shaft_rpm = motor.speed_rpm;
        row.units.resize(units.size());

        double torque_sum = cfg.idle_drag_torque_Nm;
        for (std::size_t i = 0; i < units.size(); ++i) {
            DofUnit& u = units[i];
            UnitSample& sample = row.units[i];
            sample.unit_id = u.id;
            sample.position_m = u.slider_position_m;
            sample.c1 = u.commanded.c1;
            sample.c2 = u.commanded.c2;
            sample.load_N = tension[i];

            u.cw_clutch.applied_voltage_V = u.commanded.c1 ? plant.drive_voltage_V : 0.0;
            u.ccw_clutch.applied_voltage_V = u.commanded.c2 ? plant.drive_voltage_V : 0.0;
            u.cw_clutch.engaged_fraction = u.cw_transient.fraction(t);
            u.ccw_clutch.engaged_fraction = u.ccw_transient.fraction(t);
            u.cw_clutch.slipping = false;
            u.ccw_clutch.slipping = false;

            const int dir = unit_motion_direction(u, t);
            double velocity = 0.0;
            if (dir != 0) {
                if (demand[i] > capacity) {
                    if (cfg.strict_slip) {
                        throw PhysicsError("sim: unit " + std::to_string(u.id) + " slips at t=" +
                                           std::to_string(t) + " s (demand " +
                                           std::to_string(demand[i]) + " N·m > capacity " +
                                           std::to_string(capacity) + " N·m)");
                    }
                    sample.transmitted_Nm = capacity;  // slipping: stalls at capacity
                    sample.slipping = true;
                    (dir > 0 ? u.cw_clutch : u.ccw_clutch).slipping = true;
                } else {
                    sample.transmitted_Nm = demand[i];
                    velocity = dir > 0 ? v_cw[i] : v_ccw[i];
                }
            } else if (unit_braking(u, t)) {
                // Both shafts fight through the unit: power burned, no motion.
                sample.transmitted_Nm = 2.0 * std::min(demand[i], capacity);
            }
            torque_sum += sample.transmitted_Nm;

            if (k < steps) {
                u.slider_position_m += velocity * cfg.dt_s;
                const double slack = std::abs(v_cw[i]) * cfg.dt_s + 1e-12;
                if (u.slider_position_m < u.travel_limits.min_m - slack ||
                    u.slider_position_m > u.travel_limits.max_m + slack) {
                    throw PhysicsError("sim: unit " + std::to_string(u.id) +
                                       " travel-limit fault at t=" + std::to_string(t) +
                                       " s (position " + std::to_string(u.slider_position_m) +
                                       " m)");
                }
            }
        }

        if (torque_sum > motor.max_torque_Nm + kTimeEps) {
            throw PhysicsError("sim: motor torque demand " + std::to_string(torque_sum) +
                               " N·m exceeds max " + std::to_string(motor.max_torque_Nm) +
                               " N·m at t=" + std::to_string(t) + " s");
        }
        row.input_torque_Nm = torque_sum;
        row.input_power_W = torque_sum * omega;
        result.trace.rows.push_back(std::move(row));
    }

    result.energy = energy_report(result.trace);
    result.final_units = std::move(units);
    return result;
}

EnergyReport energy_report(const SimTrace& trace) {
    if (trace.rows.empty()) {
        throw ConfigError("energy: trace is empty");
    }
    EnergyReport report;
    const std::size_t n_units = trace.unit_ids.size();
    report.per_unit.resize(n_units);
    for (std::size_t i = 0; i < n_units; ++i) {
        report.per_unit[i].unit_id = trace.unit_ids[i];
    }

    for (std::size_t r = 1; r < trace.rows.size(); ++r) {
        const TraceRow& a = trace.rows[r - 1];
        const TraceRow& b = trace.rows[r];
        const double dt = b.time_s - a.time_s;
        report.input_energy_J += 0.5 * (a.input_power_W + b.input_power_W) * dt;
        for (std::size_t i = 0; i < n_units; ++i) {
            const double omega_a = 2.0 * std::numbers::pi * a.shaft_rpm / 60.0;
            const double omega_b = 2.0 * std::numbers::pi * b.shaft_rpm / 60.0;
            report.per_unit[i].input_J += 0.5 * (a.units[i].transmitted_Nm * omega_a +
                                                 b.units[i].transmitted_Nm * omega_b) * dt;
        }
    }
    for (std::size_t i = 0; i < n_units; ++i) {
        const UnitSample& first = trace.rows.front().units[i];
        const UnitSample& last = trace.rows.back().units[i];
        report.per_unit[i].displacement_m = last.position_m - first.position_m;
        report.per_unit[i].output_J = last.load_N * report.per_unit[i].displacement_m;
        report.output_energy_J += report.per_unit[i].output_J;
    }
    report.efficiency =
        report.input_energy_J > 0.0 ? report.output_energy_J / report.input_energy_J : 0.0;
    return report;
}

void write_trace_csv(std::ostream& out, const SimTrace& trace) {
    out << "time_s,shaft_rpm,input_torque_Nm,input_power_W";
    for (int id : trace.unit_ids) {
        out << ",u" << id << "_position_m,u" << id << "_c1,u" << id << "_c2,u" << id
            << "_transmitted_Nm,u" << id << "_load_N,u" << id << "_slipping";
    }
    out << "\n";
    char buf[64];
    auto num = [&out, &buf](double v, const char* fmt) {
        std::snprintf(buf, sizeof buf, fmt, v);
        out << buf;
    };
    for (const auto& row : trace.rows) {
        num(row.time_s, "%.6f");
        out << ",";
        num(row.shaft_rpm, "%.6f");
        out << ",";
        num(row.input_torque_Nm, "%.9f");
        out << ",";
        num(row.input_power_W, "%.9f");
        for (const auto& u : row.units) {
            out << ",";
            num(u.position_m, "%.9f");
            out << "," << (u.c1 ? 1 : 0) << "," << (u.c2 ? 1 : 0) << ",";
            num(u.transmitted_Nm, "%.9f");
            out << ",";
            num(u.load_N, "%.6f");
            out << "," << (u.slipping ? 1 : 0);
        }
        out << "\n";
    }
}

std::string energy_report_text(const EnergyReport& report, MuxMode mode, double horizon_s) {
    std::ostringstream out;
    char buf[64];
    auto line = [&out, &buf](const std::string& key, double v) {
        std::snprintf(buf, sizeof buf, "%.9f", v);
        out << key << " = " << buf << "\n";
    };
    out << "mode = " << to_string(mode) << "\n";
    line("horizon_s", horizon_s);
    line("input_energy_J", report.input_energy_J);
    line("output_energy_J", report.output_energy_J);
    line("efficiency", report.efficiency);
    for (const auto& u : report.per_unit) {
        const std::string prefix = "unit_" + std::to_string(u.unit_id);
        line(prefix + "_displacement_m", u.displacement_m);
        line(prefix + "_output_J", u.output_J);
        line(prefix + "_input_J", u.input_J);
    }
    return out.str();
}

}  // namespace muxsim
