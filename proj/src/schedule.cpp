#include "muxsim/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "muxsim/errors.hpp"

namespace muxsim {

const char* to_string(MuxMode m) { return m == MuxMode::siso ? "siso" : "simo"; }

void PowerBudget::validate() const {
    if (!(motor_max_power_W > 0.0) || !(per_clutch_max_power_W > 0.0)) {
        throw ConfigError("budget: power limits must be > 0");
    }
}

namespace {

constexpr double kTimeEps = 1e-9;

double shaft_omega(const MotorSpec& motor) {
    return 2.0 * std::numbers::pi * motor.speed_rpm / 60.0;
}

const DofUnit& find_unit(const std::vector<DofUnit>& units, int id) {
    for (const auto& u : units) {
        if (u.id == id) return u;
    }
    throw PlanError("plan: goal references unknown unit " + std::to_string(id));
}

void check_goals(const std::vector<Goal>& goals, const std::vector<DofUnit>& units) {
    std::vector<int> seen;
    for (const auto& g : goals) {
        if (std::find(seen.begin(), seen.end(), g.unit_id) != seen.end()) {
            throw PlanError("plan: duplicate goal for unit " + std::to_string(g.unit_id));
        }
        seen.push_back(g.unit_id);
        const DofUnit& u = find_unit(units, g.unit_id);
        if (g.target_position_m < u.travel_limits.min_m - kTimeEps ||
            g.target_position_m > u.travel_limits.max_m + kTimeEps) {
            throw PlanError("plan: unit " + std::to_string(g.unit_id) + " target " +
                            std::to_string(g.target_position_m) + " m outside travel limits");
        }
    }
}

// Per-goal motion arithmetic shared by both planners.
struct GoalPlan {
    const Goal* goal = nullptr;
    const DofUnit* unit = nullptr;
    double dx = 0.0;
    double speed = 0.0;  // |slider velocity|
    double t_on = 0.0;
    double t_off = 0.0;
    double t_move = 0.0;
    double load_N = 0.0;
    double torque_Nm = 0.0;
};

GoalPlan make_goal_plan(const Goal& g, const std::vector<DofUnit>& units,
                        const MotorSpec& motor, const Plant& plant) {
    GoalPlan p;
    p.goal = &g;
    p.unit = &find_unit(units, g.unit_id);
    p.dx = g.target_position_m - p.unit->slider_position_m;
    p.speed = std::abs(slider_velocity(p.unit->screw, motor.speed_rpm));
    p.load_N = load_tension(p.unit->load);
    p.t_on = switch_latency(plant.latency, p.load_N, Transition::on);
    p.t_off = switch_latency(plant.latency, p.load_N, Transition::off);
    p.torque_Nm = required_shaft_torque(p.unit->screw, plant.loss, p.load_N);
    if (p.dx != 0.0) {
        if (!(p.speed > 0.0)) {
            throw PlanError("plan: unit " + std::to_string(g.unit_id) +
                            " cannot reach target with a stopped motor");
        }
        p.t_move = std::abs(p.dx) / p.speed;
    }
    return p;
}

void check_slip_margin(const GoalPlan& p, const MotorSpec& motor, const Plant& plant,
                       const PlanOptions& options, std::vector<std::string>& warnings) {
    const double cap =
        torque_capacity_at_speed(plant.clutch, plant.drive_voltage_V, motor.speed_rpm);
    if (p.torque_Nm > cap) {
        std::ostringstream msg;
        msg << "unit " << p.goal->unit_id << ": demanded torque " << p.torque_Nm
            << " N·m exceeds clutch capacity " << cap << " N·m at " << motor.speed_rpm
            << " rpm (will slip)";
        if (options.strict_slip) throw PlanError(msg.str());
        warnings.push_back(msg.str());
    }
}

void check_deadline(const GoalPlan& p, double reach_time_s) {
    if (p.goal->deadline_s && reach_time_s > *p.goal->deadline_s + kTimeEps) {
        throw PlanError("plan: unit " + std::to_string(p.goal->unit_id) +
                        " reaches target at " + std::to_string(reach_time_s) +
                        " s, after its deadline " + std::to_string(*p.goal->deadline_s) + " s");
    }
}

}  // namespace

Schedule plan_siso(const std::vector<Goal>& goals, const MotorSpec& motor,
                   const std::vector<DofUnit>& units, const Plant& plant,
                   const PlanOptions& options) {
    motor.validate();
    check_goals(goals, units);

    Schedule s;
    s.mode = MuxMode::siso;
    double cursor = 0.0;
    for (const auto& g : goals) {
        const GoalPlan p = make_goal_plan(g, units, motor, plant);
        if (p.dx == 0.0) {
            check_deadline(p, cursor);
            continue;  // zero-motion slot
        }
        check_slip_margin(p, motor, plant, options, s.warnings);
        s.commands.push_back({cursor, g.unit_id, p.dx > 0.0 ? kPairCw : kPairCcw});
        const double reach = cursor + p.t_on + p.t_move;
        s.commands.push_back({reach, g.unit_id, kPairHold});
        check_deadline(p, reach);
        cursor = reach + p.t_off;
    }
    s.horizon_s = cursor;
    return s;
}

Schedule plan_simo(const std::vector<Goal>& goals, const MotorSpec& motor,
                   const std::vector<DofUnit>& units, const PowerBudget& budget,
                   const Plant& plant, const PlanOptions& options) {
    motor.validate();
    budget.validate();
    check_goals(goals, units);

    const double omega = shaft_omega(motor);

    std::vector<GoalPlan> plans;
    for (const auto& g : goals) {
        plans.push_back(make_goal_plan(g, units, motor, plant));
    }

    Schedule s;
    s.mode = MuxMode::simo;

    for (const auto& p : plans) {
        if (p.dx == 0.0) continue;
        check_slip_margin(p, motor, plant, options, s.warnings);
        const double clutch_power = p.torque_Nm * omega;
        if (clutch_power > budget.per_clutch_max_power_W + kTimeEps) {
            std::ostringstream msg;
            msg << "plan: unit " << p.goal->unit_id << " needs " << clutch_power
                << " W through one clutch, above the per-clutch limit "
                << budget.per_clutch_max_power_W << " W";
            throw PlanError(msg.str());
        }
    }

    // Movers are partitioned into waves; wave 0 holds everything unless the
    // aggregate power exceeds the motor budget and auto_serialize is on, in
    // which case the largest loads are pushed to later waves.
    std::vector<std::vector<const GoalPlan*>> waves;
    std::vector<const GoalPlan*> pending;
    for (const auto& p : plans) {
        if (p.dx != 0.0) pending.push_back(&p);
    }
    while (!pending.empty()) {
        std::vector<const GoalPlan*> wave = pending;
        std::vector<const GoalPlan*> deferred;
        auto wave_power = [&wave, omega]() {
            double sum = 0.0;
            for (const auto* p : wave) sum += p->torque_Nm * omega;
            return sum;
        };
        while (wave_power() > budget.motor_max_power_W + kTimeEps) {
            if (wave.size() == 1 || !options.auto_serialize) {
                std::ostringstream msg;
                double t_begin = 0.0, t_end = wave.front()->t_on + wave.front()->t_move;
                for (const auto* p : wave) {
                    t_begin = std::max(t_begin, p->t_on);
                    t_end = std::min(t_end, p->t_on + p->t_move);
                }
                msg << "plan: aggregate input power " << wave_power() << " W exceeds budget "
                    << budget.motor_max_power_W << " W while all " << wave.size()
                    << " units move (t in [" << t_begin << ", " << std::max(t_begin, t_end)
                    << "] s of the wave)";
                throw PlanError(msg.str());
            }
            // Defer the largest load; ties defer the latest goal in input order.
            auto victim = std::max_element(
                wave.begin(), wave.end(),
                [](const GoalPlan* a, const GoalPlan* b) { return a->load_N < b->load_N; });
            deferred.push_back(*victim);
            wave.erase(victim);
        }
        waves.push_back(wave);
        pending = deferred;
    }
    if (waves.size() > 1) {
        s.warnings.push_back("plan: power budget forced serialization into " +
                             std::to_string(waves.size()) + " waves");
    }

    double wave_start = 0.0;
    for (const auto& wave : waves) {
        double wave_end = wave_start;
        for (const auto* p : wave) {
            s.commands.push_back({wave_start, p->goal->unit_id, p->dx > 0.0 ? kPairCw : kPairCcw});
            const double reach = wave_start + p->t_on + p->t_move;
            s.commands.push_back({reach, p->goal->unit_id, kPairHold});
            check_deadline(*p, reach);
            wave_end = std::max(wave_end, reach + p->t_off);
        }
        wave_start = wave_end;
    }
    std::stable_sort(s.commands.begin(), s.commands.end(),
                     [](const ScheduleCommand& a, const ScheduleCommand& b) {
                         return a.time_s < b.time_s;
                     });
    s.horizon_s = wave_start;
    for (const auto& p : plans) {
        if (p.dx == 0.0) check_deadline(p, 0.0);
    }
    return s;
}

// -----------------------------------------------------------------------------
// Validation
// -----------------------------------------------------------------------------

namespace {

struct UnitReplay {
    const DofUnit* unit = nullptr;
    ClutchPairState commanded;       // current commanded pair
    double engage_cmd_s = 0.0;       // time of the active engage command
    double t_on = 0.0;
    double t_off = 0.0;
    double busy_until_s = -1.0;      // end of the last release dead time
    double nonhold_since_s = 0.0;
    double position_m = 0.0;
    double load_N = 0.0;
    double torque_Nm = 0.0;
};

struct MotionWindow {
    int unit_id = 0;
    double begin_s = 0.0;
    double end_s = 0.0;
    double torque_Nm = 0.0;
};

}  // namespace

ValidationReport validate_schedule(const Schedule& s, const std::vector<DofUnit>& units,
                                   const MotorSpec& motor, const PowerBudget& budget,
                                   const Plant& plant, const ValidateOptions& options) {
    ValidationReport report;
    auto violate = [&report](const std::string& kind, double t0, double t1, int unit,
                             const std::string& detail) {
        report.violations.push_back({kind, t0, t1, unit, detail});
    };

    const double omega = shaft_omega(motor);
    const double capacity =
        torque_capacity_at_speed(plant.clutch, plant.drive_voltage_V, motor.speed_rpm);

    std::map<int, UnitReplay> replay;
    for (const auto& u : units) {
        UnitReplay r;
        r.unit = &u;
        r.position_m = u.slider_position_m;
        r.load_N = load_tension(u.load);
        r.t_on = switch_latency(plant.latency, r.load_N, Transition::on);
        r.t_off = switch_latency(plant.latency, r.load_N, Transition::off);
        r.torque_Nm = required_shaft_torque(u.screw, plant.loss, r.load_N);
        replay.emplace(u.id, r);
    }

    std::vector<MotionWindow> windows;
    std::vector<std::pair<double, double>> nonhold_intervals;  // for SISO exclusivity

    double prev_t = -1.0;
    for (const auto& cmd : s.commands) {
        if (cmd.time_s < prev_t - kTimeEps) {
            violate("ordering", cmd.time_s, cmd.time_s, cmd.unit_id,
                    "command times are not non-decreasing");
        }
        prev_t = std::max(prev_t, cmd.time_s);

        auto it = replay.find(cmd.unit_id);
        if (it == replay.end()) {
            violate("unknown-unit", cmd.time_s, cmd.time_s, cmd.unit_id,
                    "command references an undefined unit");
            continue;
        }
        UnitReplay& r = it->second;
        const PairCommand pc = resolve_state(cmd.state);
        if (pc == PairCommand::Brake && !options.allow_motor_braking) {
            violate("forbidden-state", cmd.time_s, cmd.time_s, cmd.unit_id,
                    "(1,1) motor braking rejected by policy");
            continue;
        }
        if (cmd.state == r.commanded) continue;

        const PairCommand prev = resolve_state(r.commanded);
        if (pc != PairCommand::Hold) {
            if (cmd.time_s < r.busy_until_s - kTimeEps) {
                violate("sequencing", cmd.time_s, r.busy_until_s, cmd.unit_id,
                        "engage before the previous release dead time completed");
            }
            if (prev != PairCommand::Hold && prev != pc) {
                violate("sequencing", cmd.time_s, cmd.time_s, cmd.unit_id,
                        "direction reversal without passing through Hold");
            }
            r.engage_cmd_s = cmd.time_s;
            r.nonhold_since_s = cmd.time_s;
        } else if (prev != PairCommand::Hold) {
            // Close the motion window (empty when Hold precedes gate closure).
            const double begin = r.engage_cmd_s + r.t_on;
            const double end = cmd.time_s;
            if (end > begin + kTimeEps && prev != PairCommand::Brake) {
                const int dir = prev == PairCommand::CW ? 1 : -1;
                const double v = std::abs(slider_velocity(r.unit->screw, motor.speed_rpm));
                windows.push_back({cmd.unit_id, begin, end, r.torque_Nm});
                r.position_m += dir * v * (end - begin);
                if (r.position_m < r.unit->travel_limits.min_m - kTimeEps ||
                    r.position_m > r.unit->travel_limits.max_m + kTimeEps) {
                    violate("travel", begin, end, cmd.unit_id,
                            "slider reaches " + std::to_string(r.position_m) +
                                " m, outside [" + std::to_string(r.unit->travel_limits.min_m) +
                                ", " + std::to_string(r.unit->travel_limits.max_m) + "]");
                }
            }
            r.busy_until_s = cmd.time_s + r.t_off;
            nonhold_intervals.push_back({r.nonhold_since_s, cmd.time_s + r.t_off});
        }
        r.commanded = cmd.state;
    }

    for (auto& [id, r] : replay) {
        if (resolve_state(r.commanded) != PairCommand::Hold) {
            violate("dangling", s.horizon_s, s.horizon_s, id,
                    "unit does not end in Hold");
        }
    }

    if (s.mode == MuxMode::siso) {
        auto sorted = nonhold_intervals;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 1; i < sorted.size(); ++i) {
            if (sorted[i].first < sorted[i - 1].second - kTimeEps) {
                violate("exclusivity", sorted[i].first, sorted[i - 1].second, -1,
                        "two units are simultaneously in a non-Hold state in SISO mode");
            }
        }
    }

    // Aggregate power over concurrent motion windows (sweepline over edges).
    std::vector<std::pair<double, double>> edges;  // (time, +/-torque)
    for (const auto& w : windows) {
        edges.push_back({w.begin_s, w.torque_Nm});
        edges.push_back({w.end_s, -w.torque_Nm});
        if (w.torque_Nm * omega > budget.per_clutch_max_power_W + kTimeEps) {
            violate("budget", w.begin_s, w.end_s, w.unit_id,
                    "per-clutch power above limit");
        }
        if (w.torque_Nm > capacity + kTimeEps) {
            const std::string msg = "unit " + std::to_string(w.unit_id) +
                                    " demanded torque exceeds clutch capacity (slip)";
            if (options.strict_slip) {
                violate("slip", w.begin_s, w.end_s, w.unit_id, msg);
            } else {
                report.warnings.push_back(msg);
            }
        }
    }
    std::sort(edges.begin(), edges.end());
    double torque_sum = 0.0;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        torque_sum += edges[i].second;
        const double t = edges[i].first;
        const double t_next = i + 1 < edges.size() ? edges[i + 1].first : t;
        if (t_next > t + kTimeEps && torque_sum * omega > budget.motor_max_power_W + kTimeEps) {
            violate("budget", t, t_next, -1,
                    "aggregate input power " + std::to_string(torque_sum * omega) +
                        " W exceeds motor budget " +
                        std::to_string(budget.motor_max_power_W) + " W");
        }
    }

    report.pass = report.violations.empty();
    return report;
}

// -----------------------------------------------------------------------------
// Timeline serialization
// -----------------------------------------------------------------------------

std::string serialize_schedule(const Schedule& s) {
    std::ostringstream out;
    out.precision(17);
    out << "# muxsim schedule v1\n";
    out << "mode = " << to_string(s.mode) << "\n";
    out << "horizon_s = " << s.horizon_s << "\n";
    for (const auto& c : s.commands) {
        out << "cmd = " << c.time_s << " " << c.unit_id << " " << (c.state.c1 ? 1 : 0) << " "
            << (c.state.c2 ? 1 : 0) << "\n";
    }
    return out.str();
}

void write_events_csv(std::ostream& out, const Schedule& s) {
    out << "time_s,unit_id,old_c1,old_c2,new_c1,new_c2,old_state,new_state\n";
    auto sorted = s.commands;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const ScheduleCommand& a, const ScheduleCommand& b) {
                         return a.time_s < b.time_s;
                     });
    std::map<int, ClutchPairState> state;
    char buf[32];
    for (const auto& cmd : sorted) {
        const ClutchPairState old = state[cmd.unit_id];
        if (old == cmd.state) continue;
        std::snprintf(buf, sizeof buf, "%.6f", cmd.time_s);
        out << buf << "," << cmd.unit_id << "," << (old.c1 ? 1 : 0) << "," << (old.c2 ? 1 : 0)
            << "," << (cmd.state.c1 ? 1 : 0) << "," << (cmd.state.c2 ? 1 : 0) << ","
            << to_string(resolve_state(old)) << "," << to_string(resolve_state(cmd.state))
            << "\n";
        state[cmd.unit_id] = cmd.state;
    }
}

Schedule parse_schedule(const std::string& text) {
    Schedule s;
    bool have_mode = false;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key, eq;
        if (!(ls >> key)) continue;  // blank
        if (!(ls >> eq) || eq != "=") {
            throw ConfigError("schedule line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        if (key == "mode") {
            std::string v;
            ls >> v;
            if (v == "siso") s.mode = MuxMode::siso;
            else if (v == "simo") s.mode = MuxMode::simo;
            else throw ConfigError("schedule line " + std::to_string(lineno) + ": unknown mode '" + v + "'");
            have_mode = true;
        } else if (key == "horizon_s") {
            if (!(ls >> s.horizon_s)) {
                throw ConfigError("schedule line " + std::to_string(lineno) + ": bad horizon_s");
            }
        } else if (key == "cmd") {
            ScheduleCommand c;
            int c1 = 0, c2 = 0;
            if (!(ls >> c.time_s >> c.unit_id >> c1 >> c2) || (c1 & ~1) || (c2 & ~1)) {
                throw ConfigError("schedule line " + std::to_string(lineno) +
                                  ": expected 'cmd = <time> <unit> <0|1> <0|1>'");
            }
            c.state = {c1 == 1, c2 == 1};
            s.commands.push_back(c);
        } else {
            throw ConfigError("schedule line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    if (!have_mode) {
        throw ConfigError("schedule: missing 'mode' entry");
    }
    return s;
}

}  // namespace muxsim
