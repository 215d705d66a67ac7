#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "muxsim/clutch.hpp"
#include "muxsim/drivetrain.hpp"
#include "muxsim/mux_logic.hpp"

namespace muxsim {

/// Everything the planner/simulator needs besides the motor and the units.
struct Plant {
    ClutchParams clutch = ClutchParams::defaults();
    FrictionLossModel loss;
    SwitchLatencyModel latency = SwitchLatencyModel::defaults();
    double drive_voltage_V = 900.0;
};

struct Goal {
    int unit_id = 0;
    double target_position_m = 0.0;
    std::optional<double> deadline_s;

    bool operator==(const Goal&) const = default;
};

enum class MuxMode { siso, simo };

const char* to_string(MuxMode m);

struct ScheduleCommand {
    double time_s = 0.0;
    int unit_id = 0;
    ClutchPairState state;
};

/// Timeline of clutch-pair commands. Commands are sorted by time; horizon_s
/// covers the last release dead time.
struct Schedule {
    MuxMode mode = MuxMode::siso;
    double horizon_s = 0.0;
    std::vector<ScheduleCommand> commands;
    std::vector<std::string> warnings;  // non-fatal planner notes (e.g. slip margin)
};

struct PowerBudget {
    double motor_max_power_W = 100.0;
    double per_clutch_max_power_W = 2.70;

    bool operator==(const PowerBudget&) const = default;
    void validate() const;
};

struct PlanOptions {
    bool strict_slip = false;
    bool auto_serialize = false;
};

/// Time-division plan: one contiguous slot per goal in input order,
/// slot = on-latency + |dx|/v + off-latency; every other unit holds.
Schedule plan_siso(const std::vector<Goal>& goals, const MotorSpec& motor,
                   const std::vector<DofUnit>& units, const Plant& plant,
                   const PlanOptions& options = {});

/// Concurrent plan: all goal units engage at t = 0 and each switches to Hold
/// at target arrival. Validates the aggregate power demand against the
/// budget; with auto_serialize the largest-load goals are greedily deferred
/// into later waves instead of erroring.
Schedule plan_simo(const std::vector<Goal>& goals, const MotorSpec& motor,
                   const std::vector<DofUnit>& units, const PowerBudget& budget,
                   const Plant& plant, const PlanOptions& options = {});

struct Violation {
    std::string kind;  // "exclusivity" | "travel" | "budget" | "forbidden-state" | ...
    double time_begin_s = 0.0;
    double time_end_s = 0.0;
    int unit_id = -1;  // -1 when not unit-specific
    std::string detail;
};

struct ValidationReport {
    bool pass = true;
    std::vector<Violation> violations;
    std::vector<std::string> warnings;
};

struct ValidateOptions {
    bool allow_motor_braking = false;
    bool strict_slip = false;
};

/// Replays the schedule against the units (exact event arithmetic, no time
/// stepping) and reports every SISO-exclusivity, travel, budget, slip and
/// forbidden-state violation. Violations are data; this never throws for
/// schedule content.
ValidationReport validate_schedule(const Schedule& s, const std::vector<DofUnit>& units,
                                   const MotorSpec& motor, const PowerBudget& budget,
                                   const Plant& plant, const ValidateOptions& options = {});

/// Plain-text timeline format, one "cmd = <t> <unit> <c1> <c2>" line per
/// command. Round-trips through parse_schedule.
std::string serialize_schedule(const Schedule& s);
Schedule parse_schedule(const std::string& text);

/// Transition-event CSV: one row per state change with the previous and new
/// pair state (units start in Hold). No-op commands are dropped.
void write_events_csv(std::ostream& out, const Schedule& s);

}  // namespace muxsim
