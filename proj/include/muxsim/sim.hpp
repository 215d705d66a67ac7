#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "muxsim/schedule.hpp"

namespace muxsim {

struct SimConfig {
    double dt_s = 0.001;
    double end_s = -1.0;  // < 0: use the schedule horizon
    bool strict_slip = false;
    bool allow_motor_braking = false;
    double idle_drag_torque_Nm = 0.0;
    long seed = 0;  // reserved; the simulation is deterministic

    bool operator==(const SimConfig&) const = default;
    void validate() const;
};

struct UnitSample {
    int unit_id = 0;
    double position_m = 0.0;
    bool c1 = false;
    bool c2 = false;
    double transmitted_Nm = 0.0;
    double load_N = 0.0;
    bool slipping = false;
};

struct TraceRow {
    double time_s = 0.0;
    double shaft_rpm = 0.0;
    double input_torque_Nm = 0.0;
    double input_power_W = 0.0;
    std::vector<UnitSample> units;
};

struct SimTrace {
    std::vector<int> unit_ids;
    std::vector<TraceRow> rows;
};

struct UnitEnergy {
    int unit_id = 0;
    double displacement_m = 0.0;
    double output_J = 0.0;
    double input_J = 0.0;
};

struct EnergyReport {
    double input_energy_J = 0.0;
    double output_energy_J = 0.0;
    double efficiency = 0.0;  // 0 when no input energy
    std::vector<UnitEnergy> per_unit;
};

struct SimResult {
    SimTrace trace;
    EnergyReport energy;
    std::vector<DofUnit> final_units;
};

/// Fixed-step quasi-static execution of a schedule. Deterministic: identical
/// inputs produce bit-identical traces. Throws PhysicsError on travel-limit
/// faults (with one integration step of slack), on motor torque demand above
/// max_torque_Nm, and on clutch slip when strict_slip is set; without
/// strict_slip a slipping unit stalls and is flagged in the trace.
SimResult run(const Schedule& schedule, std::vector<DofUnit> units, const MotorSpec& motor,
              const Plant& plant, const SimConfig& cfg);

/// Trapezoidal input-energy integral plus net displacement x tension per
/// unit. Throws ConfigError on an empty trace.
EnergyReport energy_report(const SimTrace& trace);

/// One row per step, fixed column order and decimal precision (see README).
void write_trace_csv(std::ostream& out, const SimTrace& trace);

std::string energy_report_text(const EnergyReport& report, MuxMode mode, double horizon_s);

}  // namespace muxsim
