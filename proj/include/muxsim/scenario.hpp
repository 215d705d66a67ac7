#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "muxsim/calibrate.hpp"
#include "muxsim/schedule.hpp"
#include "muxsim/sim.hpp"

namespace muxsim {

enum class ScenarioMode { siso, simo, replay };

const char* to_string(ScenarioMode m);

struct UnitConfig {
    int id = 0;
    LoadSpec load;
    TravelLimits travel;
    double start_m = 0.0;

    bool operator==(const UnitConfig&) const = default;
};

/// A complete run description as read from a .scn file. See README for the
/// grammar (INI-style sections, '#' comments, 'key = value' entries).
struct Scenario {
    ScenarioMode mode = ScenarioMode::siso;
    std::string schedule_path;  // replay mode only
    ClutchParams clutch = ClutchParams::defaults();
    double drive_voltage_V = 900.0;
    MotorSpec motor;
    LeadscrewSpec screw;
    FrictionLossModel loss;  // zero-loss (ideal) unless configured
    SwitchLatencyModel latency = SwitchLatencyModel::defaults();
    PowerBudget budget;
    SimConfig sim;
    std::vector<UnitConfig> units;
    std::vector<Goal> goals;

    bool operator==(const Scenario&) const = default;

    void validate() const;
};

/// Throws ConfigError with "line N:" diagnostics on any schema violation.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

/// Canonical full dump; parse(serialize(s)) == s.
std::string serialize_scenario(const Scenario& s);

std::vector<DofUnit> make_units(const Scenario& s);
Plant make_plant(const Scenario& s);

/// CSV inputs for the fit subcommand. An optional header row is skipped.
/// Throws ConfigError on empty or malformed files.
std::vector<TorqueVoltagePoint> read_torque_voltage_csv(std::istream& in);
std::vector<EfficiencyPoint> read_efficiency_csv(std::istream& in);

}  // namespace muxsim
