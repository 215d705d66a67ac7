#pragma once

#include <string>

#include "muxsim/scenario.hpp"

namespace muxsim {

/// Flags shared by the simulate/validate subcommands; CLI flags override the
/// scenario's [sim] section.
struct CliOverrides {
    std::string out_dir;  // empty: $MUXSIM_OUT or "."
    double dt_s = -1.0;   // < 0: keep scenario value
    bool strict_slip = false;
    bool allow_braking = false;
    bool auto_serialize = false;
};

/// Builds the schedule for a scenario (plans SISO/SIMO, or loads the replay
/// timeline relative to scenario_dir).
Schedule build_schedule(const Scenario& s, const CliOverrides& o, const std::string& scenario_dir);

/// simulate: plan + validate + run + write <out>/trace.csv, <out>/energy.txt
/// and <out>/schedule.tl. Nothing is written on failure.
int cmd_simulate(const std::string& scenario_path, const CliOverrides& o);

/// validate: plan/load and check; prints PASS or one line per violation.
int cmd_validate(const std::string& scenario_path, const CliOverrides& o);

/// characterize: derived figures (capacities, max power, self-lock verdict,
/// per-unit torques and latencies) as 'key = value' lines. curve_out, when
/// non-empty, additionally writes the torque-vs-voltage curve CSV.
std::string characterize_text(const Scenario& s);
int cmd_characterize(const std::string& scenario_path, const std::string& curve_out = "");

/// fit: air-gap or loss-model calibration from CSV; prints a scenario
/// fragment on stdout.
int cmd_fit_gap(const std::string& csv_path, bool fit_mu);
int cmd_fit_loss(const std::string& csv_path, double lead_m_per_rev);

int cli_main(int argc, char** argv);

}  // namespace muxsim
