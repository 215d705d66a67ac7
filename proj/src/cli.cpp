#include "muxsim/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "muxsim/errors.hpp"

namespace muxsim {

namespace {

namespace fs = std::filesystem;

std::string resolve_out_dir(const CliOverrides& o) {
    if (!o.out_dir.empty()) return o.out_dir;
    if (const char* env = std::getenv("MUXSIM_OUT"); env && *env) return env;
    return ".";
}

Scenario load_with_overrides(const std::string& path, const CliOverrides& o) {
    Scenario s = load_scenario(path);
    if (o.dt_s > 0.0) s.sim.dt_s = o.dt_s;
    if (o.strict_slip) s.sim.strict_slip = true;
    if (o.allow_braking) s.sim.allow_motor_braking = true;
    s.validate();
    return s;
}

std::vector<Goal> scenario_goals(const Scenario& s) { return s.goals; }

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write '" + path.string() + "'");
    }
    out << content;
}

}  // namespace

Schedule build_schedule(const Scenario& s, const CliOverrides& o,
                        const std::string& scenario_dir) {
    const Plant plant = make_plant(s);
    const auto units = make_units(s);
    PlanOptions opts;
    opts.strict_slip = s.sim.strict_slip;
    opts.auto_serialize = o.auto_serialize;
    switch (s.mode) {
        case ScenarioMode::siso:
            return plan_siso(scenario_goals(s), s.motor, units, plant, opts);
        case ScenarioMode::simo:
            return plan_simo(scenario_goals(s), s.motor, units, s.budget, plant, opts);
        case ScenarioMode::replay: {
            fs::path p = s.schedule_path;
            if (p.is_relative()) p = fs::path(scenario_dir) / p;
            std::ifstream in(p);
            if (!in) {
                throw ConfigError("cannot open schedule file '" + p.string() + "'");
            }
            std::ostringstream buf;
            buf << in.rdbuf();
            return parse_schedule(buf.str());
        }
    }
    throw ConfigError("scenario: unknown mode");
}

int cmd_simulate(const std::string& scenario_path, const CliOverrides& o) {
    try {
        const Scenario s = load_with_overrides(scenario_path, o);
        const std::string dir = fs::path(scenario_path).parent_path().string();
        const Schedule schedule = build_schedule(s, o, dir);
        for (const auto& w : schedule.warnings) {
            std::cerr << "warning: " << w << "\n";
        }

        ValidateOptions vopts{s.sim.allow_motor_braking, s.sim.strict_slip};
        const auto units = make_units(s);
        const auto report =
            validate_schedule(schedule, units, s.motor, s.budget, make_plant(s), vopts);
        if (!report.pass) {
            for (const auto& v : report.violations) {
                std::cerr << "violation [" << v.kind << "] t=" << v.time_begin_s;
                if (v.unit_id >= 0) std::cerr << " unit=" << v.unit_id;
                std::cerr << ": " << v.detail << "\n";
            }
            return static_cast<int>(ExitCode::physics);
        }

        const SimResult result = run(schedule, units, s.motor, make_plant(s), s.sim);

        const fs::path out_dir = resolve_out_dir(o);
        fs::create_directories(out_dir);
        std::ostringstream trace;
        write_trace_csv(trace, result.trace);
        std::ostringstream events;
        write_events_csv(events, schedule);
        const MuxMode mode = schedule.mode;
        write_file(out_dir / "trace.csv", trace.str());
        write_file(out_dir / "energy.txt",
                   energy_report_text(result.energy, mode, schedule.horizon_s));
        write_file(out_dir / "schedule.tl", serialize_schedule(schedule));
        write_file(out_dir / "events.csv", events.str());

        std::printf("simulated %.3f s, input %.6f J, output %.6f J, efficiency %.4f\n",
                    schedule.horizon_s, result.energy.input_energy_J,
                    result.energy.output_energy_J, result.energy.efficiency);
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.exit_code());
    }
}

int cmd_validate(const std::string& scenario_path, const CliOverrides& o) {
    try {
        const Scenario s = load_with_overrides(scenario_path, o);
        const std::string dir = fs::path(scenario_path).parent_path().string();
        const Schedule schedule = build_schedule(s, o, dir);
        ValidateOptions vopts{s.sim.allow_motor_braking, s.sim.strict_slip};
        const auto report = validate_schedule(schedule, make_units(s), s.motor, s.budget,
                                              make_plant(s), vopts);
        for (const auto& w : report.warnings) {
            std::cerr << "warning: " << w << "\n";
        }
        if (report.pass) {
            std::printf("PASS: %zu commands, horizon %.3f s\n", schedule.commands.size(),
                        schedule.horizon_s);
            return 0;
        }
        for (const auto& v : report.violations) {
            std::printf("FAIL [%s] t=[%.3f, %.3f]%s%s: %s\n", v.kind.c_str(), v.time_begin_s,
                        v.time_end_s, v.unit_id >= 0 ? " unit " : "",
                        v.unit_id >= 0 ? std::to_string(v.unit_id).c_str() : "",
                        v.detail.c_str());
        }
        return static_cast<int>(ExitCode::physics);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.exit_code());
    }
}

std::string characterize_text(const Scenario& s) {
    std::ostringstream out;
    char buf[128];
    auto line = [&out, &buf](const char* fmt, auto... args) {
        std::snprintf(buf, sizeof buf, fmt, args...);
        out << buf << "\n";
    };

    const double cap_drive = torque_capacity(s.clutch, s.drive_voltage_V);
    const double cap_zero = torque_capacity(s.clutch, 0.0);
    const double omega_knee = 2.0 * std::numbers::pi * s.clutch.slip_knee_rpm / 60.0;
    line("capacity_at_drive_voltage_Nm = %.9f  # at %.1f V", cap_drive, s.drive_voltage_V);
    line("capacity_at_zero_voltage_Nm = %.9f", cap_zero);
    line("electrostatic_pressure_Pa = %.3f  # at %.1f V",
         electrostatic_pressure(s.clutch, s.drive_voltage_V), s.drive_voltage_V);
    line("max_clutching_power_W = %.9f  # capacity x shaft speed at the %.1f rpm knee",
         cap_drive * omega_knee, s.clutch.slip_knee_rpm);
    line("friction_coefficient = %.9f", s.clutch.friction_coefficient);
    line("engagement_time_s = %.6f", s.clutch.engagement_time_s);
    line("disengagement_time_s = %.6f", s.clutch.disengagement_time_s);

    const double fa = std::atan(s.screw.thread_friction_coefficient) * 180.0 / std::numbers::pi;
    const double la = std::atan(s.screw.thread_lead_m_per_rev /
                                (std::numbers::pi * s.screw.mean_diameter_m)) *
                      180.0 / std::numbers::pi;
    const bool locking = self_locks(s.screw);
    line("self_locking = %s  # friction angle %.2f deg vs lead angle %.2f deg",
         locking ? "yes" : "back-drivable", fa, la);
    line("slider_speed_m_s = %.9f  # at %.1f rpm",
         slider_velocity(s.screw, s.motor.speed_rpm), s.motor.speed_rpm);

    for (const auto& uc : s.units) {
        const double load_N = load_tension(uc.load);
        const double torque = required_shaft_torque(s.screw, s.loss, load_N);
        const double ideal =
            load_N * s.screw.effective_lead_m_per_rev / (2.0 * std::numbers::pi);
        line("unit_%d_load_N = %.6f", uc.id, load_N);
        line("unit_%d_required_torque_Nm = %.9f", uc.id, torque);
        line("unit_%d_on_latency_s = %.6f", uc.id,
             switch_latency(s.latency, load_N, Transition::on));
        line("unit_%d_off_latency_s = %.6f", uc.id,
             switch_latency(s.latency, load_N, Transition::off));
        line("unit_%d_steady_efficiency = %.6f", uc.id, torque > 0.0 ? ideal / torque : 0.0);
    }
    return out.str();
}

int cmd_characterize(const std::string& scenario_path, const std::string& curve_out) {
    try {
        const Scenario s = load_scenario(scenario_path);
        const std::string text = characterize_text(s);
        std::fputs(text.c_str(), stdout);
        if (!self_locks(s.screw)) {
            std::cerr << "warning: leadscrew is back-drivable; Hold will not keep position "
                         "under load\n";
        }
        if (!curve_out.empty()) {
            // plot data: holding torque vs drive voltage up to the ceiling
            std::ostringstream csv;
            csv << "voltage_V,torque_Nm\n";
            char buf[64];
            const int steps = 100;
            for (int i = 0; i <= steps; ++i) {
                const double v = s.clutch.voltage_ceiling_V * i / steps;
                std::snprintf(buf, sizeof buf, "%.3f,%.9f\n", v, torque_capacity(s.clutch, v));
                csv << buf;
            }
            write_file(curve_out, csv.str());
        }
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.exit_code());
    }
}

int cmd_fit_gap(const std::string& csv_path, bool fit_mu) {
    try {
        std::ifstream in(csv_path);
        if (!in) {
            throw ConfigError("cannot open '" + csv_path + "'");
        }
        const auto data = read_torque_voltage_csv(in);
        const auto result = fit_air_gap(data, ClutchParams::defaults(), fit_mu);
        std::printf("[clutch]\n");
        std::printf("air_gap_m = %.17g\n", result.params.air_gap_m);
        if (fit_mu) {
            std::printf("friction_coefficient = %.17g\n", result.params.friction_coefficient);
        }
        std::fprintf(stderr, "fit: rms residual %.3e N·m after %d iterations\n",
                     result.rms_residual_Nm, result.iterations);
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.exit_code());
    }
}

int cmd_fit_loss(const std::string& csv_path, double lead_m_per_rev) {
    try {
        std::ifstream in(csv_path);
        if (!in) {
            throw ConfigError("cannot open '" + csv_path + "'");
        }
        const auto points = read_efficiency_csv(in);
        LeadscrewSpec screw;
        screw.effective_lead_m_per_rev = lead_m_per_rev;
        const auto result = fit_loss_model(points, screw);
        std::printf("[loss]\n");
        std::printf("coulomb_torque_Nm = %.17g\n", result.model.coulomb_torque_Nm);
        std::printf("load_coefficient_Nm_per_N = %.17g\n",
                    result.model.load_coefficient_Nm_per_N);
        if (!result.feasible) {
            std::fprintf(stderr,
                         "warning: exact fit has a negative coulomb term; the fitted pair "
                         "reproduces the input efficiencies but is not a physical Coulomb "
                         "offset\n");
        }
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.exit_code());
    }
}

int cli_main(int argc, char** argv) {
    CLI::App app{"muxsim — single-motor mechanical multiplexer simulator"};
    app.require_subcommand(1);

    std::string scenario_path, csv_path;
    CliOverrides o;
    bool fit_mu = false;
    double lead = LeadscrewSpec{}.effective_lead_m_per_rev;

    auto add_overrides = [&o](CLI::App* cmd, bool with_out) {
        if (with_out) {
            cmd->add_option("--out", o.out_dir, "output directory (default $MUXSIM_OUT or .)");
        }
        cmd->add_option("--dt", o.dt_s, "override simulation step, seconds");
        cmd->add_flag("--strict-slip", o.strict_slip, "clutch slip is a fault");
        cmd->add_flag("--allow-braking", o.allow_braking, "permit the (1,1) motor-braking state");
        cmd->add_flag("--auto-serialize", o.auto_serialize,
                      "split SIMO plans into waves when over the power budget");
    };

    auto* sim_cmd = app.add_subcommand("simulate", "plan and run a scenario");
    sim_cmd->add_option("scenario", scenario_path, "scenario file")->required();
    add_overrides(sim_cmd, true);

    auto* val_cmd = app.add_subcommand("validate", "plan/load a schedule and validate it");
    val_cmd->add_option("scenario", scenario_path, "scenario file")->required();
    add_overrides(val_cmd, false);

    auto* chr_cmd = app.add_subcommand("characterize", "derived clutch/drivetrain figures");
    chr_cmd->add_option("scenario", scenario_path, "scenario file")->required();
    std::string curve_out;
    chr_cmd->add_option("--curve-out", curve_out,
                        "write the torque-vs-voltage curve CSV to this path");

    auto* fit_cmd = app.add_subcommand("fit", "calibrate model parameters from CSV data");
    auto* fit_gap = fit_cmd->add_subcommand("gap", "fit the air gap from voltage,torque rows");
    fit_gap->add_option("csv", csv_path, "CSV with voltage_V,torque_Nm rows")->required();
    fit_gap->add_flag("--fit-mu", fit_mu, "also fit the friction coefficient");
    auto* fit_loss = fit_cmd->add_subcommand("loss", "fit the loss model from efficiency rows");
    fit_loss->add_option("csv", csv_path, "CSV with load_N,efficiency,rpm rows")->required();
    fit_loss->add_option("--lead-m", lead, "effective leadscrew lead, m/rev");
    fit_cmd->require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : static_cast<int>(ExitCode::config);
    }

    if (sim_cmd->parsed()) return cmd_simulate(scenario_path, o);
    if (val_cmd->parsed()) return cmd_validate(scenario_path, o);
    if (chr_cmd->parsed()) return cmd_characterize(scenario_path, curve_out);
    if (fit_gap->parsed()) return cmd_fit_gap(csv_path, fit_mu);
    if (fit_loss->parsed()) return cmd_fit_loss(csv_path, lead);
    return static_cast<int>(ExitCode::config);
}

}  // namespace muxsim
