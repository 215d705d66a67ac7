#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "muxsim/errors.hpp"
#include "muxsim/sim.hpp"

using namespace muxsim;

namespace {

std::vector<DofUnit> make_bank(int count, double mass_kg) {
    std::vector<DofUnit> units;
    for (int i = 1; i <= count; ++i) {
        DofUnit u;
        u.id = i;
        u.load = LoadSpec::hanging(mass_kg);
        u.travel_limits = {0.0, 0.09};
        units.push_back(u);
    }
    return units;
}

Plant default_plant() {
    Plant p;
    p.loss = {-0.03823215682293151, 0.016510606096155483};
    return p;
}

MotorSpec motor18() {
    MotorSpec m;
    m.speed_rpm = 18.0;
    m.max_torque_Nm = 5.0;
    return m;
}

std::string trace_csv(const SimTrace& trace) {
    std::ostringstream out;
    write_trace_csv(out, trace);
    return out.str();
}

}  // namespace

TEST_CASE("empty schedule produces a motionless zero-energy trace") {
    Schedule s;
    s.mode = MuxMode::siso;
    const auto result = run(s, make_bank(2, 2.27), motor18(), default_plant(), {});
    CHECK(result.energy.input_energy_J == 0.0);
    CHECK(result.energy.output_energy_J == 0.0);
    CHECK(result.energy.efficiency == 0.0);
    REQUIRE_FALSE(result.trace.rows.empty());
    for (const auto& row : result.trace.rows) {
        CHECK(row.input_power_W == 0.0);
        for (const auto& u : row.units) CHECK(u.position_m == 0.0);
    }
}

TEST_CASE("energy report integrates constant power as a rectangle") {
    SimTrace trace;
    trace.unit_ids = {1};
    for (int k = 0; k <= 1000; ++k) {
        TraceRow row;
        row.time_s = 0.01 * k;  // 10 s
        row.shaft_rpm = 18.0;
        row.input_power_W = 0.5;
        row.input_torque_Nm = 0.5 / (2.0 * std::numbers::pi * 18.0 / 60.0);
        UnitSample u;
        u.unit_id = 1;
        row.units.push_back(u);
        trace.rows.push_back(row);
    }
    const auto report = energy_report(trace);
    CHECK(report.input_energy_J == doctest::Approx(5.0).epsilon(1e-12));

    SimTrace empty;
    CHECK_THROWS_AS(energy_report(empty), ConfigError);
}

TEST_CASE("single goal lands on target within one step of travel") {
    const auto units = make_bank(1, 2.27);
    const Plant plant = default_plant();
    const Schedule s = plan_siso({{1, 0.04, std::nullopt}}, motor18(), units, plant);
    const auto result = run(s, units, motor18(), plant, {});

    const double v = 18.0 / 60.0 * 0.014;
    CHECK(std::abs(result.final_units[0].slider_position_m - 0.04) <= v * 0.001 + 1e-12);

    // trace invariants: strictly increasing time, |dpos| <= v*dt
    const auto& rows = result.trace.rows;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        CHECK(rows[r].time_s > rows[r - 1].time_s);
        const double dpos =
            std::abs(rows[r].units[0].position_m - rows[r - 1].units[0].position_m);
        CHECK(dpos <= v * 0.001 + 1e-15);
    }
}

TEST_CASE("holding costs nothing and moving draws the required torque") {
    const auto units = make_bank(2, 2.27);
    const Plant plant = default_plant();
    const Schedule s = plan_siso({{1, 0.02, std::nullopt}}, motor18(), units, plant);
    const auto result = run(s, units, motor18(), plant, {});

    const double tau = required_shaft_torque(units[0].screw, plant.loss, 22.2687);
    for (const auto& row : result.trace.rows) {
        // unit 2 never moves, never draws
        CHECK(row.units[1].transmitted_Nm == 0.0);
        CHECK(row.units[1].position_m == 0.0);  // bit-identical hold
        if (row.units[0].transmitted_Nm > 0.0) {
            CHECK(row.units[0].transmitted_Nm == doctest::Approx(tau).epsilon(1e-12));
        }
    }
    // motion window in the middle of the slot only
    CHECK(result.trace.rows.front().input_power_W == 0.0);
    CHECK(result.trace.rows.back().input_power_W == 0.0);
}

TEST_CASE("siso trace has at most one active unit per step") {
    const auto units = make_bank(4, 2.27);
    const Plant plant = default_plant();
    std::vector<Goal> goals;
    for (int i = 1; i <= 4; ++i) goals.push_back({i, 0.01, std::nullopt});
    const Schedule s = plan_siso(goals, motor18(), units, plant);
    const auto result = run(s, units, motor18(), plant, {});
    for (const auto& row : result.trace.rows) {
        int active = 0;
        for (const auto& u : row.units) {
            if (u.transmitted_Nm > 0.0) ++active;
        }
        CHECK(active <= 1);
    }
}

TEST_CASE("simo power trace is a non-increasing staircase after engagement") {
    const auto units = make_bank(4, 2.27);
    const Plant plant = default_plant();
    const std::vector<Goal> goals = {
        {1, 0.03, std::nullopt}, {2, 0.02, std::nullopt}, {3, 0.03, std::nullopt},
        {4, 0.05, std::nullopt}};
    const Schedule s = plan_simo(goals, motor18(), units, {10.0, 2.70}, plant);
    const auto result = run(s, units, motor18(), plant, {});

    // skip the engagement dead time, then expect non-increasing power
    double prev = 1e30;
    bool started = false;
    for (const auto& row : result.trace.rows) {
        if (!started) {
            if (row.input_power_W > 0.0) started = true;
            prev = row.input_power_W;
            continue;
        }
        CHECK(row.input_power_W <= prev + 1e-12);
        prev = row.input_power_W;
    }
    REQUIRE(started);
}

TEST_CASE("energy balance: input covers output with the calibrated loss model") {
    const auto units = make_bank(3, 2.27);
    const Plant plant = default_plant();
    std::vector<Goal> goals = {{1, 0.02, std::nullopt}, {2, 0.04, std::nullopt},
                               {3, 0.03, std::nullopt}};
    const Schedule s = plan_simo(goals, motor18(), units, {10.0, 2.70}, plant);
    const auto result = run(s, units, motor18(), plant, {});
    CHECK(result.energy.input_energy_J >= result.energy.output_energy_J);
    CHECK(result.energy.efficiency > 0.0);
    CHECK(result.energy.efficiency <= 1.0);
}

TEST_CASE("two identical runs produce bit-identical traces") {
    const auto units = make_bank(4, 2.27);
    const Plant plant = default_plant();
    const std::vector<Goal> goals = {
        {1, 0.03, std::nullopt}, {2, 0.02, std::nullopt}, {3, 0.03, std::nullopt},
        {4, 0.05, std::nullopt}};
    const Schedule s = plan_simo(goals, motor18(), units, {10.0, 2.70}, plant);
    const auto a = run(s, units, motor18(), plant, {});
    const auto b = run(s, units, motor18(), plant, {});
    CHECK(trace_csv(a.trace) == trace_csv(b.trace));
}

TEST_CASE("halving dt perturbs energies below half a percent") {
    const auto units = make_bank(2, 2.27);
    const Plant plant = default_plant();
    std::vector<Goal> goals = {{1, 0.04, std::nullopt}, {2, 0.025, std::nullopt}};
    const Schedule s = plan_siso(goals, motor18(), units, plant);

    SimConfig coarse;
    coarse.dt_s = 0.001;
    SimConfig fine;
    fine.dt_s = 0.0005;
    const auto a = run(s, units, motor18(), plant, coarse);
    const auto b = run(s, units, motor18(), plant, fine);

    CHECK(std::abs(a.energy.input_energy_J - b.energy.input_energy_J) /
              b.energy.input_energy_J < 0.005);
    CHECK(std::abs(a.energy.output_energy_J - b.energy.output_energy_J) /
              b.energy.output_energy_J < 0.005);
    for (std::size_t i = 0; i < units.size(); ++i) {
        const double da = a.final_units[i].slider_position_m;
        const double db = b.final_units[i].slider_position_m;
        CHECK(std::abs(da - db) <= 18.0 / 60.0 * 0.014 * coarse.dt_s + 1e-12);
    }
}

TEST_CASE("cw and ccw motions are exact mirrors for the same load") {
    const Plant plant = default_plant();
    auto units = make_bank(1, 2.27);
    units[0].slider_position_m = 0.045;

    const Schedule up = plan_siso({{1, 0.045 + 0.02, std::nullopt}}, motor18(), units, plant);
    const Schedule down = plan_siso({{1, 0.045 - 0.02, std::nullopt}}, motor18(), units, plant);
    const auto a = run(up, units, motor18(), plant, {});
    const auto b = run(down, units, motor18(), plant, {});

    CHECK(up.horizon_s == doctest::Approx(down.horizon_s).epsilon(1e-12));
    REQUIRE(a.trace.rows.size() == b.trace.rows.size());
    for (std::size_t r = 0; r < a.trace.rows.size(); ++r) {
        // positions mirror around the start, torque draw is identical
        const double da = a.trace.rows[r].units[0].position_m - 0.045;
        const double db = b.trace.rows[r].units[0].position_m - 0.045;
        CHECK(da == doctest::Approx(-db).epsilon(1e-9));
        CHECK(a.trace.rows[r].input_torque_Nm == b.trace.rows[r].input_torque_Nm);
    }
    CHECK(a.energy.input_energy_J == doctest::Approx(b.energy.input_energy_J).epsilon(1e-12));
    CHECK(a.energy.output_energy_J ==
          doctest::Approx(-b.energy.output_energy_J).epsilon(1e-12));
}

TEST_CASE("travel limit violations fault the run") {
    auto units = make_bank(1, 2.27);
    units[0].travel_limits = {0.0, 0.03};
    const Plant plant = default_plant();
    Schedule s;
    s.mode = MuxMode::simo;
    s.commands = {{0.0, 1, kPairCw}, {10.0, 1, kPairHold}};  // ~41 mm demanded
    s.horizon_s = 11.0;
    CHECK_THROWS_AS(run(s, units, motor18(), plant, {}), PhysicsError);
}

TEST_CASE("motor torque ceiling faults the run") {
    const auto units = make_bank(4, 2.27);
    const Plant plant = default_plant();
    MotorSpec weak = motor18();
    weak.max_torque_Nm = 1.0;  // four movers need ~1.52 N*m
    std::vector<Goal> goals;
    for (int i = 1; i <= 4; ++i) goals.push_back({i, 0.02, std::nullopt});
    const Schedule s = plan_simo(goals, weak, units, {100.0, 2.70}, plant);
    CHECK_THROWS_AS(run(s, units, weak, plant, {}), PhysicsError);
}

TEST_CASE("slip stalls the slider and strict mode faults") {
    // 40 kg hanging mass: required torque far above the 0.43 N*m capacity
    auto units = make_bank(1, 40.0);
    const Plant plant = default_plant();
    Schedule s;
    s.mode = MuxMode::siso;
    s.commands = {{0.0, 1, kPairCw}, {2.0, 1, kPairHold}};
    s.horizon_s = 3.0;

    const auto result = run(s, units, motor18(), plant, {});
    bool slipped = false;
    for (const auto& row : result.trace.rows) {
        if (row.units[0].slipping) {
            slipped = true;
            CHECK(row.units[0].transmitted_Nm ==
                  doctest::Approx(torque_capacity_at_speed(plant.clutch, 900.0, 18.0)));
        }
    }
    CHECK(slipped);
    CHECK(result.final_units[0].slider_position_m == 0.0);  // stalled, no lift

    SimConfig strict;
    strict.strict_slip = true;
    CHECK_THROWS_AS(run(s, units, motor18(), plant, strict), PhysicsError);
}

TEST_CASE("idle drag torque adds constant input power") {
    const auto units = make_bank(1, 2.27);
    const Plant plant = default_plant();
    Schedule s;
    s.mode = MuxMode::siso;
    s.horizon_s = 2.0;
    SimConfig cfg;
    cfg.idle_drag_torque_Nm = 0.05;
    const auto result = run(s, units, motor18(), plant, cfg);
    const double omega = 2.0 * std::numbers::pi * 18.0 / 60.0;
    CHECK(result.energy.input_energy_J == doctest::Approx(0.05 * omega * 2.0).epsilon(1e-9));
}

TEST_CASE("allowed braking consumes power without motion") {
    const auto units = make_bank(1, 2.27);
    const Plant plant = default_plant();
    Schedule s;
    s.mode = MuxMode::siso;
    s.commands = {{0.0, 1, kPairBrake}, {2.0, 1, kPairHold}};
    s.horizon_s = 3.0;

    CHECK_THROWS_AS(run(s, units, motor18(), plant, {}), PhysicsError);

    SimConfig allow;
    allow.allow_motor_braking = true;
    const auto result = run(s, units, motor18(), plant, allow);
    CHECK(result.energy.input_energy_J > 0.0);
    CHECK(result.final_units[0].slider_position_m == 0.0);
}

TEST_CASE("trace csv has the documented header and stable shape") {
    const auto units = make_bank(2, 2.27);
    const Plant plant = default_plant();
    const Schedule s = plan_siso({{1, 0.005, std::nullopt}}, motor18(), units, plant);
    const auto result = run(s, units, motor18(), plant, {});
    const std::string csv = trace_csv(result.trace);
    CHECK(csv.rfind("time_s,shaft_rpm,input_torque_Nm,input_power_W,"
                    "u1_position_m,u1_c1,u1_c2,u1_transmitted_Nm,u1_load_N,u1_slipping,"
                    "u2_position_m,u2_c1,u2_c2,u2_transmitted_Nm,u2_load_N,u2_slipping\n",
                    0) == 0);
    // one line per row plus header
    const auto lines = std::count(csv.begin(), csv.end(), '\n');
    CHECK(lines == static_cast<long>(result.trace.rows.size()) + 1);
}
