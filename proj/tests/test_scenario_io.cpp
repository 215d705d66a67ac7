#include <doctest.h>

#include <sstream>

#include "muxsim/errors.hpp"
#include "muxsim/scenario.hpp"

using namespace muxsim;

namespace {

const char* kMinimalScenario = R"(# comment
mode = siso

[motor]
speed_rpm = 18
max_torque_Nm = 5

[unit 1]
mass_kg = 2.27
travel_min_m = 0
travel_max_m = 0.09
start_m = 0

[goal]
unit = 1
target_m = 0.04
)";

}  // namespace

TEST_CASE("minimal scenario parses with defaults filled in") {
    const Scenario s = parse_scenario(kMinimalScenario);
    CHECK(s.mode == ScenarioMode::siso);
    CHECK(s.motor.speed_rpm == 18.0);
    CHECK(s.clutch.air_gap_m == 1e-6);
    CHECK(s.clutch.friction_coefficient ==
          ClutchParams::defaults().friction_coefficient);
    CHECK(s.drive_voltage_V == 900.0);
    CHECK(s.latency == SwitchLatencyModel::defaults());
    CHECK(s.loss == FrictionLossModel{});  // ideal drivetrain unless configured
    REQUIRE(s.units.size() == 1);
    CHECK(s.units[0].id == 1);
    CHECK(s.units[0].load.mass_kg == 2.27);
    REQUIRE(s.goals.size() == 1);
    CHECK(s.goals[0].target_position_m == 0.04);
    CHECK_FALSE(s.goals[0].deadline_s.has_value());
}

TEST_CASE("scenario round trip is identity") {
    Scenario s = parse_scenario(kMinimalScenario);
    s.loss = {-0.038232156822931546, 0.01651060609615548};
    s.goals[0].deadline_s = 25.0;
    s.units.push_back({2, LoadSpec::constant(3.5), {0.01, 0.08}, 0.02});
    s.mode = ScenarioMode::simo;

    const std::string text = serialize_scenario(s);
    const Scenario again = parse_scenario(text);
    CHECK(again == s);
    CHECK(serialize_scenario(again) == text);
}

TEST_CASE("bundled scenarios parse and validate") {
    const Scenario siso = load_scenario(std::string(MUXSIM_DATA_DIR) + "/siso_4x2270g.scn");
    CHECK(siso.mode == ScenarioMode::siso);
    CHECK(siso.units.size() == 4);
    CHECK(siso.goals.size() == 4);

    const Scenario simo = load_scenario(std::string(MUXSIM_DATA_DIR) + "/simo_staircase.scn");
    CHECK(simo.mode == ScenarioMode::simo);
    CHECK(simo.goals.size() == 4);
    CHECK(simo.goals[1].target_position_m == 0.02);
}

TEST_CASE("schema violations carry line diagnostics") {
    auto fails_with = [](const std::string& text, const std::string& needle) {
        try {
            parse_scenario(text);
            FAIL_CHECK("expected ConfigError for: " << text);
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };

    fails_with("mode = sometimes\n", "line 1");
    fails_with("bogus = 1\n", "unknown top-level key");
    fails_with("[clutch]\nnope = 2\n", "unknown clutch key");
    fails_with("[unit]\n", "unit section needs an id");
    fails_with("[clutch]\nair_gap_m = abc\n", "expected a number");
    fails_with("[clutch]\nair_gap_m\n", "expected 'key = value'");
    fails_with("[mystery]\n", "unknown section");
}

TEST_CASE("semantic violations are rejected") {
    // duplicate unit ids
    CHECK_THROWS_AS(parse_scenario("mode = siso\n[unit 1]\nmass_kg = 1\n[unit 1]\nmass_kg = 2\n"),
                    ConfigError);
    // goal for an unknown unit
    CHECK_THROWS_AS(parse_scenario("mode = siso\n[goal]\nunit = 7\ntarget_m = 0.01\n"),
                    ConfigError);
    // start position outside travel limits
    CHECK_THROWS_AS(
        parse_scenario("mode = siso\n[unit 1]\nmass_kg = 1\nstart_m = 0.5\n"), ConfigError);
    // replay without a schedule path
    CHECK_THROWS_AS(parse_scenario("mode = replay\n"), ConfigError);
    // physically implausible clutch override
    CHECK_THROWS_AS(parse_scenario("mode = siso\n[clutch]\nair_gap_m = 1e-3\n"), ConfigError);
}

TEST_CASE("make_units mirrors the unit configs") {
    Scenario s = parse_scenario(kMinimalScenario);
    s.units.push_back({5, LoadSpec::constant(7.0), {0.0, 0.05}, 0.01});
    const auto units = make_units(s);
    REQUIRE(units.size() == 2);
    CHECK(units[1].id == 5);
    CHECK(units[1].slider_position_m == 0.01);
    CHECK(load_tension(units[1].load) == 7.0);
    CHECK(units[0].screw == s.screw);
}

TEST_CASE("csv readers") {
    {
        std::istringstream in("voltage_V,torque_Nm\n100,0.025\n200,0.04\n");
        const auto pts = read_torque_voltage_csv(in);
        REQUIRE(pts.size() == 2);
        CHECK(pts[1].voltage_V == 200.0);
        CHECK(pts[1].holding_torque_Nm == 0.04);
    }
    {
        std::istringstream in("2.36,0.877,35\n22.27,0.1309,40\n");  // headerless
        const auto pts = read_efficiency_csv(in);
        REQUIRE(pts.size() == 2);
        CHECK(pts[0].efficiency == 0.877);
        CHECK(pts[1].shaft_rpm == 40.0);
    }
    {
        std::istringstream empty("");
        CHECK_THROWS_AS(read_torque_voltage_csv(empty), ConfigError);
    }
    {
        std::istringstream header_only("voltage_V,torque_Nm\n");
        CHECK_THROWS_AS(read_torque_voltage_csv(header_only), ConfigError);
    }
    {
        std::istringstream bad("100,0.02\n200\n");
        CHECK_THROWS_AS(read_torque_voltage_csv(bad), ConfigError);
    }
    {
        std::istringstream bad("100,0.02\nx,0.04\n");
        CHECK_THROWS_AS(read_torque_voltage_csv(bad), ConfigError);
    }
}
