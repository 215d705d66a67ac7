#include "muxsim/clutch.hpp"

#include <algorithm>
#include <cmath>

#include "muxsim/errors.hpp"

namespace muxsim {

namespace {

// Shape constant of the normalized first-order transition profiles. The
// unnormalized exponential sits at 1 - e^-4 (~98.2 %) when the transition
// window closes; normalization stretches it to exactly 1.
constexpr double kTransitionShape = 4.0;

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ConfigError(std::string("clutch: ") + name + " must be positive and finite");
    }
}

}  // namespace

void ClutchParams::validate() const {
    require_positive(shaft_radius_m, "shaft_radius_m");
    require_positive(dielectric_thickness_m, "dielectric_thickness_m");
    require_positive(air_gap_m, "air_gap_m");
    require_positive(rel_permittivity_dielectric, "rel_permittivity_dielectric");
    require_positive(rel_permittivity_gap, "rel_permittivity_gap");
    require_positive(vacuum_permittivity_F_per_m, "vacuum_permittivity_F_per_m");
    require_positive(electrode_width_m, "electrode_width_m");
    require_positive(voltage_ceiling_V, "voltage_ceiling_V");
    require_positive(engagement_time_s, "engagement_time_s");
    require_positive(disengagement_time_s, "disengagement_time_s");
    require_positive(slip_knee_rpm, "slip_knee_rpm");
    if (wrap_angle_rad < 0.0) {
        throw ConfigError("clutch: wrap_angle_rad must be >= 0");
    }
    if (friction_coefficient < 0.0) {
        throw ConfigError("clutch: friction_coefficient must be >= 0");
    }
    if (pretension_torque_Nm < 0.0) {
        throw ConfigError("clutch: pretension_torque_Nm must be >= 0");
    }
    if (!(air_gap_m < dielectric_thickness_m)) {
        throw ConfigError("clutch: air_gap_m must be smaller than dielectric_thickness_m");
    }
    if (!(slip_cutoff_rpm >= slip_knee_rpm)) {
        throw ConfigError("clutch: slip_cutoff_rpm must be >= slip_knee_rpm");
    }
}

namespace {

// Bracketed permittivity factor of the pressure model, units 1/m^2.
double stack_factor(const ClutchParams& p) {
    const double eg = p.rel_permittivity_gap;
    const double ed = p.rel_permittivity_dielectric;
    const double series = eg * ed / (p.dielectric_thickness_m * eg + p.air_gap_m * ed);
    const double gap = eg / p.air_gap_m;
    return series * series + gap * gap;
}

// Electrostatic torque prefactor K so that capacity = pre + K*(e^{mu*theta}-1).
double electro_prefactor(const ClutchParams& p, double voltage_V) {
    const double pressure = 0.5 * p.vacuum_permittivity_F_per_m * voltage_V * voltage_V *
                            stack_factor(p);
    return pressure * p.electrode_width_m * p.shaft_radius_m * p.shaft_radius_m;
}

void check_voltage(const ClutchParams& p, double voltage_V) {
    if (voltage_V < 0.0 || !std::isfinite(voltage_V)) {
        throw ConfigError("clutch: voltage must be finite and >= 0");
    }
    if (voltage_V > p.voltage_ceiling_V) {
        throw PhysicsError("clutch: voltage " + std::to_string(voltage_V) +
                           " V exceeds breakdown ceiling " +
                           std::to_string(p.voltage_ceiling_V) + " V");
    }
}

}  // namespace

double calibrate_friction(const ClutchParams& p, double target_torque_Nm, double at_voltage_V) {
    const double k = electro_prefactor(p, at_voltage_V);
    const double excess = target_torque_Nm - p.pretension_torque_Nm;
    if (!(excess > 0.0) || !(k > 0.0) || !(p.wrap_angle_rad > 0.0)) {
        throw FitError("calibrate_friction: anchor torque unreachable with given geometry");
    }
    return std::log1p(excess / k) / p.wrap_angle_rad;
}

ClutchParams ClutchParams::defaults() {
    ClutchParams p;
    p.friction_coefficient =
        calibrate_friction(p, kFrictionAnchorTorqueNm, kFrictionAnchorVoltageV);
    p.validate();
    return p;
}

double electrostatic_pressure(const ClutchParams& p, double voltage_V) {
    check_voltage(p, voltage_V);
    return 0.5 * p.vacuum_permittivity_F_per_m * voltage_V * voltage_V * stack_factor(p);
}

double torque_capacity(const ClutchParams& p, double voltage_V) {
    check_voltage(p, voltage_V);
    const double capstan_gain = std::expm1(p.friction_coefficient * p.wrap_angle_rad);
    return p.pretension_torque_Nm + electro_prefactor(p, voltage_V) * capstan_gain;
}

double speed_derate(const ClutchParams& p, double shaft_rpm) {
    const double rpm = std::abs(shaft_rpm);
    if (rpm <= p.slip_knee_rpm) return 1.0;
    if (rpm >= p.slip_cutoff_rpm) return 0.0;
    return (p.slip_cutoff_rpm - rpm) / (p.slip_cutoff_rpm - p.slip_knee_rpm);
}

double torque_capacity_at_speed(const ClutchParams& p, double voltage_V, double shaft_rpm) {
    return torque_capacity(p, voltage_V) * speed_derate(p, shaft_rpm);
}

TransmitResult transmitted_torque(const ClutchParams& p, const ClutchDriveState& s,
                                  double demanded_Nm) {
    if (demanded_Nm < 0.0) {
        throw ConfigError("clutch: demanded torque must be >= 0");
    }
    const double cap = s.engaged_fraction * torque_capacity(p, s.applied_voltage_V);
    // A demand sitting on the capacity boundary (within rounding of the
    // calibration round trip) counts as held, not slipping.
    if (demanded_Nm > cap * (1.0 + 1e-9)) {
        return {cap, true};
    }
    return {std::min(demanded_Nm, cap), false};
}

double transition_rise01(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return -std::expm1(-kTransitionShape * x) / -std::expm1(-kTransitionShape);
}

double transition_fall01(double x) {
    if (x <= 0.0) return 1.0;
    if (x >= 1.0) return 0.0;
    const double floor = std::exp(-kTransitionShape);
    return (std::exp(-kTransitionShape * x) - floor) / (1.0 - floor);
}

double engagement_profile(const ClutchParams& p, double t_since_voltage_on_s) {
    if (t_since_voltage_on_s < 0.0) {
        throw ConfigError("clutch: engagement time must be >= 0");
    }
    return transition_rise01(t_since_voltage_on_s / p.engagement_time_s);
}

double disengagement_profile(const ClutchParams& p, double t_since_voltage_off_s) {
    if (t_since_voltage_off_s < 0.0) {
        throw ConfigError("clutch: disengagement time must be >= 0");
    }
    return transition_fall01(t_since_voltage_off_s / p.disengagement_time_s);
}

}  // namespace muxsim
