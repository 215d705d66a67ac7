#pragma once

#include <string>

namespace muxsim {

/// Geometry, dielectric, friction and electrical parameters of one
/// electrostatic capstan clutch.
///
/// The torque capacity model is
///
///   capacity(V) = T_pre + r^2 * l * P(V) * (e^{mu*theta} - 1)
///   P(V)        = (eps0/2) * V^2 * [ (eg*ed/(d*eg + g*ed))^2 + (eg/g)^2 ]
///
/// where P is the electrostatic clamping pressure across the dielectric/air
/// stack. T_pre is the zero-voltage holding torque measured as a lumped
/// torque (the band's mechanical pretension already amplified by the wrap),
/// so it enters in N·m directly while the electrostatic tension term is
/// converted to torque through the shaft radius.
struct ClutchParams {
    double shaft_radius_m = 0.0127;
    double dielectric_thickness_m = 55e-6;
    double air_gap_m = 1.0e-6;
    double rel_permittivity_dielectric = 3.9;
    double rel_permittivity_gap = 1.0;
    double vacuum_permittivity_F_per_m = 8.854187817e-12;
    double electrode_width_m = 0.010;
    double wrap_angle_rad = 3.54;
    double friction_coefficient = 0.0;   // see defaults(): calibrated value
    double pretension_torque_Nm = 0.02;
    double voltage_ceiling_V = 1000.0;
    double engagement_time_s = 0.481;
    double disengagement_time_s = 0.120;
    // Capacity derating vs shaft speed: full capacity up to the knee, zero
    // at/above the cutoff, linear in between.
    double slip_knee_rpm = 60.0;
    double slip_cutoff_rpm = 70.0;

    bool operator==(const ClutchParams&) const = default;

    /// Throws ConfigError when any invariant is violated (non-positive
    /// lengths/permittivities, air gap >= dielectric thickness, ...).
    void validate() const;

    /// Default parameter set with friction_coefficient calibrated so that
    /// capacity(900 V) equals the 0.43 N·m bench anchor.
    static ClutchParams defaults();
};

/// Anchors used to calibrate the friction coefficient of the default clutch.
inline constexpr double kFrictionAnchorTorqueNm = 0.43;
inline constexpr double kFrictionAnchorVoltageV = 900.0;

/// Solves friction_coefficient so that torque_capacity(p, at_voltage_V) ==
/// target_torque_Nm with p's other parameters unchanged. Closed form:
/// mu = ln1p((target - pretension)/K)/theta. Throws FitError when the target
/// is below the pretension or the geometry makes the anchor unreachable.
double calibrate_friction(const ClutchParams& p, double target_torque_Nm, double at_voltage_V);

/// Electrostatic clamping pressure P(V) in Pa. Strictly increasing in V for
/// V > 0. Throws PhysicsError above the breakdown ceiling, ConfigError for
/// negative voltage.
double electrostatic_pressure(const ClutchParams& p, double voltage_V);

/// Static holding torque the engaged clutch sustains before slipping, N·m.
double torque_capacity(const ClutchParams& p, double voltage_V);

/// Capacity multiplier in [0,1] for a given shaft speed.
double speed_derate(const ClutchParams& p, double shaft_rpm);

double torque_capacity_at_speed(const ClutchParams& p, double voltage_V, double shaft_rpm);

/// Continuous per-clutch drive state as sampled by the simulator.
struct ClutchDriveState {
    double applied_voltage_V = 0.0;
    double engaged_fraction = 0.0;  // 0 = fully open, 1 = fully engaged
    bool slipping = false;
};

struct TransmitResult {
    double torque_Nm = 0.0;
    bool slipping = false;
};

/// Capacity-clamped transmission: min(demanded, fraction * capacity), with
/// the slipping flag set iff the clamp is active. demanded must be >= 0.
TransmitResult transmitted_torque(const ClutchParams& p, const ClutchDriveState& s,
                                  double demanded_Nm);

/// Normalized first-order transition shapes shared by the engagement ops and
/// the per-clutch transients: rise01 goes 0 -> exactly 1 over x in [0, 1],
/// fall01 goes 1 -> exactly 0.
double transition_rise01(double x);
double transition_fall01(double x);

/// Engagement fraction t seconds after voltage-on, normalized first-order
/// rise reaching exactly 1 at engagement_time_s and saturating there.
double engagement_profile(const ClutchParams& p, double t_since_voltage_on_s);

/// Release fraction t seconds after voltage-off, reaching exactly 0 at
/// disengagement_time_s.
double disengagement_profile(const ClutchParams& p, double t_since_voltage_off_s);

}  // namespace muxsim
