#pragma once

namespace muxsim {

/// Single drive motor; rotation sign convention is CW positive.
struct MotorSpec {
    double speed_rpm = 18.0;
    double max_torque_Nm = 5.0;

    bool operator==(const MotorSpec&) const = default;
    void validate() const;
};

/// The two counter-rotating input shafts derived from the motor through the
/// reversing gear mesh.
struct ShaftPair {
    double cw_speed_rpm = 0.0;
    double ccw_speed_rpm = 0.0;

    static ShaftPair from_motor(const MotorSpec& m) { return {m.speed_rpm, -m.speed_rpm}; }
};

/// Leadscrew geometry. effective_lead folds the clutch-output gear ratio into
/// a single nut travel per input-shaft revolution and drives all kinematics;
/// the thread fields describe the physical screw and drive the self-lock
/// predicate only.
struct LeadscrewSpec {
    double effective_lead_m_per_rev = 0.014;
    double mean_diameter_m = 0.008;
    double thread_friction_coefficient = 0.20;
    double thread_lead_m_per_rev = 0.002;

    bool operator==(const LeadscrewSpec&) const = default;
    void validate() const;
};

enum class LoadKind { hanging_mass, constant_tension };

struct LoadSpec {
    LoadKind kind = LoadKind::hanging_mass;
    double mass_kg = 0.0;
    double tension_N = 0.0;
    double gravity_m_s2 = 9.81;

    bool operator==(const LoadSpec&) const = default;
    static LoadSpec hanging(double mass_kg, double gravity = 9.81);
    static LoadSpec constant(double tension_N);
    void validate() const;
};

/// Affine transmission-loss decomposition: loss torque = coulomb + coeff*load.
/// The coulomb term may come out negative when calibrated from measured
/// efficiency pairs whose loss grows faster than linearly with load; consumers
/// clamp the total required torque at zero.
struct FrictionLossModel {
    double coulomb_torque_Nm = 0.0;
    double load_coefficient_Nm_per_N = 0.0;

    bool operator==(const FrictionLossModel&) const = default;
    void validate() const;
};

/// Nut translation speed for a given input-shaft speed, m/s (signed).
double slider_velocity(const LeadscrewSpec& screw, double shaft_rpm);

/// True when the thread friction angle exceeds the thread lead angle, i.e.
/// axial load on the nut cannot back-drive the screw.
bool self_locks(const LeadscrewSpec& screw);

/// Input-shaft torque needed to advance the nut against load_N, N·m:
/// ideal lifting torque load*lead/(2*pi) plus the affine loss, floored at 0.
double required_shaft_torque(const LeadscrewSpec& screw, const FrictionLossModel& loss,
                             double load_N);

/// Tension the load applies to the nut, N.
double load_tension(const LoadSpec& load);

}  // namespace muxsim
