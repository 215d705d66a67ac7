#include "muxsim/drivetrain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "muxsim/errors.hpp"

namespace muxsim {

void MotorSpec::validate() const {
    if (speed_rpm < 0.0 || !std::isfinite(speed_rpm)) {
        throw ConfigError("motor: speed_rpm must be >= 0");
    }
    if (!(max_torque_Nm > 0.0)) {
        throw ConfigError("motor: max_torque_Nm must be > 0");
    }
}

void LeadscrewSpec::validate() const {
    if (!(effective_lead_m_per_rev > 0.0)) {
        throw ConfigError("leadscrew: effective_lead_m_per_rev must be > 0");
    }
    if (!(mean_diameter_m > 0.0)) {
        throw ConfigError("leadscrew: mean_diameter_m must be > 0");
    }
    if (!(thread_friction_coefficient > 0.0)) {
        throw ConfigError("leadscrew: thread_friction_coefficient must be > 0");
    }
    if (thread_lead_m_per_rev < 0.0) {
        throw ConfigError("leadscrew: thread_lead_m_per_rev must be >= 0");
    }
}

LoadSpec LoadSpec::hanging(double mass_kg, double gravity) {
    LoadSpec l;
    l.kind = LoadKind::hanging_mass;
    l.mass_kg = mass_kg;
    l.gravity_m_s2 = gravity;
    l.validate();
    return l;
}

LoadSpec LoadSpec::constant(double tension_N) {
    LoadSpec l;
    l.kind = LoadKind::constant_tension;
    l.tension_N = tension_N;
    l.validate();
    return l;
}

void LoadSpec::validate() const {
    if (kind == LoadKind::hanging_mass && mass_kg < 0.0) {
        throw ConfigError("load: mass_kg must be >= 0");
    }
    if (kind == LoadKind::constant_tension && tension_N < 0.0) {
        throw ConfigError("load: tension_N must be >= 0");
    }
    if (!(gravity_m_s2 > 0.0)) {
        throw ConfigError("load: gravity_m_s2 must be > 0");
    }
}

void FrictionLossModel::validate() const {
    if (load_coefficient_Nm_per_N < 0.0) {
        throw ConfigError("loss: load_coefficient_Nm_per_N must be >= 0");
    }
    if (!std::isfinite(coulomb_torque_Nm)) {
        throw ConfigError("loss: coulomb_torque_Nm must be finite");
    }
}

double slider_velocity(const LeadscrewSpec& screw, double shaft_rpm) {
    return shaft_rpm / 60.0 * screw.effective_lead_m_per_rev;
}

bool self_locks(const LeadscrewSpec& screw) {
    const double friction_angle = std::atan(screw.thread_friction_coefficient);
    const double lead_angle =
        std::atan(screw.thread_lead_m_per_rev / (std::numbers::pi * screw.mean_diameter_m));
    return friction_angle > lead_angle;
}

double required_shaft_torque(const LeadscrewSpec& screw, const FrictionLossModel& loss,
                             double load_N) {
    if (load_N < 0.0) {
        throw ConfigError("drivetrain: load_N must be >= 0");
    }
    const double ideal = load_N * screw.effective_lead_m_per_rev / (2.0 * std::numbers::pi);
    const double total =
        ideal + loss.coulomb_torque_Nm + loss.load_coefficient_Nm_per_N * load_N;
    return std::max(0.0, total);
}

double load_tension(const LoadSpec& load) {
    load.validate();
    if (load.kind == LoadKind::hanging_mass) {
        return load.mass_kg * load.gravity_m_s2;
    }
    return load.tension_N;
}

}  // namespace muxsim
