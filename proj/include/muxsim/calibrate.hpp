#pragma once

#include <vector>

#include "muxsim/clutch.hpp"
#include "muxsim/drivetrain.hpp"

namespace muxsim {

struct TorqueVoltagePoint {
    double voltage_V = 0.0;
    double holding_torque_Nm = 0.0;
};

struct EfficiencyPoint {
    double load_N = 0.0;
    double efficiency = 0.0;  // (0, 1]
    double shaft_rpm = 0.0;
};

struct GapFitResult {
    ClutchParams params;
    double rms_residual_Nm = 0.0;
    int iterations = 0;
    std::vector<double> objective_history;  // accepted SSE values, non-increasing
};

/// Least-squares fit of the air gap (and optionally the friction
/// coefficient) against a measured torque-voltage curve. Damped
/// Gauss-Newton with analytic Jacobian, parameters clamped into bounds
/// (0 < g < dielectric thickness), iteration cap 1000, convergence at
/// 1e-10 relative parameter change.
///
/// Note: g and mu enter the electrostatic term as a product of independent
/// factors, so the joint fit (fit_mu = true) is a ridge; it converges to a
/// point on the ridge rather than a unique pair. Recovery guarantees hold
/// for fit_mu = false.
///
/// Throws FitError for degenerate data (< 3 points, or no spread in
/// voltage) and on non-convergence (message carries the last iterate).
GapFitResult fit_air_gap(const std::vector<TorqueVoltagePoint>& data, const ClutchParams& initial,
                         bool fit_mu = false);

enum class NegativeParamPolicy {
    keep_with_warning,  // return the exact solution, feasible=false when negative
    clamp,              // clamp negative parameters to 0
    reject,             // throw FitError
};

struct LossFitResult {
    FrictionLossModel model;
    bool feasible = true;  // false when the exact solution had a negative parameter
    bool clamped = false;
};

/// Solves the affine loss model (coulomb, load coefficient) so the modeled
/// efficiency eta(F) = ideal(F) / (ideal(F) + coulomb + coeff*F) matches the
/// given points: exact for two points, least squares beyond. Efficiency
/// pairs measured on real hardware can imply a negative coulomb term (loss
/// growing faster than linearly with load); the policy controls whether that
/// exact solution is kept, clamped, or rejected. A negative load coefficient
/// is always rejected. Throws FitError for < 2 points, non-distinct loads,
/// or efficiencies outside (0, 1].
LossFitResult fit_loss_model(const std::vector<EfficiencyPoint>& points,
                             const LeadscrewSpec& screw,
                             NegativeParamPolicy policy = NegativeParamPolicy::keep_with_warning);

}  // namespace muxsim
