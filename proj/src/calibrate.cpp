#include "muxsim/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "muxsim/errors.hpp"

namespace muxsim {

namespace {

constexpr int kIterationCap = 1000;
constexpr double kParamTol = 1e-10;

struct GapModel {
    ClutchParams base;
    bool fit_mu;

    double capacity(double g, double mu, double voltage) const {
        ClutchParams p = base;
        p.air_gap_m = g;
        p.friction_coefficient = mu;
        return torque_capacity(p, voltage);
    }

    // d(capacity)/dg: only the stack factor depends on g.
    double dcap_dg(double g, double mu, double voltage) const {
        const ClutchParams& p = base;
        const double eg = p.rel_permittivity_gap;
        const double ed = p.rel_permittivity_dielectric;
        const double denom = p.dielectric_thickness_m * eg + g * ed;
        const double dbracket = -2.0 * eg * eg * ed * ed * ed / (denom * denom * denom) -
                                2.0 * eg * eg / (g * g * g);
        const double scale = 0.5 * p.vacuum_permittivity_F_per_m * voltage * voltage *
                             p.electrode_width_m * p.shaft_radius_m * p.shaft_radius_m;
        return scale * dbracket * std::expm1(mu * p.wrap_angle_rad);
    }

    double dcap_dmu(double g, double mu, double voltage) const {
        const ClutchParams& p = base;
        const double eg = p.rel_permittivity_gap;
        const double ed = p.rel_permittivity_dielectric;
        const double series = eg * ed / (p.dielectric_thickness_m * eg + g * ed);
        const double bracket = series * series + (eg / g) * (eg / g);
        const double prefactor = 0.5 * p.vacuum_permittivity_F_per_m * voltage * voltage *
                                 bracket * p.electrode_width_m * p.shaft_radius_m *
                                 p.shaft_radius_m;
        return prefactor * p.wrap_angle_rad * std::exp(mu * p.wrap_angle_rad);
    }
};

double sse(const GapModel& model, const std::vector<TorqueVoltagePoint>& data, double g,
           double mu) {
    double sum = 0.0;
    for (const auto& pt : data) {
        const double r = model.capacity(g, mu, pt.voltage_V) - pt.holding_torque_Nm;
        sum += r * r;
    }
    return sum;
}

}  // namespace

GapFitResult fit_air_gap(const std::vector<TorqueVoltagePoint>& data, const ClutchParams& initial,
                         bool fit_mu) {
    if (data.size() < 3) {
        throw FitError("fit_air_gap: need at least 3 data points");
    }
    double v_min = data.front().voltage_V, v_max = v_min;
    for (const auto& pt : data) {
        if (pt.voltage_V < 0.0 || pt.holding_torque_Nm < 0.0) {
            throw FitError("fit_air_gap: voltages and torques must be >= 0");
        }
        v_min = std::min(v_min, pt.voltage_V);
        v_max = std::max(v_max, pt.voltage_V);
    }
    if (!(v_max > v_min) || v_max == 0.0) {
        throw FitError("fit_air_gap: degenerate data, voltages carry no information");
    }

    const GapModel model{initial, fit_mu};
    const double g_lo = 1e-9;
    const double g_hi = initial.dielectric_thickness_m * (1.0 - 1e-9);
    const double mu_lo = 1e-6;
    const double mu_hi = 10.0;

    double g = std::clamp(initial.air_gap_m, g_lo, g_hi);
    double mu = std::clamp(initial.friction_coefficient, mu_lo, mu_hi);

    GapFitResult result;
    double cost = sse(model, data, g, mu);
    result.objective_history.push_back(cost);

    double lambda = 1e-3;
    int iter = 0;
    for (; iter < kIterationCap; ++iter) {
        // Normal equations for the (at most 2-parameter) damped step.
        double jtj00 = 0.0, jtj01 = 0.0, jtj11 = 0.0, jtr0 = 0.0, jtr1 = 0.0;
        for (const auto& pt : data) {
            const double r = model.capacity(g, mu, pt.voltage_V) - pt.holding_torque_Nm;
            const double j0 = model.dcap_dg(g, mu, pt.voltage_V);
            const double j1 = fit_mu ? model.dcap_dmu(g, mu, pt.voltage_V) : 0.0;
            jtj00 += j0 * j0;
            jtj01 += j0 * j1;
            jtj11 += j1 * j1;
            jtr0 += j0 * r;
            jtr1 += j1 * r;
        }

        double dg = 0.0, dmu = 0.0;
        const double a00 = jtj00 * (1.0 + lambda);
        if (fit_mu) {
            const double a11 = jtj11 * (1.0 + lambda);
            const double det = a00 * a11 - jtj01 * jtj01;
            if (std::abs(det) < 1e-300) {
                throw FitError("fit_air_gap: singular normal equations");
            }
            dg = (-jtr0 * a11 + jtr1 * jtj01) / det;
            dmu = (-jtr1 * a00 + jtr0 * jtj01) / det;
        } else {
            if (a00 < 1e-300) {
                throw FitError("fit_air_gap: flat objective, cannot make progress");
            }
            dg = -jtr0 / a00;
        }

        const double g_new = std::clamp(g + dg, g_lo, g_hi);
        const double mu_new = fit_mu ? std::clamp(mu + dmu, mu_lo, mu_hi) : mu;
        const double cost_new = sse(model, data, g_new, mu_new);

        if (cost_new <= cost) {
            const double rel_change = std::max(std::abs(g_new - g) / std::max(g, g_lo),
                                               fit_mu ? std::abs(mu_new - mu) / std::max(mu, mu_lo)
                                                      : 0.0);
            g = g_new;
            mu = mu_new;
            cost = cost_new;
            result.objective_history.push_back(cost);
            lambda = std::max(lambda / 3.0, 1e-12);
            if (rel_change < kParamTol) {
                break;
            }
        } else {
            lambda *= 10.0;
            if (lambda > 1e15) {
                break;  // no downhill direction left; treat as converged
            }
        }
    }
    if (iter >= kIterationCap) {
        std::ostringstream msg;
        msg << "fit_air_gap: no convergence after " << kIterationCap
            << " iterations; last iterate g=" << g;
        if (fit_mu) msg << ", mu=" << mu;
        throw FitError(msg.str());
    }

    result.params = initial;
    result.params.air_gap_m = g;
    if (fit_mu) result.params.friction_coefficient = mu;
    result.params.validate();
    result.rms_residual_Nm = std::sqrt(cost / static_cast<double>(data.size()));
    result.iterations = iter;
    return result;
}

LossFitResult fit_loss_model(const std::vector<EfficiencyPoint>& points,
                             const LeadscrewSpec& screw, NegativeParamPolicy policy) {
    if (points.size() < 2) {
        throw FitError("fit_loss_model: need at least 2 efficiency points");
    }
    screw.validate();

    // Each point pins the loss torque L = ideal*(1/eta - 1); fit L = a + b*F.
    double n = 0.0, sf = 0.0, sff = 0.0, sl = 0.0, sfl = 0.0;
    for (const auto& pt : points) {
        if (!(pt.efficiency > 0.0) || pt.efficiency > 1.0) {
            throw FitError("fit_loss_model: efficiency must be in (0, 1]");
        }
        if (pt.load_N < 0.0) {
            throw FitError("fit_loss_model: load_N must be >= 0");
        }
        const double ideal = pt.load_N * screw.effective_lead_m_per_rev / (2.0 * std::numbers::pi);
        const double loss = ideal * (1.0 / pt.efficiency - 1.0);
        n += 1.0;
        sf += pt.load_N;
        sff += pt.load_N * pt.load_N;
        sl += loss;
        sfl += pt.load_N * loss;
    }
    const double det = n * sff - sf * sf;
    if (std::abs(det) < 1e-12 * std::max(1.0, sff)) {
        throw FitError("fit_loss_model: loads are not distinct, system is singular");
    }
    const double a = (sl * sff - sf * sfl) / det;
    const double b = (n * sfl - sf * sl) / det;

    LossFitResult result;
    result.model.coulomb_torque_Nm = a;
    result.model.load_coefficient_Nm_per_N = b;
    result.feasible = a >= 0.0 && b >= 0.0;

    if (b < 0.0 && policy != NegativeParamPolicy::clamp) {
        throw FitError("fit_loss_model: data implies a negative load coefficient");
    }
    if (!result.feasible) {
        switch (policy) {
            case NegativeParamPolicy::reject:
                throw FitError("fit_loss_model: data implies negative parameters (a=" +
                               std::to_string(a) + ", b=" + std::to_string(b) + ")");
            case NegativeParamPolicy::clamp:
                result.model.coulomb_torque_Nm = std::max(0.0, a);
                result.model.load_coefficient_Nm_per_N = std::max(0.0, b);
                result.clamped = true;
                break;
            case NegativeParamPolicy::keep_with_warning:
                break;  // exact solution kept; caller sees feasible=false
        }
    }
    result.model.validate();
    return result;
}

}  // namespace muxsim
