#include "muxsim/mux_logic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "muxsim/errors.hpp"

namespace muxsim {

PairCommand resolve_state(ClutchPairState s) {
    if (s.c1 && s.c2) return PairCommand::Brake;
    if (s.c1) return PairCommand::CW;
    if (s.c2) return PairCommand::CCW;
    return PairCommand::Hold;
}

const char* to_string(PairCommand c) {
    switch (c) {
        case PairCommand::Hold: return "Hold";
        case PairCommand::CW: return "CW";
        case PairCommand::CCW: return "CCW";
        case PairCommand::Brake: return "Brake";
    }
    return "?";
}

void SwitchLatencyModel::validate() const {
    if (points.empty()) {
        throw ConfigError("latency: at least one calibration point required");
    }
    double prev_load = -1.0;
    for (const auto& pt : points) {
        if (!(pt.on_s > 0.0) || !(pt.off_s > 0.0)) {
            throw ConfigError("latency: latencies must be > 0");
        }
        if (pt.load_N < 0.0) {
            throw ConfigError("latency: load_N must be >= 0");
        }
        if (pt.load_N <= prev_load) {
            throw ConfigError("latency: loads must be strictly increasing");
        }
        prev_load = pt.load_N;
    }
}

SwitchLatencyModel SwitchLatencyModel::defaults() {
    return {{{2.4, 0.0979, 0.120}, {22.24, 0.224, 0.424}}};
}

double switch_latency(const SwitchLatencyModel& m, double load_N, Transition t) {
    m.validate();
    if (load_N < 0.0) {
        throw ConfigError("latency: load_N must be >= 0");
    }
    auto pick = [t](const LatencyPoint& p) { return t == Transition::on ? p.on_s : p.off_s; };
    const auto& pts = m.points;
    if (load_N <= pts.front().load_N) return pick(pts.front());
    if (load_N >= pts.back().load_N) return pick(pts.back());
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (load_N <= pts[i].load_N) {
            const double x = (load_N - pts[i - 1].load_N) / (pts[i].load_N - pts[i - 1].load_N);
            return pick(pts[i - 1]) + x * (pick(pts[i]) - pick(pts[i - 1]));
        }
    }
    return pick(pts.back());
}

ClutchTransient::Phase ClutchTransient::settled_phase(double t_now) const {
    constexpr double kSettleEps = 1e-9;  // absorbs time-sum rounding
    if (phase == Phase::rising && t_now - phase_start_s >= duration_s - kSettleEps) {
        return Phase::closed;
    }
    if (phase == Phase::falling && t_now - phase_start_s >= duration_s - kSettleEps) {
        return Phase::open;
    }
    return phase;
}

double ClutchTransient::fraction(double t_now) const {
    const double dt = std::max(0.0, t_now - phase_start_s);
    switch (settled_phase(t_now)) {
        case Phase::open: return 0.0;
        case Phase::closed: return 1.0;
        case Phase::rising:
            return start_fraction + (1.0 - start_fraction) * transition_rise01(dt / duration_s);
        case Phase::falling:
            return start_fraction * transition_fall01(dt / duration_s);
    }
    return 0.0;
}

double ClutchTransient::settle_time() const {
    if (phase == Phase::rising || phase == Phase::falling) return phase_start_s + duration_s;
    return phase_start_s;
}

namespace {

using Phase = ClutchTransient::Phase;

void engage(ClutchTransient& tr, double t_now, double latency_s, double current_fraction) {
    if (tr.settled_phase(t_now) == Phase::closed) {
        tr = {Phase::closed, t_now, 1.0, 0.0};
        return;
    }
    tr = {Phase::rising, t_now, current_fraction, latency_s};
}

void release(ClutchTransient& tr, double t_now, double latency_s, double current_fraction) {
    if (tr.phase == Phase::open) return;
    if (tr.settled_phase(t_now) == Phase::open) {
        tr = {Phase::open, t_now, 0.0, 0.0};
        return;
    }
    tr = {Phase::falling, t_now, current_fraction, latency_s};
}

}  // namespace

DofUnit command_unit(DofUnit u, ClutchPairState s, double t_now,
                     const SwitchLatencyModel& latency, const MuxPolicy& policy) {
    const PairCommand cmd = resolve_state(s);
    if (cmd == PairCommand::Brake && !policy.allow_motor_braking) {
        throw PhysicsError("unit " + std::to_string(u.id) +
                           ": motor-braking state (1,1) rejected by policy");
    }
    if (s == u.commanded) {
        return u;  // idempotent
    }

    const double load_N = load_tension(u.load);
    const double on_s = switch_latency(latency, load_N, Transition::on);
    const double off_s = switch_latency(latency, load_N, Transition::off);
    const double f_cw = u.cw_transient.fraction(t_now);
    const double f_ccw = u.ccw_transient.fraction(t_now);

    if (s.c1 && !u.commanded.c1 && f_ccw > 0.0 && !policy.allow_motor_braking) {
        throw PhysicsError("unit " + std::to_string(u.id) +
                           ": CW engage while CCW clutch not released; sequence through Hold");
    }
    if (s.c2 && !u.commanded.c2 && f_cw > 0.0 && !policy.allow_motor_braking) {
        throw PhysicsError("unit " + std::to_string(u.id) +
                           ": CCW engage while CW clutch not released; sequence through Hold");
    }

    if (s.c1) {
        engage(u.cw_transient, t_now, on_s, f_cw);
    } else {
        release(u.cw_transient, t_now, off_s, f_cw);
    }
    if (s.c2) {
        engage(u.ccw_transient, t_now, on_s, f_ccw);
    } else {
        release(u.ccw_transient, t_now, off_s, f_ccw);
    }
    u.commanded = s;
    return u;
}

int unit_motion_direction(const DofUnit& u, double t_now) {
    const bool cw = u.commanded.c1 && u.cw_transient.settled_phase(t_now) == Phase::closed;
    const bool ccw = u.commanded.c2 && u.ccw_transient.settled_phase(t_now) == Phase::closed;
    if (cw && ccw) return 0;  // braking: stalled
    if (cw) return 1;
    if (ccw) return -1;
    return 0;
}

}  // namespace muxsim
