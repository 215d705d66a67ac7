#pragma once

#include <vector>

#include "muxsim/clutch.hpp"
#include "muxsim/drivetrain.hpp"

namespace muxsim {

/// Commanded bits of one unit's clutch pair: c1 couples the CW shaft,
/// c2 the CCW shaft.
struct ClutchPairState {
    bool c1 = false;
    bool c2 = false;

    bool operator==(const ClutchPairState&) const = default;
};

inline constexpr ClutchPairState kPairHold{false, false};
inline constexpr ClutchPairState kPairCw{true, false};
inline constexpr ClutchPairState kPairCcw{false, true};
inline constexpr ClutchPairState kPairBrake{true, true};

enum class PairCommand { Hold, CW, CCW, Brake };

/// (0,0) -> Hold, (1,0) -> CW, (0,1) -> CCW, (1,1) -> Brake.
PairCommand resolve_state(ClutchPairState s);

const char* to_string(PairCommand c);

/// Load-dependent switching latencies, linearly interpolated between
/// calibration points and clamped beyond the outermost loads.
struct LatencyPoint {
    double load_N = 0.0;
    double on_s = 0.0;
    double off_s = 0.0;

    bool operator==(const LatencyPoint&) const = default;
};

struct SwitchLatencyModel {
    std::vector<LatencyPoint> points;

    bool operator==(const SwitchLatencyModel&) const = default;

    void validate() const;  // latencies > 0, loads strictly increasing
    static SwitchLatencyModel defaults();
};

enum class Transition { on, off };

double switch_latency(const SwitchLatencyModel& m, double load_N, Transition t);

/// Per-clutch transition bookkeeping. The engaged gate (phase == closed)
/// opens exactly one on-latency after the engage command; a release command
/// drops the gate immediately and occupies the off-latency as dead time.
struct ClutchTransient {
    enum class Phase { open, rising, closed, falling };
    Phase phase = Phase::open;
    double phase_start_s = 0.0;
    double start_fraction = 0.0;
    double duration_s = 0.0;

    /// Phase at query time, folding elapsed transitions into their settled
    /// state (rising -> closed, falling -> open).
    Phase settled_phase(double t_now) const;
    /// Continuous engagement fraction at query time.
    double fraction(double t_now) const;
    /// Time the transition completes (== phase_start for settled phases).
    double settle_time() const;
};

struct TravelLimits {
    double min_m = 0.0;
    double max_m = 0.09;

    bool operator==(const TravelLimits&) const = default;
};

/// One multiplexer channel: two opposed clutches, a leadscrew and its
/// slider, and the tendon load.
struct DofUnit {
    int id = 0;
    ClutchDriveState cw_clutch;
    ClutchDriveState ccw_clutch;
    ClutchTransient cw_transient;
    ClutchTransient ccw_transient;
    LeadscrewSpec screw;
    double slider_position_m = 0.0;
    LoadSpec load;
    TravelLimits travel_limits;
    ClutchPairState commanded;
};

struct MuxPolicy {
    bool allow_motor_braking = false;
};

/// Applies a clutch-pair command to the unit at t_now, scheduling the
/// voltage transitions with load-interpolated latencies. Commanding the
/// current state is a no-op. Throws PhysicsError for (1,1) unless braking is
/// allowed, and for engaging one clutch while the opposite one is not yet
/// fully released (direction reversals must sequence through Hold).
DofUnit command_unit(DofUnit u, ClutchPairState s, double t_now,
                     const SwitchLatencyModel& latency, const MuxPolicy& policy);

/// Signed slider direction at t_now: +1 while the CW clutch gate is closed,
/// -1 for CCW, 0 otherwise (including all transition windows).
int unit_motion_direction(const DofUnit& u, double t_now);

}  // namespace muxsim
