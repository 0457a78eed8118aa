// Discrete non-homogeneous super-twisting control law.
//
//     u  = -k1 |s|^alpha sgn(s) + v
//     v' = -k2 sgn(s)
//
// with sgn(0) = 0.

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>

#include "core_types.hpp"
#include "gain_scheduler.hpp"

namespace nbstsmc {

/// |s|^a sgn(s), with sgn(0) = 0 so the result at s = 0 is 0 for every a >= 0.
template <std::floating_point Real>
[[nodiscard]] Real signed_power(Real s, Real a) {
    if (s == Real(0)) return Real(0);
    const Real magnitude = (a == Real(0)) ? Real(1) : std::pow(std::abs(s), a);
    return s < Real(0) ? -magnitude : magnitude;
}

struct ControllerState {
    double v = 0.0;
    SchedulerState scheduler;
    double last_u = 0.0;
};

[[nodiscard]] inline ControllerState initial_controller_state(const ControllerConfig& cfg) {
    return {cfg.v0, initial_scheduler_state(cfg), 0.0};
}

[[nodiscard]] inline double control(double s, const ControllerState& state, double k1, double alpha) {
    return -k1 * signed_power(s, alpha) + state.v;
}

[[nodiscard]] inline ControllerState step_integrator(ControllerState state, double s, double k2, double dt) {
    state.v -= dt * k2 * signed_power(s, 0.0);
    return state;
}

/// Everything one sample produced; `v` is the integrator value used in `u`.
struct TickOutput {
    ControllerState next;
    double u = 0.0;
    double v = 0.0;
    GainState gains;
};

/// select_mode -> step_gains -> control -> step_integrator for one sample of s.
[[nodiscard]] inline TickOutput tick(const ControllerState& state, double s, const ControllerConfig& cfg) {
    const double abs_s = std::abs(s);
    const Mode mode = select_mode(abs_s, state.scheduler, cfg);
    const double sdot = estimate_sdot(state.scheduler, s, cfg.dt);

    TickOutput out;
    out.next = state;
    out.next.scheduler = step_gains(state.scheduler, abs_s, sdot, mode, cfg);
    out.next.scheduler.prev_s = s;
    out.gains = out.next.scheduler.gains;

    double u = control(s, state, out.gains.k1, cfg.alpha);
    if (cfg.u_max) u = std::clamp(u, -*cfg.u_max, *cfg.u_max);
    out.u = u;
    out.v = state.v;

    out.next = step_integrator(out.next, s, out.gains.k2, cfg.dt);
    out.next.last_u = u;
    return out;
}

}  // namespace nbstsmc
