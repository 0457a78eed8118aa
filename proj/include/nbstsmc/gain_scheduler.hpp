// Two-mode gain modulation across nested barrier layers.
//
// Mode A0 grows the dynamic gains (k1d' = k1d/|ds/dt|, k2d' = k2d/(2|s|^(1-alpha)))
// and applies them directly. Mode A(i) lets the dynamic gains decay
// (k' = -k) and applies the barrier pair of layer i instead. All ODEs are
// integrated with explicit Euler at the controller sample period.

#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>

#include "barrier_gains.hpp"
#include "core_types.hpp"

namespace nbstsmc {

struct SchedulerState {
    GainState gains;
    /// Signed s of the previous sample; empty before the first sample.
    std::optional<double> prev_s;
    /// Set while an approach from outside eps_N is in progress (mode is A0).
    bool a0_latched = false;

    [[nodiscard]] bool started() const noexcept { return prev_s.has_value(); }
};

[[nodiscard]] inline SchedulerState initial_scheduler_state(const ControllerConfig& cfg) {
    SchedulerState state;
    state.gains.k1d = cfg.k1d_init;
    state.gains.k2d = cfg.k2d_init;
    state.gains.k1 = cfg.k1d_init;
    state.gains.k2 = cfg.k2d_init;
    state.gains.mode = Mode::dynamic();
    return state;
}

/// Innermost layer with abs_s < eps_i (1-based), or 0 when abs_s >= eps_N.
[[nodiscard]] inline std::size_t containing_layer(double abs_s, std::span<const double> layers) {
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (abs_s < layers[i]) return i + 1;
    }
    return 0;
}

/**
 * Selects the gain mode for the current sample.
 *
 * - A0 when abs_s >= eps_N, or while the approach latch is set and
 *   abs_s has not yet reached the inner layer.
 * - Moving outward (abs_s >= eps_j of the current layer j) selects the
 *   containing layer immediately.
 * - Moving inward, layer i is entered only once abs_s <= entry_fraction * eps_i.
 *   With entry_fraction = 1 this is the plain "innermost containing layer" rule.
 *
 * A tie abs_s == eps_i always belongs to the outer region. The first sample
 * of a run selects the containing layer directly.
 */
[[nodiscard]] inline Mode select_mode(double abs_s, const SchedulerState& prev,
                                      std::span<const double> layers, double entry_fraction) {
    if (layers.empty()) {
        throw std::invalid_argument("select_mode: no layers");
    }
    const std::size_t natural = containing_layer(abs_s, layers);
    if (natural == 0) return Mode::dynamic();
    if (!prev.started()) return Mode::barrier(natural);

    auto can_enter = [&](std::size_t layer) {
        const double eps = layers[layer - 1];
        return abs_s < eps && abs_s <= entry_fraction * eps;
    };

    if (prev.a0_latched || prev.gains.mode.is_dynamic()) {
        return can_enter(1) ? Mode::barrier(1) : Mode::dynamic();
    }

    const std::size_t current = prev.gains.mode.layer();
    if (natural > current) return Mode::barrier(natural);
    for (std::size_t i = natural; i < current; ++i) {
        if (can_enter(i)) return Mode::barrier(i);
    }
    return Mode::barrier(current);
}

[[nodiscard]] inline Mode select_mode(double abs_s, const SchedulerState& prev,
                                      const ControllerConfig& cfg) {
    return select_mode(abs_s, prev, cfg.layers, cfg.entry_fraction);
}

/// |s_k - s_{k-1}| / T, or 0 on the first sample (the floor then applies).
[[nodiscard]] inline double estimate_sdot(const SchedulerState& state, double s, double dt) {
    if (!state.prev_s) return 0.0;
    return std::abs(s - *state.prev_s) / dt;
}

/**
 * One explicit-Euler step of the dynamic gains plus the applied gains.
 *
 * `abs_s` is |s| at the current sample, `sdot_est` the |ds/dt| estimate.
 * Entering A(i) outside the layer's domain is a scheduler bug and throws.
 */
[[nodiscard]] inline SchedulerState step_gains(SchedulerState state, double abs_s, double sdot_est,
                                               Mode mode, const ControllerConfig& cfg) {
    const double T = cfg.dt;
    GainState& g = state.gains;

    if (mode.is_dynamic()) {
        const double sdot = std::max(sdot_est, cfg.sdot_floor);
        const double s_mag = std::max(abs_s, cfg.innermost());
        const double k1d_rate = g.k1d / sdot;
        const double k2d_rate = g.k2d / (2.0 * std::pow(s_mag, 1.0 - cfg.alpha));
        g.k1d += T * k1d_rate;
        g.k2d += T * k2d_rate;
        // Keep k1d away from k2d / (k2d - 1), where the convergence weight is undefined.
        if (cfg.nu > 0.0 && g.k2d > 1.0 && std::abs(g.k1d - g.k2d / (g.k2d - 1.0)) < cfg.nu) {
            g.k1d += cfg.nu;
        }
        g.k1 = g.k1d;
        g.k2 = g.k2d;
    } else {
        g.k1d = std::max(g.k1d * (1.0 - T), cfg.gain_floor);
        g.k2d = std::max(g.k2d * (1.0 - T), cfg.gain_floor);
        const double eps = cfg.threshold(mode.layer());
        assert(abs_s < eps);
        const auto [k1, k2] = barrier_k(abs_s, eps, cfg.alpha);
        g.k1 = k1;
        g.k2 = k2;
    }
    g.mode = mode;
    state.a0_latched = mode.is_dynamic();
    return state;
}

}  // namespace nbstsmc
