// Post-hoc trajectory diagnostics: Lyapunov decrease, reach time, mode statistics.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "plant_sim.hpp"

namespace nbstsmc {

struct SwitchCounts {
    /// Samples whose mode differs from the previous sample's.
    std::size_t total = 0;
    /// Transitions from a barrier mode into A0.
    std::size_t a0_entries = 0;
};

struct DiagnosticsReport {
    /// Fraction of A0 -> A0 sample pairs where V_out decreased; empty when there are none.
    std::optional<double> decrease_fraction;
    std::size_t a0_pairs = 0;
    /// Times t_k of pairs where V_out(t_{k+1}) did not drop below V_out(t_k).
    std::vector<double> violations;
    /// First time |s| < eps_N; empty if never reached.
    std::optional<double> reach_time;
    /// Fraction of samples per mode code (index 0 = A0, i = A(i)).
    std::vector<double> mode_occupancy;
    SwitchCounts switch_counts;
};

struct DecreaseOptions {
    /// Leading samples ignored by the decrease check.
    std::size_t skip_samples = 10;
    /// V_{k+1} - V_k below this counts as a decrease.
    double tolerance = 1e-12;
};

/// First time |s| < eps_N, if any.
[[nodiscard]] inline std::optional<double> reach_time(const Trajectory& traj) {
    const double eps_n = traj.config.outermost();
    for (const auto& r : traj.records) {
        if (std::abs(r.s) < eps_n) return r.t;
    }
    return std::nullopt;
}

/// Number of A(i) -> A0 transitions landing at t >= t_from.
[[nodiscard]] inline std::size_t a0_activations_after(const Trajectory& traj, double t_from) {
    std::size_t count = 0;
    for (std::size_t k = 1; k < traj.records.size(); ++k) {
        const auto& cur = traj.records[k];
        if (cur.t >= t_from && cur.mode == 0 && traj.records[k - 1].mode != 0) ++count;
    }
    return count;
}

/// Samples in A0 at t >= t_from.
[[nodiscard]] inline std::size_t a0_samples_after(const Trajectory& traj, double t_from) {
    return static_cast<std::size_t>(std::count_if(traj.records.begin(), traj.records.end(), [&](const auto& r) {
        return r.t >= t_from && r.mode == 0;
    }));
}

[[nodiscard]] inline double max_abs_s_after(const Trajectory& traj, double t_from) {
    double m = 0.0;
    for (const auto& r : traj.records) {
        if (r.t >= t_from) m = std::max(m, std::abs(r.s));
    }
    return m;
}

[[nodiscard]] inline DiagnosticsReport monitor_decrease(const Trajectory& traj, const DecreaseOptions& opts = {}) {
    if (traj.records.empty()) {
        throw std::invalid_argument("monitor_decrease: empty trajectory");
    }
    const auto& recs = traj.records;
    DiagnosticsReport report;
    report.reach_time = reach_time(traj);

    std::vector<std::size_t> per_mode(traj.config.layer_count() + 1, 0);
    std::size_t decreases = 0;
    for (std::size_t k = 0; k < recs.size(); ++k) {
        const auto& r = recs[k];
        const auto code = static_cast<std::size_t>(r.mode);
        if (code < per_mode.size()) ++per_mode[code];
        if (k == 0) continue;

        const auto& prev = recs[k - 1];
        if (r.mode != prev.mode) {
            ++report.switch_counts.total;
            if (r.mode == 0) ++report.switch_counts.a0_entries;
        }
        if (k - 1 < opts.skip_samples || !prev.v_out || !r.v_out) continue;
        ++report.a0_pairs;
        if (*r.v_out - *prev.v_out < opts.tolerance) {
            ++decreases;
        } else {
            report.violations.push_back(prev.t);
        }
    }
    if (report.a0_pairs > 0) {
        report.decrease_fraction = static_cast<double>(decreases) / static_cast<double>(report.a0_pairs);
    }
    report.mode_occupancy.reserve(per_mode.size());
    for (const auto c : per_mode) {
        report.mode_occupancy.push_back(static_cast<double>(c) / static_cast<double>(recs.size()));
    }
    return report;
}

}  // namespace nbstsmc
