// Declarative perturbation profiles d(t) and their rates.

#pragma once

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "core_types.hpp"

namespace nbstsmc {

/// Square wave starting high at t = 0: amplitude for the first duty*period of each period, else 0.
struct StepTrain {
    double amplitude = 100.0;
    double period = 2.0;
    double duty = 0.5;
};

struct FrequencySegment {
    double t_start;
    double frequency;
};

/**
 * Sinusoid amplitude*sin(theta(t)) whose frequency changes at scheduled times.
 *
 * The phase is continuous across segment boundaries. The first segment's
 * frequency also applies before its start time.
 */
struct SinusoidSchedule {
    double amplitude = 1.0;
    std::vector<FrequencySegment> schedule{{0.0, 1.0}, {2.0, 1.0}, {5.0, 5.0}, {7.0, 10.0}};
};

struct TableSample {
    double t;
    double d;
};

/// Piecewise-linear table, held constant outside its time range.
struct Table {
    std::vector<TableSample> samples{{0.0, 0.0}};
};

using PerturbationSpec = std::variant<StepTrain, SinusoidSchedule, Table>;

struct PerturbationSample {
    double d = 0.0;
    /// Rate dd/dt; empty at a step discontinuity.
    std::optional<double> delta;
};

[[nodiscard]] inline ValidationResult validate_perturbation(const PerturbationSpec& spec) {
    ValidationResult result;
    auto error = [&](const char* key, const char* msg) { result.errors.push_back({key, msg}); };
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, StepTrain>) {
                if (!std::isfinite(p.amplitude)) error("scenario.amplitude", "must be finite");
                if (!(std::isfinite(p.period) && p.period > 0.0)) error("scenario.period", "must be > 0");
                if (!(p.duty > 0.0 && p.duty < 1.0)) error("scenario.duty", "must lie in (0, 1)");
            } else if constexpr (std::is_same_v<T, SinusoidSchedule>) {
                if (!std::isfinite(p.amplitude)) error("scenario.amplitude", "must be finite");
                if (p.schedule.empty()) error("scenario.schedule", "needs at least one segment");
                for (std::size_t i = 0; i < p.schedule.size(); ++i) {
                    const auto& seg = p.schedule[i];
                    if (!std::isfinite(seg.t_start) || seg.t_start < 0.0 || !std::isfinite(seg.frequency)) {
                        error("scenario.schedule", "entries must be finite with t >= 0");
                        break;
                    }
                    if (i > 0 && !(seg.t_start > p.schedule[i - 1].t_start)) {
                        error("scenario.schedule", "schedule times not strictly increasing");
                        break;
                    }
                }
            } else {
                if (p.samples.empty()) error("scenario.table", "needs at least one sample");
                for (std::size_t i = 0; i < p.samples.size(); ++i) {
                    if (!std::isfinite(p.samples[i].t) || !std::isfinite(p.samples[i].d)) {
                        error("scenario.table", "entries must be finite");
                        break;
                    }
                    if (i > 0 && !(p.samples[i].t > p.samples[i - 1].t)) {
                        error("scenario.table", "table times not strictly increasing");
                        break;
                    }
                }
            }
        },
        spec);
    return result;
}

namespace detail {

inline PerturbationSample evaluate(const StepTrain& p, double t) {
    const double cycles = std::floor(t / p.period);
    const double phase = t - cycles * p.period;
    const double fall = p.duty * p.period;
    // Samples landing on an edge (up to rounding of t) carry no finite rate.
    const double tol = 1e-9 * p.period;
    const bool at_rise = phase <= tol || p.period - phase <= tol;
    const bool at_fall = std::abs(phase - fall) <= tol;
    PerturbationSample out;
    out.d = phase < fall ? p.amplitude : 0.0;
    if (!(at_rise || at_fall)) out.delta = 0.0;
    return out;
}

inline PerturbationSample evaluate(const SinusoidSchedule& p, double t) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const auto& sched = p.schedule;
    std::size_t seg = 0;
    double theta = 0.0;
    while (seg + 1 < sched.size() && t >= sched[seg + 1].t_start) {
        const double start = seg == 0 ? 0.0 : sched[seg].t_start;
        theta += two_pi * sched[seg].frequency * (sched[seg + 1].t_start - start);
        ++seg;
    }
    const double start = seg == 0 ? 0.0 : sched[seg].t_start;
    const double f = sched[seg].frequency;
    theta += two_pi * f * (t - start);
    return {p.amplitude * std::sin(theta), two_pi * f * p.amplitude * std::cos(theta)};
}

inline PerturbationSample evaluate(const Table& p, double t) {
    const auto& s = p.samples;
    if (s.size() == 1 || t <= s.front().t) return {s.front().d, 0.0};
    if (t >= s.back().t) return {s.back().d, 0.0};
    const auto it = std::upper_bound(s.begin(), s.end(), t,
                                     [](double value, const TableSample& x) { return value < x.t; });
    const auto& hi = *it;
    const auto& lo = *std::prev(it);
    const double slope = (hi.d - lo.d) / (hi.t - lo.t);
    return {lo.d + slope * (t - lo.t), slope};
}

}  // namespace detail

/// d(t) and its rate. Throws std::invalid_argument for t < 0.
[[nodiscard]] inline PerturbationSample perturbation(const PerturbationSpec& spec, double t) {
    if (!(t >= 0.0)) {
        throw std::invalid_argument("perturbation: t must be >= 0");
    }
    return std::visit([t](const auto& p) { return detail::evaluate(p, t); }, spec);
}

/// Largest |dd/dt| over the finite-rate parts of the profile (infinite for a step train).
[[nodiscard]] inline double rate_bound(const PerturbationSpec& spec) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    return std::visit(
        [](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, StepTrain>) {
                return p.amplitude == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
            } else if constexpr (std::is_same_v<T, SinusoidSchedule>) {
                double f = 0.0;
                for (const auto& seg : p.schedule) f = std::max(f, std::abs(seg.frequency));
                return two_pi * f * std::abs(p.amplitude);
            } else {
                double bound = 0.0;
                for (std::size_t i = 1; i < p.samples.size(); ++i) {
                    const auto& a = p.samples[i - 1];
                    const auto& b = p.samples[i];
                    bound = std::max(bound, std::abs((b.d - a.d) / (b.t - a.t)));
                }
                return bound;
            }
        },
        spec);
}

}  // namespace nbstsmc
