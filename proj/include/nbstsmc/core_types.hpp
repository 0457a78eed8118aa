// Shared configuration, mode and gain types plus configuration validation.

#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nbstsmc {

/// Raised when a barrier-related function is evaluated outside its domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/**
 * Gain modulation mode.
 *
 * Layer 0 is the dynamic adaptation mode A0; layer i in [1, N] is the
 * barrier-based mode A(i) using threshold eps_i.
 */
class Mode {
public:
    constexpr Mode() = default;

    static constexpr Mode dynamic() noexcept { return Mode{}; }

    /// Barrier mode for 1-based layer index.
    static Mode barrier(std::size_t layer) {
        if (layer == 0) {
            throw std::invalid_argument("barrier layer index is 1-based");
        }
        Mode m;
        m.layer_ = layer;
        return m;
    }

    [[nodiscard]] constexpr bool is_dynamic() const noexcept { return layer_ == 0; }
    [[nodiscard]] constexpr std::size_t layer() const noexcept { return layer_; }

    /// Integer used in trajectory records and CSV output (0 = A0, i = A(i)).
    [[nodiscard]] constexpr int code() const noexcept { return static_cast<int>(layer_); }

    friend constexpr bool operator==(Mode, Mode) = default;

private:
    std::size_t layer_ = 0;
};

/**
 * Controller and simulation parameters.
 *
 * Defaults reproduce the two-layer simulation setup. `entry_fraction` and
 * `u_max` are optional extensions: a layer is entered from outside only once
 * |s| <= entry_fraction * eps_i, and u is clipped to [-u_max, u_max] when set.
 */
struct ControllerConfig {
    double alpha = 0.5;
    std::vector<double> layers{1e-4, 1e-1};
    double dt = 1e-5;
    double gamma = 2.0;
    double nu = 1e-3;
    double sdot_floor = 1e-6;
    double gain_floor = 1e-6;
    double k1d_init = 10.0;
    double k2d_init = 1.0;
    double s0 = 0.5;
    double v0 = 0.0;
    double horizon = 10.0;
    double entry_fraction = 0.5;
    std::optional<double> u_max;

    [[nodiscard]] std::size_t layer_count() const noexcept { return layers.size(); }
    [[nodiscard]] double innermost() const { return layers.front(); }
    [[nodiscard]] double outermost() const { return layers.back(); }
    /// eps_i for a 1-based layer index.
    [[nodiscard]] double threshold(std::size_t layer) const { return layers.at(layer - 1); }
    /// Number of samples after t = 0 (the trajectory holds sample_count() + 1 rows).
    [[nodiscard]] std::size_t sample_count() const {
        return static_cast<std::size_t>(std::llround(horizon / dt));
    }
};

/**
 * Dynamic gains and the gains actually applied in the control law.
 *
 * In A0 the applied gains equal the dynamic ones; in A(i) they come from the
 * layer's barrier function and k2 == k1 * k1.
 */
struct GainState {
    double k1d = 1.0;
    double k2d = 1.0;
    double k1 = 1.0;
    double k2 = 1.0;
    Mode mode{};
};

/// One sample of a closed-loop run. `delta` is empty at step discontinuities,
/// `v_out` is only present in A0. k1d/k2d are kept for diagnostics but not written to CSV.
struct TrajectoryRecord {
    double t = 0.0;
    double s = 0.0;
    double u = 0.0;
    double v = 0.0;
    double k1 = 0.0;
    double k2 = 0.0;
    double k1d = 0.0;
    double k2d = 0.0;
    int mode = 0;
    double d = 0.0;
    std::optional<double> delta;
    std::optional<double> v_out;
};

struct ValidationIssue {
    std::string key;
    std::string message;
};

struct ValidationResult {
    std::vector<ValidationIssue> errors;
    std::vector<ValidationIssue> warnings;

    [[nodiscard]] bool ok() const noexcept { return errors.empty(); }
};

/// Checks every invariant of ControllerConfig. Pure: errors name the offending key.
[[nodiscard]] inline ValidationResult validate_config(const ControllerConfig& cfg) {
    ValidationResult result;
    auto error = [&](std::string key, std::string msg) {
        result.errors.push_back({std::move(key), std::move(msg)});
    };
    auto positive = [&](const char* key, double value) {
        if (!(std::isfinite(value) && value > 0.0)) {
            error(key, "must be a finite value > 0");
        }
    };

    if (cfg.layers.empty()) {
        error("layers", "at least one layer threshold is required");
    } else {
        if (!(std::isfinite(cfg.layers.front()) && cfg.layers.front() > 0.0)) {
            error("layers", "thresholds must be > 0");
        }
        for (std::size_t i = 1; i < cfg.layers.size(); ++i) {
            if (!(cfg.layers[i] > cfg.layers[i - 1]) || !std::isfinite(cfg.layers[i])) {
                error("layers", "layers not strictly increasing");
                break;
            }
        }
    }

    positive("alpha", cfg.alpha);
    positive("dt", cfg.dt);
    positive("gamma", cfg.gamma);
    positive("nu", cfg.nu);
    positive("sdot_floor", cfg.sdot_floor);
    positive("gain_floor", cfg.gain_floor);
    positive("k1d_init", cfg.k1d_init);
    positive("k2d_init", cfg.k2d_init);

    if (std::isfinite(cfg.k1d_init) && cfg.k1d_init < cfg.gain_floor) {
        error("k1d_init", "must be >= gain_floor");
    }
    if (std::isfinite(cfg.k2d_init) && cfg.k2d_init < cfg.gain_floor) {
        error("k2d_init", "must be >= gain_floor");
    }
    if (!std::isfinite(cfg.s0)) error("s0", "must be finite");
    if (!std::isfinite(cfg.v0)) error("v0", "must be finite");
    if (!std::isfinite(cfg.horizon) || !(cfg.horizon >= cfg.dt)) {
        error("horizon", "horizon must be >= dt");
    }
    if (!(cfg.entry_fraction > 0.0 && cfg.entry_fraction <= 1.0)) {
        error("entry_fraction", "must lie in (0, 1]");
    }
    if (cfg.u_max && !(std::isfinite(*cfg.u_max) && *cfg.u_max > 0.0)) {
        error("u_max", "must be a finite value > 0");
    }
    // Explicit-Euler decay k <- k (1 - T) needs T < 1 to keep gains positive.
    if (std::isfinite(cfg.dt) && cfg.dt >= 1.0) {
        error("dt", "must be < 1 s");
    }

    if (std::isfinite(cfg.alpha) && cfg.alpha > 0.0 && !(cfg.alpha < 1.0)) {
        result.warnings.push_back({"alpha", "alpha outside proof range (0, 1)"});
    }
    return result;
}

}  // namespace nbstsmc
