// Perturbed integrator ds/dt = u + d(t) and the closed-loop simulation loop.

#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "core_types.hpp"
#include "lyapunov.hpp"
#include "perturbation.hpp"
#include "stsmc_controller.hpp"

namespace nbstsmc {

/// Raised when a state variable stops being finite; names the first bad sample.
class SimulationError : public std::runtime_error {
public:
    SimulationError(std::size_t sample, double t, const std::string& variable)
        : std::runtime_error(describe(sample, t, variable)), sample_(sample), t_(t), variable_(variable) {}

    [[nodiscard]] std::size_t sample() const noexcept { return sample_; }
    [[nodiscard]] double time() const noexcept { return t_; }
    [[nodiscard]] const std::string& variable() const noexcept { return variable_; }

private:
    static std::string describe(std::size_t sample, double t, const std::string& variable) {
        std::ostringstream os;
        os << "numerical overflow in '" << variable << "' at sample " << sample << " (t = " << t << ")";
        return os.str();
    }

    std::size_t sample_;
    double t_;
    std::string variable_;
};

/// One explicit-Euler step of the plant.
[[nodiscard]] inline double plant_step(double s, double u, double d, double dt) {
    return s + dt * (u + d);
}

struct Trajectory {
    std::vector<TrajectoryRecord> records;
    ControllerConfig config;
    PerturbationSpec perturbation;
};

/**
 * Runs the closed loop from t = 0 to the horizon, one record per sample.
 *
 * Per sample: measure s, pick the mode, update gains, compute u, advance the
 * integrator, then advance the plant. `v` in each record is the integrator
 * value that entered u, so (s_{k+1} - s_k)/T = -k1 |s_k|^alpha sgn(s_k) + v_k + d_k.
 * Throws std::invalid_argument for an invalid configuration or perturbation
 * and SimulationError on non-finite state.
 */
[[nodiscard]] inline Trajectory run_simulation(const ControllerConfig& cfg, const PerturbationSpec& spec) {
    if (const auto check = validate_config(cfg); !check.ok()) {
        throw std::invalid_argument("run_simulation: invalid config key '" + check.errors.front().key +
                                    "': " + check.errors.front().message);
    }
    if (const auto check = validate_perturbation(spec); !check.ok()) {
        throw std::invalid_argument("run_simulation: invalid perturbation key '" + check.errors.front().key +
                                    "': " + check.errors.front().message);
    }

    Trajectory traj{{}, cfg, spec};
    const std::size_t n = cfg.sample_count();
    traj.records.reserve(n + 1);

    ControllerState state = initial_controller_state(cfg);
    double s = cfg.s0;

    for (std::size_t k = 0; k <= n; ++k) {
        const double t = static_cast<double>(k) * cfg.dt;
        const PerturbationSample p = perturbation(spec, t);
        const TickOutput out = tick(state, s, cfg);

        TrajectoryRecord rec;
        rec.t = t;
        rec.s = s;
        rec.u = out.u;
        rec.v = out.v;
        rec.k1 = out.gains.k1;
        rec.k2 = out.gains.k2;
        rec.k1d = out.gains.k1d;
        rec.k2d = out.gains.k2d;
        rec.mode = out.gains.mode.code();
        rec.d = p.d;
        rec.delta = p.delta;

        auto require_finite = [&](double value, const char* name) {
            if (!std::isfinite(value)) throw SimulationError(k, t, name);
        };
        require_finite(rec.u, "u");
        require_finite(rec.k1, "k1");
        require_finite(rec.k2, "k2");
        require_finite(out.next.v, "v");
        require_finite(out.gains.k1d, "k1d");
        require_finite(out.gains.k2d, "k2d");

        if (out.gains.mode.is_dynamic()) {
            const double v_out =
                v_outside(s, out.v + p.d, out.gains.k1, out.gains.k2, cfg.gamma, cfg.alpha).v_value;
            require_finite(v_out, "V_out");
            rec.v_out = v_out;
        }
        traj.records.push_back(rec);

        state = out.next;
        s = plant_step(s, out.u, p.d, cfg.dt);
        if (!std::isfinite(s)) throw SimulationError(k + 1, t + cfg.dt, "s");
    }
    return traj;
}

}  // namespace nbstsmc
