// Algebraic identity grids for the barrier gains and Lyapunov candidates.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <algorithm>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "barrier_gains.hpp"
#include "lyapunov.hpp"

namespace nbstsmc {

struct IdentityCheck {
    std::string name;
    double max_residual = 0.0;
    double tolerance = 0.0;
    std::string worst_point;
    std::size_t evaluations = 0;

    [[nodiscard]] bool passed() const noexcept { return max_residual <= tolerance; }
};

struct SelftestOptions {
    /// Test hook: perturbs k2 away from k1^2 so the exact-square identity must fail.
    bool inject_k2_fault = false;
    std::size_t grid_points = 10'000;
    std::size_t random_points = 10'000;
    unsigned seed = 20240601u;
};

struct SelftestReport {
    std::vector<IdentityCheck> checks;

    [[nodiscard]] bool passed() const noexcept {
        for (const auto& c : checks) {
            if (!c.passed()) return false;
        }
        return true;
    }
};

namespace detail {

inline constexpr std::array<double, 4> identity_alphas{0.25, 0.5, 0.75, 1.0};
inline constexpr std::array<double, 3> identity_eps{1e-4, 1e-2, 1e-1};

/// Keeps the largest residual seen; `where` is only formatted when it becomes the worst point.
template <typename Describe>
void track(IdentityCheck& check, double residual, Describe&& where) {
    if (std::isnan(residual)) residual = std::numeric_limits<double>::infinity();
    if (check.evaluations++ == 0 || residual > check.max_residual) {
        check.max_residual = residual;
        check.worst_point = where();
    }
}

inline std::string point(double s, double eps, double alpha) {
    std::ostringstream os;
    os.precision(17);
    os << "s=" << s << " eps=" << eps << " alpha=" << alpha;
    return os.str();
}

/// |s| log-spaced over [1e-6 eps, (1 - 1e-6) eps].
inline double grid_abs_s(std::size_t i, std::size_t n, double eps) {
    const double lo = std::log(1e-6 * eps);
    const double hi = std::log((1.0 - 1e-6) * eps);
    const double frac = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
    return std::exp(lo + frac * (hi - lo));
}

}  // namespace detail

/// k2 == k1 * k1 bit-for-bit over the identity grid (both signs of s).
[[nodiscard]] inline IdentityCheck check_square_identity(const SelftestOptions& opts = {}) {
    IdentityCheck check{"k2 = k1^2 (exact)", 0.0, 0.0, {}, 0};
    for (double eps : detail::identity_eps) {
        for (double alpha : detail::identity_alphas) {
            for (std::size_t i = 0; i < opts.grid_points; ++i) {
                const double x = detail::grid_abs_s(i, opts.grid_points, eps);
                for (double s : {x, -x}) {
                    auto [k1, k2] = barrier_k(s, eps, alpha);
                    if (opts.inject_k2_fault) k2 = std::nextafter(k2 * (1.0 + 1e-12), std::numeric_limits<double>::infinity());
                    detail::track(check, std::abs(k2 - k1 * k1), [&] { return detail::point(s, eps, alpha); });
                }
            }
        }
    }
    return check;
}

/// omega k1^2 = 1 + 2 h |y1|, max relative residual over the grid.
[[nodiscard]] inline IdentityCheck check_omega_identity(const SelftestOptions& opts = {}) {
    IdentityCheck check{"omega*k1^2 = 1 + 2*h*|y1|", 0.0, 1e-9, {}, 0};
    for (double eps : detail::identity_eps) {
        for (double alpha : detail::identity_alphas) {
            for (std::size_t i = 0; i < opts.grid_points; ++i) {
                const double s = detail::grid_abs_s(i, opts.grid_points, eps);
                const auto e = evaluate_barrier(s, eps, alpha);
                const double lhs = e.omega * e.k1 * e.k1;
                const double rhs = 1.0 + 2.0 * e.h * std::abs(e.y1);
                detail::track(check, std::abs(lhs - rhs) / std::abs(rhs), [&] { return detail::point(s, eps, alpha); });
            }
        }
    }
    return check;
}

/**
 * Along s(t) = 0.4 eps sin(t), the central difference of k1(s(t)) with step
 * 1e-6 against h k1^3 sgn(s) ds/dt, sampled away from s = 0 (|sin t| >= 0.05).
 */
[[nodiscard]] inline IdentityCheck check_chain_rule(const SelftestOptions& opts = {}) {
    IdentityCheck check{"d/dt k1 = h*k1^3*sgn(s)*ds/dt (central FD)", 0.0, 1e-4, {}, 0};
    constexpr double step = 1e-6;
    const std::size_t n = std::max<std::size_t>(opts.grid_points / 10, 16);
    for (double eps : detail::identity_eps) {
        for (double alpha : detail::identity_alphas) {
            for (std::size_t i = 0; i < n; ++i) {
                const double t = 2.0 * std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
                if (std::abs(std::sin(t)) < 0.05) continue;
                auto path = [eps](double tt) { return 0.4 * eps * std::sin(tt); };
                const double s = path(t);
                const double sdot = 0.4 * eps * std::cos(t);
                const double fd = (barrier_k(path(t + step), eps, alpha).k1 -
                                   barrier_k(path(t - step), eps, alpha).k1) / (2.0 * step);
                const double k1 = barrier_k(s, eps, alpha).k1;
                const double analytic = h_alpha(s, eps, alpha) * k1 * k1 * k1 * signed_power(s, 0.0) * sdot;
                detail::track(check, std::abs(fd - analytic) / std::abs(analytic),
                              [&] { return detail::point(s, eps, alpha); });
            }
        }
    }
    return check;
}

/// lambda_min(R) > 0 for k1 in [1e-3, 1e3] (log grid), gamma in {0.1, 1, 2, 10}.
[[nodiscard]] inline IdentityCheck check_r_positive_definite(const SelftestOptions& opts = {}) {
    IdentityCheck check{"R positive definite (1 if lambda_min <= 0)", 0.0, 0.0, {}, 0};
    const std::size_t n = std::max<std::size_t>(opts.grid_points / 10, 16);
    for (double gamma : {0.1, 1.0, 2.0, 10.0}) {
        for (std::size_t i = 0; i < n; ++i) {
            const double k1 = std::pow(10.0, -3.0 + 6.0 * static_cast<double>(i) / static_cast<double>(n - 1));
            const auto e = v_outside(0.3, 0.1, k1, 1.0, gamma, 0.5);
            detail::track(check, (e.lambda_min > 0.0 && e.lambda_max >= e.lambda_min) ? 0.0 : 1.0, [&] {
                std::ostringstream os;
                os << "k1=" << k1 << " gamma=" << gamma;
                return os.str();
            });
        }
    }
    return check;
}

/// Outside-barrier sandwich lambda_min |z|^2 <= z^T R z <= lambda_max |z|^2 at random points.
[[nodiscard]] inline IdentityCheck check_outside_sandwich(const SelftestOptions& opts = {}) {
    IdentityCheck check{"lambda_min*|z|^2 <= V - 2*gamma*k2*|s| <= lambda_max*|z|^2", 0.0, 1e-12, {}, 0};
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (std::size_t i = 0; i < opts.random_points; ++i) {
        const double s = 10.0 * unit(rng);
        const double phi = 50.0 * unit(rng);
        const double k1 = std::pow(10.0, 3.0 * unit(rng));
        const double k2 = std::pow(10.0, 3.0 * unit(rng));
        const double gamma = std::pow(10.0, unit(rng));
        const double alpha = 0.5 + 0.49 * unit(rng);
        const auto e = v_outside(s, phi, k1, k2, gamma, alpha);
        const double scale = std::max(e.lambda_max * e.z_norm_sq, 1e-300);
        const double below = (e.lambda_min * e.z_norm_sq - e.quadratic) / scale;
        const double above = (e.quadratic - e.lambda_max * e.z_norm_sq) / scale;
        detail::track(check, std::max({below, above, 0.0}), [&] {
            std::ostringstream os;
            os << "s=" << s << " phi=" << phi << " k1=" << k1 << " gamma=" << gamma;
            return os.str();
        });
    }
    return check;
}

/// In-barrier V stays within its lower/upper bounds at random (y1, y2).
[[nodiscard]] inline IdentityCheck check_inside_sandwich(const SelftestOptions& opts = {}) {
    IdentityCheck check{"inside-barrier V within its lower/upper bounds", 0.0, 1e-12, {}, 0};
    std::mt19937_64 rng(opts.seed + 1);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (std::size_t i = 0; i < opts.random_points; ++i) {
        const double y1 = std::pow(10.0, 3.0 * unit(rng)) * (unit(rng) < 0 ? -1.0 : 1.0);
        const double y2 = 5.0 * unit(rng);
        const double c = std::pow(10.0, 2.0 * unit(rng));
        const double l = 1.0 + std::pow(10.0, unit(rng));
        const auto e = v_inside(y1, y2, c, l);
        const double scale = std::max(e.upper_bound, 1e-300);
        detail::track(check,
                      std::max({(e.lower_bound - e.v_value) / scale, (e.v_value - e.upper_bound) / scale, 0.0}),
                      [&] {
                          std::ostringstream os;
                          os << "y1=" << y1 << " y2=" << y2 << " c_zeta=" << c << " L=" << l;
                          return os.str();
                      });
    }
    return check;
}

/// h(theta) >= h(zeta) for random 0 < theta < zeta < eps (1 on violation).
[[nodiscard]] inline IdentityCheck check_h_monotone(const SelftestOptions& opts = {}) {
    IdentityCheck check{"h_alpha decreasing in |s| (C_theta >= C_zeta)", 0.0, 0.0, {}, 0};
    std::mt19937_64 rng(opts.seed + 2);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < opts.random_points; ++i) {
        const double eps = detail::identity_eps[i % detail::identity_eps.size()];
        const double alpha = detail::identity_alphas[i % detail::identity_alphas.size()];
        double a = eps * (1e-4 + (1.0 - 2e-4) * unit(rng));
        double b = eps * (1e-4 + (1.0 - 2e-4) * unit(rng));
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        const auto pi = annulus_constants(eps, alpha, a, b);
        detail::track(check, pi.c_theta >= pi.c_zeta && pi.c_zeta > 0.0 ? 0.0 : 1.0, [&] {
            std::ostringstream os;
            os << "theta=" << a << " zeta=" << b << " eps=" << eps << " alpha=" << alpha;
            return os.str();
        });
    }
    return check;
}

[[nodiscard]] inline SelftestReport run_selftest(const SelftestOptions& opts = {}) {
    SelftestReport report;
    report.checks.push_back(check_square_identity(opts));
    report.checks.push_back(check_omega_identity(opts));
    report.checks.push_back(check_chain_rule(opts));
    report.checks.push_back(check_r_positive_definite(opts));
    report.checks.push_back(check_outside_sandwich(opts));
    report.checks.push_back(check_inside_sandwich(opts));
    report.checks.push_back(check_h_monotone(opts));
    return report;
}

}  // namespace nbstsmc
