// Positive-semidefinite barrier gains and their algebraic companions.
//
// For a threshold eps and exponent alpha the barrier pair is
//
//     k1(s) = |s| / (eps - |s|)^(alpha + 1),   k2(s) = k1(s)^2
//
// defined on |s| < eps. k1 vanishes at s = 0 and blows up at |s| -> eps, which
// keeps s inside the layer. The well factor h and disturbance gain omega are
// diagnostics tied to k1 by
//
//     d/dt k1 = h k1^3 sgn(s) ds/dt,      omega k1^2 = 1 + 2 h |y1|,
//
// with y1 = k1^2 s. Every function works on |s| and reapplies the sign, so
// even/odd symmetry holds exactly in floating point.

#pragma once

#include <cmath>
#include <concepts>
#include <sstream>
#include <string>

#include "core_types.hpp"

namespace nbstsmc {

template <std::floating_point Real>
struct BarrierPair {
    Real k1;
    Real k2;
};

template <std::floating_point Real>
struct TransformedState {
    Real y1;
    Real y2;
};

template <std::floating_point Real>
struct BarrierEval {
    Real k1;
    Real k2;
    Real h;
    Real omega;
    Real y1;
};

namespace detail {

template <std::floating_point Real>
void require_barrier_params(Real eps, Real alpha, const char* fn) {
    if (!(eps > Real(0)) || !(alpha > Real(0))) {
        throw DomainError(std::string(fn) + ": eps and alpha must be > 0");
    }
}

template <std::floating_point Real>
void require_inside(Real abs_s, Real eps, const char* fn) {
    if (!(abs_s < eps)) {
        std::ostringstream os;
        os << fn << ": |s| = " << abs_s << " outside the barrier domain |s| < " << eps;
        throw DomainError(os.str());
    }
}

template <std::floating_point Real>
void require_nonzero(Real abs_s, const char* fn) {
    if (abs_s == Real(0)) {
        throw DomainError(std::string(fn) + ": pole at s = 0");
    }
}

}  // namespace detail

/// Barrier gain pair for |s| < eps; throws DomainError on |s| >= eps.
template <std::floating_point Real>
[[nodiscard]] BarrierPair<Real> barrier_k(Real s, Real eps, Real alpha) {
    detail::require_barrier_params(eps, alpha, "barrier_k");
    const Real x = std::abs(s);
    detail::require_inside(x, eps, "barrier_k");
    const Real k1 = x / std::pow(eps - x, alpha + Real(1));
    return {k1, k1 * k1};
}

/// Well-depth factor (eps + alpha|s|)(eps - |s|)^(2 alpha + 1) / |s|^3 on 0 < |s| < eps.
template <std::floating_point Real>
[[nodiscard]] Real h_alpha(Real s, Real eps, Real alpha) {
    detail::require_barrier_params(eps, alpha, "h_alpha");
    const Real x = std::abs(s);
    detail::require_nonzero(x, "h_alpha");
    detail::require_inside(x, eps, "h_alpha");
    return (eps + alpha * x) * std::pow(eps - x, Real(2) * alpha + Real(1)) / (x * x * x);
}

/// Variable disturbance gain (eps - |s|)^(2 alpha + 1) (3 eps + (2 alpha - 1)|s|) / |s|^2.
template <std::floating_point Real>
[[nodiscard]] Real omega_alpha(Real s, Real eps, Real alpha) {
    detail::require_barrier_params(eps, alpha, "omega_alpha");
    const Real x = std::abs(s);
    detail::require_nonzero(x, "omega_alpha");
    detail::require_inside(x, eps, "omega_alpha");
    return std::pow(eps - x, Real(2) * alpha + Real(1)) *
           (Real(3) * eps + (Real(2) * alpha - Real(1)) * x) / (x * x);
}

/// (y1, y2) = (k1^2 s, phi).
template <std::floating_point Real>
[[nodiscard]] TransformedState<Real> y_transform(Real s, Real phi, Real eps, Real alpha) {
    const auto [k1, k2] = barrier_k(s, eps, alpha);
    (void)k1;
    const Real magnitude = k2 * std::abs(s);
    return {std::signbit(s) ? -magnitude : magnitude, phi};
}

/// All barrier quantities at one point, 0 < |s| < eps.
template <std::floating_point Real>
[[nodiscard]] BarrierEval<Real> evaluate_barrier(Real s, Real eps, Real alpha) {
    const auto [k1, k2] = barrier_k(s, eps, alpha);
    const auto [y1, y2] = y_transform(s, Real(0), eps, alpha);
    (void)y2;
    return {k1, k2, h_alpha(s, eps, alpha), omega_alpha(s, eps, alpha), y1};
}

}  // namespace nbstsmc
