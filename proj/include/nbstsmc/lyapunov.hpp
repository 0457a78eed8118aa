// Lyapunov candidates used to check closed-loop runs.
//
// Outside the barrier:  V = z^T R z + 2 gamma k2 |s|, with
//     z = (|s|^alpha sgn(s), psi),  psi = k1 |s|^alpha sgn(s) - phi,
//     R = gamma/2 [[k1^2, -k1], [-k1, 2]].
//
// Inside a barrier, in the transformed coordinates (y1, y2):
//     V = ln(1 + 2 C|y1|)/(2C) (1 - sgn(y1) sigma(y2)/4) + F y2^2 / 2,
// where sigma saturates at +-1 and F = L when sgn(y1) y2 <= 0, else 1.

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "barrier_gains.hpp"
#include "stsmc_controller.hpp"

namespace nbstsmc {

[[nodiscard]] inline double sigma_sat(double y2) {
    return signed_power(y2, 0.0) * std::min(std::abs(y2), 1.0);
}

struct OutsideLyapEval {
    double psi = 0.0;
    double v_value = 0.0;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    /// z^T R z, i.e. V without the 2 gamma k2 |s| term.
    double quadratic = 0.0;
    /// |s|^(2 alpha) + psi^2, the squared norm of z.
    double z_norm_sq = 0.0;
};

[[nodiscard]] inline OutsideLyapEval v_outside(double s, double phi, double k1, double k2, double gamma,
                                               double alpha) {
    if (!(k1 > 0.0)) throw std::invalid_argument("v_outside: k1 must be > 0");
    if (!(gamma > 0.0)) throw std::invalid_argument("v_outside: gamma must be > 0");
    if (!(k2 >= 0.0)) throw std::invalid_argument("v_outside: k2 must be >= 0");

    OutsideLyapEval out;
    const double z1 = signed_power(s, alpha);
    const double psi = k1 * z1 - phi;
    const double c = 0.5 * gamma;
    // R = c [[k1^2, -k1], [-k1, 2]]
    out.psi = psi;
    out.quadratic = c * (k1 * k1 * z1 * z1 - 2.0 * k1 * z1 * psi + 2.0 * psi * psi);
    out.v_value = out.quadratic + 2.0 * gamma * k2 * std::abs(s);
    out.z_norm_sq = z1 * z1 + psi * psi;

    const double trace = c * (k1 * k1 + 2.0);
    const double det = c * c * k1 * k1;
    const double half = 0.5 * trace;
    out.lambda_max = half + std::sqrt(std::max(half * half - det, 0.0));
    // det / lambda_max avoids cancellation in half - sqrt(...).
    out.lambda_min = det / out.lambda_max;
    return out;
}

struct InsideLyapEval {
    double v_value = 0.0;
    double c_zeta = 0.0;
    double c_theta = 0.0;
    double f_factor = 1.0;
    double lower_bound = 0.0;
    double upper_bound = 0.0;
};

/// C_theta = h(theta) and C_zeta = h(zeta) for the annulus theta <= |s| <= zeta.
struct AnnulusConstants {
    double c_theta;
    double c_zeta;
};

[[nodiscard]] inline AnnulusConstants annulus_constants(double eps, double alpha, double theta, double zeta) {
    if (!(theta > 0.0 && theta < zeta && zeta < eps)) {
        throw DomainError("annulus_constants: need 0 < theta < zeta < eps");
    }
    return {h_alpha(theta, eps, alpha), h_alpha(zeta, eps, alpha)};
}

/// Default annulus: theta = eps/100, zeta = 0.99 eps.
[[nodiscard]] inline AnnulusConstants annulus_constants(double eps, double alpha) {
    return annulus_constants(eps, alpha, eps / 100.0, 0.99 * eps);
}

inline constexpr double default_l_alpha = 2.0;

[[nodiscard]] inline InsideLyapEval v_inside(double y1, double y2, double c_zeta, double l_alpha) {
    if (!(c_zeta > 0.0)) throw std::invalid_argument("v_inside: c_zeta must be > 0");
    if (!(l_alpha > 1.0)) throw std::invalid_argument("v_inside: l_alpha must be > 1");

    const double sgn1 = signed_power(y1, 0.0);
    const double log_term = std::log1p(2.0 * c_zeta * std::abs(y1));

    InsideLyapEval out;
    out.c_zeta = c_zeta;
    out.f_factor = (sgn1 * y2 <= 0.0) ? l_alpha : 1.0;
    out.v_value = log_term / (2.0 * c_zeta) * (1.0 - 0.25 * sgn1 * sigma_sat(y2)) +
                  0.5 * out.f_factor * y2 * y2;
    out.lower_bound = 3.0 * log_term / (8.0 * c_zeta) + 0.5 * y2 * y2;
    out.upper_bound = 5.0 * log_term / (8.0 * c_zeta) + 0.5 * l_alpha * y2 * y2;
    return out;
}

/// v_inside with C_theta filled in from the annulus.
[[nodiscard]] inline InsideLyapEval v_inside(double y1, double y2, const AnnulusConstants& pi, double l_alpha) {
    InsideLyapEval out = v_inside(y1, y2, pi.c_zeta, l_alpha);
    out.c_theta = pi.c_theta;
    return out;
}

}  // namespace nbstsmc
