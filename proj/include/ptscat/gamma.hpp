#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "ptscat/errors.hpp"

namespace ptscat {

using complex = std::complex<double>;

namespace detail {

// Lanczos approximation, g = 7, 9 coefficients. Relative error ~1e-13 on the
// half-plane Re z > 0.5, which combined with reflection covers |z| <= 50 at
// the 1e-12 level.
inline constexpr double lanczos_g = 7.0;
inline constexpr double lanczos_coeff[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

inline complex lanczos_sum(complex z) {
    // z is shifted so that the series is evaluated at z-1.
    complex s = lanczos_coeff[0];
    for (int k = 1; k < 9; ++k) s += lanczos_coeff[k] / (z - 1.0 + double(k));
    return s;
}

inline bool near_nonpositive_integer(complex z, double tol) {
    if (z.real() > 0.5) return false;
    double r = std::round(z.real());
    return r <= 0.0 && std::abs(z.real() - r) < tol && std::abs(z.imag()) < tol;
}

} // namespace detail

// pi / sin(pi z), Euler's reflection combination Gamma(z) Gamma(1-z).
inline complex reflection_gamma(complex z) {
    double r = std::round(z.real());
    if (std::abs(z.real() - r) < 1e-14 && std::abs(z.imag()) < 1e-14)
        throw pole_error("reflection_gamma: pole at integer z");
    // sin(pi z) overflows for large |Im z|; the needed domain is moderate.
    return std::numbers::pi / std::sin(std::numbers::pi * z);
}

// Complex Gamma function.
inline complex gamma(complex z) {
    if (detail::near_nonpositive_integer(z, 1e-14))
        throw pole_error("gamma: pole at non-positive integer");
    if (z.real() < 0.5) {
        // Reflection: Gamma(z) = pi / (sin(pi z) Gamma(1 - z)).
        return reflection_gamma(z) / gamma(1.0 - z);
    }
    const double g = detail::lanczos_g;
    complex t = z + g - 0.5;
    complex s = detail::lanczos_sum(z);
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, z - 0.5) * std::exp(-t) * s;
}

// log Gamma on Re z >= 0.5 (principal-ish branch adequate for ratio work on
// the strips this library uses); falls back to log(gamma) via reflection on
// the left half-plane.
inline complex log_gamma(complex z) {
    if (z.real() >= 0.5) {
        const double g = detail::lanczos_g;
        complex t = z + g - 0.5;
        complex s = detail::lanczos_sum(z);
        return 0.5 * std::log(2.0 * std::numbers::pi) + (z - 0.5) * std::log(t) - t +
               std::log(s);
    }
    return std::log(reflection_gamma(z)) - log_gamma(1.0 - z);
}

// Reciprocal Gamma, entire: zero (not a pole) at non-positive integers.
// Used for every Jost-function closed form so that eigenvalue parameter
// values are handled without special-casing.
inline complex rgamma(complex z) {
    if (z.real() < 0.5) {
        // 1/Gamma(z) = sin(pi z)/pi * Gamma(1 - z), entire in z.
        return std::sin(std::numbers::pi * z) / std::numbers::pi * gamma(1.0 - z);
    }
    return 1.0 / gamma(z);
}

} // namespace ptscat
