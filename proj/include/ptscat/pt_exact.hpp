#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "ptscat/errors.hpp"
#include "ptscat/gamma.hpp"
#include "ptscat/hyp2f1.hpp"
#include "ptscat/scattering_data.hpp"

namespace ptscat {

// Poschl-Teller coupling lambda and the branch-fixed mu = sqrt(1/4 - lambda):
// real nonnegative for lambda <= 1/4, positive-imaginary for lambda > 1/4.
struct PTParams {
    double lambda;
    complex mu;

    explicit PTParams(double lambda_) : lambda(lambda_) {
        double d = 0.25 - lambda;
        mu = d >= 0.0 ? complex(std::sqrt(d), 0.0) : complex(0.0, std::sqrt(-d));
    }
};

struct ABCTriple {
    complex a;
    complex b;
    complex c;
};

// a = 1/2 - iz + mu,  b = 1/2 - iz - mu,  c = 1 - iz.
inline ABCTriple abc(const PTParams& p, complex z) {
    const complex iz = complex(0.0, 1.0) * z;
    return {0.5 - iz + p.mu, 0.5 - iz - p.mu, 1.0 - iz};
}

namespace detail {

// Distance from z to the lattice i*Z.
inline double dist_to_iZ(complex z) {
    double im = z.imag() - std::round(z.imag());
    return std::hypot(z.real(), im);
}

// Nudge z off i*Z (the degenerate/logarithmic set) by 1e-9 when it lands
// exactly on it; all closed-form and connection formulas are then usable.
inline complex nudge_off_iZ(complex z) {
    if (dist_to_iZ(z) < 1e-9) return z + complex(1e-9, 0.0);
    return z;
}

// Series half of the Jost solution: f0+(x,z) = e^{izx} F(c-a, c-b, c; zeta)
// with zeta = 1/(1+e^{2x}) (note c-a = 1/2 - mu and c-b = 1/2 + mu do not
// depend on z). Valid while zeta stays inside the series disk; the caller
// switches to the connection formula otherwise. `normalized` replaces F by
// the regularized series (division by Gamma(c), entire in z).
inline JostValue jost0_plus_series(const PTParams& p, double x, complex z,
                                   bool normalized) {
    const complex iz = complex(0.0, 1.0) * z;
    const complex c = 1.0 - iz;
    const complex ca = 0.5 - p.mu, cb = 0.5 + p.mu;
    const double e2x = std::exp(2.0 * x);
    const double zeta = 1.0 / (1.0 + e2x);
    const double dzeta_dx = -2.0 * zeta * (1.0 - zeta);
    complex F, dF;
    if (normalized) {
        F = hyp2f1_regularized(ca, cb, c, zeta);
        dF = hyp2f1_regularized_derivative(ca, cb, c, zeta);
    } else {
        F = hyp2f1(ca, cb, c, zeta);
        dF = hyp2f1_derivative(ca, cb, c, zeta);
    }
    const complex pref = std::exp(iz * x);
    JostValue out;
    out.value = pref * F;
    out.dx = iz * out.value + pref * dF * dzeta_dx;
    return out;
}

} // namespace detail

// Closed forms. w0 is written with reciprocal-Gamma factors so that its zeros
// (eigenvalues/resonances) are plain zeros, not 0*inf artifacts:
//   w0(z) = -2 Gamma(1-iz)^2 rgamma(a) rgamma(b),
//   s0(z) =  2 Gamma(1-iz) Gamma(1+iz) rgamma(c-a) rgamma(c-b).
// Genuine poles of w0 are z in -iN*, of s0 the whole of iZ*.
inline complex w0(const PTParams& p, complex z) {
    const complex iz = complex(0.0, 1.0) * z;
    if (detail::near_nonpositive_integer(1.0 - iz, 1e-12))
        throw pole_error("w0: Gamma(1-iz) pole (z in -iN*)");
    auto t = abc(p, z);
    complex g = gamma(1.0 - iz);
    return -2.0 * g * g * rgamma(t.a) * rgamma(t.b);
}

enum class Side { plus, minus };

inline complex s0(const PTParams& p, complex z, Side /*side*/ = Side::plus) {
    // s0+ = s0- for the even Poschl-Teller potential.
    const complex iz = complex(0.0, 1.0) * z;
    if (detail::near_nonpositive_integer(1.0 - iz, 1e-12) ||
        detail::near_nonpositive_integer(1.0 + iz, 1e-12))
        throw pole_error("s0: Gamma(1 -/+ iz) pole (z in iZ*)");
    return 2.0 * gamma(1.0 - iz) * gamma(1.0 + iz) * rgamma(0.5 - p.mu) *
           rgamma(0.5 + p.mu);
}

// Normalized (entire) variants W0 = w0/Gamma(1-iz)^2 and
// S0 = s0/(Gamma(1-iz)Gamma(1+iz)); S0 is constant in z.
inline complex W0(const PTParams& p, complex z) {
    auto t = abc(p, z);
    return -2.0 * rgamma(t.a) * rgamma(t.b);
}

inline complex S0(const PTParams& p, complex /*z*/ = 0.0) {
    return 2.0 * rgamma(0.5 - p.mu) * rgamma(0.5 + p.mu);
}

// Unperturbed Jost solutions on all of R. For the "wrong side" of each series
// representation the basis connection
//   f0+(x,z) = (w0/2iz) f0-(x,-z) + (s0/2iz) f0-(x,z)
// is used (z on iZ is nudged off by 1e-9; the logarithmic case is excluded by
// design). `normalized` selects the regularized variant bf0 = f0/Gamma(1-iz).
inline JostValue jost0_plus(const PTParams& p, double x, complex z,
                            bool normalized = false);

inline JostValue jost0_minus(const PTParams& p, double x, complex z,
                             bool normalized = false) {
    // Evenness of the potential: f0-(x,z) = f0+(-x,z).
    JostValue v = jost0_plus(p, -x, z, normalized);
    v.dx = -v.dx;
    return v;
}

inline JostValue jost0_plus(const PTParams& p, double x, complex z,
                            bool normalized) {
    const double zeta = 1.0 / (1.0 + std::exp(2.0 * x));
    if (zeta <= 0.6) return detail::jost0_plus_series(p, x, z, normalized);
    z = detail::nudge_off_iZ(z);
    const complex iz = complex(0.0, 1.0) * z;
    // f0-(x, +/-z) both have series argument 1 - zeta <= 0.4 here.
    JostValue fm_neg = jost0_minus(p, x, -z, normalized);
    JostValue fm_pos = jost0_minus(p, x, z, normalized);
    complex A, B;
    if (normalized) {
        // bf0+ = [W0 G1 G2 / 2iz] bf0-(x,-z) + [S0 G1 G2 / 2iz] bf0-(x,z)
        complex g12 = gamma(1.0 - iz) * gamma(1.0 + iz);
        A = W0(p, z) * g12 / (2.0 * iz);
        B = S0(p, z) * g12 / (2.0 * iz);
    } else {
        A = w0(p, z) / (2.0 * iz);
        B = s0(p, z) / (2.0 * iz);
    }
    return {A * fm_neg.value + B * fm_pos.value, A * fm_neg.dx + B * fm_pos.dx};
}

// A located zero of W (or an S evaluator) with classification.
enum class ZeroKind { eigenvalue, resonance, half_bound };

struct ZeroRecord {
    complex location{};
    int multiplicity = 1;
    ZeroKind kind = ZeroKind::resonance;
    double residual = 0.0;
};

// All zeros of w0 in the closed lower half-plane with index n <= n_max:
//   lambda <= 1/4: z = -i(n + 1/2 +/- mu); lambda > 1/4: z = +/-sqrt(lambda-1/4) - i(n+1/2).
// Coincident +/- pairs (lambda = 1/4, or half-integer mu overlaps) merge with
// multiplicity 2.
inline std::vector<ZeroRecord> resonances_closed_form(const PTParams& p, int n_max) {
    std::vector<ZeroRecord> out;
    auto push = [&](complex loc) {
        if (loc.imag() > 1e-12) return; // closed lower half-plane only
        for (auto& r : out) {
            if (std::abs(r.location - loc) < 1e-12) {
                r.multiplicity += 1;
                return;
            }
        }
        ZeroRecord rec;
        rec.location = loc;
        rec.kind = std::abs(loc) < 1e-12 ? ZeroKind::half_bound : ZeroKind::resonance;
        out.push_back(rec);
    };
    for (int n = 0; n <= n_max; ++n) {
        const complex i(0.0, 1.0);
        push(-i * (double(n) + 0.5 + p.mu));
        push(-i * (double(n) + 0.5 - p.mu));
    }
    return out;
}

// Scattering data of the unperturbed operator: T0 = 2iz/w0, R0 = s0/w0, with
// the normalized fields filled alongside.
inline ScatteringData scattering0(const PTParams& p, complex z) {
    ScatteringData d;
    d.z = z;
    d.W = W0(p, z);
    d.S_plus = d.S_minus = S0(p, z);
    const complex iz = complex(0.0, 1.0) * z;
    d.pole_set = detail::dist_to_iZ(z) < 1e-12 && std::abs(z) > 1e-12;
    if (!d.pole_set) {
        d.w = w0(p, z);
        d.s_plus = d.s_minus = std::abs(z) > 1e-12
                                   ? s0(p, z)
                                   : 2.0 * rgamma(0.5 - p.mu) * rgamma(0.5 + p.mu);
        if (std::abs(d.w) < 1e-300)
            throw domain_error("scattering0: w0(z) = 0 (spectral point)");
        d.T = 2.0 * iz / d.w;
        d.R_plus = d.s_plus / d.w;
        d.R_minus = d.s_minus / d.w;
    } else {
        d.w = d.s_plus = d.s_minus = complex(std::nan(""), std::nan(""));
        d.T = d.R_plus = d.R_minus = complex(std::nan(""), std::nan(""));
    }
    return d;
}

// Effective coupling of spherical-harmonic mode k in dimension d:
// lambda_k = k(k+d-2) + (d-1)(3-d)/4.
inline double cylinder_lambda(int k, int d) {
    return double(k) * double(k + d - 2) + double(d - 1) * double(3 - d) / 4.0;
}

} // namespace ptscat
