#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>

#include "ptscat/errors.hpp"
#include "ptscat/gamma.hpp"

namespace ptscat {

struct Hyp2F1Args {
    complex a;
    complex b;
    complex c;
    complex zeta;
};

namespace detail {

inline constexpr double series_rel_tol = 1e-16;
inline constexpr int series_min_terms = 8;
inline constexpr int series_max_terms = 20000;

inline void check_zeta(complex zeta) {
    if (std::abs(zeta) > 0.99)
        throw domain_error("hyp2f1: |zeta| too close to the series radius 1");
}

} // namespace detail

// Gauss hypergeometric series 2F1(a,b,c;zeta), |zeta| <= 0.99.
// Term-recurrence summation with the stopping rule: three consecutive terms
// below 1e-16 * |sum| and at least 8 terms; hard cap 20000.
inline complex hyp2f1(const Hyp2F1Args& args) {
    detail::check_zeta(args.zeta);
    if (detail::near_nonpositive_integer(args.c, 1e-12))
        throw pole_error("hyp2f1: c at a non-positive integer");
    complex term = 1.0, sum = 1.0;
    int below = 0;
    for (int n = 0; n < detail::series_max_terms; ++n) {
        term *= (args.a + double(n)) * (args.b + double(n)) /
                ((args.c + double(n)) * double(n + 1)) * args.zeta;
        sum += term;
        if (std::abs(term) < detail::series_rel_tol * std::abs(sum)) {
            if (++below >= 3 && n + 1 >= detail::series_min_terms) return sum;
        } else {
            below = 0;
        }
    }
    throw convergence_error("hyp2f1: series cap reached (accuracy loss)");
}

inline complex hyp2f1(complex a, complex b, complex c, complex zeta) {
    return hyp2f1({a, b, c, zeta});
}

// Regularized series sum_n (a)_n (b)_n / Gamma(c+n) * zeta^n / n!, entire in c.
// Leading terms where Gamma(c+n) has a pole contribute zero via rgamma.
inline complex hyp2f1_regularized(const Hyp2F1Args& args) {
    detail::check_zeta(args.zeta);
    // Pochhammer-by-recurrence part (a)_n (b)_n zeta^n / n!, the entire 1/Gamma
    // factor applied per-term. Once n is past any non-positive-integer pole of
    // Gamma(c+n) the ratio recurrence could be used, but a per-term rgamma is
    // robust and cheap at the few dozen terms these arguments need.
    complex poch = 1.0, sum = rgamma(args.c);
    int below = 0;
    for (int n = 0; n < detail::series_max_terms; ++n) {
        poch *= (args.a + double(n)) * (args.b + double(n)) / double(n + 1) * args.zeta;
        complex term = poch * rgamma(args.c + double(n + 1));
        sum += term;
        double scale = std::max(std::abs(sum), std::abs(poch) * 1e-20);
        if (std::abs(term) < detail::series_rel_tol * scale) {
            if (++below >= 3 && n + 1 >= detail::series_min_terms) return sum;
        } else {
            below = 0;
        }
    }
    throw convergence_error("hyp2f1_regularized: series cap reached");
}

inline complex hyp2f1_regularized(complex a, complex b, complex c, complex zeta) {
    return hyp2f1_regularized({a, b, c, zeta});
}

// d/dzeta 2F1(a,b,c;zeta) = (ab/c) 2F1(a+1,b+1,c+1;zeta).
inline complex hyp2f1_derivative(const Hyp2F1Args& args) {
    if (std::abs(args.c) < 1e-14)
        throw pole_error("hyp2f1_derivative: c = 0");
    return args.a * args.b / args.c *
           hyp2f1(args.a + 1.0, args.b + 1.0, args.c + 1.0, args.zeta);
}

inline complex hyp2f1_derivative(complex a, complex b, complex c, complex zeta) {
    return hyp2f1_derivative({a, b, c, zeta});
}

// d/dzeta of the regularized series: ab * reg2F1(a+1,b+1,c+1;zeta).
inline complex hyp2f1_regularized_derivative(complex a, complex b, complex c,
                                             complex zeta) {
    return a * b * hyp2f1_regularized(a + 1.0, b + 1.0, c + 1.0, zeta);
}

// Gauss half-argument value: 2F1(a,b,(a+b+1)/2; 1/2)
//   = sqrt(pi) Gamma(a/2+b/2+1/2) / (Gamma(a/2+1/2) Gamma(b/2+1/2)).
inline complex gauss_half(complex a, complex b) {
    complex top = 0.5 * (a + b + 1.0);
    if (detail::near_nonpositive_integer(top, 1e-12))
        throw pole_error("gauss_half: Gamma((a+b+1)/2) pole");
    return std::sqrt(std::numbers::pi) * gamma(top) * rgamma(0.5 * (a + 1.0)) *
           rgamma(0.5 * (b + 1.0));
}

// Connection coefficients of the second Kummer relation
//   f1(zeta) = coef1 * f3(zeta) + coef2 * f4(zeta)
// with f1 = F(a,b,c;zeta), f3 = F(a,b,a+b-c+1;1-zeta),
// f4 = (1-zeta)^{c-a-b} F(c-a,c-b,c-a-b+1;1-zeta).
// The logarithmic case c-a-b integer is rejected.
inline std::pair<complex, complex> kummer_connect(const Hyp2F1Args& args) {
    complex cab = args.c - args.a - args.b;
    double r = std::round(cab.real());
    if (std::abs(cab.real() - r) < 1e-9 && std::abs(cab.imag()) < 1e-9)
        throw degenerate_error("kummer_connect: c-a-b integer (logarithmic case)");
    complex coef1 = gamma(args.c) * gamma(cab) * rgamma(args.c - args.a) *
                    rgamma(args.c - args.b);
    complex coef2 =
        gamma(args.c) * gamma(-cab) * rgamma(args.a) * rgamma(args.b);
    return {coef1, coef2};
}

// m-term large-c asymptotic partial sum of 2F1 with its admissibility check:
//   F(a,b,c;zeta) = sum_{n<m} (a)_n (b)_n / ((c)_n n!) zeta^n + O(c^{-m}),
// valid when one of the four regimes below holds (a/b terminating; Re zeta
// below / on / above 1/2 with the corresponding arg(c) sector).
inline bool hyp2f1_large_c_admissible(const Hyp2F1Args& args, double delta = 0.1) {
    auto nonpos_int = [](complex w) {
        return detail::near_nonpositive_integer(w, 1e-12);
    };
    if (nonpos_int(args.a) || nonpos_int(args.b)) return true; // regime 1
    double re = args.zeta.real();
    double argc = std::arg(args.c);
    if (re < 0.5) {
        // regime 2: c bounded away from the non-positive integers; for a fixed
        // c this is |c+n| >= delta for all n in {0,-1,-2,...} i.e. distance from
        // {0,-1,-2,...}.
        if (args.c.real() > -0.5 + delta) return std::abs(args.c) >= delta;
        double rr = std::round(args.c.real());
        if (rr > 0) return true;
        complex d = args.c - rr;
        return std::abs(d) >= delta;
    }
    if (std::abs(re - 0.5) < 1e-14) {
        return std::abs(argc) <= std::numbers::pi - delta; // regime 3
    }
    // regime 4
    complex z = args.zeta;
    double l = std::log(std::abs(1.0 - 1.0 / z));
    auto alpha = [&](double sgn) {
        return std::atan((std::arg(z) - std::arg(1.0 - z) - sgn * std::numbers::pi) / l);
    };
    double lo = alpha(-1.0) - 0.5 * std::numbers::pi + delta;
    double hi = alpha(+1.0) + 0.5 * std::numbers::pi - delta;
    return argc >= lo && argc <= hi;
}

inline complex hyp2f1_large_c(const Hyp2F1Args& args, int m) {
    if (!hyp2f1_large_c_admissible(args))
        throw regime_error("hyp2f1_large_c: c outside every admissible regime");
    complex term = 1.0, sum = 1.0;
    for (int n = 0; n + 1 < m; ++n) {
        term *= (args.a + double(n)) * (args.b + double(n)) /
                ((args.c + double(n)) * double(n + 1)) * args.zeta;
        sum += term;
    }
    return sum;
}

} // namespace ptscat
