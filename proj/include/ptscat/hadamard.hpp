#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "ptscat/errors.hpp"
#include "ptscat/gamma.hpp"
#include "ptscat/pt_exact.hpp"
#include "ptscat/scattering_data.hpp"

namespace ptscat {

enum class HadamardTarget { W, S_plus, S_minus };

// Truncated genus-1 Hadamard factorization of one of the entire scattering
// functions:
//   W(z)  = z^m e^{a0 + a1 z}  prod (1 - z/W_n) e^{z/W_n}
//   S+(z) = (-1)^l z^l e^{b0 - b1 z} prod (...)   (S- with the opposite signs)
// zeros holds the nonzero zeros with multiplicities; the exponent at the
// origin is m_or_l.
struct HadamardModel {
    HadamardTarget target = HadamardTarget::W;
    std::vector<ZeroRecord> zeros;
    int m_or_l = 0;
    complex a0_or_b0{};
    complex a1_or_b1{};
    int truncation_N = 0;
    double fit_residual = 0.0;

    // log of the truncated genus-1 product (principal branch per factor;
    // exp of the sum reproduces the product exactly).
    complex log_product(complex z) const {
        complex s{};
        for (const auto& rec : zeros) {
            complex t = z / rec.location;
            s += double(rec.multiplicity) * (std::log(1.0 - t) + t);
        }
        return s;
    }

    complex eval(complex z) const {
        complex zpow = m_or_l == 0 ? complex(1.0, 0.0) : std::pow(z, m_or_l);
        complex sign(1.0, 0.0), lin = a1_or_b1 * z;
        if (target == HadamardTarget::S_plus) {
            sign = (m_or_l % 2 == 0) ? 1.0 : -1.0;
            lin = -lin;
        }
        return sign * zpow * std::exp(a0_or_b0 + lin + log_product(z));
    }
};

namespace detail {

// The zero list must be symmetric under z -> -conj(z) (real Wronskian on the
// imaginary axis); tolerance scales with |z|.
inline void require_conj_symmetric(const std::vector<ZeroRecord>& zeros) {
    for (const auto& a : zeros) {
        complex mirror = -std::conj(a.location);
        bool ok = false;
        for (const auto& b : zeros)
            if (std::abs(b.location - mirror) < 1e-6 * (1.0 + std::abs(mirror)) &&
                b.multiplicity == a.multiplicity)
                ok = true;
        if (!ok)
            throw precondition_error("hadamard fit: zero list is not symmetric under "
                                     "z -> -conj(z)");
    }
}

// Split out an origin zero: returns its multiplicity and the remaining list.
inline int strip_origin(std::vector<ZeroRecord>& zeros) {
    int m = 0;
    std::vector<ZeroRecord> rest;
    for (const auto& r : zeros) {
        if (std::abs(r.location) < 1e-9)
            m += r.multiplicity;
        else
            rest.push_back(r);
    }
    zeros = std::move(rest);
    return m;
}

// Least squares y_k ~ c0 + c1 x_k over complex samples (2x2 normal equations).
inline std::pair<complex, complex> linear_fit(const std::vector<complex>& x,
                                              const std::vector<complex>& y) {
    complex sx{}, sxx{}, sy{}, sxy{};
    double n = double(x.size());
    for (size_t k = 0; k < x.size(); ++k) {
        sx += x[k];
        sxx += x[k] * x[k];
        sy += y[k];
        sxy += x[k] * y[k];
    }
    complex det = n * sxx - sx * sx;
    if (std::abs(det) < 1e-14)
        throw degenerate_error("hadamard fit: singular normal equations");
    complex c1 = (n * sxy - sx * sy) / det;
    complex c0 = (sy - c1 * sx) / n;
    return {c0, c1};
}

} // namespace detail

// Fit the W-factorization from its zero list: m from an origin zero, then
// (a0, a1) by least squares on
//   log[ 2i(it) / (Gamma(1+t)^2 (it)^m P_N(it)) ]  over probe points it,
// using that W(it) Gamma(1+t)^2 -> 2i(it) for large t. The log is phase-
// unwrapped along increasing t.
inline HadamardModel fit_W(std::vector<ZeroRecord> zeros,
                           std::vector<double> probe_ts = {5.0, 10.0, 20.0, 40.0}) {
    if (probe_ts.size() < 2)
        throw precondition_error("fit_W: need at least two probe points");
    std::sort(probe_ts.begin(), probe_ts.end());
    if (probe_ts.back() < 8.0 * probe_ts.front())
        throw degenerate_error("fit_W: probe spread below a decade (ill-conditioned)");
    detail::require_conj_symmetric(zeros);

    HadamardModel model;
    model.target = HadamardTarget::W;
    model.m_or_l = detail::strip_origin(zeros);
    if (model.m_or_l > 1)
        throw precondition_error("fit_W: the origin is at most a simple zero of W");
    if (zeros.size() < 20)
        throw precondition_error("fit_W: need N >= 20 zeros");
    model.zeros = std::move(zeros);
    model.truncation_N = 0;
    for (const auto& r : model.zeros) model.truncation_N += r.multiplicity;

    std::vector<complex> xs, ys;
    double prev_im = 0.0;
    const double two_pi = 6.283185307179586476925;
    for (double t : probe_ts) {
        complex it(0.0, t);
        // log of 2i(it)/(Gamma(1+t)^2 (it)^m P(it)) assembled additively to
        // avoid overflow of Gamma(1+t)^2 for large t.
        complex val = std::log(complex(0.0, 2.0) * it) - 2.0 * log_gamma(complex(1.0 + t, 0.0)) -
                      double(model.m_or_l) * std::log(it) - model.log_product(it);
        // unwrap against the previous probe
        if (!xs.empty()) {
            double d = val.imag() - prev_im;
            val -= complex(0.0, two_pi * std::round(d / two_pi));
        }
        prev_im = val.imag();
        xs.push_back(it);
        ys.push_back(val);
    }
    auto [a0, a1] = detail::linear_fit(xs, ys);
    model.a0_or_b0 = a0;
    model.a1_or_b1 = a1;
    double res = 0.0;
    for (size_t k = 0; k < xs.size(); ++k)
        res = std::max(res, std::abs(ys[k] - (a0 + a1 * xs[k])));
    model.fit_residual = res;
    return model;
}

// Order of the zero at the origin of
//   G(z) = W(z) W(-z) - 4 z^2 / (Gamma(1-iz) Gamma(1+iz))^2
// counted by winding on |z| = 0.1 with 64 points. The order is 2l.
inline int detect_l(const std::function<complex(complex)>& W_eval) {
    const int n = 64;
    const double r = 0.1;
    const double two_pi = 6.283185307179586476925;
    auto G = [&](complex z) {
        complex rg = rgamma(complex(1.0, 0.0) - complex(0.0, 1.0) * z) *
                     rgamma(complex(1.0, 0.0) + complex(0.0, 1.0) * z);
        return W_eval(z) * W_eval(-z) - 4.0 * z * z * rg * rg;
    };
    double total = 0.0;
    complex prev = G(complex(r, 0.0));
    if (std::abs(prev) < 1e-13) throw degenerate_error("detect_l: zero on probe circle");
    for (int k = 1; k <= n; ++k) {
        double th = two_pi * k / n;
        complex cur = G(complex(r * std::cos(th), r * std::sin(th)));
        if (std::abs(cur) < 1e-13) throw degenerate_error("detect_l: zero on probe circle");
        total += std::arg(cur / prev);
        prev = cur;
    }
    int order = int(std::lround(total / two_pi));
    if (order < 0 || order % 2 != 0)
        throw convergence_error("detect_l: winding count is not a non-negative even integer");
    return order / 2;
}

enum class SupportHint { R_plus, R_minus, origin_inside };

// Fit the S+/- factorization from its zero list. The applicable regime:
//  (i)  one-sided support: normalize along z_n = +/- i(4n+1)/2 where
//       S(z_n) tends to the unperturbed constant S0;
//  (ii) origin regular (l = 0) and usable W(0): b0 from W(0) = -S(0), b1 = 0
//       (translation-free normalization);
//  (iii) otherwise the sign datum p = sign(i^l e^{b0}) is required, and the
//       magnitude still comes from W(0) when the origin is regular.
inline HadamardModel fit_S(std::vector<ZeroRecord> zeros, HadamardTarget side,
                           SupportHint hint, const std::function<complex(complex)>& W_eval,
                           const PTParams& pt, int p_sign = 0) {
    if (side == HadamardTarget::W)
        throw precondition_error("fit_S: side must be S_plus or S_minus");
    HadamardModel model;
    model.target = side;
    int l = detect_l(W_eval);
    int origin_mult = detail::strip_origin(zeros);
    if (origin_mult > l)
        throw precondition_error("fit_S: origin zero multiplicity exceeds detected l");
    model.m_or_l = l;
    model.zeros = std::move(zeros);
    model.truncation_N = 0;
    for (const auto& r : model.zeros) model.truncation_N += r.multiplicity;

    const bool plus_side = side == HadamardTarget::S_plus;
    const double lin_sign = plus_side ? -1.0 : 1.0; // e^{b0 + lin_sign * b1 z}
    const complex sgn = (l % 2 == 0 || !plus_side) ? complex(1.0, 0.0) : complex(-1.0, 0.0);

    bool one_sided = (plus_side && hint == SupportHint::R_minus) ||
                     (!plus_side && hint == SupportHint::R_plus);
    if (one_sided) {
        // Regime (i): along z_n on the +/- imaginary axis S approaches the
        // constant S0 of the unperturbed problem; two-parameter fit of
        // log(S0 / (sgn z^l P(z))) = b0 + lin_sign b1 z with unwrapping.
        complex S0v = S0(pt);
        if (std::abs(S0v) < 1e-300)
            throw degenerate_error("fit_S: unperturbed S0 vanishes");
        std::vector<complex> xs, ys;
        double prev_im = 0.0;
        const double two_pi = 6.283185307179586476925;
        for (int n = 4; n <= 10; ++n) {
            double t = (4.0 * n + 1.0) / 2.0;
            complex zn(0.0, plus_side ? t : -t);
            complex val = std::log(S0v / sgn) - double(l) * std::log(zn) - model.log_product(zn);
            if (!xs.empty()) {
                double d = val.imag() - prev_im;
                val -= complex(0.0, two_pi * std::round(d / two_pi));
            }
            prev_im = val.imag();
            xs.push_back(lin_sign * zn);
            ys.push_back(val);
        }
        auto [b0, b1] = detail::linear_fit(xs, ys);
        model.a0_or_b0 = b0;
        model.a1_or_b1 = b1;
        double res = 0.0;
        for (size_t k = 0; k < xs.size(); ++k)
            res = std::max(res, std::abs(ys[k] - (b0 + b1 * xs[k])));
        model.fit_residual = res;
    } else {
        // Regimes (ii)/(iii). The product identity
        //   S(z) S(-z) = W(z) W(-z) - 4 z^2 / (Gamma(1-iz) Gamma(1+iz))^2
        // determines e^{2 b0}: the left side equals (-1)^l z^{2l} e^{2 b0}
        // P(z) P(-z), so (i^l e^{b0})^2 is a computable positive real number
        // and only the sign of i^l e^{b0} remains: from W(0) = -S(0) when
        // the origin is regular (regime ii), from the datum p otherwise.
        complex z0(0.0, 0.37);
        complex rg = rgamma(complex(1.0, 0.0) - complex(0.0, 1.0) * z0) *
                     rgamma(complex(1.0, 0.0) + complex(0.0, 1.0) * z0);
        complex G = W_eval(z0) * W_eval(-z0) - 4.0 * z0 * z0 * rg * rg;
        complex denom = std::pow(z0, 2 * l) *
                        std::exp(model.log_product(z0) + model.log_product(-z0));
        complex sq = G / denom * ((l % 2 == 0) ? 1.0 : -1.0); // (i^l e^{b0})^2
        if (!(sq.real() > 0.0) || std::abs(sq.imag()) > 1e-6 * std::abs(sq))
            throw convergence_error("fit_S: (i^l e^{b0})^2 is not positive real; "
                                    "zero list inconsistent with W");
        double amp = std::sqrt(sq.real()); // |e^{b0}|
        double s;
        if (l == 0) {
            complex eb0_direct = -W_eval(complex(0.0, 0.0)); // e^{b0}, real
            s = eb0_direct.real() >= 0 ? 1.0 : -1.0;
            if (p_sign != 0 && s * p_sign < 0)
                throw regime_error("fit_S: given p contradicts W(0) = -S(0)");
            model.fit_residual = std::abs(std::abs(eb0_direct) - amp) / amp;
        } else if (p_sign != 0) {
            s = double(p_sign);
            model.fit_residual = 0.0;
        } else {
            throw regime_error("fit_S: half-bound state present and support not "
                               "one-sided; the sign datum p is required (regime iii)");
        }
        // i^l e^{b0} = s * amp  =>  e^{b0} = s * amp * i^{-l}
        complex eb0 = s * amp * std::pow(complex(0.0, -1.0), l);
        model.a0_or_b0 = std::log(eb0);
        model.a1_or_b1 = complex(0.0, 0.0);
    }
    // b1 is purely imaginary; enforce and record the violation.
    double re_b1 = std::abs(model.a1_or_b1.real());
    model.fit_residual = std::max(model.fit_residual, re_b1);
    model.a1_or_b1 = complex(0.0, model.a1_or_b1.imag());
    return model;
}

} // namespace ptscat
