#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <vector>

#include "ptscat/errors.hpp"

namespace ptscat {

// Compactly supported piecewise-polynomial perturbation q on [alpha, beta].
// breakpoints has size pieces+1 (breakpoints.front() = alpha, back() = beta);
// coefficients[i] are monomial coefficients in x on
// [breakpoints[i], breakpoints[i+1]]: q(x) = sum_k coefficients[i][k] x^k.
// p and r are the smallest orders with q^{(p-1)}(beta-) != 0 and
// q^{(r-1)}(alpha+) != 0 (derived on construction).
struct PerturbationSpec {
    std::vector<double> breakpoints;
    std::vector<std::vector<double>> coefficients;
    int p = 0;
    int r = 0;

    PerturbationSpec() = default;

    PerturbationSpec(std::vector<double> bps, std::vector<std::vector<double>> coefs)
        : breakpoints(std::move(bps)), coefficients(std::move(coefs)) {
        validate();
        p = jump_order([this](int k) { return q_deriv_beta_left(k); });
        r = jump_order([this](int k) { return q_deriv_alpha_right(k); });
    }

    bool empty() const { return coefficients.empty(); }
    double alpha() const { return empty() ? 0.0 : breakpoints.front(); }
    double beta() const { return empty() ? 0.0 : breakpoints.back(); }

    void validate() const {
        if (coefficients.empty()) {
            if (!breakpoints.empty())
                throw config_error("PerturbationSpec: breakpoints without pieces");
            return;
        }
        if (breakpoints.size() != coefficients.size() + 1)
            throw config_error("PerturbationSpec: need pieces+1 breakpoints");
        for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
            if (!(breakpoints[i] < breakpoints[i + 1]))
                throw config_error("PerturbationSpec: breakpoints must increase");
    }

    // q(x); 0 outside [alpha, beta].
    double operator()(double x) const { return derivative(x, 0); }

    // One-sided k-th derivative; from_left selects the piece touching x from
    // the left at a breakpoint.
    double derivative(double x, int k, bool from_left = false) const {
        if (empty() || x < alpha() || x > beta()) return 0.0;
        if (x == alpha() && from_left) return 0.0;
        if (x == beta() && !from_left) return 0.0;
        return poly_derivative(coefficients[piece_index(x, from_left)], x, k);
    }

    double q_deriv_beta_left(int k) const {
        return empty() ? 0.0 : poly_derivative(coefficients.back(), beta(), k);
    }
    double q_deriv_alpha_right(int k) const {
        return empty() ? 0.0 : poly_derivative(coefficients.front(), alpha(), k);
    }

    // Exact integral of q over [a, b] (clipped to the support; oriented).
    double integral(double a, double b) const {
        if (empty()) return 0.0;
        double sign = 1.0;
        if (a > b) {
            std::swap(a, b);
            sign = -1.0;
        }
        a = std::max(a, alpha());
        b = std::min(b, beta());
        if (a >= b) return 0.0;
        double total = 0.0;
        for (std::size_t i = 0; i < coefficients.size(); ++i) {
            double lo = std::max(a, breakpoints[i]);
            double hi = std::min(b, breakpoints[i + 1]);
            if (lo < hi) total += poly_integral(coefficients[i], lo, hi);
        }
        return sign * total;
    }

    // L1 norm: per piece, |q| is integrated exactly between the sign changes
    // of the polynomial (located by sampling + bisection).
    double norm1() const {
        if (empty()) return 0.0;
        double total = 0.0;
        for (std::size_t i = 0; i < coefficients.size(); ++i) {
            const auto& c = coefficients[i];
            double lo = breakpoints[i], hi = breakpoints[i + 1];
            std::vector<double> cuts{lo};
            const int n = 256;
            double xa = lo, va = poly_derivative(c, lo, 0);
            for (int k = 1; k <= n; ++k) {
                double xb = lo + (hi - lo) * double(k) / n;
                double vb = poly_derivative(c, xb, 0);
                if (va != 0.0 && vb != 0.0 && (va > 0) != (vb > 0))
                    cuts.push_back(bisect_root(c, xa, xb, va));
                xa = xb;
                va = vb;
            }
            cuts.push_back(hi);
            for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
                total += std::abs(poly_integral(c, cuts[k], cuts[k + 1]));
        }
        return total;
    }

    // FNV-1a hash of the defining data, for kernel caching.
    std::uint64_t hash() const {
        std::uint64_t h = 1469598103934665603ull;
        auto mix = [&h](double d) {
            std::uint64_t bits;
            std::memcpy(&bits, &d, sizeof(bits));
            for (int i = 0; i < 8; ++i) {
                h ^= (bits >> (8 * i)) & 0xff;
                h *= 1099511628211ull;
            }
        };
        for (double b : breakpoints) mix(b);
        for (const auto& piece : coefficients) {
            mix(double(piece.size()));
            for (double cc : piece) mix(cc);
        }
        return h;
    }

    static PerturbationSpec box(double height, double a, double b) {
        return PerturbationSpec({a, b}, {{height}});
    }

private:
    std::size_t piece_index(double x, bool from_left) const {
        auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
        std::size_t i =
            it == breakpoints.begin() ? 0 : std::size_t(it - breakpoints.begin()) - 1;
        if (from_left && i > 0 && x == breakpoints[i]) --i;
        return std::min(i, coefficients.size() - 1);
    }

    static double poly_derivative(const std::vector<double>& c, double x, int k) {
        double v = 0.0;
        for (std::size_t j = std::size_t(k); j < c.size(); ++j) {
            double fact = 1.0;
            for (int m = 0; m < k; ++m) fact *= double(j - m);
            v += fact * c[j] * std::pow(x, double(int(j) - k));
        }
        return v;
    }

    static double poly_integral(const std::vector<double>& c, double lo, double hi) {
        double v = 0.0;
        for (std::size_t j = 0; j < c.size(); ++j)
            v += c[j] / double(j + 1) *
                 (std::pow(hi, double(j + 1)) - std::pow(lo, double(j + 1)));
        return v;
    }

    static double bisect_root(const std::vector<double>& c, double xa, double xb,
                              double va) {
        for (int it = 0; it < 100; ++it) {
            double xm = 0.5 * (xa + xb);
            double vm = poly_derivative(c, xm, 0);
            if (vm == 0.0) return xm;
            if ((vm > 0) == (va > 0)) {
                xa = xm;
                va = vm;
            } else {
                xb = xm;
            }
        }
        return 0.5 * (xa + xb);
    }

    template <class F>
    int jump_order(F deriv) const {
        if (empty()) return 0;
        for (int k = 0; k < 16; ++k)
            if (std::abs(deriv(k)) > 1e-14) return k + 1;
        return 0;
    }
};

} // namespace ptscat
