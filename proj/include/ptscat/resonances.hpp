#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "ptscat/errors.hpp"
#include "ptscat/pt_exact.hpp"
#include "ptscat/scattering_data.hpp"

namespace ptscat {

// Rectangle of the lower (or upper) half-plane to search, plus the geometric
// parameters of the sector decomposition: delta is the S1/S2 aperture
// (S1 = {z in C-: -|Re z| >= delta Im z}) and eta the radius of the excluded
// balls B(-i(n+1), eta) around the continuation poles.
struct SearchRegion {
    double re_min = -1.0, re_max = 1.0, im_min = -1.0, im_max = 0.0;
    double delta = 1.0;
    double eta = 0.3;
    int contour_points = 16; // initial samples per rectangle edge
    double newton_tol = 1e-10;

    void validate() const {
        if (!(re_min < re_max && im_min < im_max))
            throw config_error("SearchRegion: empty rectangle");
        if (delta <= 0 || eta <= 0)
            throw config_error("SearchRegion: delta, eta must be positive");
    }

    bool in_s1(complex z) const {
        return z.imag() < 0 && -std::abs(z.real()) >= delta * z.imag();
    }
    bool in_excluded_ball(complex z) const {
        double k = std::round(-z.imag());
        if (k < 1) return false;
        return std::abs(z - complex(0.0, -k)) < eta;
    }
};

using EvalFn = std::function<complex(complex)>;

namespace detail {

struct ZeroSearchBudget {
    long long used = 0;
    long long cap = 1'000'000;
    complex eval(const EvalFn& f, complex z) {
        if (++used > cap) throw budget_error("find_zeros: evaluation budget exhausted");
        return f(z);
    }
};

struct ContourHit {}; // internal signal: contour passes through a zero

// Accumulated phase change of W along the segment [z1, z2], subdividing until
// each step turns by less than pi/2 (phase continuation).
inline double phase_walk(const EvalFn& W, ZeroSearchBudget& budget, complex z1, complex w1,
                         complex z2, complex w2, int depth) {
    if (std::abs(w1) < 1e-12 || std::abs(w2) < 1e-12) throw ContourHit{};
    double d = std::arg(w2 / w1);
    if (std::abs(d) < 1.5707963267948966 || depth >= 48) return d;
    complex zm = 0.5 * (z1 + z2);
    complex wm = budget.eval(W, zm);
    return phase_walk(W, budget, z1, w1, zm, wm, depth + 1) +
           phase_walk(W, budget, zm, wm, z2, w2, depth + 1);
}

inline int winding_on_rect(const EvalFn& W, ZeroSearchBudget& budget, complex lo, complex hi,
                           int pts_per_edge) {
    std::vector<complex> corners = {lo, complex(hi.real(), lo.imag()), hi,
                                    complex(lo.real(), hi.imag()), lo};
    double total = 0.0;
    for (int e = 0; e < 4; ++e) {
        complex a = corners[e], b = corners[e + 1];
        complex prev_z = a, prev_w = budget.eval(W, a);
        for (int k = 1; k <= pts_per_edge; ++k) {
            complex z = a + (b - a) * (double(k) / pts_per_edge);
            complex w = budget.eval(W, z);
            total += phase_walk(W, budget, prev_z, prev_w, z, w, 0);
            prev_z = z;
            prev_w = w;
        }
    }
    return int(std::lround(total / (2.0 * 3.14159265358979323846)));
}

// Winding with automatic nudging when the contour runs through a zero.
inline int count_with_nudge(const EvalFn& W, ZeroSearchBudget& budget, complex& lo, complex& hi,
                            int pts_per_edge) {
    const complex dir = complex(1.0, 1.0) / std::sqrt(2.0);
    for (int attempt = 0;; ++attempt) {
        try {
            return winding_on_rect(W, budget, lo, hi, pts_per_edge);
        } catch (const ContourHit&) {
            if (attempt >= 3)
                throw convergence_error("count_zeros: contour keeps hitting a zero "
                                        "after 3 nudge attempts");
            complex shift = 0.37 * std::abs(hi - lo) * dir;
            // Grow outward so no zero can be pushed out of the box.
            lo -= shift;
            hi += shift * 0.618;
        }
    }
}

} // namespace detail

// Exact number of zeros (with multiplicity) of the entire function W inside
// the rectangle, by the argument principle. The contour is auto-nudged
// (expanded) if it passes within 1e-9 of a zero.
inline int count_zeros(const EvalFn& W, double re_min, double re_max, double im_min,
                       double im_max, int pts_per_edge = 16) {
    detail::ZeroSearchBudget budget;
    complex lo(re_min, im_min), hi(re_max, im_max);
    return detail::count_with_nudge(W, budget, lo, hi, pts_per_edge);
}

namespace detail {

inline bool newton_polish(const EvalFn& W, ZeroSearchBudget& budget, complex& z, int mult,
                          double tol, double leash) {
    const complex start = z;
    for (int it = 0; it < 60; ++it) {
        complex w = budget.eval(W, z);
        double h = 1e-6 * (1.0 + std::abs(z));
        complex d = (budget.eval(W, z + h) - budget.eval(W, z - h)) / (2.0 * h);
        if (std::abs(d) < 1e-300) return false;
        complex step = double(mult) * w / d;
        z -= step;
        if (std::abs(step) < tol) return true;
        // A runaway iterate (no zero nearby, or a cluster defeating the
        // multiplicity model) must not drag the evaluation far outside the
        // cell; fail and let the caller quadrisect instead.
        if (std::abs(z - start) > leash) return false;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return false;
}

inline void find_in_rect(const EvalFn& W, ZeroSearchBudget& budget, const SearchRegion& region,
                         complex lo, complex hi, std::vector<ZeroRecord>& out, int depth) {
    complex nlo = lo, nhi = hi;
    int n = count_with_nudge(W, budget, nlo, nhi, region.contour_points);
    if (n == 0) return;
    // Continue on the (possibly grown) counting box: a zero sitting exactly on
    // the original contour is inside the grown box but may lie outside every
    // quadrant of the original one. Sibling overlap after growth only produces
    // duplicates, which the caller removes; find_zeros clips the final list
    // back to the requested rectangle.
    lo = nlo;
    hi = nhi;

    const double diag = std::abs(hi - lo);
    // Multiplicity-aware Newton (step mult*W/W') keeps quadratic convergence
    // at an exactly merged zero.
    complex z = 0.5 * (lo + hi);
    if (newton_polish(W, budget, z, n, region.newton_tol, 2.0 * diag + 1.0)) {
        // Verify with a tight box: the n counted zeros must all sit here.
        // Wide enough that |W| on the box edge clears the contour-hit
        // threshold even at a double zero (|W| ~ |W''| r^2 / 2).
        double r = std::max(3e-5, 10.0 * region.newton_tol);
        complex tlo = z - complex(r, r), thi = z + complex(r, r);
        int m = count_with_nudge(W, budget, tlo, thi, region.contour_points);
        bool inside = z.real() >= lo.real() - 1e-9 && z.real() <= hi.real() + 1e-9 &&
                      z.imag() >= lo.imag() - 1e-9 && z.imag() <= hi.imag() + 1e-9;
        if (m == n && inside) {
            ZeroRecord rec;
            rec.location = z;
            rec.multiplicity = n;
            rec.residual = std::abs(W(z));
            out.push_back(rec);
            return;
        }
    }
    if (diag < 1e-7 || depth > 60) {
        // Unresolvable cluster: report its center with the total count.
        ZeroRecord rec;
        rec.location = 0.5 * (lo + hi);
        rec.multiplicity = n;
        rec.residual = std::abs(W(rec.location));
        out.push_back(rec);
        return;
    }
    // Asymmetric split: round-number regions put zeros exactly on the halving
    // lines (e.g. the imaginary axis), where a zero on the shared edge is
    // winding-counted as one half by each neighbour and can slip through the
    // tight-box verification. An irrational-ish ratio avoids the exact hits.
    const double split = 0.51379086219;
    complex mid = lo + split * (hi - lo);
    find_in_rect(W, budget, region, lo, mid, out, depth + 1);
    find_in_rect(W, budget, region, complex(mid.real(), lo.imag()),
                 complex(hi.real(), mid.imag()), out, depth + 1);
    find_in_rect(W, budget, region, complex(lo.real(), mid.imag()),
                 complex(mid.real(), hi.imag()), out, depth + 1);
    find_in_rect(W, budget, region, mid, hi, out, depth + 1);
}

} // namespace detail

// Classify by location: eigenvalue above the real axis, half-bound state at
// the origin (|z| below newton_tol scale), resonance below.
inline std::vector<ZeroRecord>& classify(std::vector<ZeroRecord>& records,
                                         double newton_tol = 1e-10) {
    for (auto& r : records) {
        if (std::abs(r.location) < std::max(newton_tol, 1e-9) * 10.0)
            r.kind = ZeroKind::half_bound;
        else if (r.location.imag() > 0)
            r.kind = ZeroKind::eigenvalue;
        else
            r.kind = ZeroKind::resonance;
    }
    return records;
}

// All zeros of W inside the region's rectangle, polished to newton_tol, with
// multiplicities from tight-box winding counts. Throws budget_error after 1e6
// evaluations of W.
inline std::vector<ZeroRecord> find_zeros(const EvalFn& W, const SearchRegion& region) {
    region.validate();
    detail::ZeroSearchBudget budget;
    std::vector<ZeroRecord> out;
    detail::find_in_rect(W, budget, region, complex(region.re_min, region.im_min),
                         complex(region.re_max, region.im_max), out, 0);
    // Deduplicate records that adjacent (or overlap-grown) cells both polished
    // to the same point, and clip strays picked up by contour growth back to
    // the requested rectangle.
    std::vector<ZeroRecord> unique;
    for (const auto& r : out) {
        if (r.location.real() < region.re_min - 1e-7 ||
            r.location.real() > region.re_max + 1e-7 ||
            r.location.imag() < region.im_min - 1e-7 ||
            r.location.imag() > region.im_max + 1e-7)
            continue;
        bool dup = false;
        for (const auto& u : unique)
            if (std::abs(u.location - r.location) < 50.0 * region.newton_tol) dup = true;
        if (!dup) unique.push_back(r);
    }
    classify(unique, region.newton_tol);
    return unique;
}

namespace detail {

// Distance from point c to the closed axis-aligned rectangle [lo, hi].
inline double dist_to_rect(complex c, complex lo, complex hi) {
    double dx = std::max({lo.real() - c.real(), 0.0, c.real() - hi.real()});
    double dy = std::max({lo.imag() - c.imag(), 0.0, c.imag() - hi.imag()});
    return std::hypot(dx, dy);
}

// True if the cell avoids every excluded ball B(-i(n+1), eta) and lies in S1.
inline bool cell_admissible(const SearchRegion& region, complex lo, complex hi) {
    std::vector<complex> corners = {lo, complex(hi.real(), lo.imag()), hi,
                                    complex(lo.real(), hi.imag())};
    for (complex c : corners)
        if (!region.in_s1(c)) return false;
    for (double k = std::floor(-hi.imag()); k <= std::ceil(-lo.imag()) + 1.0; k += 1.0)
        if (k >= 1 && dist_to_rect(complex(0.0, -k), lo, hi) <= region.eta) return false;
    return true;
}

} // namespace detail

// Zero count over the part of S1 with im_lo <= Im z <= im_hi, |Re z| <= re_max,
// excluding the balls B(-i(n+1), eta). The band is tiled ball-aware: side
// columns clear of the imaginary axis use integer-height rows; the central
// column |Re z| < eta + margin is covered by the gap cells between
// consecutive balls. Cells meeting the excluded set or leaving S1 are
// skipped; the admissible cells' winding numbers are summed.
inline int scan_s1_cells(const EvalFn& W, const SearchRegion& region, double re_max,
                         double im_lo, double im_hi) {
    detail::ZeroSearchBudget budget;
    int total = 0;
    double margin = region.eta + 0.05;
    auto add_cell = [&](complex lo, complex hi) {
        if (!detail::cell_admissible(region, lo, hi)) return;
        complex clo = lo, chi = hi;
        total += detail::count_with_nudge(W, budget, clo, chi, region.contour_points);
    };
    // Side columns, rows of unit height aligned to integers.
    std::vector<std::pair<double, double>> cols = {
        {-re_max, -margin}, {margin, re_max}};
    for (auto [x0, x1] : cols) {
        if (x1 <= x0) continue;
        for (double y = std::floor(im_lo); y < im_hi - 1e-12; y += 1.0) {
            double a = std::max(y, im_lo), b = std::min(y + 1.0, im_hi);
            if (b > a) add_cell(complex(x0, a), complex(x1, b));
        }
    }
    // Central column: cells in the vertical gaps between consecutive balls.
    for (double k = std::ceil(-im_hi); k + 1.0 <= -im_lo + 1e-12; k += 1.0) {
        double a = std::max(-(k + 1.0) + margin, im_lo);
        double b = std::min(-k - margin, im_hi);
        if (b > a) add_cell(complex(-margin - 1e-3, a), complex(margin + 1e-3, b));
    }
    return total;
}

} // namespace ptscat
