#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ptscat/errors.hpp"
#include "ptscat/kernel.hpp"
#include "ptscat/perturbation.hpp"
#include "ptscat/pt_exact.hpp"

namespace ptscat {

enum class BranchKind { log_branch, vertical_branch };

// Closed-form asymptotic model of one family of resonances: the logarithmic
// branches created by the edges of supp q, or the persistent vertical string
// inherited from the sech^2 background. points[k] corresponds to index
// j = j_lo + k (index 0 is skipped for log branches; negative j is the
// mirror branch beta_{-j} = -conj(beta_j)).
struct BranchPrediction {
    BranchKind kind = BranchKind::log_branch;
    double A = 0.0;        // branch constant, A = C/(p+r-2)!
    double C = 0.0;
    int p = 1, r = 1;      // edge vanishing orders at beta-, alpha+
    double alpha = 0.0, beta = 0.0;
    int j_lo = 1, j_hi = 1;
    std::vector<int> indices;
    std::vector<complex> points;
};

// Branch constant from the product of the outermost kernel edge jumps,
//   C = (-1)^p * [dt^{r-1} dx K^-(0, 2alpha+)] * [dx^p K^+(0, 2beta-)],
// substituting the closed jump values -q^{(p-1)}(beta-)/4 and the mirrored
// -q^{(r-1)}(alpha+)/4; A = C/(p+r-2)!.
inline double branch_constant(const PerturbationSpec& q, double* C_out = nullptr) {
    int p = q.p;
    int r = q.r;
    double jump_plus = -0.25 * q.q_deriv_beta_left(p - 1);
    double jump_minus = -0.25 * q.q_deriv_alpha_right(r - 1);
    if (jump_plus == 0.0 || jump_minus == 0.0)
        throw degenerate_error("branch_constant: an edge jump vanishes; the stated "
                               "orders p, r are inconsistent with q");
    double sgn = (p % 2 == 0) ? 1.0 : -1.0;
    double C = sgn * jump_minus * jump_plus;
    if (C_out) *C_out = C;
    double fact = 1.0;
    for (int k = 2; k <= p + r - 2; ++k) fact *= k;
    return C / fact;
}

// Cross-check the closed-form edge jumps against the computed kernel grids
// (reliable for orders <= 2). Returns the worse relative deviation.
inline double branch_constant_grid_check(const PerturbationSpec& q, const KernelGrid& Kp,
                                         const KernelGrid& Km) {
    return std::max(boundary_jump_mismatch(Kp, q), boundary_jump_mismatch(Km, q));
}

// Logarithmic-branch asymptotics for indices j_lo..j_hi (skipping 0):
//   beta_j = -(pi/(2L)) (2|j| + (p+r-2)/2 + (sign A + 1))
//            - i (p+r)/(2L) log(|j| pi / L) + i/(2L) log(|A| (p+r-2)!)
// for j > 0, with L = beta - alpha, and beta_{-j} = -conj(beta_j).
inline BranchPrediction predict_log_branch(const PerturbationSpec& q, int j_lo, int j_hi) {
    double alpha = q.alpha(), beta = q.beta();
    if (!(alpha < 0.0 && 0.0 < beta))
        throw precondition_error("predict_log_branch: 0 must lie in the interior of supp q "
                                 "(translate q first; the scattering data shifts covariantly)");
    BranchPrediction bp;
    bp.kind = BranchKind::log_branch;
    bp.p = q.p;
    bp.r = q.r;
    bp.alpha = alpha;
    bp.beta = beta;
    bp.A = branch_constant(q, &bp.C);
    bp.j_lo = j_lo;
    bp.j_hi = j_hi;
    const double pi = 3.14159265358979323846;
    double L = beta - alpha;
    int pr = bp.p + bp.r;
    double fact = 1.0;
    for (int k = 2; k <= pr - 2; ++k) fact *= k;
    double sA = bp.A > 0 ? 1.0 : -1.0;
    for (int j = j_lo; j <= j_hi; ++j) {
        if (j == 0) continue;
        int aj = std::abs(j);
        double re = -(pi / (2.0 * L)) * (2.0 * aj + 0.5 * (pr - 2) + (sA + 1.0));
        double im = -(pr / (2.0 * L)) * std::log(aj * pi / L) +
                    std::log(std::abs(bp.A) * fact) / (2.0 * L);
        complex z(re, im);
        bp.indices.push_back(j);
        bp.points.push_back(j > 0 ? z : complex(-re, im));
    }
    return bp;
}

// Persistent vertical string alpha_j ~ -i(2|j| - 1 +/- sqrt(1/4 - lambda) - 1/2),
// both signs per index; real offsets require lambda <= 1/4.
inline BranchPrediction predict_vertical_branch(double lambda, int j_lo, int j_hi) {
    BranchPrediction bp;
    bp.kind = BranchKind::vertical_branch;
    bp.j_lo = j_lo;
    bp.j_hi = j_hi;
    double mu = lambda <= 0.25 ? std::sqrt(0.25 - lambda) : 0.0;
    for (int j = std::max(1, j_lo); j <= j_hi; ++j) {
        for (int s : {+1, -1}) {
            bp.indices.push_back(s * j);
            bp.points.push_back(complex(0.0, -(2.0 * j - 1.0 + s * mu - 0.5)));
        }
    }
    return bp;
}

// One matched prediction: absolute and relative distance to the nearest
// unclaimed numerically found zero.
struct BranchMatch {
    int index = 0;
    complex predicted{};
    bool matched = false;
    complex found{};
    double abs_error = 0.0;
    double rel_error = 0.0;
};

struct BranchMatchReport {
    std::vector<BranchMatch> matches;
    int unmatched_predictions = 0;
    bool abs_error_decreasing = false; // along increasing |index|, matched tail
    bool rel_error_decreasing = false;
};

// Greedy nearest-neighbour pairing of found zeros against branch predictions,
// plus monotonicity summaries of the per-index errors over the matched tail.
inline BranchMatchReport match_branches(const std::vector<ZeroRecord>& found,
                                        const BranchPrediction& pred) {
    if (found.empty() || pred.points.empty())
        throw precondition_error("match_branches: empty input");
    BranchMatchReport rep;
    std::vector<bool> taken(found.size(), false);
    for (size_t k = 0; k < pred.points.size(); ++k) {
        BranchMatch m;
        m.index = pred.indices[k];
        m.predicted = pred.points[k];
        double best = 1e300;
        int bi = -1;
        for (size_t i = 0; i < found.size(); ++i) {
            if (taken[i]) continue;
            double d = std::abs(found[i].location - m.predicted);
            if (d < best) { best = d; bi = int(i); }
        }
        if (bi >= 0) {
            m.matched = true;
            m.found = found[bi].location;
            m.abs_error = best;
            m.rel_error = best / std::abs(m.predicted);
            taken[bi] = true;
        } else {
            ++rep.unmatched_predictions;
        }
        rep.matches.push_back(m);
    }
    std::sort(rep.matches.begin(), rep.matches.end(),
              [](const BranchMatch& a, const BranchMatch& b) {
                  return std::abs(a.index) < std::abs(b.index);
              });
    auto decreasing = [&](auto get) {
        double prev = 1e300;
        bool any = false;
        for (const auto& m : rep.matches) {
            if (!m.matched) continue;
            if (get(m) > prev * (1.0 + 1e-12)) return false;
            prev = get(m);
            any = true;
        }
        return any;
    };
    rep.abs_error_decreasing = decreasing([](const BranchMatch& m) { return m.abs_error; });
    rep.rel_error_decreasing = decreasing([](const BranchMatch& m) { return m.rel_error; });
    return rep;
}

} // namespace ptscat
