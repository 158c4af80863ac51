#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "ptscat/errors.hpp"
#include "ptscat/perturbation.hpp"
#include "ptscat/pt_exact.hpp"

namespace ptscat {

namespace detail {
inline double sech2(double x) {
    double c = std::cosh(x);
    return 1.0 / (c * c);
}
} // namespace detail

// Discretized transformation kernel K+ (side=plus) or K- (side=minus) in
// characteristic coordinates. For the plus side u=(t+x)/2, v=(t-x)/2; for the
// minus side u=(t+x)/2, v=(x-t)/2. In both cases the support triangle maps to
// the rectangle u in [alpha,beta], v in [0, beta-alpha], nodes u_i=alpha+i*h,
// v_j=j*h, h=(beta-alpha)/n. Row v=0 is the exact diagonal data; column
// u=beta (plus) / u=alpha (minus) is the outer characteristic where K
// vanishes identically.
struct KernelGrid {
    Side side = Side::plus;
    double lambda = 0.0;
    double alpha = 0.0, beta = 0.0;
    int n = 0;      // cells per axis (n+1 nodes)
    double h = 0.0; // grid step (both axes)
    std::vector<double> values; // (n+1)^2 row-major: values[i*(n+1)+j], i:u, j:v
    std::vector<double> du;     // d/du K at nodes
    std::vector<double> dv;     // d/dv K at nodes
    int iterations = 0;
    double residual = 0.0;

    bool empty_support() const { return n == 0; }
    double at(int i, int j) const { return values[std::size_t(i) * (n + 1) + j]; }

    // --- interpolation ----------------------------------------------------

    // Bicubic (separable 4-point Lagrange) interpolation of K at (u,v).
    double value_uv(double u, double v) const {
        return interp(values, u, v, /*cubic=*/true);
    }
    double du_uv(double u, double v) const { return interp(du, u, v, false); }
    double dv_uv(double u, double v) const { return interp(dv, u, v, false); }

    // --- (x,t) views -------------------------------------------------------

    bool inside_support(double x, double t) const {
        if (empty_support()) return false;
        if (side == Side::plus) return t >= x && t <= 2.0 * beta - x;
        return t <= x && t >= 2.0 * alpha - x;
    }

    void to_uv(double x, double t, double& u, double& v) const {
        u = 0.5 * (t + x);
        v = side == Side::plus ? 0.5 * (t - x) : 0.5 * (x - t);
    }

    double value_xt(double x, double t) const {
        if (!inside_support(x, t)) return 0.0;
        double u, v;
        to_uv(x, t, u, v);
        return value_uv(u, v);
    }

    // dK/dx at fixed t: plus side 1/2(du - dv); minus side 1/2(du + dv).
    double dx_xt(double x, double t) const {
        if (!inside_support(x, t)) return 0.0;
        double u, v;
        to_uv(x, t, u, v);
        double s = side == Side::plus ? -1.0 : 1.0;
        return 0.5 * (du_uv(u, v) + s * dv_uv(u, v));
    }

    // dK/dt at fixed x: plus side 1/2(du + dv); minus side 1/2(du - dv).
    double dt_xt(double x, double t) const {
        if (!inside_support(x, t)) return 0.0;
        double u, v;
        to_uv(x, t, u, v);
        double s = side == Side::plus ? 1.0 : -1.0;
        return 0.5 * (du_uv(u, v) + s * dv_uv(u, v));
    }

private:
    double interp(const std::vector<double>& f, double u, double v, bool cubic) const {
        double fu = (u - alpha) / h, fv = v / h;
        fu = std::clamp(fu, 0.0, double(n));
        fv = std::clamp(fv, 0.0, double(n));
        if (!cubic) {
            int i = std::min(int(fu), n - 1), j = std::min(int(fv), n - 1);
            double su = fu - i, sv = fv - j;
            auto g = [&](int ii, int jj) { return f[std::size_t(ii) * (n + 1) + jj]; };
            return (1 - su) * ((1 - sv) * g(i, j) + sv * g(i, j + 1)) +
                   su * ((1 - sv) * g(i + 1, j) + sv * g(i + 1, j + 1));
        }
        int i = std::clamp(int(fu) - 1, 0, n - 3);
        int j = std::clamp(int(fv) - 1, 0, n - 3);
        double wu[4], wv[4];
        cubic_weights(fu - i, wu);
        cubic_weights(fv - j, wv);
        double out = 0.0;
        for (int a = 0; a < 4; ++a) {
            double row = 0.0;
            const double* base = f.data() + std::size_t(i + a) * (n + 1) + j;
            for (int b = 0; b < 4; ++b) row += wv[b] * base[b];
            out += wu[a] * row;
        }
        return out;
    }

    // Lagrange weights on 4 consecutive nodes at local coordinate s in [0,3].
    static void cubic_weights(double s, double w[4]) {
        w[0] = -(s - 1) * (s - 2) * (s - 3) / 6.0;
        w[1] = s * (s - 2) * (s - 3) / 2.0;
        w[2] = -s * (s - 1) * (s - 3) / 2.0;
        w[3] = s * (s - 1) * (s - 2) / 6.0;
    }
};

// Picard iteration for the transformation-kernel fixed point
//   L(u,v) = Q(u) + Int Int G(tau,sigma) L(tau,sigma) dsigma dtau
// (outer integral from u to beta for the plus side, alpha to u for the minus
// side; inner from 0 to v), with
//   G+(tau,sigma) = lambda sech^2(tau-sigma) + q(tau-sigma) - lambda sech^2(tau+sigma)
//   G-(tau,sigma) = lambda sech^2(tau+sigma) + q(tau+sigma) - lambda sech^2(tau-sigma)
//   Q+(u) = 1/2 Int_u^beta q,  Q-(u) = 1/2 Int_alpha^u q (exact piecewise).
// Composite trapezoid on both axes; stop when the sup-norm change < tol.
inline KernelGrid solve_kernel(const PerturbationSpec& q, double lambda, Side side,
                               int grid_n = 256, double tol = 1e-10) {
    if (grid_n < 16) throw precondition_error("solve_kernel: grid_n >= 16 required");
    if (tol <= 0) throw precondition_error("solve_kernel: tol > 0 required");
    KernelGrid K;
    K.side = side;
    K.lambda = lambda;
    if (q.empty()) return K; // K == 0, zero iterations
    K.alpha = q.alpha();
    K.beta = q.beta();
    K.n = grid_n;
    K.h = (K.beta - K.alpha) / grid_n;
    const int N = grid_n + 1;
    const double h = K.h;

    // Node data.
    std::vector<double> Q(N);
    for (int i = 0; i < N; ++i) {
        double u = K.alpha + i * h;
        Q[i] = side == Side::plus ? 0.5 * q.integral(u, K.beta)
                                  : 0.5 * q.integral(K.alpha, u);
    }
    // G contains q(x_like) with x_like = u -+ v, which jumps across the grid
    // diagonals x_like = breakpoint. Store both one-sided limits so trapezoid
    // segments can use the limit from their own interior (a single wrong
    // one-sided node value on a jump line costs a full O(h)).
    std::vector<double> Gl(std::size_t(N) * N), Gr(std::size_t(N) * N);
    for (int i = 0; i < N; ++i) {
        double u = K.alpha + i * h;
        for (int j = 0; j < N; ++j) {
            double v = j * h;
            double x_like = side == Side::plus ? u - v : u + v;
            double other = side == Side::plus ? u + v : u - v;
            double smooth = lambda * detail::sech2(x_like) - lambda * detail::sech2(other);
            Gl[std::size_t(i) * N + j] = smooth + q.derivative(x_like, 0, /*from_left=*/true);
            Gr[std::size_t(i) * N + j] = smooth + q.derivative(x_like, 0, /*from_left=*/false);
        }
    }
    // Inner prefix trapezoid in v of G*L, one-sided at jump nodes. Along +v
    // the coordinate x_like increases on the minus side and decreases on the
    // plus side, fixing which limit each segment endpoint needs.
    auto inner_prefix = [&](const std::vector<double>& Lcur, std::vector<double>& Cout) {
        const std::vector<double>& Ga = side == Side::plus ? Gl : Gr; // lower node
        const std::vector<double>& Gb = side == Side::plus ? Gr : Gl; // upper node
        for (int i = 0; i < N; ++i) {
            const std::size_t row = std::size_t(i) * N;
            Cout[row] = 0.0;
            for (int j = 1; j < N; ++j)
                Cout[row + j] = Cout[row + j - 1] +
                                0.5 * h * (Ga[row + j - 1] * Lcur[row + j - 1] +
                                           Gb[row + j] * Lcur[row + j]);
        }
    };

    std::vector<double> L(std::size_t(N) * N), C(L.size()), D(L.size());
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) L[std::size_t(i) * N + j] = Q[i];

    std::vector<double> history;
    const int max_iter = 200;
    int iter = 0;
    double res = 0.0;
    for (iter = 1; iter <= max_iter; ++iter) {
        inner_prefix(L, C);
        // Outer integral in u of C (continuous in u, kinks only): suffix
        // (plus) or prefix (minus) trapezoid.
        if (side == Side::plus) {
            for (int j = 0; j < N; ++j) D[std::size_t(N - 1) * N + j] = 0.0;
            for (int i = N - 2; i >= 0; --i)
                for (int j = 0; j < N; ++j)
                    D[std::size_t(i) * N + j] =
                        D[std::size_t(i + 1) * N + j] +
                        0.5 * h * (C[std::size_t(i) * N + j] + C[std::size_t(i + 1) * N + j]);
        } else {
            for (int j = 0; j < N; ++j) D[j] = 0.0;
            for (int i = 1; i < N; ++i)
                for (int j = 0; j < N; ++j)
                    D[std::size_t(i) * N + j] =
                        D[std::size_t(i - 1) * N + j] +
                        0.5 * h * (C[std::size_t(i) * N + j] + C[std::size_t(i - 1) * N + j]);
        }
        res = 0.0;
        for (int i = 0; i < N; ++i) {
            for (int j = 0; j < N; ++j) {
                double nu = Q[i] + D[std::size_t(i) * N + j];
                res = std::max(res, std::abs(nu - L[std::size_t(i) * N + j]));
                L[std::size_t(i) * N + j] = nu;
            }
        }
        history.push_back(res);
        if (res < tol) break;
        if (history.size() >= 21 && res > 0.5 * history[history.size() - 21])
            throw convergence_error("solve_kernel: residual failed to halve over 20 iterations");
    }
    if (res >= tol)
        throw convergence_error("solve_kernel: no convergence within 200 iterations");

    K.values = std::move(L);
    K.iterations = iter;
    K.residual = res;

    // Partial derivatives from the closed integral formulas:
    //   dL/du = -(dQ-sign) q(u)/2 -/+ Int_0^v G(u,s) L(u,s) ds
    //   dL/dv = Int_outer G(tau,v) L(tau,v) dtau.
    K.du.resize(K.values.size());
    K.dv.resize(K.values.size());
    inner_prefix(K.values, C);
    const double qsign = side == Side::plus ? -1.0 : 1.0;
    for (int i = 0; i < N; ++i) {
        double u = K.alpha + i * h;
        // One-sided sampling of q at the support endpoints (both sides of the
        // grid need the interior limit there).
        double qu = q.derivative(u, 0, /*from_left=*/i == K.n);
        if (i == 0) qu = q.q_deriv_alpha_right(0);
        if (i == K.n) qu = q.q_deriv_beta_left(0);
        for (int j = 0; j < N; ++j)
            K.du[std::size_t(i) * N + j] =
                qsign * (0.5 * qu + C[std::size_t(i) * N + j]);
    }
    // dv = Int_outer G(tau, v) L(tau, v) dtau, with the same one-sided
    // handling along u (x_like increases with u on both sides).
    const std::vector<double>& L2 = K.values;
    for (int j = 0; j < N; ++j) {
        if (side == Side::plus) {
            double acc = 0.0;
            K.dv[std::size_t(N - 1) * N + j] = 0.0;
            for (int i = N - 2; i >= 0; --i) {
                const std::size_t a = std::size_t(i) * N + j, b = a + N;
                acc += 0.5 * h * (Gr[a] * L2[a] + Gl[b] * L2[b]);
                K.dv[a] = acc;
            }
        } else {
            double acc = 0.0;
            K.dv[j] = 0.0;
            for (int i = 1; i < N; ++i) {
                const std::size_t a = std::size_t(i - 1) * N + j, b = a + N;
                acc += 0.5 * h * (Gr[a] * L2[a] + Gl[b] * L2[b]);
                K.dv[b] = acc;
            }
        }
    }
    return K;
}

// dK/dx at (x,t), exact 0 outside the support triangle.
inline double kernel_x_derivative(const KernelGrid& K, double x, double t) {
    return K.dx_xt(x, t);
}

// One-sided x-derivative of K at the outer characteristic, of the lowest
// non-vanishing order (q.p on the plus side, q.r on the minus side).
//
// Near u = beta the plus kernel reduces to its inhomogeneous term
// Q(u) = 1/2 Int_u^beta q, whose leading Taylor coefficient gives
//   d^p/dx^p K+(x, (2 beta - x)^-) = -q^{(p-1)}(beta^-) / 2^{p+1},
// and by the mirrored computation
//   d^r/dx^r K-(x, (2 alpha - x)^+) = +q^{(r-1)}(alpha^+) / 2^{r+1}.
inline double boundary_jump_closed(const KernelGrid& K, const PerturbationSpec& q) {
    const bool plus = K.side == Side::plus;
    const int order = plus ? q.p : q.r;
    if (order < 1) throw degenerate_error("boundary_jump: zero endpoint jump");
    return plus ? -q.q_deriv_beta_left(order - 1) / std::pow(2.0, order + 1)
                : q.q_deriv_alpha_right(order - 1) / std::pow(2.0, order + 1);
}

// Relative deviation between the grid estimate of the leading one-sided
// x-derivative and its closed form. Sample K one node in from the outer
// characteristic: K and its lower-order x-derivatives vanish on the boundary,
// so a single interior value at distance |dx| = 2h determines the leading
// Taylor coefficient; on the plus side x decreases into the support, picking
// up a (-1)^order.
inline double boundary_jump_mismatch(const KernelGrid& K, const PerturbationSpec& q) {
    const bool plus = K.side == Side::plus;
    const int order = plus ? q.p : q.r;
    const double closed = boundary_jump_closed(K, q);
    if (order > 2 || K.empty_support()) return 0.0;
    int j0 = K.n / 2; // mid-range v, away from both corners
    double g1 = plus ? K.at(K.n - 1, j0) : K.at(1, j0);
    double dx = 2.0 * K.h;
    double fact = (order == 1) ? 1.0 : 2.0; // order!
    double sgn = (plus && order % 2 != 0) ? -1.0 : 1.0;
    double estimate = sgn * g1 * fact / std::pow(dx, order);
    return std::abs(estimate - closed) / std::abs(closed);
}

inline double boundary_jump(const KernelGrid& K, const PerturbationSpec& q) {
    const double closed = boundary_jump_closed(K, q);
    if (boundary_jump_mismatch(K, q) > 0.10)
        throw convergence_error(
            "boundary_jump: grid estimate disagrees with closed form by > 10% "
            "(kernel under-resolved)");
    return closed;
}

// A-priori sup bound: |K| <= 1/2 ||q||_1 exp(||V||_{1,1} + ||lambda sech^2||_{1,1})
// with ||f||_{1,1} = Int (1+|x|) |f(x)| dx (numeric for the sech^2 parts).
inline double kernel_apriori_bound(const PerturbationSpec& q, double lambda) {
    auto weighted_l1 = [&](bool with_q) {
        // Composite Simpson over [-40, 40]; sech^2 decays like 4e^{-2|x|}.
        const double a = -40.0, b = 40.0;
        const int n = 16000;
        const double hh = (b - a) / n;
        double s = 0.0;
        for (int i = 0; i <= n; ++i) {
            double x = a + i * hh;
            double f = lambda * detail::sech2(x) + (with_q ? q(x) : 0.0);
            double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            s += w * (1.0 + std::abs(x)) * std::abs(f);
        }
        return s * hh / 3.0;
    };
    return 0.5 * q.norm1() * std::exp(weighted_l1(true) + weighted_l1(false));
}

} // namespace ptscat
