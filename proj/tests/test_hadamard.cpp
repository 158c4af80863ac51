#include <doctest.h>
#include <ptscat/hadamard.hpp>
#include <ptscat/resonances.hpp>
#include <ptscat/pt_exact.hpp>

using ptscat::complex;
using ptscat::HadamardTarget;
using ptscat::PTParams;
using ptscat::ZeroRecord;

namespace {
std::vector<ZeroRecord> closed_form_zeros(double lambda, int n_max) {
    return ptscat::resonances_closed_form(PTParams(lambda), n_max);
}
ptscat::EvalFn W_of(double lambda) {
    PTParams p(lambda);
    return [p](complex z) { return ptscat::W0(p, z); };
}
}

TEST_CASE("conjugate-symmetry guard on the zero list") {
    std::vector<ZeroRecord> zs(1);
    zs[0].location = {0.5, -1.0}; // mirror -0.5 - i missing
    CHECK_THROWS_AS(ptscat::detail::require_conj_symmetric(zs), ptscat::precondition_error);
    zs.resize(2);
    zs[1].location = {-0.5, -1.0};
    CHECK_NOTHROW(ptscat::detail::require_conj_symmetric(zs));
}

TEST_CASE("fit_W input validation") {
    auto zs = closed_form_zeros(1.0, 40);
    CHECK_THROWS_AS((void)ptscat::fit_W(zs, {5.0}), ptscat::precondition_error);
    CHECK_THROWS_AS((void)ptscat::fit_W(zs, {5.0, 6.0}), ptscat::degenerate_error);
    std::vector<ZeroRecord> few(zs.begin(), zs.begin() + 4);
    // a short but symmetric prefix (lambda=1 zeros come in +/- pairs per n)
    CHECK_THROWS_AS((void)ptscat::fit_W(few, {5.0, 40.0}), ptscat::precondition_error);
}

TEST_CASE("fit_W on the exact zero set produces a stable factorization") {
    auto m = ptscat::fit_W(closed_form_zeros(1.0, 200));
    CHECK(m.m_or_l == 0);
    CHECK(std::isfinite(m.fit_residual));
    // evaluation respects W(-conj z) = conj W(z)
    complex z{1.3, -0.7};
    CHECK(std::abs(m.eval(-std::conj(z)) - std::conj(m.eval(z))) /
              std::abs(m.eval(z)) < 1e-10);
}

TEST_CASE("truncation tail: doubling N shrinks the fit residual") {
    auto m200 = ptscat::fit_W(closed_form_zeros(1.0, 199));
    auto m400 = ptscat::fit_W(closed_form_zeros(1.0, 399));
    CHECK(m400.fit_residual < m200.fit_residual);
}

TEST_CASE("detect_l identifies a regular origin") {
    CHECK(ptscat::detect_l(W_of(1.0)) == 0);
    CHECK(ptscat::detect_l(W_of(0.2)) == 0);
}

TEST_CASE("fit_S with no zeros reproduces the constant background S0") {
    // For q = 0 the normalized reflection numerator is the constant S0; the
    // factorization must recover it from W(0) alone (origin-regular regime).
    PTParams pt(1.0);
    complex S0v = ptscat::S0(pt);
    auto m = ptscat::fit_S({}, HadamardTarget::S_plus,
                           ptscat::SupportHint::origin_inside, W_of(1.0), pt);
    CHECK(m.m_or_l == 0);
    CHECK(std::abs(m.a1_or_b1) < 1e-9);
    for (complex z : {complex{0.4, 0.1}, complex{-1.0, -0.6}, complex{0.0, 2.2}})
        CHECK(std::abs(m.eval(z) - S0v) / std::abs(S0v) < 1e-8);
}

TEST_CASE("fit_S one-sided regime agrees with the origin regime for q = 0") {
    PTParams pt(1.0);
    complex S0v = ptscat::S0(pt);
    auto m = ptscat::fit_S({}, HadamardTarget::S_plus, ptscat::SupportHint::R_minus,
                           W_of(1.0), pt);
    CHECK(std::abs(m.eval(complex{0.3, 0.2}) - S0v) / std::abs(S0v) < 1e-6);
    CHECK(m.fit_residual < 1e-6);
}

TEST_CASE("fit_S rejects a W target") {
    PTParams pt(1.0);
    CHECK_THROWS_AS((void)ptscat::fit_S({}, HadamardTarget::W,
                                        ptscat::SupportHint::origin_inside,
                                        W_of(1.0), pt),
                    ptscat::precondition_error);
}
