#include <doctest.h>
#include <ptscat/kernel.hpp>

using ptscat::complex;
using ptscat::PerturbationSpec;
using ptscat::Side;

namespace {
PerturbationSpec box() { return PerturbationSpec({-1.0, 1.0}, {{1.0}}); }
PerturbationSpec tent() {
    // q(x) = 1 - |x| on [-1, 1]: vanishes at both edges with nonzero slope.
    return PerturbationSpec({-1.0, 0.0, 1.0}, {{1.0, 1.0}, {1.0, -1.0}});
}
}

TEST_CASE("piecewise polynomial perturbation basics") {
    auto q = tent();
    CHECK(q(0.0) == doctest::Approx(1.0));
    CHECK(q(0.5) == doctest::Approx(0.5));
    CHECK(q(-0.25) == doctest::Approx(0.75));
    CHECK(q(1.5) == 0.0);
    CHECK(q.integral(-1.0, 1.0) == doctest::Approx(1.0));
    CHECK(q.integral(-5.0, 0.5) == doctest::Approx(0.875));
    // Edge vanishing orders: q = 0, q' != 0 at both edges.
    CHECK(q.p == 2);
    CHECK(q.r == 2);
    CHECK(box().p == 1);
    CHECK(box().r == 1);
    CHECK_THROWS_AS(PerturbationSpec({1.0, -1.0}, {{1.0}}), ptscat::config_error);
    CHECK_THROWS_AS(PerturbationSpec({0.0, 1.0}, {}), ptscat::config_error);
}

TEST_CASE("empty perturbation gives empty kernel") {
    auto K = ptscat::solve_kernel(PerturbationSpec{}, 1.0, Side::plus, 64, 1e-10);
    CHECK(K.empty_support());
    CHECK(K.value_xt(0.3, 0.5) == 0.0);
}

TEST_CASE("kernel diagonal carries the exact half-integral of q") {
    auto q = box();
    auto K = ptscat::solve_kernel(q, 1.0, Side::plus, 128, 1e-10);
    for (double x : {-1.0, -0.5, 0.0, 0.25, 0.75}) {
        double want = 0.5 * q.integral(x, 1.0);
        CHECK(std::abs(K.value_xt(x, x) - want) < 1e-8);
    }
    auto Km = ptscat::solve_kernel(q, 1.0, Side::minus, 128, 1e-10);
    for (double x : {-0.75, 0.0, 0.5, 1.0}) {
        double want = 0.5 * q.integral(-1.0, x);
        CHECK(std::abs(Km.value_xt(x, x) - want) < 1e-8);
    }
}

TEST_CASE("kernel vanishes outside its support triangle") {
    auto K = ptscat::solve_kernel(box(), 1.0, Side::plus, 64, 1e-10);
    CHECK(K.value_xt(0.0, 2.5) == 0.0);  // beyond the outer characteristic
    CHECK(K.value_xt(0.5, 0.2) == 0.0);  // t < x
    CHECK(K.dx_xt(0.0, 2.5) == 0.0);
}

TEST_CASE("even perturbation: minus kernel is the mirrored plus kernel") {
    auto q = box();
    auto Kp = ptscat::solve_kernel(q, 1.0, Side::plus, 128, 1e-10);
    auto Km = ptscat::solve_kernel(q, 1.0, Side::minus, 128, 1e-10);
    for (auto [x, t] : {std::pair{0.2, 0.9}, {-0.3, 0.4}, {0.0, 1.5}})
        CHECK(std::abs(Kp.value_xt(x, t) - Km.value_xt(-x, -t)) < 1e-8);
}

TEST_CASE("kernel solve converges under grid refinement") {
    auto q = box();
    auto K1 = ptscat::solve_kernel(q, 1.0, Side::plus, 64, 1e-10);
    auto K2 = ptscat::solve_kernel(q, 1.0, Side::plus, 128, 1e-10);
    CHECK(K1.iterations > 0);
    CHECK(K1.residual < 1e-10);
    CHECK(std::abs(K1.value_xt(0.1, 0.8) - K2.value_xt(0.1, 0.8)) < 1e-5);
}

TEST_CASE("outer-characteristic jump: first order (step edge)") {
    auto q = box();
    auto Kp = ptscat::solve_kernel(q, 1.0, Side::plus, 256, 1e-10);
    auto Km = ptscat::solve_kernel(q, 1.0, Side::minus, 256, 1e-10);
    CHECK(ptscat::boundary_jump_closed(Kp, q) == doctest::Approx(-0.25));
    CHECK(ptscat::boundary_jump_closed(Km, q) == doctest::Approx(0.25));
    CHECK(ptscat::boundary_jump_mismatch(Kp, q) < 0.10);
    CHECK(ptscat::boundary_jump_mismatch(Km, q) < 0.10);
    CHECK(ptscat::boundary_jump(Kp, q) == doctest::Approx(-0.25));
}

TEST_CASE("outer-characteristic jump: second order (tent edge)") {
    auto q = tent();
    auto Kp = ptscat::solve_kernel(q, 1.0, Side::plus, 256, 1e-10);
    auto Km = ptscat::solve_kernel(q, 1.0, Side::minus, 256, 1e-10);
    // d/dx q at beta- is -1, at alpha+ is +1:
    //   plus side  -q'(beta-)/2^3 = +1/8; minus side +q'(alpha+)/2^3 = +1/8.
    CHECK(ptscat::boundary_jump_closed(Kp, q) == doctest::Approx(0.125));
    CHECK(ptscat::boundary_jump_closed(Km, q) == doctest::Approx(0.125));
    CHECK(ptscat::boundary_jump_mismatch(Kp, q) < 0.10);
    CHECK(ptscat::boundary_jump_mismatch(Km, q) < 0.10);
}

TEST_CASE("a-priori sup bound dominates the computed kernel") {
    auto q = box();
    double bound = ptscat::kernel_apriori_bound(q, 1.0);
    auto K = ptscat::solve_kernel(q, 1.0, Side::plus, 128, 1e-10);
    double sup = 0.0;
    for (double v : K.values) sup = std::max(sup, std::abs(v));
    CHECK(sup <= bound);
    CHECK(bound < 1e6); // and the bound itself is finite/sane
}
