#include "autoint/autodiff.hpp"
#include "autoint/errors.hpp"
#include "autoint/mlp.hpp"
#include "autoint/oracles.hpp"
#include "autoint/problems.hpp"
#include "autoint/training.hpp"
#include "autoint/transform.hpp"

#include <doctest.h>

#include <cmath>

using namespace autoint;

namespace {

double residual_at(const Expr& e, const Model& g, std::vector<double> pt) {
    SurrogateProblem p;
    p.arity = static_cast<int>(pt.size());
    p.terms.push_back({"r", Term::Role::Residual, e, CollocationGrid::explicit_points({pt}), {}, 1.0});
    const Loss loss(p);
    const Model* ms[] = {&g};
    return loss.term_value(ms, 0, 0);
}

} // namespace

TEST_SUITE("transform") {

TEST_CASE("two evaluations give the integral") {
    // G = sin s is the plain antiderivative of cos s
    const ExprModel g(sin(input(0)), 1);
    const CountingModel c(g);
    const double at[] = {0.0};
    CHECK(evaluate_transform(c, 0.2, 1.3, at) == doctest::Approx(std::sin(1.3) - std::sin(0.2)));
    CHECK(c.count() == 2);
}

TEST_CASE("corner readout uses four evaluations in two variables") {
    // G = x y t: d^2G/dxdy = t, integral over the box = t * area
    const Expr e = input(0) * input(1) * input(2);
    const ExprModel g(e, 3);
    const CountingModel c(g);
    const double lo[] = {-1.0, 0.0}, hi[] = {2.0, 0.5};
    const int vars[] = {0, 1};
    const double at[] = {0.0, 0.0, 0.7};
    CHECK(evaluate_transform_corners(c, lo, hi, vars, at) == doctest::Approx(0.7 * 3.0 * 0.5));
    CHECK(c.count() == 4);
}

TEST_CASE("round trip against quadrature on smooth functions") {
    oracle::QuadratureRule gl;
    const double at[] = {0.0};
    {
        // x^2 kernel, f = e^s
        const Expr s = input(0);
        const ExprModel g((s * s - 2.0 * s + 2.0) * exp(s), 1);
        const double q = oracle::quadrature_transform([](double v) { return std::exp(v); },
                                                      [](double v) { return v * v; }, -1.0, 1.5, gl);
        CHECK(std::abs(evaluate_transform(g, -1.0, 1.5, at) - q) < 1e-8);
    }
    {
        // identity kernel, f = 1 / (1 + s^2) -> atan is not in the language; use
        // f = s e^{-s^2}, G = -e^{-s^2} / 2
        const Expr s = input(0);
        const ExprModel g(-0.5 * exp(-1.0 * s * s), 1);
        const double q = oracle::integrate([](double v) { return v * std::exp(-v * v); }, -0.3, 2.0, gl);
        CHECK(std::abs(evaluate_transform(g, -0.3, 2.0, at) - q) < 1e-8);
    }
}

TEST_CASE("recover_f divides by the kernel and refuses its zero set") {
    const Expr s = input(0);
    const ExprModel g((s * s - 2.0 * s + 2.0) * exp(s), 1);
    const Kernel k = power_kernel(0, 2);
    const double p[] = {0.8};
    CHECK(recover_f(g, k, p) == doctest::Approx(std::exp(0.8)).epsilon(1e-12));
    const double z[] = {0.0};
    CHECK_THROWS_AS(recover_f(g, k, z), SingularKernelError);
}

TEST_CASE("substituted residual equals the residual in f") {
    // x^2 kernel; f = e^s; residual f' - f vanishes, f'' + 3 f = 4 e^s
    const Expr s = input(0), f = unknown_f();
    const ExprModel g((s * s - 2.0 * s + 2.0) * exp(s), 1);
    const Kernel k = power_kernel(0, 2);
    for (double v : {0.3, 0.9, 1.7}) {
        CHECK(std::abs(residual_at(substitute_residual(d(f, 0) - f, k), g, {v})) < 1e-10);
        CHECK(std::abs(residual_at(substitute_residual(d(d(f, 0), 0) + 3.0 * f, k), g, {v}) -
                       4.0 * std::exp(v)) < 1e-10);
        const Expr prod = product_form(substitute_residual(d(d(f, 0), 0) + 3.0 * f, k), k);
        CHECK(std::abs(residual_at(prod, g, {v}) - 4.0 * v * v * std::exp(v)) < 1e-10);
    }
}

TEST_CASE("integral of k f becomes a difference of G") {
    // identity kernel over t with limits 0 .. t: int_0^t f = G(t) - G(0)
    const Expr t = input(0);
    const ExprModel g(exp(t), 1); // f = e^t
    const Expr mem = integral("identity", {0}, {Limit::at(0.0)}, {Limit::current()});
    const Expr r = substitute_residual(mem - unknown_f(), identity_kernel(0));
    // (e^t - 1) - e^t = -1
    CHECK(residual_at(r, g, {0.6}) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK_THROWS_AS(substitute_residual(mem, power_kernel(0, 1)), UnsupportedError);
}

TEST_CASE("vessel balance under either sign convention") {
    // printed convention 1/2 rho r^2 w^2 + rho g h: h' = -w^2 r / g; implemented one: h' = +w^2 r / g
    problems::VesselParams p;
    p.omega = 3.0;
    const double w2 = 9.0, g = p.vessel.g;
    const Expr r = input(0);
    const Expr printed = d(0.5 * w2 * r * r + g * unknown_f(), 0);
    const Kernel k2 = power_kernel(0, 2);
    // G with dG/dr = r^2 h for h = c - w^2 r^2 / (2 g): G = c r^3/3 - w^2 r^5 / (10 g)
    const ExprModel gm(0.5 * r * r * r / 3.0 - w2 * r * r * r * r * r / (10.0 * g), 1);
    CHECK(std::abs(residual_at(product_form(substitute_residual(printed, k2), k2), gm, {0.4})) < 1e-12);
    const ExprModel gp(0.5 * r * r * r / 3.0 + w2 * r * r * r * r * r / (10.0 * g), 1);
    CHECK(std::abs(residual_at(product_form(substitute_residual(problems::vessel_residual_in_h(p), k2),
                                            k2), gp, {0.4})) < 1e-12);
}

TEST_CASE("derivative depth above the ceiling is rejected") {
    const Expr f = unknown_f();
    const Expr deep = d(d(d(f, 0), 0), 0); // G'''' after substitution
    const Expr r = substitute_residual(deep, identity_kernel(0));
    SurrogateProblem p;
    p.terms.push_back({"r", Term::Role::Residual, r, CollocationGrid::product({{0.5}}), {}, 1.0});
    CHECK_THROWS_AS((void)Loss(p), ConfigError);
}

} // TEST_SUITE
