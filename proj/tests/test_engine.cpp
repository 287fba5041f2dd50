#include "autoint/autodiff.hpp"
#include "autoint/dqc.hpp"
#include "autoint/errors.hpp"
#include "autoint/mlp.hpp"
#include "autoint/oracles.hpp"
#include "autoint/pinning.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace autoint;

namespace {

MlpModel seeded_mlp() { return MlpModel(MlpConfig{{2, 10, 10, 1}, 7, {}, {}}); }

// plain re-implementation of the documented layout
double reference_mlp(const std::vector<int>& w, const std::vector<double>& th, std::vector<double> x) {
    std::size_t p = 0;
    for (std::size_t l = 0; l + 1 < w.size(); ++l) {
        std::vector<double> y(w[l + 1], 0.0);
        for (int o = 0; o < w[l + 1]; ++o)
            for (int i = 0; i < w[l]; ++i) y[o] += th[p + o * w[l] + i] * x[i];
        p += static_cast<std::size_t>(w[l + 1] * w[l]);
        for (int o = 0; o < w[l + 1]; ++o) y[o] += th[p + o];
        p += w[l + 1];
        if (l + 2 < w.size())
            for (auto& v : y) v = std::tanh(v);
        x = y;
    }
    return x[0];
}

} // namespace

TEST_SUITE("engine") {

TEST_CASE("tower product and reciprocal") {
    const auto& sp = TowerSpace::get(2, 3);
    const Tower x = Tower::variable(sp, 0, 0.5), y = Tower::variable(sp, 1, -1.5);
    const Tower f = x * x * y / (1.0 + x);
    // x^2 y / (1 + x): d/dx at (0.5, -1.5) = y x (2 + x) / (1 + x)^2
    CHECK(f.partial({1, 0, 0}) == doctest::Approx(-1.5 * 0.5 * 2.5 / 2.25).epsilon(1e-14));
    CHECK(f.partial({0, 1, 0}) == doctest::Approx(0.25 / 1.5).epsilon(1e-14));
    CHECK(f.partial({2, 1, 0}) == doctest::Approx(2.0 / (1.5 * 1.5 * 1.5)).epsilon(1e-13));
}

TEST_CASE("tanh third derivative at zero") {
    MlpConfig c{{1, 1, 1}, 0, {}, {}};
    MlpModel m(c, {1.0, 0.0, 1.0, 0.0});
    const double x[] = {0.0};
    CHECK(eval_derivative(m, x, {{3}, false}).value == doctest::Approx(-2.0).epsilon(1e-14));
}

TEST_CASE("erf tower matches its closed derivatives") {
    const auto& sp = TowerSpace::get(1, 3);
    const Tower e = erf(Tower::variable(sp, 0, 0.3));
    const double g = 2.0 / std::sqrt(M_PI) * std::exp(-0.09);
    CHECK(e.value() == doctest::Approx(std::erf(0.3)).epsilon(1e-15));
    CHECK(e.partial({1, 0, 0}) == doctest::Approx(g).epsilon(1e-14));
    CHECK(e.partial({3, 0, 0}) == doctest::Approx((4 * 0.09 - 2) * g).epsilon(1e-13));
}

TEST_CASE("order ceiling and arity errors") {
    const MlpModel m = seeded_mlp();
    const double x[] = {0.7, 0.2};
    CHECK_THROWS_AS(eval_derivative(m, x, {{3, 1}, false}), ConfigError);
    const double x1[] = {0.7};
    CHECK_THROWS_AS(eval_derivative(m, x1, {{1}, false}), UsageError);
    CHECK_THROWS_AS(eval_derivative(m, x, {{1}, false}), UsageError);
}

TEST_CASE("mlp partials against finite differences") {
    const MlpModel m = seeded_mlp();
    const double x[] = {0.7, 0.2};
    CHECK(finite_difference_check(m, x, {{1, 0}, false}, 1e-5) < 1e-6);
    CHECK(finite_difference_check(m, x, {{0, 1}, false}, 1e-5) < 1e-6);
    CHECK(finite_difference_check(m, x, {{2, 1}, false}, 1e-3) < 1e-4);
    CHECK(finite_difference_check(m, x, {{3, 0}, false}, 2.5e-3) < 1e-3);

    const MlpModel m1(MlpConfig{{1, 8, 8, 1}, 3, {}, {}});
    const double x1[] = {0.4};
    CHECK(finite_difference_check(m1, x1, {{3}, false}, 1e-2) < 1e-3);
}

TEST_CASE("parameter gradient of a mixed partial") {
    MlpModel m = seeded_mlp();
    const double x[] = {0.3, -0.4};
    const DerivativeRequest req{{1, 1}, true};
    const auto r = eval_derivative(m, x, req);
    std::vector<double> th(m.params().begin(), m.params().end());
    const double h = 1e-6;
    for (std::size_t k : {0ul, 17ul, 55ul, th.size() - 1}) {
        auto p = th;
        p[k] += h;
        m.set_params(p);
        const double up = eval_derivative(m, x, {{1, 1}, false}).value;
        p[k] -= 2 * h;
        m.set_params(p);
        const double dn = eval_derivative(m, x, {{1, 1}, false}).value;
        m.set_params(th);
        CHECK(r.param_grad[k] == doctest::Approx((up - dn) / (2 * h)).epsilon(1e-6));
    }
}

TEST_CASE("mlp layout and trivial cases") {
    const MlpModel m = seeded_mlp();
    const std::vector<double> th(m.params().begin(), m.params().end());
    const double z[] = {0.0, 0.0};
    CHECK(m.value(z) == doctest::Approx(reference_mlp({2, 10, 10, 1}, th, {0.0, 0.0})).epsilon(1e-15));
    const double q[] = {0.9, -2.0};
    CHECK(m.value(q) == doctest::Approx(reference_mlp({2, 10, 10, 1}, th, {0.9, -2.0})).epsilon(1e-15));

    MlpModel zero(MlpConfig{{2, 10, 10, 1}, 7, {}, {}}, std::vector<double>(th.size(), 0.0));
    CHECK(zero.value(q) == 0.0);
    MlpModel ident(MlpConfig{{1, 1}, 0, {}, {}}, {1.0, 0.0});
    const double x[] = {1.75};
    CHECK(ident.value(x) == 1.75);
}

TEST_CASE("serialisation reproduces outputs bit-exactly") {
    const MlpModel m = seeded_mlp();
    const auto back = model_from_json(nlohmann::json::parse(m.to_json().dump()));
    const double x[] = {0.123, -0.456};
    CHECK(back->value(x) == m.value(x));
    const DqcModel d(DqcConfig{});
    const auto dback = model_from_json(nlohmann::json::parse(d.to_json().dump()));
    const double y[] = {0.31};
    CHECK(dback->value(y) == d.value(y));
    nlohmann::json bad = m.to_json();
    bad["kind"] = "spline";
    CHECK_THROWS_AS(model_from_json(bad), ConfigError);
}

TEST_CASE("dqc matches the dense oracle and parameter shift") {
    DqcConfig c;
    c.init_seed = 5;
    const DqcModel m(c);
    for (double x : {-0.8, 0.0, 0.5, 0.9}) {
        const double dense = oracle::dqc_dense_expectation(4, 4, m.params(), c.rescale(x));
        CHECK(std::abs(m.dqc_forward(x) - dense) < 1e-10);
        CHECK(std::abs(m.dqc_forward(x)) <= 4.0);
    }
    for (std::size_t k = 0; k < m.num_params(); ++k) CHECK(dqc_parameter_shift_check(m, 0.2, k) < 1e-10);
}

TEST_CASE("dqc input derivatives against finite differences") {
    DqcConfig c;
    c.init_seed = 9;
    const DqcModel m(c);
    const double x[] = {0.35};
    CHECK(finite_difference_check(m, x, {{1}, false}, 1e-5) < 1e-7);
    // richardson on the second difference, the feature map has large higher derivatives
    const double fd2 = (4.0 * finite_difference_partial(m, x, {2}, 1e-3) - finite_difference_partial(m, x, {2}, 2e-3)) / 3.0;
    CHECK(std::abs(eval_derivative(m, x, {{2}, false}).value - fd2) < 1e-6);
    const double outside[] = {1.5};
    CHECK_THROWS_AS(m.dqc_forward(outside[0] * 2.0), DomainError);
}

TEST_CASE("pinning holds for any parameters") {
    const MlpModel inner(MlpConfig{{1, 6, 1}, 2, {}, {}});
    const auto pinned = pin_boundary(inner, make_pin_conditions(0.0, {0.0, 1.0, -0.25}), 1.0);
    const double t0[] = {0.0};
    CHECK(std::abs(pinned->value(t0)) <= 1e-12);
    CHECK(std::abs(eval_derivative(*pinned, t0, {{1}, false}).value - 1.0) <= 1e-12);
    CHECK(std::abs(eval_derivative(*pinned, t0, {{2}, false}).value + 0.25) <= 1e-12);

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-3, 3);
    std::vector<double> th(pinned->num_params());
    for (auto& v : th) v = u(rng);
    pinned->set_params(th);
    CHECK(std::abs(eval_derivative(*pinned, t0, {{1}, false}).value - 1.0) <= 1e-12);
    CHECK_THROWS_AS(make_pin_conditions(0.0, {0.0, 1.0, 2.0, 3.0}), UnsupportedError);

    const auto none = pin_boundary(inner, PinConditions{}, 1.0);
    CHECK(none->kind() == "mlp");
}

} // TEST_SUITE
