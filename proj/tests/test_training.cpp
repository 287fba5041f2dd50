#include "autoint/density.hpp"
#include "autoint/dqc.hpp"
#include "autoint/errors.hpp"
#include "autoint/mlp.hpp"
#include "autoint/pinning.hpp"
#include "autoint/problems.hpp"
#include "autoint/training.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace autoint;

namespace {

// fit dG/dx = x on [0, 1] from data only
SurrogateProblem toy_problem() {
    SurrogateProblem p;
    Term t;
    t.name = "slope";
    t.role = Term::Role::Data;
    t.expr = d(surrogate(0), 0);
    t.grid = CollocationGrid::product({linspace(0.0, 1.0, 21)});
    for (const auto& q : t.grid.points) t.targets.push_back(q[0]);
    p.terms.push_back(t);
    return p;
}

} // namespace

TEST_SUITE("training") {

TEST_CASE("grids") {
    const auto g = CollocationGrid::product({{1.0, 2.0}, {5.0, 6.0, 7.0}});
    REQUIRE(g.size() == 6);
    CHECK(g.points[1] == std::vector<double>{1.0, 6.0});
    CHECK(g.points[3] == std::vector<double>{2.0, 5.0});
    CHECK(g.without([](std::span<const double> q) { return q[1] == 6.0; }).size() == 4);
    CHECK(linspace(0, 1, 5)[4] == 1.0);
}

TEST_CASE("zero model on pure data gives the weighted mean of squared targets") {
    SurrogateProblem p = toy_problem();
    p.terms[0].weight = 3.0;
    MlpModel zero(MlpConfig{{1, 4, 1}, 0, {}, {}}, std::vector<double>(13, 0.0));
    const Loss loss(p);
    const Model* ms[] = {&zero};
    double want = 0;
    for (double t : p.terms[0].targets) want += t * t;
    want = 3.0 * want / 21.0;
    CHECK(loss.evaluate(ms, nullptr) == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("parallel kernel agrees with the serial loop and ignores thread count") {
    problems::OuParams op;
    op.nx = 20;
    op.nt = 6;
    op.data_weight = 50.0;
    const auto p = problems::european_option_problem(op, 1, 99);
    const MlpModel m(MlpConfig{{2, 10, 10, 1}, 4, {}, {}});
    const Model* ms[] = {&m};
    const Loss loss(p, 8);
    std::vector<double> g1(m.num_params()), g4(m.num_params()), gs(m.num_params());
    const double l1 = loss.evaluate(ms, &g1, nullptr, 1);
    const double l4 = loss.evaluate(ms, &g4, nullptr, 4);
    const double ls = loss.evaluate_serial(ms, &gs);
    CHECK(l1 == l4);
    CHECK(g1 == g4);
    CHECK(l1 == doctest::Approx(ls).epsilon(1e-12));
    for (std::size_t k = 0; k < gs.size(); ++k) CHECK(g1[k] == doctest::Approx(gs[k]).epsilon(1e-10));
}

TEST_CASE("loss gradient against finite differences") {
    const auto p = toy_problem();
    MlpModel m(MlpConfig{{1, 5, 1}, 2, {}, {}});
    const Loss loss(p);
    const Model* ms[] = {&m};
    std::vector<double> g(m.num_params());
    loss.evaluate(ms, &g);
    std::vector<double> th(m.params().begin(), m.params().end());
    for (std::size_t k = 0; k < th.size(); k += 3) {
        auto q = th;
        q[k] += 1e-6;
        m.set_params(q);
        const double up = loss.evaluate(ms, nullptr);
        q[k] -= 2e-6;
        m.set_params(q);
        const double dn = loss.evaluate(ms, nullptr);
        m.set_params(th);
        CHECK(g[k] == doctest::Approx((up - dn) / 2e-6).epsilon(1e-6));
    }
}

TEST_CASE("toy fit reaches 1e-4 within 2000 epochs") {
    MlpModel m(MlpConfig{{1, 8, 1}, 3, {}, {}});
    OptimizerConfig c;
    c.epochs = 2000;
    c.learning_rate = 0.01;
    const auto r = train(toy_problem(), {&m}, c);
    CHECK(r.final_loss < 1e-4);
    CHECK(r.final_loss <= r.initial_loss);
    CHECK(r.loss_history.size() == 2000);
}

TEST_CASE("adabelief also converges") {
    MlpModel m(MlpConfig{{1, 8, 1}, 3, {}, {}});
    OptimizerConfig c;
    c.algorithm = Algorithm::AdaBelief;
    c.epochs = 2000;
    c.learning_rate = 0.01;
    CHECK(train(toy_problem(), {&m}, c).final_loss < 1e-4);
}

TEST_CASE("learning rate decay") {
    OptimizerConfig c;
    c.epochs = 101;
    CHECK(Optimizer(c, 1).rate(50) == c.learning_rate);
    c.learning_rate = 0.01;
    c.final_learning_rate = 0.0001;
    const Optimizer o(c, 1);
    CHECK(o.rate(1) == 0.01);
    CHECK(o.rate(51) == doctest::Approx(0.001).epsilon(1e-12));
    CHECK(o.rate(101) == doctest::Approx(0.0001).epsilon(1e-12));
    c.final_learning_rate = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("zero epochs is a no-op and reports the initial loss") {
    MlpModel m(MlpConfig{{1, 8, 1}, 3, {}, {}});
    const std::vector<double> before(m.params().begin(), m.params().end());
    OptimizerConfig c;
    c.epochs = 0;
    const auto r = train(toy_problem(), {&m}, c);
    CHECK(r.epochs_run == 0);
    CHECK(r.loss_history.empty());
    CHECK(r.final_loss == r.initial_loss);
    CHECK(std::vector<double>(m.params().begin(), m.params().end()) == before);
}

TEST_CASE("identical seeds give bit-identical histories") {
    OptimizerConfig c;
    c.epochs = 150;
    c.threads = 1;
    MlpModel a(MlpConfig{{1, 8, 1}, 3, {}, {}}), b(MlpConfig{{1, 8, 1}, 3, {}, {}});
    const auto ra = train(toy_problem(), {&a}, c);
    c.threads = 3;
    const auto rb = train(toy_problem(), {&b}, c);
    CHECK(ra.loss_history == rb.loss_history);
    CHECK(ra.final_params == rb.final_params);
}

TEST_CASE("target loss stops early; divergence throws with the epoch") {
    MlpModel m(MlpConfig{{1, 8, 1}, 3, {}, {}});
    OptimizerConfig c;
    c.epochs = 5000;
    c.target_loss = 1e-3;
    const auto r = train(toy_problem(), {&m}, c);
    CHECK(r.converged);
    CHECK(r.epochs_run < 5000);

    SurrogateProblem bad = toy_problem();
    bad.terms[0].targets[3] = std::nan("");
    MlpModel m2(MlpConfig{{1, 8, 1}, 3, {}, {}});
    try {
        train(bad, {&m2}, c);
        FAIL("expected TrainingError");
    } catch (const TrainingError& e) {
        CHECK(e.epoch() == 0);
    }
    OptimizerConfig neg;
    neg.learning_rate = -1;
    CHECK_THROWS_AS(neg.validate(), ConfigError);
}

TEST_CASE("report serialisation") {
    MlpModel m(MlpConfig{{1, 4, 1}, 3, {}, {}});
    OptimizerConfig c;
    c.epochs = 5;
    const auto r = train(toy_problem(), {&m}, c);
    const auto j = r.to_json();
    CHECK(j["epochs_run"] == 5);
    CHECK(j["term_names"][0] == "slope");
    CHECK(j["loss_history"].size() == 5);
}

TEST_CASE("population problem on the quantum circuit descends quickly") {
    DqcConfig dc;
    dc.init_seed = 7;
    dc.domain_lower = 0.0;
    dc.domain_upper = 1.0;
    const DqcModel inner(dc);
    auto g = pin_boundary(inner, problems::population_pins(), 1.0);
    OptimizerConfig c;
    c.algorithm = Algorithm::AdaBelief;
    c.epochs = 500;
    const auto r = train(problems::population_problem({}), {g.get()}, c);
    CHECK(r.final_loss < 0.05 * r.initial_loss);
}

TEST_CASE("density estimates") {
    const auto s = sample_normal(1.0, 0.5, 50, 11);
    const double mean = std::accumulate(s.begin(), s.end(), 0.0) / 50.0;
    CHECK(std::abs(mean - 1.0) < 3 * 0.5 / std::sqrt(50.0));
    CHECK(sample_normal(1.0, 0.5, 50, 11) == s);
    CHECK(silverman_bandwidth(s) > 0.0);

    const DensityEstimate kde({s}, DensityMethod::Kde);
    const DensityEstimate hist({s}, DensityMethod::Histogram, {-2.0}, {4.0}, 24);
    double mk = 0, mh = 0;
    const int n = 6000;
    for (int i = 0; i < n; ++i) {
        const double x[] = {-2.0 + 6.0 * (i + 0.5) / n};
        mk += kde(x) * 6.0 / n;
        mh += hist(x) * 6.0 / n;
    }
    CHECK(mk == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(mh == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(parse_density_method("spline"), ConfigError);
}

} // TEST_SUITE
