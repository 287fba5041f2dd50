#include "autoint/selftest.hpp"

#include "autoint/autodiff.hpp"
#include "autoint/dqc.hpp"
#include "autoint/mlp.hpp"
#include "autoint/oracles.hpp"
#include "autoint/training.hpp"
#include "autoint/transform.hpp"

#include <algorithm>
#include <cmath>

namespace autoint {

std::vector<SelfCheck> run_selftest() {
    std::vector<SelfCheck> out;
    const MlpModel mlp(MlpConfig{{2, 10, 10, 1}, 7, {}, {}});
    const double at[] = {0.7, 0.2};

    double e1 = 0.0;
    for (auto o : {std::vector<int>{1, 0}, std::vector<int>{0, 1}})
        e1 = std::max(e1, finite_difference_check(mlp, at, {o, false}, 1e-5));
    out.push_back({"mlp order-1 vs finite differences", e1, 1e-6});
    double e3 = 0.0;
    for (auto o : {std::vector<int>{3, 0}, std::vector<int>{2, 1}, std::vector<int>{1, 2}})
        e3 = std::max(e3, finite_difference_check(mlp, at, {o, false}, 2.5e-3));
    out.push_back({"mlp order-3 vs finite differences", e3, 1e-3});

    DqcConfig dc;
    dc.init_seed = 11;
    const DqcModel dqc(dc);
    const double xr = dc.rescale(0.5);
    out.push_back({"dqc vs dense statevector",
                   std::abs(dqc.dqc_forward(0.5) -
                            oracle::dqc_dense_expectation(dc.n_qubits, dc.ansatz_depth, dqc.params(), xr)),
                   1e-10});
    double ps = 0.0;
    for (std::size_t k = 0; k < dqc.num_params(); k += 5) ps = std::max(ps, dqc_parameter_shift_check(dqc, 0.3, k));
    out.push_back({"dqc adjoint vs parameter shift", ps, 1e-10});

    // G = (s^2 - 2 s + 2) e^s is the x^2-kernel antiderivative of f = e^s
    const Expr s = input(0);
    const ExprModel g((s * s - 2.0 * s + 2.0) * exp(s), 1);
    const double zero[] = {0.0};
    oracle::QuadratureRule gl;
    const double q = oracle::quadrature_transform([](double v) { return std::exp(v); },
                                                  [](double v) { return v * v; }, 0.0, 1.0, gl);
    out.push_back({"transform vs quadrature", std::abs(evaluate_transform(g, 0.0, 1.0, zero) - q), 1e-8});

    // f'' + f against e^s: 2 e^s either way
    const Kernel k2 = power_kernel(0, 2);
    const Expr res = d(d(unknown_f(), 0), 0) + unknown_f();
    SurrogateProblem prob;
    prob.terms.push_back({"r", Term::Role::Residual, substitute_residual(res, k2),
                          CollocationGrid::product({linspace(0.2, 1.5, 7)}), {}, 1.0});
    const Loss loss(prob);
    const Model* ms[] = {&g};
    double sub = 0.0;
    for (std::size_t i = 0; i < prob.terms[0].grid.size(); ++i) {
        const double v = prob.terms[0].grid.points[i][0];
        sub = std::max(sub, std::abs(loss.term_value(ms, 0, i) - 2.0 * std::exp(v)));
    }
    out.push_back({"substituted residual equivalence", sub, 1e-10});

    out.push_back({"gauss-legendre polynomial exactness",
                   std::abs(oracle::gauss_legendre([](double v) { return v * v; }, 0.0, 1.0, 2) - 1.0 / 3.0),
                   1e-14});
    const oracle::OuProcess ou{};
    oracle::QuadratureRule simpson;
    simpson.scheme = oracle::Scheme::AdaptiveSimpson;
    simpson.tolerance = 1e-12;
    out.push_back({"ou density normalisation",
                   std::abs(oracle::integrate([&](double v) { return oracle::ou_pdf(v, 0.1, ou); }, -5.0, 5.0,
                                              simpson) - 1.0),
                   1e-10});
    return out;
}

} // namespace autoint
