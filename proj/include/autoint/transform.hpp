#pragma once

// Surrogate construction for integral transforms.
//
// Given a kernel k(s, s') and unknown f(s, v), the surrogate G satisfies
//   d G / d s = k f          (mixed d^m / ds_1..ds_m for m integration variables)
// so that
//   f                     -> (1/k) dG/ds
//   int_a^b k f ds        -> G(b) - G(a)
// and transforms are read out with two evaluations of G (2^m corners for m
// integration variables).

#include "autoint/expr.hpp"
#include "autoint/model.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace autoint {

struct Kernel {
    std::string name;
    Expr k;                ///< over the model inputs
    std::vector<int> vars; ///< integration variables s
    /// Optional support [s_a, s_b] along vars[0]; k is zero outside.
    std::optional<std::pair<Expr, Expr>> support;
    std::string zero_set; ///< description of where k vanishes

    /// k at `point`, zero outside the support.
    double value(std::span<const double> point) const;
    bool vanishes_at(std::span<const double> point, double tol = 1e-12) const;
};

Kernel identity_kernel(int var = 0);
/// k = s^p along `var`.
Kernel power_kernel(int var, int p);

/// Plain value of an expression without surrogates at a point.
double eval_expr(const Expr& e, std::span<const double> point);

/// Rewrite a residual over f into one over G: f -> (1/k) d G, integrals of k f
/// with the matching kernel -> differences of G. Throws UnsupportedError when an
/// integral uses a different kernel.
Expr substitute_residual(const Expr& residual_in_f, const Kernel& kernel, int model = 0);

/// k * residual: clears the 1/k factor introduced by substitution at the
/// top level.
Expr product_form(const Expr& residual_in_g, const Kernel& kernel);

/// (1/k) d^m G / ds_1..ds_m at `point`. Throws SingularKernelError where k = 0.
double recover_f(const Model& g, const Kernel& kernel, std::span<const double> point);

/// G(upper) - G(lower) along input `var`, other coordinates from `point`.
/// Exactly two model evaluations.
double evaluate_transform(const Model& g, double lower, double upper,
                          std::span<const double> point, int var = 0);

/// Inclusion-exclusion over the 2^m corners of the box [lower, upper] in the
/// variables `vars`; exactly 2^m model evaluations.
double evaluate_transform_corners(const Model& g, std::span<const double> lower,
                                  std::span<const double> upper, std::span<const int> vars,
                                  std::span<const double> point);

/// A frozen model given by an expression over its inputs (no parameters).
class ExprModel final : public Model {
public:
    ExprModel(Expr e, int arity);

    std::string kind() const override { return "expr"; }
    int arity() const override { return arity_; }
    std::span<const double> params() const override { return {}; }
    void set_params(std::span<const double> theta) override;
    Tower forward(std::span<const double> x, const TowerSpace& space, SeedMask seeded,
                  Workspace* ws) const override;
    void backward(const Workspace&, const Tower&, std::span<double>) const override {}
    std::unique_ptr<Model> clone() const override { return std::make_unique<ExprModel>(*this); }
    nlohmann::json to_json() const override;

private:
    Expr e_;
    int arity_;
};

} // namespace autoint
