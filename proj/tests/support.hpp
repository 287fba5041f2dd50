#pragma once

// Helpers shared by the unit tests.

#include "autoint/expr.hpp"
#include "autoint/model.hpp"
#include "autoint/oracles.hpp"
#include "autoint/tower.hpp"

#include <stdexcept>

namespace autoint::testing {

/// G(s, v) = int_lower^s q(s', v) ds' along input `var`, built from a
/// Gauss-Legendre rule on the v-tower of the integrand plus the integrand's
/// own tower for the s-directions. Parameter-free.
class QuadratureAntiderivative final : public Model {
public:
    QuadratureAntiderivative(Expr integrand, int arity, int var, double lower, int panels = 200)
        : q_(std::move(integrand)), arity_(arity), var_(var), lower_(lower), panels_(panels) {}

    std::string kind() const override { return "quadrature"; }
    int arity() const override { return arity_; }
    std::span<const double> params() const override { return {}; }
    void set_params(std::span<const double>) override {}

    Tower forward(std::span<const double> x, const TowerSpace& space, SeedMask seeded,
                  Workspace*) const override {
        const SeedMask rest = seeded & ~(SeedMask{1} << var_);
        // pure (non-s) part: quadrature of the integrand's tower
        Tower out(space);
        const auto g = oracle::gauss_legendre_nodes(8);
        const double a = lower_, b = x[var_];
        std::vector<double> p(x.begin(), x.end());
        const double h = (b - a) / panels_;
        for (int k = 0; k < panels_; ++k) {
            const double c = a + (k + 0.5) * h;
            for (std::size_t i = 0; i < g.x.size(); ++i) {
                p[var_] = c + 0.5 * h * g.x[i];
                out.axpy(0.5 * h * g.w[i], evaluate_tower(q_, p, space, rest));
            }
        }
        if (seeded & (SeedMask{1} << var_)) {
            const Tower t = evaluate_tower(q_, x, space, seeded);
            for (int k = 0; k < space.size(); ++k) {
                MultiIndex m = space.monomial(k);
                if (m[var_] == 0) continue;
                const int a_s = m[var_];
                m[var_] -= 1;
                out[k] = t[space.index_of(m)] / a_s;
            }
        }
        return out;
    }
    void backward(const Workspace&, const Tower&, std::span<double>) const override {}
    std::unique_ptr<Model> clone() const override {
        return std::make_unique<QuadratureAntiderivative>(*this);
    }
    nlohmann::json to_json() const override { throw std::logic_error("not serialisable"); }

private:
    Expr q_;
    int arity_, var_;
    double lower_;
    int panels_;
};

} // namespace autoint::testing
