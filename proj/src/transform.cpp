#include "autoint/transform.hpp"

#include "autoint/autodiff.hpp"
#include "autoint/errors.hpp"

#include <cmath>

namespace autoint {

double eval_expr(const Expr& e, std::span<const double> point) {
    return evaluate_tower(e, point, TowerSpace::get(static_cast<int>(point.size()), 0), 0u).value();
}

double Kernel::value(std::span<const double> point) const {
    if (support) {
        const double s = point[vars.at(0)];
        if (s < eval_expr(support->first, point) || s > eval_expr(support->second, point))
            return 0.0;
    }
    return eval_expr(k, point);
}

bool Kernel::vanishes_at(std::span<const double> point, double tol) const {
    return std::abs(value(point)) <= tol;
}

Kernel identity_kernel(int var) {
    return {"identity", constant(1.0), {var}, std::nullopt, "none"};
}

Kernel power_kernel(int var, int p) {
    if (p < 0) throw UsageError("power kernel: negative exponent");
    Expr k = constant(1.0);
    for (int i = 0; i < p; ++i) k = (i == 0) ? input(var) : k * input(var);
    const std::string v = "x" + std::to_string(var);
    return {v + "^" + std::to_string(p), k, {var}, std::nullopt, p > 0 ? v + " = 0" : "none"};
}

namespace {

Expr d_integration(const Expr& g, const std::vector<int>& vars) {
    Expr out = g;
    for (int v : vars) out = d(out, v);
    return out;
}

Expr substitute(const Expr& e, const Kernel& kernel, int model) {
    const ExprNode& n = e.node();
    switch (n.kind) {
    case ExprKind::Unknown: return d_integration(surrogate(model), kernel.vars) / kernel.k;
    case ExprKind::Integral: {
        if (n.kernel_name != kernel.name)
            throw UnsupportedError("substitute_residual: integral with kernel '" + n.kernel_name +
                                   "' but the surrogate is built for '" + kernel.name + "'");
        if (n.int_vars != kernel.vars)
            throw UnsupportedError("substitute_residual: integration variables differ from the "
                                   "surrogate's");
        // sum over corners with sign (-1)^(number of lower limits)
        const std::size_t m = n.int_vars.size();
        Expr sum;
        for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
            FixedCoords fixed{};
            int lowers = 0;
            for (std::size_t i = 0; i < m; ++i) {
                const bool up = (mask >> i) & 1u;
                const Limit& l = up ? n.upper[i] : n.lower[i];
                if (!l.is_current) fixed[n.int_vars[i]] = l.value;
                if (!up) ++lowers;
            }
            Expr term = surrogate(model, fixed);
            if (!sum)
                sum = (lowers % 2) ? -term : term;
            else
                sum = (lowers % 2) ? sum - term : sum + term;
        }
        return sum;
    }
    default: break;
    }
    if (!n.lhs && !n.rhs) return e;
    ExprNode copy = n;
    if (n.lhs) copy.lhs = substitute(n.lhs, kernel, model);
    if (n.rhs) copy.rhs = substitute(n.rhs, kernel, model);
    return Expr(std::make_shared<const ExprNode>(std::move(copy)));
}

} // namespace

Expr substitute_residual(const Expr& residual_in_f, const Kernel& kernel, int model) {
    if (kernel.vars.empty()) throw UsageError("substitute_residual: kernel without variables");
    return substitute(residual_in_f, kernel, model);
}

Expr product_form(const Expr& residual_in_g, const Kernel& kernel) {
    return kernel.k * residual_in_g;
}

double recover_f(const Model& g, const Kernel& kernel, std::span<const double> point) {
    const double k = kernel.value(point);
    if (std::abs(k) <= 1e-300)
        throw SingularKernelError("recover_f: kernel " + kernel.name + " vanishes at query point");
    DerivativeRequest req;
    req.orders.assign(g.arity(), 0);
    for (int v : kernel.vars) req.orders.at(v) += 1;
    return eval_derivative(g, point, req).value / k;
}

double evaluate_transform(const Model& g, double lower, double upper,
                          std::span<const double> point, int var) {
    std::vector<double> x(point.begin(), point.end());
    if (var < 0 || var >= static_cast<int>(x.size())) throw UsageError("evaluate_transform: bad var");
    x[var] = upper;
    const double hi = g.value(x);
    x[var] = lower;
    const double lo = g.value(x);
    return hi - lo;
}

double evaluate_transform_corners(const Model& g, std::span<const double> lower,
                                  std::span<const double> upper, std::span<const int> vars,
                                  std::span<const double> point) {
    const std::size_t m = vars.size();
    if (lower.size() != m || upper.size() != m)
        throw UsageError("evaluate_transform_corners: one limit pair per variable");
    std::vector<double> x(point.begin(), point.end());
    double acc = 0.0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
        int lowers = 0;
        for (std::size_t i = 0; i < m; ++i) {
            const bool up = (mask >> i) & 1u;
            x[vars[i]] = up ? upper[i] : lower[i];
            if (!up) ++lowers;
        }
        const double v = g.value(x);
        acc += (lowers % 2) ? -v : v;
    }
    return acc;
}

ExprModel::ExprModel(Expr e, int arity) : e_(std::move(e)), arity_(arity) {
    if (e_.references_unknown()) throw UsageError("ExprModel: expression references f");
}

void ExprModel::set_params(std::span<const double> theta) {
    if (!theta.empty()) throw UsageError("ExprModel has no parameters");
}

Tower ExprModel::forward(std::span<const double> x, const TowerSpace& space, SeedMask seeded,
                         Workspace*) const {
    if (static_cast<int>(x.size()) != arity_) throw UsageError("ExprModel: arity mismatch");
    return evaluate_tower(e_, x, space, seeded);
}

nlohmann::json ExprModel::to_json() const {
    return {{"format_version", 1}, {"kind", "expr"}, {"expression", e_.str()}, {"arity", arity_}};
}

} // namespace autoint
