#include "autoint/autodiff.hpp"

#include "autoint/errors.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace autoint {

int DerivativeRequest::total_order() const {
    return std::accumulate(orders.begin(), orders.end(), 0);
}

double Model::value(std::span<const double> x) const {
    return forward(x, TowerSpace::get(arity(), 0), 0u, nullptr).value();
}

void CountingModel::set_params(std::span<const double>) {
    throw UsageError("CountingModel is a read-only view");
}

std::unique_ptr<Model> CountingModel::clone() const { return inner_->clone(); }

namespace {

void validate(const Model& model, std::span<const double> inputs, const DerivativeRequest& req) {
    if (static_cast<int>(inputs.size()) != model.arity())
        throw UsageError("eval_derivative: model takes " + std::to_string(model.arity()) +
                         " inputs, got " + std::to_string(inputs.size()));
    if (static_cast<int>(req.orders.size()) != model.arity())
        throw UsageError("eval_derivative: request has " + std::to_string(req.orders.size()) +
                         " orders for a model of arity " + std::to_string(model.arity()));
    for (int o : req.orders)
        if (o < 0) throw UsageError("eval_derivative: negative derivative order");
    if (req.total_order() > kOrderCeiling)
        throw ConfigError("eval_derivative: total order " + std::to_string(req.total_order()) +
                          " exceeds ceiling " + std::to_string(kOrderCeiling));
}

} // namespace

DerivativeResult eval_derivative(const Model& model, std::span<const double> inputs,
                                 const DerivativeRequest& req) {
    validate(model, inputs, req);
    const TowerSpace& space = TowerSpace::get(model.arity(), req.total_order());
    SeedMask mask = 0;
    MultiIndex m{};
    for (std::size_t i = 0; i < req.orders.size(); ++i) {
        m[i] = req.orders[i];
        if (req.orders[i] > 0) mask |= 1u << i;
    }
    DerivativeResult out;
    if (!req.with_param_grad) {
        out.value = model.forward(inputs, space, mask, nullptr).partial(m);
        return out;
    }
    Workspace ws;
    const Tower t = model.forward(inputs, space, mask, &ws);
    out.value = t.partial(m);
    Tower adj(space);
    const int k = space.index_of(m);
    adj[k] = space.factorial_weight(k);
    out.param_grad.assign(model.num_params(), 0.0);
    model.backward(ws, adj, out.param_grad);
    return out;
}

namespace {

// Central stencil for the m-th derivative: offsets (in units of h) and weights,
// scaled by 1 / h^m.
struct Stencil {
    std::vector<int> offsets;
    std::vector<double> weights;
};

Stencil central_stencil(int m) {
    switch (m) {
    case 0: return {{0}, {1.0}};
    case 1: return {{-1, 1}, {-0.5, 0.5}};
    case 2: return {{-1, 0, 1}, {1.0, -2.0, 1.0}};
    case 3: return {{-2, -1, 1, 2}, {-0.5, 1.0, -1.0, 0.5}};
    default: throw ConfigError("finite difference: order above 3");
    }
}

} // namespace

double finite_difference_partial(const Model& model, std::span<const double> inputs,
                                 const std::vector<int>& orders, double step) {
    const std::size_t n = inputs.size();
    std::vector<Stencil> st;
    double scale = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        st.push_back(central_stencil(orders[i]));
        scale *= std::pow(step, orders[i]);
    }
    std::vector<std::size_t> idx(n, 0);
    std::vector<double> x(inputs.begin(), inputs.end());
    double acc = 0.0;
    while (true) {
        double w = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = inputs[i] + st[i].offsets[idx[i]] * step;
            w *= st[i].weights[idx[i]];
        }
        acc += w * model.value(x);
        std::size_t i = 0;
        for (; i < n; ++i) {
            if (++idx[i] < st[i].offsets.size()) break;
            idx[i] = 0;
        }
        if (i == n) break;
    }
    return acc / scale;
}

double finite_difference_check(const Model& model, std::span<const double> inputs,
                               const DerivativeRequest& req, double step) {
    if (!(step > 0.0)) throw UsageError("finite_difference_check: step must be positive");
    DerivativeRequest plain = req;
    plain.with_param_grad = false;
    const double analytic = eval_derivative(model, inputs, plain).value;
    const double fd = finite_difference_partial(model, inputs, req.orders, step);
    return std::abs(analytic - fd) / std::max(std::abs(analytic), 1e-12);
}

nlohmann::json tower_to_json(const Tower& t) {
    const TowerSpace& sp = t.space();
    nlohmann::json j;
    j["nvars"] = sp.nvars();
    j["order"] = sp.order();
    j["valid_order"] = t.valid_order();
    auto& terms = j["coefficients"] = nlohmann::json::array();
    for (int k = 0; k < sp.size(); ++k) {
        const auto& m = sp.monomial(k);
        terms.push_back({{"index", std::vector<int>(m.begin(), m.begin() + sp.nvars())},
                         {"value", t[k]}});
    }
    return j;
}

} // namespace autoint
