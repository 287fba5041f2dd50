#include "autoint/pinning.hpp"

#include "autoint/errors.hpp"

namespace autoint {

int PinConditions::highest_order() const {
    for (int k = 2; k >= 0; --k)
        if (values[k]) return k;
    return -1;
}

PinConditions make_pin_conditions(double t0, const std::vector<std::optional<double>>& values,
                                  int var) {
    PinConditions c;
    c.t0 = t0;
    c.var = var;
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (!values[k]) continue;
        if (k > 2) throw UnsupportedError("pinning: conditions above order 2 are not supported");
        c.values[k] = values[k];
    }
    return c;
}

PinnedModel::PinnedModel(std::unique_ptr<Model> inner, PinConditions conditions, double alpha)
    : inner_(std::move(inner)), cond_(conditions), alpha_(alpha) {
    if (!inner_) throw UsageError("pinning: null inner model");
    if (cond_.var < 0 || cond_.var >= inner_->arity()) throw UsageError("pinning: bad variable");
    if (!(alpha_ > 0.0)) throw ConfigError("pinning: steepness must be positive");
}

PinnedModel::PinnedModel(const PinnedModel& other)
    : Model(), inner_(other.inner_->clone()), cond_(other.cond_), alpha_(other.alpha_) {}

// ws.towers = {factor}; ws.children[0] = inner workspace
Tower PinnedModel::forward(std::span<const double> x, const TowerSpace& space, SeedMask seeded,
                           Workspace* ws) const {
    Workspace* inner_ws = nullptr;
    if (ws) {
        ws->children.resize(1);
        inner_ws = &ws->children[0];
    }
    const Tower n = inner_->forward(x, space, seeded, inner_ws);
    const int m = cond_.highest_order();
    if (m < 0) {
        if (ws) ws->towers.assign(1, Tower::constant(space, 1.0));
        return n;
    }

    Tower dt = Tower::variable(space, cond_.var, x[cond_.var], (seeded >> cond_.var) & 1u);
    dt += -cond_.t0;
    Tower base = Tower::constant(space, 1.0) - exp(dt * (-alpha_));
    Tower factor = base;
    for (int k = 0; k < m; ++k) factor = factor * base;

    Tower poly(space);
    Tower power = Tower::constant(space, 1.0);
    double fact = 1.0;
    for (int k = 0; k <= m; ++k) {
        if (k > 0) {
            power = power * dt;
            fact *= k;
        }
        if (cond_.values[k]) poly.axpy(*cond_.values[k] / fact, power);
    }
    if (ws) ws->towers.assign(1, factor);
    return poly + factor * n;
}

void PinnedModel::backward(const Workspace& ws, const Tower& adjoint, std::span<double> grad) const {
    Tower nbar(adjoint.space());
    mul_adjoint_accumulate(ws.towers[0], adjoint, nbar);
    inner_->backward(ws.children[0], nbar, grad);
}

nlohmann::json PinnedModel::to_json() const {
    nlohmann::json values = nlohmann::json::array();
    for (const auto& v : cond_.values) values.push_back(v ? nlohmann::json(*v) : nlohmann::json());
    return {{"format_version", 1},
            {"kind", "pinned"},
            {"t0", cond_.t0},
            {"var", cond_.var},
            {"values", values},
            {"alpha", alpha_},
            {"inner", inner_->to_json()}};
}

std::unique_ptr<Model> pin_boundary(const Model& inner, const PinConditions& conditions,
                                    double domain_width) {
    if (conditions.highest_order() < 0) return inner.clone();
    if (!(domain_width > 0.0)) throw ConfigError("pinning: domain width must be positive");
    return std::make_unique<PinnedModel>(inner.clone(), conditions, 5.0 / domain_width);
}

} // namespace autoint
