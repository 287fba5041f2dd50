#pragma once

#include "autoint/model.hpp"

#include <array>
#include <optional>
#include <vector>

namespace autoint {

/// Value and derivative constraints at a single point t0 along one input.
struct PinConditions {
    double t0 = 0.0;
    int var = 0;
    /// values[k] pins d^k G / dt^k at t0; at most order 2.
    std::array<std::optional<double>, 3> values{};

    /// Highest pinned order, -1 when empty.
    int highest_order() const;
};

/// Conditions from a list indexed by derivative order; more than three
/// entries (order above 2) is unsupported.
PinConditions make_pin_conditions(double t0, const std::vector<std::optional<double>>& values,
                                  int var = 0);

/// G~(t) = P(t) + (1 - exp(-alpha (t - t0)))^(m+1) N(t), with P the
/// lowest-degree polynomial through the pinned values and m the highest pinned
/// order. Satisfies every condition for any parameters of N.
class PinnedModel final : public Model {
public:
    PinnedModel(std::unique_ptr<Model> inner, PinConditions conditions, double alpha);
    PinnedModel(const PinnedModel& other);
    PinnedModel& operator=(const PinnedModel&) = delete;

    const Model& inner() const { return *inner_; }
    const PinConditions& conditions() const { return cond_; }
    double alpha() const { return alpha_; }

    std::string kind() const override { return "pinned"; }
    int arity() const override { return inner_->arity(); }
    std::span<const double> params() const override { return inner_->params(); }
    void set_params(std::span<const double> theta) override { inner_->set_params(theta); }

    Tower forward(std::span<const double> x, const TowerSpace& space, SeedMask seeded,
                  Workspace* ws) const override;
    void backward(const Workspace& ws, const Tower& adjoint,
                  std::span<double> grad) const override;

    std::unique_ptr<Model> clone() const override { return std::make_unique<PinnedModel>(*this); }
    nlohmann::json to_json() const override;

private:
    std::unique_ptr<Model> inner_;
    PinConditions cond_;
    double alpha_;
};

/// Wrap `inner`; an empty condition set returns an unwrapped clone. Steepness
/// defaults to 5 / domain width.
std::unique_ptr<Model> pin_boundary(const Model& inner, const PinConditions& conditions,
                                    double domain_width);

} // namespace autoint
