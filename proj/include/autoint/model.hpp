#pragma once

#include "autoint/tower.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace autoint {

/// Per-evaluation saved state for the reverse pass. Reuse one per thread to
/// avoid reallocating between points.
struct Workspace {
    std::vector<Tower> towers;
    std::vector<Tower> aux;
    std::vector<double> scratch;
    std::vector<Workspace> children;
};

/// Bit i set means input i carries a Taylor direction.
using SeedMask = unsigned;
inline constexpr SeedMask kSeedAll = 0x7u;

/// A differentiable universal function approximator (or a fixed analytic
/// function behind the same interface). Models are values: copying through
/// clone() gives an independent parameter vector.
class Model {
public:
    virtual ~Model() = default;

    virtual std::string kind() const = 0;
    virtual int arity() const = 0;
    virtual std::span<const double> params() const = 0;
    virtual void set_params(std::span<const double> theta) = 0;
    std::size_t num_params() const { return params().size(); }

    /// Taylor tower of the output at `x` in `space` (nvars == arity). When `ws`
    /// is non-null the state needed by backward() is stored there.
    virtual Tower forward(std::span<const double> x, const TowerSpace& space, SeedMask seeded,
                          Workspace* ws) const = 0;

    /// grad[k] += sum_b adjoint[b] * d output[b] / d theta_k, using the state
    /// saved by the matching forward().
    virtual void backward(const Workspace& ws, const Tower& adjoint,
                          std::span<double> grad) const = 0;

    virtual std::unique_ptr<Model> clone() const = 0;
    virtual nlohmann::json to_json() const = 0;

    /// Plain function value.
    double value(std::span<const double> x) const;
};

/// Counts forward() calls of the wrapped model; used to check the number of
/// surrogate evaluations a readout performs.
class CountingModel final : public Model {
public:
    explicit CountingModel(const Model& inner) : inner_(&inner) {}

    long count() const { return count_.load(); }
    void reset() { count_.store(0); }

    std::string kind() const override { return inner_->kind(); }
    int arity() const override { return inner_->arity(); }
    std::span<const double> params() const override { return inner_->params(); }
    void set_params(std::span<const double>) override;
    Tower forward(std::span<const double> x, const TowerSpace& space, SeedMask seeded,
                  Workspace* ws) const override {
        count_.fetch_add(1);
        return inner_->forward(x, space, seeded, ws);
    }
    void backward(const Workspace& ws, const Tower& adjoint,
                  std::span<double> grad) const override {
        inner_->backward(ws, adjoint, grad);
    }
    std::unique_ptr<Model> clone() const override;
    nlohmann::json to_json() const override { return inner_->to_json(); }

private:
    const Model* inner_;
    mutable std::atomic<long> count_{0};
};

/// Rebuild a model from to_json() output.
std::unique_ptr<Model> model_from_json(const nlohmann::json& j);

} // namespace autoint
