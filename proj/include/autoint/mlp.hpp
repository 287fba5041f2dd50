#pragma once

#include "autoint/model.hpp"

#include <cstdint>
#include <vector>

namespace autoint {

/// Dense network: tanh on hidden layers, identity on the output.
struct MlpConfig {
    std::vector<int> layer_widths; ///< input width first, output width (1) last
    std::uint64_t init_seed = 0;
    /// Optional per-input affine map of [lower, upper] onto [-1, 1] applied
    /// before the first layer. Empty means identity.
    std::vector<double> input_lower;
    std::vector<double> input_upper;

    void validate() const;
    std::size_t num_params() const;
};

class MlpModel final : public Model {
public:
    /// Glorot-uniform weights and zero biases drawn from config.init_seed.
    explicit MlpModel(MlpConfig config);
    MlpModel(MlpConfig config, std::vector<double> theta);

    const MlpConfig& config() const { return config_; }

    std::string kind() const override { return "mlp"; }
    int arity() const override { return config_.layer_widths.front(); }
    std::span<const double> params() const override { return theta_; }
    void set_params(std::span<const double> theta) override;

    Tower forward(std::span<const double> x, const TowerSpace& space, SeedMask seeded,
                  Workspace* ws) const override;
    void backward(const Workspace& ws, const Tower& adjoint,
                  std::span<double> grad) const override;

    std::unique_ptr<Model> clone() const override { return std::make_unique<MlpModel>(*this); }
    nlohmann::json to_json() const override;
    static MlpModel from_json(const nlohmann::json& j);

    /// Plain double-precision forward pass (no towers).
    double mlp_forward(std::span<const double> x) const;

private:
    MlpConfig config_;
    std::vector<double> theta_;
};

/// Glorot-uniform initial parameters, layer by layer: W (row-major, out x in)
/// then b.
std::vector<double> glorot_init(const MlpConfig& config);

} // namespace autoint
