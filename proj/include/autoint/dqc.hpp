#pragma once

// Classically simulated differentiable quantum circuit.
//
//   |psi(x, theta)> = HEA(theta) . ChebyshevMap(x) |0...0>,   f = <psi| sum_q Z_q |psi>
//
// Chebyshev map: qubit j (1-based) gets R_y(2 j arccos(x~)), with x~ the input
// mapped affinely from [domain_lower, domain_upper] onto [-bound, bound].
// Hardware-efficient ansatz layer: R_x R_z R_x on every qubit, then CNOTs
// (0,1), (1,2), ..., (n-2, n-1). Qubit q is bit q of the basis index.
//
// Input derivatives come from running the statevector in Taylor-coefficient
// layers; parameter gradients use the adjoint (reverse) sweep.

#include "autoint/model.hpp"

#include <complex>
#include <cstdint>
#include <vector>

namespace autoint {

struct DqcConfig {
    int n_qubits = 4;
    int ansatz_depth = 4;
    std::uint64_t init_seed = 0;
    double domain_lower = -1.0;
    double domain_upper = 1.0;
    double rescale_bound = 0.95;

    void validate() const;
    std::size_t num_params() const { return static_cast<std::size_t>(3 * n_qubits * ansatz_depth); }
    /// x -> x~ in [-bound, bound].
    double rescale(double x) const;
};

class DqcModel final : public Model {
public:
    /// theta uniform on [0, 2 pi) from config.init_seed.
    explicit DqcModel(DqcConfig config);
    DqcModel(DqcConfig config, std::vector<double> theta);

    const DqcConfig& config() const { return config_; }

    std::string kind() const override { return "dqc"; }
    int arity() const override { return 1; }
    std::span<const double> params() const override { return theta_; }
    void set_params(std::span<const double> theta) override;

    Tower forward(std::span<const double> x, const TowerSpace& space, SeedMask seeded,
                  Workspace* ws) const override;
    void backward(const Workspace& ws, const Tower& adjoint,
                  std::span<double> grad) const override;

    std::unique_ptr<Model> clone() const override { return std::make_unique<DqcModel>(*this); }
    nlohmann::json to_json() const override;
    static DqcModel from_json(const nlohmann::json& j);

    /// <sum Z> at input x.
    double dqc_forward(double x) const;

private:
    DqcConfig config_;
    std::vector<double> theta_;
};

/// Expectation of total magnetisation for explicit feature-map R_y angles
/// (one per qubit) followed by the configured ansatz.
double dqc_expectation_from_angles(const DqcConfig& config, std::span<const double> theta,
                                   std::span<const double> angles);

/// Final statevector for explicit feature-map angles.
std::vector<std::complex<double>> dqc_statevector(const DqcConfig& config,
                                                  std::span<const double> theta,
                                                  std::span<const double> angles);

/// Relative error between the adjoint-sweep gradient d<O>/d theta_k and the
/// parameter-shift estimate (f(theta_k + pi/2) - f(theta_k - pi/2)) / 2.
double dqc_parameter_shift_check(const DqcModel& model, double x, std::size_t param_index);

} // namespace autoint
