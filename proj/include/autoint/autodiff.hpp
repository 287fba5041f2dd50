#pragma once

#include "autoint/model.hpp"

#include <span>
#include <vector>

namespace autoint {

inline constexpr int kOrderCeiling = kMaxOrder;

struct DerivativeRequest {
    std::vector<int> orders; ///< one entry per model input
    bool with_param_grad = false;

    int total_order() const;
};

struct DerivativeResult {
    double value = 0.0;
    std::vector<double> param_grad; ///< empty unless requested
};

/// Exact mixed partial of the model output, optionally with its gradient
/// over every model parameter.
DerivativeResult eval_derivative(const Model& model, std::span<const double> inputs,
                                 const DerivativeRequest& req);

/// Tensor-product central finite-difference estimate of the same partial.
double finite_difference_partial(const Model& model, std::span<const double> inputs,
                                 const std::vector<int>& orders, double step);

/// |analytic - stencil| / max(|analytic|, 1e-12).
double finite_difference_check(const Model& model, std::span<const double> inputs,
                               const DerivativeRequest& req, double step);

/// JSON dump of a tower: space, exact order and coefficients with their
/// multi-indices.
nlohmann::json tower_to_json(const Tower& t);

} // namespace autoint
