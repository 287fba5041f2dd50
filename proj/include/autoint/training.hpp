#pragma once

// Physics-informed losses over one or more surrogate models and their
// optimisation.
//
// A term is an expression over the surrogates evaluated at a point set, with
// optional per-point targets:
//   loss = sum_terms weight * mean_i (expr(x_i) - target_i)^2
// The per-point work is split into fixed-size chunks; chunks may run on any
// number of OpenMP threads and are reduced in chunk order, so the result does
// not depend on the thread count.

#include "autoint/expr.hpp"
#include "autoint/model.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace autoint {

struct CollocationGrid {
    std::vector<std::vector<double>> points;

    std::size_t size() const { return points.size(); }

    static CollocationGrid explicit_points(std::vector<std::vector<double>> pts);
    /// Cartesian product, first axis varying slowest.
    static CollocationGrid product(const std::vector<std::vector<double>>& axes);
    /// Copy without the points where `exclude` is true.
    CollocationGrid without(const std::function<bool(std::span<const double>)>& exclude) const;
    /// Only the points where `keep` is true.
    CollocationGrid where(const std::function<bool(std::span<const double>)>& keep) const;
};

/// n evenly spaced values on [a, b], both ends included.
std::vector<double> linspace(double a, double b, int n);

struct Term {
    enum class Role { Residual, Data, Boundary };

    std::string name;
    Role role = Role::Residual;
    Expr expr;                   ///< over surrogates only
    CollocationGrid grid;
    std::vector<double> targets; ///< empty means zero everywhere
    double weight = 1.0;
};

struct SurrogateProblem {
    int arity = 1;      ///< inputs of every surrogate
    int num_models = 1; ///< surrogate indices 0..num_models-1
    std::vector<Term> terms;

    void validate() const;
};

/// Compiled loss. Thread-safe for concurrent evaluation against distinct
/// gradient buffers.
class Loss {
public:
    explicit Loss(const SurrogateProblem& problem, int chunk_size = 16);

    std::size_t num_terms() const { return terms_.size(); }
    const std::string& term_name(std::size_t t) const { return terms_[t].name; }
    std::size_t num_params(std::span<const Model* const> models) const;

    /// Total loss; per_term (optional) receives weighted per-term losses.
    /// grad (optional, length = total parameters of all models, concatenated
    /// in model order) receives d loss / d theta. threads <= 0 means the
    /// OpenMP default.
    double evaluate(std::span<const Model* const> models, std::vector<double>* grad,
                    std::vector<double>* per_term = nullptr, int threads = 0) const;

    /// Straight loop over the points in order, no chunking or threads.
    double evaluate_serial(std::span<const Model* const> models, std::vector<double>* grad,
                           std::vector<double>* per_term = nullptr) const;

    /// Residual value of one term at one of its points (no gradient).
    double term_value(std::span<const Model* const> models, std::size_t term,
                      std::size_t point) const;

private:
    struct Compiled {
        std::string name;
        Program program;
        std::vector<std::vector<double>> points;
        std::vector<double> targets;
        double scale; ///< weight / n
    };
    std::vector<Compiled> terms_;
    std::vector<std::pair<std::size_t, std::size_t>> items_; ///< (term, point)
    int chunk_;
};

/// Convenience: assemble and check that a problem compiles.
Loss assemble_loss(const SurrogateProblem& problem);

enum class Algorithm { Adam, AdaBelief };

Algorithm parse_algorithm(const std::string& s);
std::string to_string(Algorithm a);

struct OptimizerConfig {
    Algorithm algorithm = Algorithm::Adam;
    double learning_rate = 0.005;
    /// Geometric decay from learning_rate to this value over the epochs.
    std::optional<double> final_learning_rate;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    long epochs = 20000;
    std::uint64_t seed = 0;
    /// Stop early once the loss is at or below this value.
    std::optional<double> target_loss;
    int threads = 0;
    int chunk_size = 16;
    /// Print a progress line every this many epochs (0: silent).
    long log_every = 0;

    void validate() const;
};

/// Adam / AdaBelief state over a flat parameter vector.
class Optimizer {
public:
    Optimizer(const OptimizerConfig& config, std::size_t n);
    void step(std::vector<double>& theta, const std::vector<double>& grad);
    long steps() const { return t_; }
    /// Step size used for step number t (1-based).
    double rate(long t) const;

private:
    OptimizerConfig cfg_;
    std::vector<double> m_, s_;
    long t_ = 0;
};

struct TrainReport {
    std::vector<std::string> term_names;
    std::vector<double> loss_history;              ///< loss before each step
    std::vector<std::vector<double>> term_history; ///< per epoch, per term
    double initial_loss = 0.0;
    double final_loss = 0.0;
    std::vector<double> initial_terms, final_terms;
    double final_grad_norm = 0.0;
    long epochs_run = 0;
    long best_epoch = -1; ///< -1: initial parameters kept
    bool converged = false;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;
    std::vector<std::vector<double>> final_params; ///< per model

    nlohmann::json to_json() const;
    /// epoch,total,<term names...>
    void write_loss_csv(const std::string& path) const;
};

/// Optimise the parameters of `models` in place. The parameters with the
/// lowest loss seen are kept, so final_loss <= initial_loss. Throws
/// TrainingError on a non-finite loss or gradient.
TrainReport train(const SurrogateProblem& problem, std::vector<Model*> models,
                  const OptimizerConfig& config);

/// 12-significant-digit formatting used for every CSV the tools emit.
std::string format_number(double v);

} // namespace autoint
