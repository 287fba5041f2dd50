#pragma once

// Composition trees over inputs, known functions, the unknown f, integrals of
// k f, and surrogate evaluations G. Residuals are written over f; the
// substitution in transform.hpp rewrites them over G only, and Program
// evaluates the result in tower arithmetic with a reverse pass into the
// surrogate parameters.

#include "autoint/model.hpp"
#include "autoint/tower.hpp"

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace autoint {

enum class ExprKind {
    Const,
    Input,
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Unary,
    Deriv,
    Unknown,   ///< f at the current point
    Integral,  ///< integral of kernel * f over one or more variables
    Surrogate, ///< G evaluated at the current point with some coordinates fixed
};

/// Integration limit: a constant or the current value of the integration
/// variable's own coordinate (e.g. the upper limit t in int_0^t).
struct Limit {
    bool is_current = false;
    double value = 0.0;

    static Limit at(double v) { return {false, v}; }
    static Limit current() { return {true, 0.0}; }
};

using FixedCoords = std::array<std::optional<double>, kMaxVars>;

struct ExprNode;

class Expr {
public:
    Expr() = default;
    explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
    Expr(double c); // implicit: constants in arithmetic

    const ExprNode& node() const { return *node_; }
    const ExprNode* get() const { return node_.get(); }
    explicit operator bool() const { return static_cast<bool>(node_); }

    /// Human-readable infix form, for diagnostics and tests.
    std::string str() const;
    /// True when an Unknown or Integral node remains.
    bool references_unknown() const;
    /// Longest chain of Deriv nodes from the root to any leaf.
    int derivative_depth() const;

private:
    std::shared_ptr<const ExprNode> node_;
};

struct ExprNode {
    ExprKind kind = ExprKind::Const;
    double value = 0.0;
    int var = 0;
    UnaryKind fn = UnaryKind::Exp;
    Expr lhs, rhs;
    // Integral
    std::string kernel_name;
    std::vector<int> int_vars;
    std::vector<Limit> lower, upper;
    // Surrogate
    int model = 0;
    FixedCoords fixed{};
};

Expr constant(double c);
Expr input(int var);
Expr unknown_f();
/// Integral of k f over `vars` between per-variable limits, k named by `kernel`.
Expr integral(const std::string& kernel, std::vector<int> vars, std::vector<Limit> lower,
              std::vector<Limit> upper);
Expr surrogate(int model = 0, FixedCoords fixed = {});

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr d(const Expr& e, int var);
Expr unary(UnaryKind k, const Expr& e);
inline Expr exp(const Expr& e) { return unary(UnaryKind::Exp, e); }
inline Expr sin(const Expr& e) { return unary(UnaryKind::Sin, e); }
inline Expr cos(const Expr& e) { return unary(UnaryKind::Cos, e); }
inline Expr sqrt(const Expr& e) { return unary(UnaryKind::Sqrt, e); }
inline Expr square(const Expr& e) { return unary(UnaryKind::Square, e); }
inline Expr erf(const Expr& e) { return unary(UnaryKind::Erf, e); }

/// Replace every Unknown node by `f` (which must not reference f itself).
Expr replace_unknown(const Expr& e, const Expr& f);

/// Direct recursive tower evaluation of an expression without surrogate or f
/// nodes; inputs whose seed bit is clear are held constant.
Tower evaluate_tower(const Expr& e, std::span<const double> point, const TowerSpace& space,
                     SeedMask seeded = kSeedAll);

/// Scratch state for one Program evaluation; reuse per thread.
struct ProgramScratch {
    std::vector<Tower> values;
    std::vector<Tower> jac;   ///< f'(a) for unary nodes, -1/b^2 for division
    std::vector<Tower> recip; ///< 1/b for division
    std::vector<Tower> adj;
    std::vector<Workspace> leaf_ws;
    std::vector<double> point;
};

/// Linearised expression over G, evaluated at points in tower arithmetic.
/// Distinct surrogate evaluations (model, fixed coordinates) are computed once
/// per point.
class Program {
public:
    struct Leaf {
        int model;
        FixedCoords fixed;
    };

    /// Throws ConfigError when the derivative depth exceeds the ceiling and
    /// UsageError when an f or integral node remains.
    Program(const Expr& e, int nvars);

    int nvars() const { return nvars_; }
    int order() const { return order_; }
    const std::vector<Leaf>& leaves() const { return leaves_; }

    /// Value at `point`; keeps the tape in `s` for backward().
    double forward(std::span<const Model* const> models, std::span<const double> point,
                   ProgramScratch& s) const;
    /// grads[m] += seed * d value / d theta_m for every model m.
    void backward(std::span<const Model* const> models, double seed, ProgramScratch& s,
                  std::span<const std::span<double>> grads) const;

private:
    struct Instr {
        ExprKind kind;
        int a = -1, b = -1;
        double value = 0.0;
        int var = 0;
        UnaryKind fn = UnaryKind::Exp;
        int leaf = -1;
    };
    int nvars_;
    int order_;
    std::vector<Instr> code_;
    std::vector<char> active_; ///< instruction depends on a surrogate
    std::vector<Leaf> leaves_;
};

} // namespace autoint
