#pragma once

// Truncated multivariate Taylor arithmetic ("towers").
//
// A Tower stores the Taylor coefficients c_b of a scalar function around a
// point, f(x0 + e) = sum_b c_b e^b, for every multi-index b with |b| <= order.
// Coefficients are laid out in graded lexicographic order, e.g. for two
// variables: 1, x, y, x^2, xy, y^2, x^3, x^2y, xy^2, y^3.
//
// Each tower also tracks the highest order that is still exact. Taking a
// derivative lowers it by one; reading a partial above it is an error.

#include <array>
#include <type_traits>
#include <utility>
#include <cstdint>
#include <span>
#include <vector>

namespace autoint {

inline constexpr int kMaxVars = 3;
inline constexpr int kMaxOrder = 3;
inline constexpr int kMaxCoeffs = 20; // C(kMaxVars + kMaxOrder, kMaxOrder)

using MultiIndex = std::array<int, kMaxVars>;

class TowerSpace {
public:
    struct MulTerm {
        std::uint8_t lhs, rhs, out;
    };
    struct ShiftTerm {
        std::uint8_t src, dst;
        double factor;
    };

    /// Spaces are interned; the returned reference lives for the program.
    static const TowerSpace& get(int nvars, int order);

    int nvars() const { return nvars_; }
    int order() const { return order_; }
    int size() const { return size_; }

    const MultiIndex& monomial(int k) const { return monomials_[k]; }
    int degree(int k) const { return degree_[k]; }
    /// -1 when the multi-index exceeds the order or the variable count.
    int index_of(const MultiIndex& m) const;

    /// All (i, j, k) with monomial(i) * monomial(j) = monomial(k), |k| <= order.
    std::span<const MulTerm> mul_terms() const { return mul_terms_; }
    /// d/dx_var: out[dst] += factor * in[src].
    std::span<const ShiftTerm> derivative_terms(int var) const {
        return deriv_terms_[var];
    }
    /// Product of factorials of the multi-index (c_b * fact = partial).
    double factorial_weight(int k) const { return fact_weight_[k]; }

    using MulKernel = void (*)(const double* a, const double* b, double* out);
    /// out += a * b, unrolled for this space.
    MulKernel mul_kernel() const { return mul_; }
    /// out[rhs] += a[lhs] * w[out] over mul_terms(), unrolled.
    MulKernel mul_adjoint_kernel() const { return mul_adj_; }

private:
    TowerSpace(int nvars, int order);

    int nvars_;
    int order_;
    int size_;
    std::vector<MultiIndex> monomials_;
    std::vector<int> degree_;
    std::vector<double> fact_weight_;
    std::vector<MulTerm> mul_terms_;
    std::array<std::vector<ShiftTerm>, kMaxVars> deriv_terms_;
    MulKernel mul_ = nullptr;
    MulKernel mul_adj_ = nullptr;
};

/// Calls f(std::integral_constant<int, n>{}) for the coefficient counts that
/// occur, so loops over coefficients get a compile-time trip count.
template <class F>
inline void with_size(int n, F&& f) {
    switch (n) {
    case 1: f(std::integral_constant<int, 1>{}); break;
    case 2: f(std::integral_constant<int, 2>{}); break;
    case 3: f(std::integral_constant<int, 3>{}); break;
    case 4: f(std::integral_constant<int, 4>{}); break;
    case 6: f(std::integral_constant<int, 6>{}); break;
    case 10: f(std::integral_constant<int, 10>{}); break;
    case 20: f(std::integral_constant<int, 20>{}); break;
    default: f(n); break;
    }
}

class Tower {
public:
    Tower() = default;
    explicit Tower(const TowerSpace& space) : space_(&space), valid_(space.order()) {}

    static Tower constant(const TowerSpace& space, double value);
    /// x0 + e_var when seeded, plain constant otherwise.
    static Tower variable(const TowerSpace& space, int var, double value, bool seeded = true);

    const TowerSpace& space() const { return *space_; }
    int size() const { return space_->size(); }
    int valid_order() const { return valid_; }
    void set_valid_order(int v) { valid_ = v; }

    double value() const { return c_[0]; }
    double operator[](int k) const { return c_[k]; }
    double& operator[](int k) { return c_[k]; }
    std::span<const double> coeffs() const { return {c_.data(), static_cast<std::size_t>(size())}; }
    std::span<double> coeffs() { return {c_.data(), static_cast<std::size_t>(size())}; }

    /// Mixed partial derivative d^|orders| f / dx^orders at the expansion point.
    double partial(const MultiIndex& orders) const;

    Tower& operator+=(const Tower& o);
    Tower& operator-=(const Tower& o);
    Tower& operator*=(double s);
    Tower& operator+=(double s) { c_[0] += s; return *this; }
    /// this += s * o
    void axpy(double s, const Tower& o);
    void set_zero();

    /// Coefficient-wise dot product of the exact part.
    double dot(const Tower& o) const;

private:
    const TowerSpace* space_ = nullptr;
    int valid_ = 0;
    std::array<double, kMaxCoeffs> c_{};
};

Tower operator+(Tower a, const Tower& b);
Tower operator-(Tower a, const Tower& b);
Tower operator-(Tower a);
Tower operator*(const Tower& a, const Tower& b);
Tower operator*(Tower a, double s);
Tower operator*(double s, Tower a);
Tower operator+(Tower a, double s);
inline Tower operator+(double s, Tower a) { return std::move(a) + s; }
Tower operator/(const Tower& a, const Tower& b);

/// Derivative with respect to input `var`; the exact order drops by one.
Tower derivative(const Tower& t, int var);

/// Adjoint of u -> a * u: accumulates into `out` the vector-Jacobian product
/// with cotangent `w`.
void mul_adjoint_accumulate(const Tower& a, const Tower& w, Tower& out);

/// Adjoint of t -> derivative(t, var).
void derivative_adjoint_accumulate(const Tower& w, int var, Tower& out);

enum class UnaryKind { Tanh, Exp, Sin, Cos, Sqrt, Reciprocal, Acos, Log, Square, Erf };

/// f^{(k)}(x) for k = 0..n (n <= kMaxOrder + 1).
void unary_derivatives(UnaryKind kind, double x, int n, std::span<double> out);

/// Apply f in tower arithmetic; if `deriv` is given it receives f'(t) as a
/// tower, which is the Jacobian of the map in the truncated algebra.
Tower apply_unary(UnaryKind kind, const Tower& t, Tower* deriv = nullptr);

inline Tower tanh(const Tower& t) { return apply_unary(UnaryKind::Tanh, t); }
inline Tower exp(const Tower& t) { return apply_unary(UnaryKind::Exp, t); }
inline Tower sin(const Tower& t) { return apply_unary(UnaryKind::Sin, t); }
inline Tower cos(const Tower& t) { return apply_unary(UnaryKind::Cos, t); }
inline Tower sqrt(const Tower& t) { return apply_unary(UnaryKind::Sqrt, t); }
inline Tower reciprocal(const Tower& t) { return apply_unary(UnaryKind::Reciprocal, t); }
inline Tower acos(const Tower& t) { return apply_unary(UnaryKind::Acos, t); }
inline Tower log(const Tower& t) { return apply_unary(UnaryKind::Log, t); }
inline Tower erf(const Tower& t) { return apply_unary(UnaryKind::Erf, t); }

} // namespace autoint
