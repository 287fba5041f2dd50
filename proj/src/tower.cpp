#include "autoint/tower.hpp"

#include "autoint/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <memory>
#include <string>
#include <utility>

namespace autoint {

namespace {

// Compile-time copy of the monomial ordering and product table, so the hot
// product loops unroll with constant indices.
template <int N, int O>
struct StaticTables {
    static constexpr int count_monomials() {
        int n = 0;
        for (int d = 0; d <= O; ++d)
            for (int a = d; a >= 0; --a) {
                if (N == 1) { n += (a == d); continue; }
                for (int b = d - a; b >= 0; --b) n += !(N == 2 && d - a - b != 0);
            }
        return n;
    }
    static constexpr int size = count_monomials();
    static constexpr std::array<std::array<int, 3>, size> monomials() {
        std::array<std::array<int, 3>, size> m{};
        int n = 0;
        for (int d = 0; d <= O; ++d)
            for (int a = d; a >= 0; --a) {
                if (N == 1) {
                    if (a == d) m[n++] = {a, 0, 0};
                    continue;
                }
                for (int b = d - a; b >= 0; --b) {
                    const int c = d - a - b;
                    if (N == 2 && c != 0) continue;
                    m[n++] = {a, b, c};
                }
            }
        return m;
    }
    static constexpr auto mono = monomials();
    static constexpr int index(std::array<int, 3> x) {
        for (int k = 0; k < size; ++k)
            if (mono[k] == x) return k;
        return -1;
    }
    static constexpr int count_terms() {
        int n = 0;
        for (int i = 0; i < size; ++i)
            for (int j = 0; j < size; ++j)
                n += (mono[i][0] + mono[i][1] + mono[i][2] + mono[j][0] + mono[j][1] + mono[j][2] <= O);
        return n;
    }
    static constexpr int nterms = count_terms();
    struct Term {
        int l, r, o;
    };
    static constexpr std::array<Term, nterms> terms() {
        std::array<Term, nterms> t{};
        int n = 0;
        for (int i = 0; i < size; ++i)
            for (int j = 0; j < size; ++j) {
                if (mono[i][0] + mono[i][1] + mono[i][2] + mono[j][0] + mono[j][1] + mono[j][2] > O)
                    continue;
                t[n++] = {i, j, index({mono[i][0] + mono[j][0], mono[i][1] + mono[j][1],
                                       mono[i][2] + mono[j][2]})};
            }
        return t;
    }
    static constexpr auto table = terms();

    static void mul(const double* a, const double* b, double* out) {
        [&]<std::size_t... I>(std::index_sequence<I...>) {
            ((out[table[I].o] += a[table[I].l] * b[table[I].r]), ...);
        }(std::make_index_sequence<nterms>{});
    }
    static void mul_adjoint(const double* a, const double* w, double* out) {
        [&]<std::size_t... I>(std::index_sequence<I...>) {
            ((out[table[I].r] += a[table[I].l] * w[table[I].o]), ...);
        }(std::make_index_sequence<nterms>{});
    }
};

template <int N>
void pick_kernels(int order, TowerSpace::MulKernel& mul, TowerSpace::MulKernel& adj) {
    switch (order) {
    case 0: mul = &StaticTables<N, 0>::mul; adj = &StaticTables<N, 0>::mul_adjoint; break;
    case 1: mul = &StaticTables<N, 1>::mul; adj = &StaticTables<N, 1>::mul_adjoint; break;
    case 2: mul = &StaticTables<N, 2>::mul; adj = &StaticTables<N, 2>::mul_adjoint; break;
    default: mul = &StaticTables<N, 3>::mul; adj = &StaticTables<N, 3>::mul_adjoint; break;
    }
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

} // namespace

TowerSpace::TowerSpace(int nvars, int order) : nvars_(nvars), order_(order) {
    // graded lexicographic: by degree, then by descending exponent of x0, x1, ...
    for (int d = 0; d <= order; ++d) {
        for (int a = d; a >= 0; --a) {
            if (nvars == 1) {
                if (a == d) monomials_.push_back({a, 0, 0});
                continue;
            }
            for (int b = d - a; b >= 0; --b) {
                const int c = d - a - b;
                if (nvars == 2 && c != 0) continue;
                monomials_.push_back({a, b, c});
            }
        }
    }
    size_ = static_cast<int>(monomials_.size());
    for (const auto& m : monomials_) {
        degree_.push_back(m[0] + m[1] + m[2]);
        fact_weight_.push_back(factorial(m[0]) * factorial(m[1]) * factorial(m[2]));
    }
    for (int i = 0; i < size_; ++i) {
        for (int j = 0; j < size_; ++j) {
            if (degree_[i] + degree_[j] > order) continue;
            MultiIndex s{};
            for (int v = 0; v < kMaxVars; ++v) s[v] = monomials_[i][v] + monomials_[j][v];
            mul_terms_.push_back({static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(j),
                                  static_cast<std::uint8_t>(index_of(s))});
        }
    }
    for (int v = 0; v < nvars; ++v) {
        for (int k = 0; k < size_; ++k) {
            MultiIndex up = monomials_[k];
            up[v] += 1;
            const int src = index_of(up);
            if (src < 0) continue;
            deriv_terms_[v].push_back({static_cast<std::uint8_t>(src), static_cast<std::uint8_t>(k),
                                       static_cast<double>(up[v])});
        }
    }
    if (nvars == 1) pick_kernels<1>(order, mul_, mul_adj_);
    else if (nvars == 2) pick_kernels<2>(order, mul_, mul_adj_);
    else pick_kernels<3>(order, mul_, mul_adj_);
}

const TowerSpace& TowerSpace::get(int nvars, int order) {
    if (nvars < 1 || nvars > kMaxVars)
        throw ConfigError("tower: variable count " + std::to_string(nvars) + " outside [1, 3]");
    if (order < 0 || order > kMaxOrder)
        throw ConfigError("tower: order " + std::to_string(order) + " above ceiling 3");
    static const auto spaces = [] {
        std::array<std::unique_ptr<TowerSpace>, kMaxVars * (kMaxOrder + 1)> s;
        for (int n = 1; n <= kMaxVars; ++n)
            for (int o = 0; o <= kMaxOrder; ++o)
                s[(n - 1) * (kMaxOrder + 1) + o].reset(new TowerSpace(n, o));
        return s;
    }();
    return *spaces[(nvars - 1) * (kMaxOrder + 1) + order];
}

int TowerSpace::index_of(const MultiIndex& m) const {
    int deg = 0;
    for (int v = 0; v < kMaxVars; ++v) {
        if (m[v] < 0) return -1;
        if (v >= nvars_ && m[v] != 0) return -1;
        deg += m[v];
    }
    if (deg > order_) return -1;
    for (int k = 0; k < size_; ++k)
        if (monomials_[k] == m) return k;
    return -1;
}

Tower Tower::constant(const TowerSpace& space, double value) {
    Tower t(space);
    t.c_[0] = value;
    return t;
}

Tower Tower::variable(const TowerSpace& space, int var, double value, bool seeded) {
    Tower t(space);
    t.c_[0] = value;
    if (seeded && space.order() >= 1) {
        MultiIndex m{};
        m[var] = 1;
        t.c_[space.index_of(m)] = 1.0;
    }
    return t;
}

double Tower::partial(const MultiIndex& orders) const {
    int deg = orders[0] + orders[1] + orders[2];
    if (deg > valid_)
        throw ConfigError("tower: partial of order " + std::to_string(deg) +
                          " requested but only order " + std::to_string(valid_) + " is exact");
    const int k = space_->index_of(orders);
    if (k < 0) throw UsageError("tower: multi-index outside space");
    return c_[k] * space_->factorial_weight(k);
}

Tower& Tower::operator+=(const Tower& o) {
    with_size(size(), [&](auto n) {
        for (int k = 0; k < n; ++k) c_[k] += o.c_[k];
    });
    valid_ = std::min(valid_, o.valid_);
    return *this;
}

Tower& Tower::operator-=(const Tower& o) {
    with_size(size(), [&](auto n) {
        for (int k = 0; k < n; ++k) c_[k] -= o.c_[k];
    });
    valid_ = std::min(valid_, o.valid_);
    return *this;
}

Tower& Tower::operator*=(double s) {
    with_size(size(), [&](auto n) {
        for (int k = 0; k < n; ++k) c_[k] *= s;
    });
    return *this;
}

void Tower::axpy(double s, const Tower& o) {
    with_size(size(), [&](auto n) {
        for (int k = 0; k < n; ++k) c_[k] += s * o.c_[k];
    });
    valid_ = std::min(valid_, o.valid_);
}

void Tower::set_zero() {
    c_.fill(0.0);
    valid_ = space_->order();
}

double Tower::dot(const Tower& o) const {
    double s = 0.0;
    const int n = size();
    for (int k = 0; k < n; ++k) s += c_[k] * o.c_[k];
    return s;
}

Tower operator+(Tower a, const Tower& b) { return a += b; }
Tower operator-(Tower a, const Tower& b) { return a -= b; }
Tower operator-(Tower a) { return a *= -1.0; }
Tower operator*(Tower a, double s) { return a *= s; }
Tower operator*(double s, Tower a) { return a *= s; }
Tower operator+(Tower a, double s) { return a += s; }

Tower operator*(const Tower& a, const Tower& b) {
    Tower out(a.space());
    a.space().mul_kernel()(a.coeffs().data(), b.coeffs().data(), out.coeffs().data());
    out.set_valid_order(std::min(a.valid_order(), b.valid_order()));
    return out;
}

Tower operator/(const Tower& a, const Tower& b) { return a * reciprocal(b); }

Tower derivative(const Tower& t, int var) {
    Tower out(t.space());
    for (const auto& s : t.space().derivative_terms(var)) out[s.dst] += s.factor * t[s.src];
    out.set_valid_order(t.valid_order() - 1);
    return out;
}

void mul_adjoint_accumulate(const Tower& a, const Tower& w, Tower& out) {
    a.space().mul_adjoint_kernel()(a.coeffs().data(), w.coeffs().data(), out.coeffs().data());
}

void derivative_adjoint_accumulate(const Tower& w, int var, Tower& out) {
    for (const auto& s : w.space().derivative_terms(var)) out[s.src] += s.factor * w[s.dst];
}

void unary_derivatives(UnaryKind kind, double x, int n, std::span<double> d) {
    switch (kind) {
    case UnaryKind::Tanh: {
        const double t = std::tanh(x);
        const double t1 = 1.0 - t * t;
        const double v[5] = {t, t1, -2.0 * t * t1, -2.0 * t1 * (1.0 - 3.0 * t * t),
                             8.0 * t * t1 * (2.0 - 3.0 * t * t)};
        for (int k = 0; k <= n; ++k) d[k] = v[k];
        break;
    }
    case UnaryKind::Exp: {
        const double e = std::exp(x);
        for (int k = 0; k <= n; ++k) d[k] = e;
        break;
    }
    case UnaryKind::Sin:
    case UnaryKind::Cos: {
        const double s = std::sin(x), c = std::cos(x);
        const double cyc[4] = {s, c, -s, -c};
        const int shift = kind == UnaryKind::Sin ? 0 : 1;
        for (int k = 0; k <= n; ++k) d[k] = cyc[(k + shift) % 4];
        break;
    }
    case UnaryKind::Sqrt: {
        if (!(x > 0.0)) throw DomainError("sqrt: argument must be positive");
        double coef = 1.0;
        for (int k = 0; k <= n; ++k) {
            d[k] = coef * std::pow(x, 0.5 - k);
            coef *= (0.5 - k);
        }
        break;
    }
    case UnaryKind::Reciprocal: {
        if (x == 0.0) throw DomainError("reciprocal: division by zero");
        const double r = 1.0 / x;
        double p = r;
        for (int k = 0; k <= n; ++k) {
            d[k] = p;
            p *= -(k + 1) * r;
        }
        break;
    }
    case UnaryKind::Acos: {
        if (!(std::abs(x) < 1.0)) throw DomainError("acos: argument must lie in (-1, 1)");
        const double s = 1.0 - x * x;
        const double v[5] = {std::acos(x), -1.0 / std::sqrt(s), -x * std::pow(s, -1.5),
                             -(1.0 + 2.0 * x * x) * std::pow(s, -2.5),
                             -(9.0 * x + 6.0 * x * x * x) * std::pow(s, -3.5)};
        for (int k = 0; k <= n; ++k) d[k] = v[k];
        break;
    }
    case UnaryKind::Log: {
        if (!(x > 0.0)) throw DomainError("log: argument must be positive");
        const double r = 1.0 / x;
        const double v[5] = {std::log(x), r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r};
        for (int k = 0; k <= n; ++k) d[k] = v[k];
        break;
    }
    case UnaryKind::Square: {
        const double v[5] = {x * x, 2.0 * x, 2.0, 0.0, 0.0};
        for (int k = 0; k <= n; ++k) d[k] = v[k];
        break;
    }
    case UnaryKind::Erf: {
        // Hermite form: d^k erf = 2/sqrt(pi) (-1)^(k-1) H_(k-1)(x) e^(-x^2)
        const double g = 2.0 / std::sqrt(std::numbers::pi) * std::exp(-x * x);
        const double v[5] = {std::erf(x), g, -2.0 * x * g, (4.0 * x * x - 2.0) * g,
                             (12.0 * x - 8.0 * x * x * x) * g};
        for (int k = 0; k <= n; ++k) d[k] = v[k];
        break;
    }
    }
}

Tower apply_unary(UnaryKind kind, const Tower& t, Tower* deriv) {
    const TowerSpace& sp = t.space();
    const int order = sp.order();
    std::array<double, kMaxOrder + 2> d{};
    unary_derivatives(kind, t.value(), order + 1, d);

    // f(x0 + delta) = sum_k d_k / k! delta^k
    Tower delta = t;
    delta[0] = 0.0;
    std::array<Tower, kMaxOrder + 1> pow;
    pow[0] = Tower::constant(sp, 1.0);
    if (order >= 1) pow[1] = delta;
    for (int k = 2; k <= order; ++k) pow[k] = pow[k - 1] * delta;

    Tower out(sp);
    double inv_fact = 1.0;
    for (int k = 0; k <= order; ++k) {
        if (k > 0) inv_fact /= k;
        out.axpy(d[k] * inv_fact, pow[k]);
    }
    out.set_valid_order(t.valid_order());
    if (deriv) {
        *deriv = Tower(sp);
        inv_fact = 1.0;
        for (int k = 0; k <= order; ++k) {
            if (k > 0) inv_fact /= k;
            deriv->axpy(d[k + 1] * inv_fact, pow[k]);
        }
        deriv->set_valid_order(t.valid_order());
    }
    return out;
}

} // namespace autoint
