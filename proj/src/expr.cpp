#include "autoint/expr.hpp"

#include "autoint/errors.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace autoint {

namespace {

Expr make(ExprNode n) { return Expr(std::make_shared<const ExprNode>(std::move(n))); }

Expr binary(ExprKind k, const Expr& a, const Expr& b) {
    if (!a || !b) throw UsageError("expr: null operand");
    ExprNode n;
    n.kind = k;
    n.lhs = a;
    n.rhs = b;
    return make(std::move(n));
}

const char* unary_name(UnaryKind k) {
    switch (k) {
    case UnaryKind::Tanh: return "tanh";
    case UnaryKind::Exp: return "exp";
    case UnaryKind::Sin: return "sin";
    case UnaryKind::Cos: return "cos";
    case UnaryKind::Sqrt: return "sqrt";
    case UnaryKind::Reciprocal: return "recip";
    case UnaryKind::Acos: return "acos";
    case UnaryKind::Log: return "log";
    case UnaryKind::Square: return "sq";
    case UnaryKind::Erf: return "erf";
    }
    return "?";
}

void print(std::ostream& os, const ExprNode& n) {
    auto limit = [&](const Limit& l) {
        if (l.is_current)
            os << "s";
        else
            os << l.value;
    };
    switch (n.kind) {
    case ExprKind::Const: os << n.value; break;
    case ExprKind::Input: os << "x" << n.var; break;
    case ExprKind::Add: os << "("; print(os, n.lhs.node()); os << " + "; print(os, n.rhs.node()); os << ")"; break;
    case ExprKind::Sub: os << "("; print(os, n.lhs.node()); os << " - "; print(os, n.rhs.node()); os << ")"; break;
    case ExprKind::Mul: os << "("; print(os, n.lhs.node()); os << " * "; print(os, n.rhs.node()); os << ")"; break;
    case ExprKind::Div: os << "("; print(os, n.lhs.node()); os << " / "; print(os, n.rhs.node()); os << ")"; break;
    case ExprKind::Neg: os << "-"; print(os, n.lhs.node()); break;
    case ExprKind::Unary: os << unary_name(n.fn) << "("; print(os, n.lhs.node()); os << ")"; break;
    case ExprKind::Deriv: os << "d" << n.var << "("; print(os, n.lhs.node()); os << ")"; break;
    case ExprKind::Unknown: os << "f"; break;
    case ExprKind::Integral:
        os << "int[" << n.kernel_name;
        for (std::size_t i = 0; i < n.int_vars.size(); ++i) {
            os << ", x" << n.int_vars[i] << ":";
            limit(n.lower[i]);
            os << "..";
            limit(n.upper[i]);
        }
        os << "]";
        break;
    case ExprKind::Surrogate:
        os << "G" << n.model << "(";
        for (int v = 0; v < kMaxVars; ++v) {
            if (v) os << ",";
            if (n.fixed[v])
                os << *n.fixed[v];
            else
                os << "x" << v;
        }
        os << ")";
        break;
    }
}

} // namespace

Expr::Expr(double c) : Expr(constant(c)) {}

std::string Expr::str() const {
    std::ostringstream os;
    print(os, *node_);
    return os.str();
}

bool Expr::references_unknown() const {
    const ExprNode& n = *node_;
    if (n.kind == ExprKind::Unknown || n.kind == ExprKind::Integral) return true;
    return (n.lhs && n.lhs.references_unknown()) || (n.rhs && n.rhs.references_unknown());
}

int Expr::derivative_depth() const {
    const ExprNode& n = *node_;
    int d = 0;
    if (n.lhs) d = std::max(d, n.lhs.derivative_depth());
    if (n.rhs) d = std::max(d, n.rhs.derivative_depth());
    return d + (n.kind == ExprKind::Deriv ? 1 : 0);
}

Expr constant(double c) {
    ExprNode n;
    n.kind = ExprKind::Const;
    n.value = c;
    return make(std::move(n));
}

Expr input(int var) {
    if (var < 0 || var >= kMaxVars) throw UsageError("expr: input index out of range");
    ExprNode n;
    n.kind = ExprKind::Input;
    n.var = var;
    return make(std::move(n));
}

Expr unknown_f() {
    ExprNode n;
    n.kind = ExprKind::Unknown;
    return make(std::move(n));
}

Expr integral(const std::string& kernel, std::vector<int> vars, std::vector<Limit> lower,
              std::vector<Limit> upper) {
    if (vars.empty() || vars.size() != lower.size() || vars.size() != upper.size())
        throw UsageError("expr: integral needs one limit pair per variable");
    ExprNode n;
    n.kind = ExprKind::Integral;
    n.kernel_name = kernel;
    n.int_vars = std::move(vars);
    n.lower = std::move(lower);
    n.upper = std::move(upper);
    return make(std::move(n));
}

Expr surrogate(int model, FixedCoords fixed) {
    ExprNode n;
    n.kind = ExprKind::Surrogate;
    n.model = model;
    n.fixed = fixed;
    return make(std::move(n));
}

Expr operator+(const Expr& a, const Expr& b) { return binary(ExprKind::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return binary(ExprKind::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return binary(ExprKind::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return binary(ExprKind::Div, a, b); }

Expr operator-(const Expr& a) {
    ExprNode n;
    n.kind = ExprKind::Neg;
    n.lhs = a;
    return make(std::move(n));
}

Expr d(const Expr& e, int var) {
    if (var < 0 || var >= kMaxVars) throw UsageError("expr: derivative variable out of range");
    ExprNode n;
    n.kind = ExprKind::Deriv;
    n.var = var;
    n.lhs = e;
    return make(std::move(n));
}

Expr unary(UnaryKind k, const Expr& e) {
    ExprNode n;
    n.kind = ExprKind::Unary;
    n.fn = k;
    n.lhs = e;
    return make(std::move(n));
}

Expr replace_unknown(const Expr& e, const Expr& f) {
    const ExprNode& n = e.node();
    if (n.kind == ExprKind::Unknown) return f;
    if (!n.lhs && !n.rhs) return e;
    ExprNode copy = n;
    if (n.lhs) copy.lhs = replace_unknown(n.lhs, f);
    if (n.rhs) copy.rhs = replace_unknown(n.rhs, f);
    return make(std::move(copy));
}

Tower evaluate_tower(const Expr& e, std::span<const double> point, const TowerSpace& space,
                     SeedMask seeded) {
    const ExprNode& n = e.node();
    auto sub = [&](const Expr& x) { return evaluate_tower(x, point, space, seeded); };
    switch (n.kind) {
    case ExprKind::Const: return Tower::constant(space, n.value);
    case ExprKind::Input:
        if (n.var >= static_cast<int>(point.size())) throw UsageError("expr: input beyond point");
        return Tower::variable(space, n.var, point[n.var], (seeded >> n.var) & 1u);
    case ExprKind::Add: return sub(n.lhs) + sub(n.rhs);
    case ExprKind::Sub: return sub(n.lhs) - sub(n.rhs);
    case ExprKind::Mul: return sub(n.lhs) * sub(n.rhs);
    case ExprKind::Div: return sub(n.lhs) / sub(n.rhs);
    case ExprKind::Neg: return -sub(n.lhs);
    case ExprKind::Unary: return apply_unary(n.fn, sub(n.lhs));
    case ExprKind::Deriv: return derivative(sub(n.lhs), n.var);
    default: throw UsageError("expr: direct evaluation of f, integral or surrogate node");
    }
}

// ---------------------------------------------------------------------------

Program::Program(const Expr& e, int nvars) : nvars_(nvars) {
    if (nvars < 1 || nvars > kMaxVars) throw UsageError("program: bad variable count");
    if (e.references_unknown())
        throw UsageError("program: expression still references f; substitute it first");
    order_ = e.derivative_depth();
    if (order_ > kMaxOrder)
        throw ConfigError("program: derivative order " + std::to_string(order_) +
                          " exceeds ceiling " + std::to_string(kMaxOrder));

    std::map<const ExprNode*, int> memo;
    std::map<std::pair<int, FixedCoords>, int> leaf_memo;
    auto emit = [&](auto&& self, const Expr& x) -> int {
        const ExprNode* p = x.get();
        if (auto it = memo.find(p); it != memo.end()) return it->second;
        const ExprNode& n = *p;
        Instr in;
        in.kind = n.kind;
        switch (n.kind) {
        case ExprKind::Const: in.value = n.value; break;
        case ExprKind::Input:
            if (n.var >= nvars_) throw UsageError("program: input index beyond variable count");
            in.var = n.var;
            break;
        case ExprKind::Surrogate: {
            const auto key = std::make_pair(n.model, n.fixed);
            if (auto it = leaf_memo.find(key); it != leaf_memo.end()) {
                memo[p] = it->second;
                return it->second;
            }
            in.leaf = static_cast<int>(leaves_.size());
            leaves_.push_back({n.model, n.fixed});
            code_.push_back(in);
            const int id = static_cast<int>(code_.size()) - 1;
            leaf_memo[key] = id;
            memo[p] = id;
            return id;
        }
        case ExprKind::Deriv:
            if (n.var >= nvars_) throw UsageError("program: derivative variable beyond count");
            in.var = n.var;
            in.a = self(self, n.lhs);
            break;
        case ExprKind::Unary:
            in.fn = n.fn;
            in.a = self(self, n.lhs);
            break;
        case ExprKind::Neg: in.a = self(self, n.lhs); break;
        case ExprKind::Add:
        case ExprKind::Sub:
        case ExprKind::Mul:
        case ExprKind::Div:
            in.a = self(self, n.lhs);
            in.b = self(self, n.rhs);
            break;
        case ExprKind::Unknown:
        case ExprKind::Integral: throw UsageError("program: unsubstituted node");
        }
        code_.push_back(in);
        const int id = static_cast<int>(code_.size()) - 1;
        memo[p] = id;
        return id;
    };
    emit(emit, e);

    active_.assign(code_.size(), 0);
    for (std::size_t i = 0; i < code_.size(); ++i) {
        const Instr& in = code_[i];
        active_[i] = in.kind == ExprKind::Surrogate || (in.a >= 0 && active_[in.a]) ||
                     (in.b >= 0 && active_[in.b]);
    }
}

double Program::forward(std::span<const Model* const> models, std::span<const double> point,
                        ProgramScratch& s) const {
    if (static_cast<int>(point.size()) != nvars_) throw UsageError("program: point arity mismatch");
    const TowerSpace& space = TowerSpace::get(nvars_, order_);
    const std::size_t n = code_.size();
    s.values.resize(n);
    s.jac.resize(n);
    s.recip.resize(n);
    s.leaf_ws.resize(leaves_.size());
    s.point.resize(nvars_);

    for (std::size_t i = 0; i < n; ++i) {
        const Instr& in = code_[i];
        Tower& out = s.values[i];
        switch (in.kind) {
        case ExprKind::Const: out = Tower::constant(space, in.value); break;
        case ExprKind::Input: out = Tower::variable(space, in.var, point[in.var]); break;
        case ExprKind::Add: out = s.values[in.a] + s.values[in.b]; break;
        case ExprKind::Sub: out = s.values[in.a] - s.values[in.b]; break;
        case ExprKind::Mul: out = s.values[in.a] * s.values[in.b]; break;
        case ExprKind::Div:
            s.recip[i] = apply_unary(UnaryKind::Reciprocal, s.values[in.b], &s.jac[i]);
            out = s.values[in.a] * s.recip[i];
            break;
        case ExprKind::Neg: out = -s.values[in.a]; break;
        case ExprKind::Unary: out = apply_unary(in.fn, s.values[in.a], &s.jac[i]); break;
        case ExprKind::Deriv: out = derivative(s.values[in.a], in.var); break;
        case ExprKind::Surrogate: {
            const Leaf& leaf = leaves_[in.leaf];
            if (leaf.model < 0 || leaf.model >= static_cast<int>(models.size()))
                throw UsageError("program: surrogate index beyond supplied models");
            SeedMask mask = 0;
            for (int v = 0; v < nvars_; ++v) {
                s.point[v] = leaf.fixed[v] ? *leaf.fixed[v] : point[v];
                if (!leaf.fixed[v]) mask |= 1u << v;
            }
            out = models[leaf.model]->forward(s.point, space, mask, &s.leaf_ws[in.leaf]);
            break;
        }
        case ExprKind::Unknown:
        case ExprKind::Integral: break;
        }
    }
    const Tower& root = s.values[n - 1];
    if (root.valid_order() < 0) throw ConfigError("program: derivative order ceiling exceeded");
    return root.value();
}

void Program::backward(std::span<const Model* const> models, double seed, ProgramScratch& s,
                       std::span<const std::span<double>> grads) const {
    const TowerSpace& space = TowerSpace::get(nvars_, order_);
    const std::size_t n = code_.size();
    s.adj.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        if (active_[i]) s.adj[i] = Tower(space);
    if (!active_[n - 1]) return;
    s.adj[n - 1][0] = seed;

    for (std::size_t ii = n; ii-- > 0;) {
        if (!active_[ii]) continue;
        const Instr& in = code_[ii];
        const Tower& w = s.adj[ii];
        switch (in.kind) {
        case ExprKind::Add:
            if (active_[in.a]) s.adj[in.a] += w;
            if (active_[in.b]) s.adj[in.b] += w;
            break;
        case ExprKind::Sub:
            if (active_[in.a]) s.adj[in.a] += w;
            if (active_[in.b]) s.adj[in.b] -= w;
            break;
        case ExprKind::Neg: s.adj[in.a] -= w; break;
        case ExprKind::Mul:
            if (active_[in.a]) mul_adjoint_accumulate(s.values[in.b], w, s.adj[in.a]);
            if (active_[in.b]) mul_adjoint_accumulate(s.values[in.a], w, s.adj[in.b]);
            break;
        case ExprKind::Div:
            if (active_[in.a]) mul_adjoint_accumulate(s.recip[ii], w, s.adj[in.a]);
            if (active_[in.b]) {
                Tower rbar(space);
                mul_adjoint_accumulate(s.values[in.a], w, rbar);
                mul_adjoint_accumulate(s.jac[ii], rbar, s.adj[in.b]);
            }
            break;
        case ExprKind::Unary: mul_adjoint_accumulate(s.jac[ii], w, s.adj[in.a]); break;
        case ExprKind::Deriv: derivative_adjoint_accumulate(w, in.var, s.adj[in.a]); break;
        case ExprKind::Surrogate: {
            const Leaf& leaf = leaves_[in.leaf];
            models[leaf.model]->backward(s.leaf_ws[in.leaf], w, grads[leaf.model]);
            break;
        }
        default: break;
        }
    }
}

} // namespace autoint
