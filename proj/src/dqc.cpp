#include "autoint/dqc.hpp"

#include "autoint/errors.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace autoint {

using cplx = std::complex<double>;

void DqcConfig::validate() const {
    if (n_qubits < 1 || n_qubits > 12) throw ConfigError("dqc: n_qubits must be in [1, 12]");
    if (ansatz_depth < 0) throw ConfigError("dqc: ansatz depth must be non-negative");
    if (!(domain_upper > domain_lower)) throw ConfigError("dqc: empty input domain");
    if (!(rescale_bound > 0.0 && rescale_bound < 1.0))
        throw ConfigError("dqc: rescale bound must lie in (0, 1)");
}

double DqcConfig::rescale(double x) const {
    return rescale_bound * (2.0 * (x - domain_lower) / (domain_upper - domain_lower) - 1.0);
}

namespace {

enum class GateKind { Rx, Rz, Cnot };

struct Gate {
    GateKind kind;
    int q;
    int target; // CNOT only
    int param;  // -1 for CNOT
};

std::vector<Gate> ansatz_gates(const DqcConfig& c) {
    std::vector<Gate> g;
    int p = 0;
    for (int layer = 0; layer < c.ansatz_depth; ++layer) {
        for (int q = 0; q < c.n_qubits; ++q) {
            g.push_back({GateKind::Rx, q, -1, p++});
            g.push_back({GateKind::Rz, q, -1, p++});
            g.push_back({GateKind::Rx, q, -1, p++});
        }
        for (int q = 0; q + 1 < c.n_qubits; ++q) g.push_back({GateKind::Cnot, q, q + 1, -1});
    }
    return g;
}

struct Mat2 {
    cplx a, b, c, d; // [[a, b], [c, d]]
};

Mat2 gate_matrix(GateKind k, double theta) {
    const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
    const cplx i(0.0, 1.0);
    if (k == GateKind::Rx) return {c, -i * s, -i * s, c};
    return {cplx(c, -s), 0.0, 0.0, cplx(c, s)};
}

Mat2 gate_derivative(GateKind k, double theta) {
    const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
    const cplx i(0.0, 1.0);
    if (k == GateKind::Rx) return {-0.5 * s, -0.5 * i * c, -0.5 * i * c, -0.5 * s};
    return {0.5 * cplx(-s, -c), 0.0, 0.0, 0.5 * cplx(-s, c)};
}

Mat2 dagger(const Mat2& m) { return {std::conj(m.a), std::conj(m.c), std::conj(m.b), std::conj(m.d)}; }

// State stored as `layers` consecutive statevectors of length dim.
void apply_1q(std::vector<cplx>& psi, int layers, std::size_t dim, int q, const Mat2& m) {
    const std::size_t bit = std::size_t{1} << q;
    for (int l = 0; l < layers; ++l) {
        cplx* v = psi.data() + l * dim;
        for (std::size_t i = 0; i < dim; ++i) {
            if (i & bit) continue;
            const cplx x0 = v[i], x1 = v[i | bit];
            v[i] = m.a * x0 + m.b * x1;
            v[i | bit] = m.c * x0 + m.d * x1;
        }
    }
}

void apply_cnot(std::vector<cplx>& psi, int layers, std::size_t dim, int control, int target) {
    const std::size_t cb = std::size_t{1} << control, tb = std::size_t{1} << target;
    for (int l = 0; l < layers; ++l) {
        cplx* v = psi.data() + l * dim;
        for (std::size_t i = 0; i < dim; ++i)
            if ((i & cb) && !(i & tb)) std::swap(v[i], v[i | tb]);
    }
}

void apply_gate(std::vector<cplx>& psi, int layers, std::size_t dim, const Gate& g,
                std::span<const double> theta, bool inverse) {
    if (g.kind == GateKind::Cnot) {
        apply_cnot(psi, layers, dim, g.q, g.target);
        return;
    }
    const Mat2 m = gate_matrix(g.kind, theta[g.param]);
    apply_1q(psi, layers, dim, g.q, inverse ? dagger(m) : m);
}

std::vector<double> magnetisation(int n) {
    const std::size_t dim = std::size_t{1} << n;
    std::vector<double> z(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        int ones = 0;
        for (int q = 0; q < n; ++q) ones += (i >> q) & 1;
        z[i] = n - 2.0 * ones;
    }
    return z;
}

} // namespace

DqcModel::DqcModel(DqcConfig config) : config_(config) {
    config_.validate();
    std::mt19937_64 rng(config_.init_seed);
    std::uniform_real_distribution<double> dist(0.0, 2.0 * std::numbers::pi);
    theta_.resize(config_.num_params());
    for (auto& t : theta_) t = dist(rng);
}

DqcModel::DqcModel(DqcConfig config, std::vector<double> theta)
    : config_(config), theta_(std::move(theta)) {
    config_.validate();
    if (theta_.size() != config_.num_params())
        throw ConfigError("dqc: parameter vector length does not match ansatz");
}

void DqcModel::set_params(std::span<const double> theta) {
    if (theta.size() != theta_.size()) throw UsageError("dqc: parameter length mismatch");
    theta_.assign(theta.begin(), theta.end());
}

std::vector<cplx> dqc_statevector(const DqcConfig& config, std::span<const double> theta,
                                  std::span<const double> angles) {
    config.validate();
    if (static_cast<int>(angles.size()) != config.n_qubits)
        throw UsageError("dqc: need one feature-map angle per qubit");
    const std::size_t dim = std::size_t{1} << config.n_qubits;
    std::vector<cplx> psi(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        double amp = 1.0;
        for (int q = 0; q < config.n_qubits; ++q)
            amp *= ((i >> q) & 1) ? std::sin(0.5 * angles[q]) : std::cos(0.5 * angles[q]);
        psi[i] = amp;
    }
    for (const auto& g : ansatz_gates(config)) apply_gate(psi, 1, dim, g, theta, false);
    return psi;
}

double dqc_expectation_from_angles(const DqcConfig& config, std::span<const double> theta,
                                   std::span<const double> angles) {
    const auto psi = dqc_statevector(config, theta, angles);
    const auto z = magnetisation(config.n_qubits);
    double e = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) e += z[i] * std::norm(psi[i]);
    return e;
}

Tower DqcModel::forward(std::span<const double> x, const TowerSpace& space, SeedMask seeded,
                        Workspace* ws) const {
    if (x.size() != 1) throw UsageError("dqc: single input expected");
    if (space.nvars() != 1) throw UsageError("dqc: tower space must be univariate");
    const double xr = config_.rescale(x[0]);
    if (!(std::abs(xr) < 1.0))
        throw DomainError("dqc: rescaled input " + std::to_string(xr) + " outside (-1, 1)");

    const int n = config_.n_qubits;
    const std::size_t dim = std::size_t{1} << n;
    const int layers = space.size();

    const double slope =
        2.0 * config_.rescale_bound / (config_.domain_upper - config_.domain_lower);
    Tower xt = Tower::variable(space, 0, x[0], seeded & 1u);
    xt *= slope;
    xt += xr - slope * x[0];
    const Tower phase = acos(xt);

    std::vector<Tower> c(n), s(n);
    for (int q = 0; q < n; ++q) {
        const Tower half = phase * static_cast<double>(q + 1);
        c[q] = cos(half);
        s[q] = sin(half);
    }
    std::vector<cplx> psi(layers * dim);
    for (std::size_t i = 0; i < dim; ++i) {
        Tower amp = ((i >> 0) & 1) ? s[0] : c[0];
        for (int q = 1; q < n; ++q) amp = amp * (((i >> q) & 1) ? s[q] : c[q]);
        for (int l = 0; l < layers; ++l) psi[l * dim + i] = amp[l];
    }
    for (const auto& g : ansatz_gates(config_)) apply_gate(psi, layers, dim, g, theta_, false);

    const auto z = magnetisation(n);
    Tower out(space);
    for (const auto& t : space.mul_terms()) {
        const cplx* a = psi.data() + t.lhs * dim;
        const cplx* b = psi.data() + t.rhs * dim;
        double acc = 0.0;
        for (std::size_t i = 0; i < dim; ++i) acc += z[i] * (std::conj(a[i]) * b[i]).real();
        out[t.out] += acc;
    }
    out.set_valid_order(phase.valid_order());

    if (ws) {
        ws->scratch.resize(2 * psi.size());
        for (std::size_t k = 0; k < psi.size(); ++k) {
            ws->scratch[2 * k] = psi[k].real();
            ws->scratch[2 * k + 1] = psi[k].imag();
        }
    }
    return out;
}

void DqcModel::backward(const Workspace& ws, const Tower& adjoint, std::span<double> grad) const {
    const TowerSpace& space = adjoint.space();
    const int layers = space.size();
    const std::size_t dim = std::size_t{1} << config_.n_qubits;
    std::vector<cplx> psi(layers * dim);
    for (std::size_t k = 0; k < psi.size(); ++k)
        psi[k] = cplx(ws.scratch[2 * k], ws.scratch[2 * k + 1]);

    // rho_eta = sum_gamma wbar_{gamma+eta} O psi_gamma
    const auto z = magnetisation(config_.n_qubits);
    std::vector<cplx> rho(layers * dim, 0.0);
    for (const auto& t : space.mul_terms()) {
        const double w = adjoint[t.out];
        if (w == 0.0) continue;
        const cplx* a = psi.data() + t.lhs * dim;
        cplx* r = rho.data() + t.rhs * dim;
        for (std::size_t i = 0; i < dim; ++i) r[i] += w * z[i] * a[i];
    }

    const auto gates = ansatz_gates(config_);
    std::vector<cplx> dpsi;
    for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
        const Gate& g = *it;
        apply_gate(psi, layers, dim, g, theta_, true);
        if (g.param >= 0) {
            dpsi = psi;
            apply_1q(dpsi, layers, dim, g.q, gate_derivative(g.kind, theta_[g.param]));
            double acc = 0.0;
            for (std::size_t k = 0; k < dpsi.size(); ++k) acc += (std::conj(rho[k]) * dpsi[k]).real();
            grad[g.param] += 2.0 * acc;
        }
        apply_gate(rho, layers, dim, g, theta_, true);
    }
}

double DqcModel::dqc_forward(double x) const {
    const double in[1] = {x};
    return value(in);
}

nlohmann::json DqcModel::to_json() const {
    return {{"format_version", 1},
            {"kind", "dqc"},
            {"config",
             {{"n_qubits", config_.n_qubits},
              {"ansatz_depth", config_.ansatz_depth},
              {"init_seed", config_.init_seed},
              {"domain_lower", config_.domain_lower},
              {"domain_upper", config_.domain_upper},
              {"rescale_bound", config_.rescale_bound}}},
            {"seed", config_.init_seed},
            {"params", theta_}};
}

DqcModel DqcModel::from_json(const nlohmann::json& j) {
    if (j.at("kind") != "dqc") throw ConfigError("dqc: wrong model kind in file");
    const auto& cj = j.at("config");
    DqcConfig c;
    c.n_qubits = cj.at("n_qubits");
    c.ansatz_depth = cj.at("ansatz_depth");
    c.init_seed = cj.at("init_seed");
    c.domain_lower = cj.at("domain_lower");
    c.domain_upper = cj.at("domain_upper");
    c.rescale_bound = cj.at("rescale_bound");
    return DqcModel(c, j.at("params").get<std::vector<double>>());
}

double dqc_parameter_shift_check(const DqcModel& model, double x, std::size_t param_index) {
    if (param_index >= model.num_params()) throw UsageError("dqc: parameter index out of range");
    const TowerSpace& sp = TowerSpace::get(1, 0);
    const double in[1] = {x};
    Workspace ws;
    const Tower out = model.forward(in, sp, 0u, &ws);
    (void)out;
    std::vector<double> grad(model.num_params(), 0.0);
    model.backward(ws, Tower::constant(sp, 1.0), grad);

    std::vector<double> theta(model.params().begin(), model.params().end());
    DqcModel shifted = model;
    theta[param_index] += 0.5 * std::numbers::pi;
    shifted.set_params(theta);
    const double plus = shifted.dqc_forward(x);
    theta[param_index] -= std::numbers::pi;
    shifted.set_params(theta);
    const double minus = shifted.dqc_forward(x);
    const double shift = 0.5 * (plus - minus);
    const double analytic = grad[param_index];
    // near-zero gradients are compared absolutely
    return std::abs(analytic - shift) / std::max(std::abs(shift), 1.0);
}

} // namespace autoint
