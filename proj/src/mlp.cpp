#include "autoint/mlp.hpp"

#include "autoint/errors.hpp"

#include <cmath>
#include <random>
#include <string>

namespace autoint {

void MlpConfig::validate() const {
    if (layer_widths.size() < 2) throw ConfigError("mlp: need at least input and output widths");
    for (int w : layer_widths)
        if (w <= 0) throw ConfigError("mlp: layer widths must be positive");
    if (layer_widths.back() != 1) throw ConfigError("mlp: output width must be 1");
    if (layer_widths.front() > kMaxVars) throw ConfigError("mlp: at most 3 inputs supported");
    const auto n = static_cast<std::size_t>(layer_widths.front());
    if (!input_lower.empty() || !input_upper.empty()) {
        if (input_lower.size() != n || input_upper.size() != n)
            throw ConfigError("mlp: input bounds must have one entry per input");
        for (std::size_t i = 0; i < n; ++i)
            if (!(input_upper[i] > input_lower[i]))
                throw ConfigError("mlp: input upper bound must exceed lower bound");
    }
}

std::size_t MlpConfig::num_params() const {
    std::size_t n = 0;
    for (std::size_t l = 1; l < layer_widths.size(); ++l)
        n += static_cast<std::size_t>(layer_widths[l]) * (layer_widths[l - 1] + 1);
    return n;
}

std::vector<double> glorot_init(const MlpConfig& config) {
    config.validate();
    std::mt19937_64 rng(config.init_seed);
    std::vector<double> theta;
    theta.reserve(config.num_params());
    for (std::size_t l = 1; l < config.layer_widths.size(); ++l) {
        const int fan_in = config.layer_widths[l - 1];
        const int fan_out = config.layer_widths[l];
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (int k = 0; k < fan_in * fan_out; ++k) theta.push_back(dist(rng));
        for (int k = 0; k < fan_out; ++k) theta.push_back(0.0);
    }
    return theta;
}

MlpModel::MlpModel(MlpConfig config) : config_(std::move(config)), theta_(glorot_init(config_)) {}

MlpModel::MlpModel(MlpConfig config, std::vector<double> theta)
    : config_(std::move(config)), theta_(std::move(theta)) {
    config_.validate();
    if (theta_.size() != config_.num_params())
        throw ConfigError("mlp: parameter vector has " + std::to_string(theta_.size()) +
                          " entries, architecture needs " + std::to_string(config_.num_params()));
}

void MlpModel::set_params(std::span<const double> theta) {
    if (theta.size() != theta_.size()) throw UsageError("mlp: parameter length mismatch");
    theta_.assign(theta.begin(), theta.end());
}

namespace {

void input_affine(const MlpConfig& c, std::size_t i, double& scale, double& shift) {
    if (c.input_lower.empty()) {
        scale = 1.0;
        shift = 0.0;
        return;
    }
    scale = 2.0 / (c.input_upper[i] - c.input_lower[i]);
    shift = -1.0 - scale * c.input_lower[i];
}

} // namespace

double MlpModel::mlp_forward(std::span<const double> x) const {
    const auto& w = config_.layer_widths;
    if (static_cast<int>(x.size()) != w.front()) throw UsageError("mlp: input arity mismatch");
    std::vector<double> a(x.begin(), x.end()), z;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double s, b;
        input_affine(config_, i, s, b);
        a[i] = s * a[i] + b;
    }
    std::size_t off = 0;
    for (std::size_t l = 1; l < w.size(); ++l) {
        const int in = w[l - 1], out = w[l];
        const double* W = theta_.data() + off;
        const double* bias = W + static_cast<std::size_t>(in) * out;
        z.assign(out, 0.0);
        for (int j = 0; j < out; ++j) {
            double acc = bias[j];
            for (int i = 0; i < in; ++i) acc += W[j * in + i] * a[i];
            z[j] = (l + 1 < w.size()) ? std::tanh(acc) : acc;
        }
        a.swap(z);
        off += static_cast<std::size_t>(in) * out + out;
    }
    return a[0];
}

// Workspace layout: towers = activations of every layer (inputs first),
// aux = tanh'(z) towers of the hidden layers.
Tower MlpModel::forward(std::span<const double> x, const TowerSpace& space, SeedMask seeded,
                        Workspace* ws) const {
    const auto& w = config_.layer_widths;
    if (static_cast<int>(x.size()) != w.front()) throw UsageError("mlp: input arity mismatch");
    if (space.nvars() != w.front()) throw UsageError("mlp: tower space does not match arity");

    Workspace local;
    Workspace& s = ws ? *ws : local;
    std::size_t total = 0, hidden = 0;
    for (std::size_t l = 0; l < w.size(); ++l) total += w[l];
    for (std::size_t l = 1; l + 1 < w.size(); ++l) hidden += w[l];
    s.towers.resize(total);
    s.aux.resize(hidden);

    for (int i = 0; i < w.front(); ++i) {
        double sc, sh;
        input_affine(config_, i, sc, sh);
        Tower t = Tower::variable(space, i, x[i], (seeded >> i) & 1u);
        t *= sc;
        t += sh;
        s.towers[i] = t;
    }

    std::size_t off = 0, in_base = 0, out_base = w.front(), aux_base = 0;
    const int n = space.size();
    for (std::size_t l = 1; l < w.size(); ++l) {
        const int in = w[l - 1], out = w[l];
        const double* W = theta_.data() + off;
        const double* bias = W + static_cast<std::size_t>(in) * out;
        const bool last = l + 1 == w.size();
        for (int j = 0; j < out; ++j) {
            Tower z = Tower::constant(space, bias[j]);
            double* zc = z.coeffs().data();
            with_size(n, [&](auto nn) {
                for (int i = 0; i < in; ++i) {
                    const double wij = W[j * in + i];
                    const double* a = s.towers[in_base + i].coeffs().data();
                    for (int k = 0; k < nn; ++k) zc[k] += wij * a[k];
                }
            });
            if (last) {
                s.towers[out_base + j] = z;
            } else {
                s.towers[out_base + j] = apply_unary(UnaryKind::Tanh, z, &s.aux[aux_base + j]);
            }
        }
        off += static_cast<std::size_t>(in) * out + out;
        in_base = out_base;
        out_base += out;
        if (!last) aux_base += out;
    }
    return s.towers[total - 1];
}

void MlpModel::backward(const Workspace& ws, const Tower& adjoint, std::span<double> grad) const {
    const auto& w = config_.layer_widths;
    const TowerSpace& space = adjoint.space();
    const int n = space.size();

    std::vector<std::size_t> act_base(w.size()), par_base(w.size()), aux_base(w.size());
    {
        std::size_t a = 0, p = 0, x = 0;
        for (std::size_t l = 0; l < w.size(); ++l) {
            act_base[l] = a;
            a += w[l];
            if (l >= 1) {
                par_base[l] = p;
                p += static_cast<std::size_t>(w[l - 1]) * w[l] + w[l];
                aux_base[l] = x;
                if (l + 1 < w.size()) x += w[l];
            }
        }
    }

    // cotangents of the current layer's pre-activations
    std::vector<Tower> zbar{adjoint};
    std::vector<Tower> abar;
    for (std::size_t l = w.size() - 1; l >= 1; --l) {
        const int in = w[l - 1], out = w[l];
        const double* W = theta_.data() + par_base[l];
        double* gW = grad.data() + par_base[l];
        double* gb = gW + static_cast<std::size_t>(in) * out;
        abar.assign(in, Tower(space));
        with_size(n, [&](auto nn) {
            for (int j = 0; j < out; ++j) {
                const double* zb = zbar[j].coeffs().data();
                gb[j] += zb[0];
                for (int i = 0; i < in; ++i) {
                    const double* a = ws.towers[act_base[l - 1] + i].coeffs().data();
                    double d = 0.0;
                    for (int k = 0; k < nn; ++k) d += zb[k] * a[k];
                    gW[j * in + i] += d;
                    if (l > 1) {
                        const double wij = W[j * in + i];
                        double* ab = abar[i].coeffs().data();
                        for (int k = 0; k < nn; ++k) ab[k] += wij * zb[k];
                    }
                }
            }
        });
        if (l == 1) break;
        zbar.assign(in, Tower(space));
        for (int i = 0; i < in; ++i)
            mul_adjoint_accumulate(ws.aux[aux_base[l - 1] + i], abar[i], zbar[i]);
    }
}

nlohmann::json MlpModel::to_json() const {
    return {{"format_version", 1},
            {"kind", "mlp"},
            {"config",
             {{"layer_widths", config_.layer_widths},
              {"init_seed", config_.init_seed},
              {"input_lower", config_.input_lower},
              {"input_upper", config_.input_upper}}},
            {"seed", config_.init_seed},
            {"params", theta_}};
}

MlpModel MlpModel::from_json(const nlohmann::json& j) {
    if (j.at("kind") != "mlp") throw ConfigError("mlp: wrong model kind in file");
    MlpConfig c;
    const auto& cj = j.at("config");
    c.layer_widths = cj.at("layer_widths").get<std::vector<int>>();
    c.init_seed = cj.at("init_seed").get<std::uint64_t>();
    c.input_lower = cj.value("input_lower", std::vector<double>{});
    c.input_upper = cj.value("input_upper", std::vector<double>{});
    return MlpModel(std::move(c), j.at("params").get<std::vector<double>>());
}

} // namespace autoint
