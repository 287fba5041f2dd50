#include "autoint/training.hpp"

#include "autoint/errors.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>

namespace autoint {

CollocationGrid CollocationGrid::explicit_points(std::vector<std::vector<double>> pts) {
    return CollocationGrid{std::move(pts)};
}

CollocationGrid CollocationGrid::product(const std::vector<std::vector<double>>& axes) {
    CollocationGrid g;
    if (axes.empty()) return g;
    std::vector<std::size_t> idx(axes.size(), 0);
    for (const auto& a : axes)
        if (a.empty()) return g;
    while (true) {
        std::vector<double> p(axes.size());
        for (std::size_t k = 0; k < axes.size(); ++k) p[k] = axes[k][idx[k]];
        g.points.push_back(std::move(p));
        std::size_t k = axes.size();
        while (k-- > 0) {
            if (++idx[k] < axes[k].size()) break;
            idx[k] = 0;
            if (k == 0) return g;
        }
    }
}

CollocationGrid CollocationGrid::without(
    const std::function<bool(std::span<const double>)>& exclude) const {
    CollocationGrid g;
    for (const auto& p : points)
        if (!exclude(p)) g.points.push_back(p);
    return g;
}

CollocationGrid CollocationGrid::where(
    const std::function<bool(std::span<const double>)>& keep) const {
    CollocationGrid g;
    for (const auto& p : points)
        if (keep(p)) g.points.push_back(p);
    return g;
}

std::vector<double> linspace(double a, double b, int n) {
    if (n < 1) throw UsageError("linspace: need at least one point");
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = a;
        return out;
    }
    for (int i = 0; i < n; ++i) out[i] = a + (b - a) * i / (n - 1);
    out[n - 1] = b;
    return out;
}

void SurrogateProblem::validate() const {
    if (arity < 1 || arity > kMaxVars) throw ConfigError("problem: bad arity");
    if (num_models < 1) throw ConfigError("problem: no surrogate models");
    if (terms.empty()) throw ConfigError("problem: no loss terms");
    for (const auto& t : terms) {
        if (!(t.weight > 0.0)) throw ConfigError("problem: term '" + t.name + "' weight must be positive");
        if (t.grid.size() == 0) throw ConfigError("problem: term '" + t.name + "' has no points");
        if (!t.targets.empty() && t.targets.size() != t.grid.size())
            throw ConfigError("problem: term '" + t.name + "' target count differs from points");
        for (const auto& p : t.grid.points)
            if (static_cast<int>(p.size()) != arity)
                throw ConfigError("problem: term '" + t.name + "' point arity mismatch");
    }
}

Loss::Loss(const SurrogateProblem& problem, int chunk_size) : chunk_(chunk_size) {
    problem.validate();
    if (chunk_ < 1) throw ConfigError("loss: chunk size must be positive");
    for (const auto& t : problem.terms) {
        Compiled c{t.name, Program(t.expr, problem.arity), t.grid.points, t.targets,
                   t.weight / static_cast<double>(t.grid.size())};
        for (const auto& leaf : c.program.leaves())
            if (leaf.model >= problem.num_models)
                throw ConfigError("loss: term '" + t.name + "' uses an undeclared surrogate");
        if (c.targets.empty()) c.targets.assign(c.points.size(), 0.0);
        terms_.push_back(std::move(c));
    }
    for (std::size_t t = 0; t < terms_.size(); ++t)
        for (std::size_t i = 0; i < terms_[t].points.size(); ++i) items_.emplace_back(t, i);
}

std::size_t Loss::num_params(std::span<const Model* const> models) const {
    std::size_t n = 0;
    for (const Model* m : models) n += m->num_params();
    return n;
}

namespace {

std::vector<std::size_t> param_offsets(std::span<const Model* const> models) {
    std::vector<std::size_t> off(models.size() + 1, 0);
    for (std::size_t m = 0; m < models.size(); ++m) off[m + 1] = off[m] + models[m]->num_params();
    return off;
}

void bind_spans(std::vector<std::span<double>>& spans, double* base,
                const std::vector<std::size_t>& off) {
    spans.resize(off.size() - 1);
    for (std::size_t m = 0; m + 1 < off.size(); ++m)
        spans[m] = std::span<double>(base + off[m], off[m + 1] - off[m]);
}

} // namespace

double Loss::term_value(std::span<const Model* const> models, std::size_t term,
                        std::size_t point) const {
    ProgramScratch s;
    return terms_.at(term).program.forward(models, terms_[term].points.at(point), s);
}

double Loss::evaluate(std::span<const Model* const> models, std::vector<double>* grad,
                      std::vector<double>* per_term, int threads) const {
    const auto off = param_offsets(models);
    const std::size_t P = off.back();
    const std::size_t T = terms_.size();
    const std::size_t nchunks = (items_.size() + chunk_ - 1) / chunk_;
    std::vector<double> chunk_loss(nchunks * T, 0.0);
    std::vector<double> chunk_grad(grad ? nchunks * P : 0, 0.0);
    std::exception_ptr error;
    const int nt = threads > 0 ? threads : omp_get_max_threads();

#pragma omp parallel num_threads(nt)
    {
        std::vector<ProgramScratch> scratch(T);
        std::vector<std::span<double>> spans;
#pragma omp for schedule(dynamic, 1)
        for (long c = 0; c < static_cast<long>(nchunks); ++c) {
            try {
                double* g = grad ? chunk_grad.data() + c * P : nullptr;
                if (g) bind_spans(spans, g, off);
                const std::size_t lo = c * chunk_;
                const std::size_t hi = std::min(items_.size(), lo + chunk_);
                for (std::size_t k = lo; k < hi; ++k) {
                    const auto [t, i] = items_[k];
                    const Compiled& term = terms_[t];
                    const double r = term.program.forward(models, term.points[i], scratch[t]) -
                                     term.targets[i];
                    chunk_loss[c * T + t] += r * r;
                    if (g) term.program.backward(models, 2.0 * term.scale * r, scratch[t], spans);
                }
            } catch (...) {
#pragma omp critical(autoint_loss_error)
                if (!error) error = std::current_exception();
            }
        }
    }
    if (error) std::rethrow_exception(error);

    std::vector<double> sums(T, 0.0);
    for (std::size_t c = 0; c < nchunks; ++c)
        for (std::size_t t = 0; t < T; ++t) sums[t] += chunk_loss[c * T + t];
    double total = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        sums[t] *= terms_[t].scale;
        total += sums[t];
    }
    if (per_term) *per_term = sums;
    if (grad) {
        grad->assign(P, 0.0);
        for (std::size_t c = 0; c < nchunks; ++c) {
            const double* g = chunk_grad.data() + c * P;
            for (std::size_t p = 0; p < P; ++p) (*grad)[p] += g[p];
        }
    }
    return total;
}

double Loss::evaluate_serial(std::span<const Model* const> models, std::vector<double>* grad,
                             std::vector<double>* per_term) const {
    const auto off = param_offsets(models);
    const std::size_t T = terms_.size();
    std::vector<double> sums(T, 0.0);
    std::vector<std::span<double>> spans;
    if (grad) {
        grad->assign(off.back(), 0.0);
        bind_spans(spans, grad->data(), off);
    }
    ProgramScratch s;
    for (std::size_t t = 0; t < T; ++t) {
        const Compiled& term = terms_[t];
        for (std::size_t i = 0; i < term.points.size(); ++i) {
            const double r = term.program.forward(models, term.points[i], s) - term.targets[i];
            sums[t] += r * r;
            if (grad) term.program.backward(models, 2.0 * term.scale * r, s, spans);
        }
    }
    double total = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        sums[t] *= terms_[t].scale;
        total += sums[t];
    }
    if (per_term) *per_term = sums;
    return total;
}

Loss assemble_loss(const SurrogateProblem& problem) { return Loss(problem); }

Algorithm parse_algorithm(const std::string& s) {
    if (s == "adam") return Algorithm::Adam;
    if (s == "adabelief") return Algorithm::AdaBelief;
    throw ConfigError("optimizer: unknown algorithm '" + s + "' (adam | adabelief)");
}

std::string to_string(Algorithm a) { return a == Algorithm::Adam ? "adam" : "adabelief"; }

void OptimizerConfig::validate() const {
    if (!(learning_rate > 0.0)) throw ConfigError("optimizer: learning_rate must be positive");
    if (final_learning_rate && !(*final_learning_rate > 0.0))
        throw ConfigError("optimizer: final_learning_rate must be positive");
    if (!(beta1 > 0.0 && beta1 < 1.0)) throw ConfigError("optimizer: beta1 must lie in (0, 1)");
    if (!(beta2 > 0.0 && beta2 < 1.0)) throw ConfigError("optimizer: beta2 must lie in (0, 1)");
    if (!(epsilon > 0.0)) throw ConfigError("optimizer: epsilon must be positive");
    if (epochs < 0) throw ConfigError("optimizer: epochs must be non-negative");
    if (chunk_size < 1) throw ConfigError("optimizer: chunk_size must be positive");
}

Optimizer::Optimizer(const OptimizerConfig& config, std::size_t n)
    : cfg_(config), m_(n, 0.0), s_(n, 0.0) {
    cfg_.validate();
}

double Optimizer::rate(long t) const {
    if (!cfg_.final_learning_rate || cfg_.epochs < 2) return cfg_.learning_rate;
    const double frac = std::clamp(static_cast<double>(t - 1) / static_cast<double>(cfg_.epochs - 1), 0.0, 1.0);
    return cfg_.learning_rate * std::pow(*cfg_.final_learning_rate / cfg_.learning_rate, frac);
}

void Optimizer::step(std::vector<double>& theta, const std::vector<double>& grad) {
    if (theta.size() != m_.size() || grad.size() != m_.size())
        throw UsageError("optimizer: size mismatch");
    ++t_;
    const double b1 = cfg_.beta1, b2 = cfg_.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    const double lr = rate(t_);
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double g = grad[i];
        m_[i] = b1 * m_[i] + (1.0 - b1) * g;
        if (cfg_.algorithm == Algorithm::Adam) {
            s_[i] = b2 * s_[i] + (1.0 - b2) * g * g;
        } else {
            const double dev = g - m_[i];
            s_[i] = b2 * s_[i] + (1.0 - b2) * dev * dev + cfg_.epsilon;
        }
        const double mhat = m_[i] / c1;
        const double shat = s_[i] / c2;
        theta[i] -= lr * mhat / (std::sqrt(shat) + cfg_.epsilon);
    }
}

namespace {

bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

} // namespace

TrainReport train(const SurrogateProblem& problem, std::vector<Model*> models,
                  const OptimizerConfig& config) {
    config.validate();
    if (static_cast<int>(models.size()) != problem.num_models)
        throw UsageError("train: model count differs from the problem's surrogates");
    for (const Model* m : models)
        if (m->arity() != problem.arity) throw UsageError("train: model arity mismatch");

    const auto t_start = std::chrono::steady_clock::now();
    const Loss loss(problem, config.chunk_size);
    std::vector<const Model*> cmodels(models.begin(), models.end());
    const auto off = param_offsets(cmodels);

    std::vector<double> theta(off.back());
    for (std::size_t m = 0; m < models.size(); ++m) {
        auto p = models[m]->params();
        std::copy(p.begin(), p.end(), theta.begin() + off[m]);
    }
    auto load = [&](const std::vector<double>& th) {
        for (std::size_t m = 0; m < models.size(); ++m)
            models[m]->set_params(std::span<const double>(th.data() + off[m], off[m + 1] - off[m]));
    };

    TrainReport rep;
    rep.seed = config.seed;
    for (std::size_t t = 0; t < loss.num_terms(); ++t) rep.term_names.push_back(loss.term_name(t));

    std::vector<double> grad, terms;
    double current = loss.evaluate(cmodels, &grad, &terms, config.threads);
    if (!std::isfinite(current) || !all_finite(grad))
        throw TrainingError("train: non-finite loss at the initial parameters", 0);
    rep.initial_loss = current;
    rep.initial_terms = terms;

    std::vector<double> best = theta, best_grad = grad, best_terms = terms;
    double best_loss = current;
    rep.best_epoch = config.epochs > 0 ? 0 : -1;

    Optimizer opt(config, theta.size());
    bool stopped = false;
    for (long e = 0; e < config.epochs; ++e) {
        if (e > 0) {
            current = loss.evaluate(cmodels, &grad, &terms, config.threads);
            if (!std::isfinite(current) || !all_finite(grad)) {
                load(best);
                throw TrainingError("train: non-finite loss at epoch " + std::to_string(e), e);
            }
        }
        rep.loss_history.push_back(current);
        rep.term_history.push_back(terms);
        rep.epochs_run = e + 1;
        if (current < best_loss) {
            best_loss = current;
            best = theta;
            best_grad = grad;
            best_terms = terms;
            rep.best_epoch = e;
        }
        if (config.log_every > 0 && e % config.log_every == 0) {
            std::fprintf(stderr, "epoch %ld loss %.6e\n", e, current);
        }
        if (config.target_loss && current <= *config.target_loss) {
            stopped = true;
            break;
        }
        opt.step(theta, grad);
        load(theta);
    }
    if (config.epochs > 0 && !stopped) {
        current = loss.evaluate(cmodels, &grad, &terms, config.threads);
        if (std::isfinite(current) && all_finite(grad) && current < best_loss) {
            best_loss = current;
            best = theta;
            best_grad = grad;
            best_terms = terms;
            rep.best_epoch = config.epochs;
        }
    }
    load(best);

    rep.final_loss = best_loss;
    rep.final_terms = best_terms;
    rep.final_grad_norm = norm2(best_grad);
    rep.converged = config.target_loss && best_loss <= *config.target_loss;
    for (const Model* m : models) {
        auto p = m->params();
        rep.final_params.emplace_back(p.begin(), p.end());
    }
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rep;
}

nlohmann::json TrainReport::to_json() const {
    nlohmann::json j;
    j["term_names"] = term_names;
    j["loss_history"] = loss_history;
    j["term_history"] = term_history;
    j["initial_loss"] = initial_loss;
    j["final_loss"] = final_loss;
    j["initial_terms"] = initial_terms;
    j["final_terms"] = final_terms;
    j["final_grad_norm"] = final_grad_norm;
    j["epochs_run"] = epochs_run;
    j["best_epoch"] = best_epoch;
    j["converged"] = converged;
    j["seed"] = seed;
    j["wall_seconds"] = wall_seconds;
    j["final_params"] = final_params;
    return j;
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void TrainReport::write_loss_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw UsageError("cannot write " + path);
    os << "epoch,total";
    for (const auto& n : term_names) os << ',' << n;
    os << '\n';
    for (std::size_t e = 0; e < loss_history.size(); ++e) {
        os << e << ',' << format_number(loss_history[e]);
        for (double v : term_history[e]) os << ',' << format_number(v);
        os << '\n';
    }
}

} // namespace autoint
