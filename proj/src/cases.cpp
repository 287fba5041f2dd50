#include "autoint/cases.hpp"

#include "autoint/dqc.hpp"
#include "autoint/errors.hpp"
#include "autoint/mlp.hpp"
#include "autoint/oracles.hpp"
#include "autoint/pinning.hpp"

#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

namespace autoint {

namespace fs = std::filesystem;
using namespace problems;

std::string output_root() {
    const char* env = std::getenv("AUTOINT_OUTPUT_ROOT");
    return env && *env ? env : "autoint_out";
}

RunConfig load_run_config(const std::string& case_id, const std::string& path,
                          const std::vector<std::pair<std::string, std::string>>& overrides,
                          std::ostream* notices) {
    RunConfig cfg = path.empty() ? RunConfig{} : RunConfig::from_ini_file(path);
    for (const auto& [k, v] : overrides) cfg.set(k, v);
    std::string id = case_id;
    if (id.empty()) {
        if (!cfg.has("run", "case")) throw ConfigError("config: no case given");
        id = cfg.get("run", "case");
    } else if (cfg.has("run", "case") && cfg.get("run", "case") != id) {
        throw ConfigError("config: file is for case '" + cfg.get("run", "case") +
                          "', requested '" + id + "'");
    }
    if (id == "custom") {
        throw ConfigError("config: case 'custom' has no runner; build the problem through the library");
    }
    cfg.resolve(case_schema(id), notices);
    return cfg;
}

OptimizerConfig optimizer_from(const RunConfig& c) {
    OptimizerConfig o;
    o.algorithm = parse_algorithm(c.get("optimizer", "algorithm"));
    o.learning_rate = c.get_double("optimizer", "learning_rate");
    if (!c.get("optimizer", "final_learning_rate").empty())
        o.final_learning_rate = c.get_double("optimizer", "final_learning_rate");
    o.beta1 = c.get_double("optimizer", "beta1");
    o.beta2 = c.get_double("optimizer", "beta2");
    o.epsilon = c.get_double("optimizer", "epsilon");
    o.epochs = c.get_int("optimizer", "epochs");
    if (!c.get("optimizer", "target_loss").empty())
        o.target_loss = c.get_double("optimizer", "target_loss");
    o.threads = static_cast<int>(c.get_int("optimizer", "threads"));
    o.chunk_size = static_cast<int>(c.get_int("optimizer", "chunk_size"));
    o.log_every = c.get_int("optimizer", "log_every");
    o.seed = static_cast<std::uint64_t>(c.get_int("run", "seed"));
    o.validate();
    return o;
}

namespace {

int get_count(const RunConfig& c, const std::string& s, const std::string& k) {
    long v = c.get_int(s, k);
    if (v < 0 || v > 1000000) throw ConfigError("config: " + s + "." + k + " out of range");
    return static_cast<int>(v);
}

DensityMethod density_from(const RunConfig& c) {
    return parse_density_method(c.get("data", "density"));
}

} // namespace

OuParams ou_params_from(const RunConfig& c) {
    OuParams p;
    p.process = {c.get_double("constants", "sigma"), c.get_double("constants", "nu"),
                 c.get_double("constants", "x0"), c.get_double("constants", "t0")};
    p.strike = c.get_double("constants", "strike");
    p.terminal = c.get_double("constants", "terminal");
    p.x_min = c.get_double("grid", "x_min");
    p.x_max = c.get_double("grid", "x_max");
    p.t_min = c.get_double("grid", "t_min");
    p.t_max = c.get_double("grid", "t_max");
    p.nx = get_count(c, "grid", "nx");
    p.nt = get_count(c, "grid", "nt");
    p.samples = get_count(c, "data", "samples");
    p.density = density_from(c);
    p.bins = get_count(c, "data", "bins");
    p.form = parse_data_form(c.get("data", "form"));
    p.data_weight = c.get_double("loss", "data_weight");
    p.residual_weight = c.get_double("loss", "residual_weight");
    p.validate();
    return p;
}

BasketParams basket_params_from(const RunConfig& c) {
    BasketParams p;
    p.first = {c.get_double("constants", "sigma1"), c.get_double("constants", "nu1"),
               c.get_double("constants", "x01"), 0.0};
    p.second = {c.get_double("constants", "sigma2"), c.get_double("constants", "nu2"),
                c.get_double("constants", "x02"), 0.0};
    p.x1_min = c.get_double("grid", "x1_min");
    p.x1_max = c.get_double("grid", "x1_max");
    p.x2_min = c.get_double("grid", "x2_min");
    p.x2_max = c.get_double("grid", "x2_max");
    p.t_min = c.get_double("grid", "t_min");
    p.t_max = c.get_double("grid", "t_max");
    p.nx1 = get_count(c, "grid", "nx1");
    p.nx2 = get_count(c, "grid", "nx2");
    p.nt = get_count(c, "grid", "nt");
    p.samples = get_count(c, "data", "samples");
    p.density = density_from(c);
    p.bins = get_count(c, "data", "bins");
    p.form = parse_data_form(c.get("data", "form"));
    p.data_weight = c.get_double("loss", "data_weight");
    p.validate();
    return p;
}

VesselParams vessel_params_from(const RunConfig& c, double omega) {
    VesselParams p;
    p.vessel = {c.get_double("constants", "rho"), c.get_double("constants", "width"),
                c.get_double("constants", "radius"), c.get_double("constants", "h0"),
                c.get_double("constants", "g")};
    p.omega = omega;
    p.p_air = c.get_double("constants", "p_air");
    p.nr = get_count(c, "grid", "nr");
    p.r_min_fraction = c.get_double("grid", "r_min_fraction");
    const std::string mode = c.get("loss", "volume");
    if (mode == "surrogate") p.volume_surrogate = true;
    else if (mode == "closed_form") p.volume_surrogate = false;
    else throw ConfigError("config: loss.volume must be surrogate or closed_form");
    p.residual_weight = c.get_double("loss", "residual_weight");
    p.volume_weight = c.get_double("loss", "volume_weight");
    p.coupling_weight = c.get_double("loss", "coupling_weight");
    p.validate();
    return p;
}

AdvectionParams advection_params_from(const RunConfig& c) {
    AdvectionParams p;
    auto& a = p.physics;
    a.v = c.get_double("constants", "v");
    a.D = c.get_double("constants", "D");
    a.lambda = c.get_double("constants", "lambda");
    a.obs_x = c.get_double("constants", "obs_x");
    a.obs_y = c.get_double("constants", "obs_y");
    a.obs_z = c.get_double("constants", "obs_z");
    a.mass = c.get_double("constants", "mass");
    a.center = c.get_double("constants", "center");
    a.width = c.get_double("constants", "width");
    a.t_init = c.get_double("constants", "t_init");
    a.x_min = c.get_double("grid", "x_min");
    a.x_max = c.get_double("grid", "x_max");
    p.t_max = c.get_double("grid", "t_max");
    p.nx = get_count(c, "grid", "nx");
    p.nt = get_count(c, "grid", "nt");
    p.n_initial = get_count(c, "grid", "n_initial");
    p.residual_weight = c.get_double("loss", "residual_weight");
    p.initial_weight = c.get_double("loss", "initial_weight");
    p.boundary_weight = c.get_double("loss", "boundary_weight");
    p.validate();
    return p;
}

PopulationParams population_params_from(const RunConfig& c) {
    PopulationParams p;
    p.t_max = c.get_double("constants", "t_max");
    p.points = get_count(c, "grid", "points");
    p.validate();
    return p;
}

std::unique_ptr<Model> make_model(const RunConfig& c, std::span<const double> lower,
                                  std::span<const double> upper, std::uint64_t init_seed) {
    const std::string kind = c.get("run", "model");
    if (kind == "mlp") {
        MlpConfig m;
        m.layer_widths.push_back(static_cast<int>(lower.size()));
        for (double h : c.get_list("model", "hidden")) {
            if (h < 1 || h != std::floor(h)) throw ConfigError("config: model.hidden needs positive integers");
            m.layer_widths.push_back(static_cast<int>(h));
        }
        m.layer_widths.push_back(1);
        m.init_seed = init_seed;
        if (c.get_bool("model", "input_scaling")) {
            m.input_lower.assign(lower.begin(), lower.end());
            m.input_upper.assign(upper.begin(), upper.end());
        }
        return std::make_unique<MlpModel>(std::move(m));
    }
    if (kind == "dqc") {
        if (lower.size() != 1) throw ConfigError("config: the dqc model takes a single input");
        DqcConfig d;
        d.n_qubits = static_cast<int>(c.get_int("model", "n_qubits"));
        d.ansatz_depth = static_cast<int>(c.get_int("model", "depth"));
        d.rescale_bound = c.get_double("model", "rescale_bound");
        d.init_seed = init_seed;
        d.domain_lower = lower[0];
        d.domain_upper = upper[0];
        return std::make_unique<DqcModel>(d);
    }
    throw ConfigError("config: run.model must be mlp or dqc, got '" + kind + "'");
}

namespace {

struct Job {
    std::string name;
    SurrogateProblem problem;
    std::vector<std::unique_ptr<Model>> models;
    OptimizerConfig opt;
    TrainReport report;
};

/// Train every job; with jobs > 1 they run concurrently on one thread each.
void run_jobs(std::vector<Job>& jobs, const CaseOptions& o) {
    const int n = static_cast<int>(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    const int par = std::max(1, std::min(o.jobs, n));
    if (par > 1)
        for (auto& j : jobs) j.opt.threads = 1;
#pragma omp parallel for num_threads(par) schedule(dynamic, 1) if (par > 1)
    for (int i = 0; i < n; ++i) {
        try {
            std::vector<Model*> ms;
            for (auto& m : jobs[i].models) ms.push_back(m.get());
            if (o.log && par == 1) *o.log << "training " << jobs[i].name << "\n";
            jobs[i].report = train(jobs[i].problem, ms, jobs[i].opt);
            if (o.log) {
#pragma omp critical(autoint_case_log)
                *o.log << jobs[i].name << ": loss " << format_number(jobs[i].report.initial_loss)
                       << " -> " << format_number(jobs[i].report.final_loss) << " in "
                       << jobs[i].report.epochs_run << " epochs\n";
            }
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

void collect(CaseArtifacts& art, std::vector<Job>& jobs,
             const std::vector<std::vector<std::string>>& model_names) {
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        art.reports.emplace_back(jobs[i].name, std::move(jobs[i].report));
        for (std::size_t m = 0; m < jobs[i].models.size(); ++m)
            art.models.emplace_back(model_names[i][m], std::move(jobs[i].models[m]));
    }
}

std::string tag(const char* what, double v) { return std::string(what) + "=" + format_number(v); }

CaseArtifacts run_ou(const RunConfig& c, const CaseOptions& o, bool asian) {
    const OuParams p = ou_params_from(c);
    const OptimizerConfig opt = optimizer_from(c);
    const std::uint64_t sample_seed = opt.seed + kSampleSeedOffset;
    const double lo[] = {p.x_min, p.t_min}, hi[] = {p.x_max, p.t_max};

    std::vector<Job> jobs(2);
    for (int m = 0; m < 2; ++m) {
        jobs[m].name = m == 0 ? "g1" : "g2";
        jobs[m].problem = european_option_problem(p, m + 1, sample_seed);
        jobs[m].models.push_back(make_model(c, lo, hi, opt.seed + m));
        jobs[m].opt = opt;
    }
    run_jobs(jobs, o);
    const Model& g1 = *jobs[0].models[0];
    const Model& g2 = *jobs[1].models[0];

    CaseArtifacts art;
    art.case_id = asian ? "asian" : "european";
    if (!asian) {
        const auto r = moment_readout(g1, g2, p, p.terminal);
        const double mean = oracle::ou_mean(p.terminal, p.process);
        const double sd = std::sqrt(oracle::ou_variance(p.terminal, p.process));
        const double pay = std::max(mean - p.strike, 0.0);
        art.results_header = {"t", "payoff_nn", "std_nn", "payoff_analytic", "std_analytic"};
        art.results.push_back({p.terminal, payoff(r, p.strike), r.stddev, pay, sd});
        art.comparison.push_back({"payoff", payoff(r, p.strike), pay});
        art.comparison.push_back({"std", r.stddev, sd});
    } else {
        const auto times = c.get_list("grid", "asian_times");
        const auto rs = asian_readout(g1, g2, p, times);
        art.results_header = {"t", "mean_nn", "mean_analytic", "std_nn", "std_analytic"};
        double avg_nn = 0.0, avg_ex = 0.0;
        for (const auto& r : rs) {
            const double mean = oracle::ou_mean(r.t, p.process);
            const double sd = std::sqrt(oracle::ou_variance(r.t, p.process));
            art.results.push_back({r.t, r.mean, mean, r.stddev, sd});
            art.comparison.push_back({tag("mean@t", r.t), r.mean, mean});
            art.comparison.push_back({tag("std@t", r.t), r.stddev, sd});
            avg_nn += r.mean / static_cast<double>(rs.size());
            avg_ex += mean / static_cast<double>(rs.size());
        }
        art.comparison.push_back(
            {"average_payoff", std::max(avg_nn - p.strike, 0.0), std::max(avg_ex - p.strike, 0.0)});
    }
    collect(art, jobs, {{"g1"}, {"g2"}});
    return art;
}

CaseArtifacts run_basket(const RunConfig& c, const CaseOptions& o) {
    const BasketParams p = basket_params_from(c);
    const OptimizerConfig opt = optimizer_from(c);
    const double lo[] = {p.x1_min, p.x2_min, p.t_min}, hi[] = {p.x1_max, p.x2_max, p.t_max};
    std::vector<Job> jobs(1);
    jobs[0].name = "g";
    jobs[0].problem = basket_option_problem(p, opt.seed + kSampleSeedOffset);
    jobs[0].models.push_back(make_model(c, lo, hi, opt.seed));
    jobs[0].opt = opt;
    run_jobs(jobs, o);

    CaseArtifacts art;
    art.case_id = "basket";
    art.results_header = {"t", "E_nn", "E_analytic"};
    const int n = get_count(c, "grid", "n_readout");
    for (double t : n == 1 ? std::vector<double>{p.t_min} : linspace(p.t_min, p.t_max, n)) {
        const double e = basket_readout(*jobs[0].models[0], p, t);
        const double ex = oracle::basket_mean(t, p.first, p.second);
        art.results.push_back({t, e, ex});
        art.comparison.push_back({tag("E@t", t), e, ex});
    }
    collect(art, jobs, {{"g"}});
    return art;
}

CaseArtifacts run_moi(const RunConfig& c, const CaseOptions& o) {
    const auto omegas = c.get_list("constants", "omega_sweep");
    if (omegas.empty()) throw ConfigError("config: constants.omega_sweep is empty");
    const OptimizerConfig opt = optimizer_from(c);
    std::vector<Job> jobs(omegas.size());
    std::vector<std::vector<std::string>> names;
    std::vector<VesselParams> params;
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        params.push_back(vessel_params_from(c, omegas[i]));
        const double lo[] = {0.0}, hi[] = {params[i].vessel.radius};
        auto& j = jobs[i];
        j.name = "omega_" + std::to_string(i);
        j.problem = moment_of_inertia_problem(params[i]);
        j.opt = opt;
        j.opt.seed = opt.seed + i;
        names.push_back({});
        for (int m = 0; m < j.problem.num_models; ++m) {
            j.models.push_back(make_model(c, lo, hi, opt.seed + i + 1000 * m));
            names.back().push_back(j.name + (m == 0 ? "_g" : "_h"));
        }
    }
    run_jobs(jobs, o);

    CaseArtifacts art;
    art.case_id = "moi";
    art.results_header = {"omega", "I_nn", "I_exact"};
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        const double I = moi_readout(*jobs[i].models[0], params[i]);
        const double ex = oracle::moi_exact(omegas[i], params[i].vessel);
        art.results.push_back({omegas[i], I, ex});
        art.comparison.push_back({tag("I@omega", omegas[i]), I, ex});
    }
    collect(art, jobs, names);
    return art;
}

CaseArtifacts run_potential(const RunConfig& c, const CaseOptions& o) {
    const AdvectionParams p = advection_params_from(c);
    const OptimizerConfig opt = optimizer_from(c);
    const double lo[] = {p.physics.x_min, p.physics.t_init}, hi[] = {p.physics.x_max, p.t_max};
    std::vector<Job> jobs(1);
    jobs[0].name = "g";
    jobs[0].problem = potential_problem(p);
    jobs[0].models.push_back(make_model(c, lo, hi, opt.seed));
    jobs[0].opt = opt;
    run_jobs(jobs, o);

    CaseArtifacts art;
    art.case_id = "potential";
    art.results_header = {"t", "V_nn", "V_oracle"};
    oracle::QuadratureRule rule;
    rule.scheme = oracle::Scheme::AdaptiveSimpson;
    rule.tolerance = 1e-10;
    const int n = get_count(c, "grid", "n_readout");
    for (double t : n == 1 ? std::vector<double>{p.t_max} : linspace(p.physics.t_init, p.t_max, n)) {
        const double v = potential_readout(*jobs[0].models[0], p, t);
        const double ex = oracle::potential(t, p.physics, rule);
        art.results.push_back({t, v, ex});
        art.comparison.push_back({tag("V@t", t), v, ex});
    }
    collect(art, jobs, {{"g"}});
    return art;
}

CaseArtifacts run_population(const RunConfig& c, const CaseOptions& o) {
    const PopulationParams p = population_params_from(c);
    const OptimizerConfig opt = optimizer_from(c);
    const double lo[] = {0.0}, hi[] = {p.t_max};
    std::vector<Job> jobs(1);
    jobs[0].name = "g";
    jobs[0].problem = population_problem(p);
    auto inner = make_model(c, lo, hi, opt.seed);
    jobs[0].models.push_back(pin_boundary(*inner, population_pins(), p.t_max));
    jobs[0].opt = opt;
    run_jobs(jobs, o);

    CaseArtifacts art;
    art.case_id = "population";
    art.results_header = {"t", "b_nn", "b_exact"};
    const int n = get_count(c, "grid", "n_readout");
    for (double t : n == 1 ? std::vector<double>{0.0} : linspace(0.0, p.t_max, n)) {
        const double b = population_readout(*jobs[0].models[0], t);
        const double ex = oracle::population_exact(t);
        art.results.push_back({t, b, ex});
        art.comparison.push_back({tag("b@t", t), b, ex});
    }
    collect(art, jobs, {{"g"}});
    return art;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream os(path);
    if (!os) throw UsageError("cannot write " + path);
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << '\n';
    }
}

double rel_error(const ComparisonRow& r) {
    const double a = std::abs(r.learned - r.oracle);
    if (r.oracle == 0.0) return a == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return a / std::abs(r.oracle);
}

} // namespace

CaseArtifacts run_case(const RunConfig& c, const CaseOptions& o) {
    const std::string id = c.get("run", "case");
    if (id == "european") return run_ou(c, o, false);
    if (id == "asian") return run_ou(c, o, true);
    if (id == "basket") return run_basket(c, o);
    if (id == "moi") return run_moi(c, o);
    if (id == "potential") return run_potential(c, o);
    if (id == "population") return run_population(c, o);
    throw ConfigError("config: case '" + id + "' has no runner");
}

void write_artifacts(const CaseArtifacts& art, const RunConfig& cfg, const std::string& dir) {
    fs::create_directories(dir);
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : art.results) {
        rows.emplace_back();
        for (double v : r) rows.back().push_back(format_number(v));
    }
    write_csv((fs::path(dir) / "results.csv").string(), art.results_header, rows);

    rows.clear();
    for (const auto& r : art.comparison) {
        rows.push_back({r.query, format_number(r.learned), format_number(r.oracle),
                        format_number(std::abs(r.learned - r.oracle)), format_number(rel_error(r))});
    }
    write_csv((fs::path(dir) / "comparison.csv").string(),
              {"query", "learned", "oracle", "abs_error", "rel_error"}, rows);

    nlohmann::json j;
    j["case"] = art.case_id;
    j["seed"] = cfg.get_int("run", "seed");
    j["config_hash"] = cfg.hash();
    nlohmann::json conf;
    for (const auto& [s, body] : cfg.sections())
        for (const auto& [k, v] : body) conf[s][k] = v;
    j["config"] = conf;
    for (const auto& [name, rep] : art.reports) {
        j["training"][name] = rep.to_json();
        rep.write_loss_csv((fs::path(dir) / ("loss_" + name + ".csv")).string());
    }
    for (const auto& r : art.comparison) {
        j["comparison"].push_back({{"query", r.query}, {"learned", r.learned}, {"oracle", r.oracle}});
    }
    std::ofstream(fs::path(dir) / "report.json") << j.dump(2) << '\n';

    for (const auto& [name, m] : art.models) {
        nlohmann::json mj = m->to_json();
        mj["seed"] = cfg.get_int("run", "seed");
        mj["config_hash"] = cfg.hash();
        std::ofstream(fs::path(dir) / ("model_" + name + ".json")) << mj.dump(2) << '\n';
    }
}

std::vector<ComparisonRow> read_comparison(const std::string& dir) {
    const fs::path path = fs::path(dir) / "comparison.csv";
    std::ifstream in(path);
    if (!in) throw UsageError("no comparison artifacts at " + path.string());
    std::string line;
    std::getline(in, line);
    if (line.rfind("query,learned,oracle", 0) != 0) throw UsageError("malformed " + path.string());
    std::vector<ComparisonRow> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string q, a, b;
        if (!std::getline(ss, q, ',') || !std::getline(ss, a, ',') || !std::getline(ss, b, ','))
            throw UsageError("malformed row in " + path.string());
        try {
            out.push_back({q, std::stod(a), std::stod(b)});
        } catch (const std::exception&) {
            throw UsageError("malformed number in " + path.string());
        }
    }
    return out;
}

} // namespace autoint
