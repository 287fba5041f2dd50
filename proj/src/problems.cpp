#include "autoint/problems.hpp"

#include "autoint/autodiff.hpp"
#include "autoint/errors.hpp"

#include <cmath>
#include <numbers>

namespace autoint::problems {

DataForm parse_data_form(const std::string& s) {
    if (s == "product") return DataForm::Product;
    if (s == "ratio") return DataForm::Ratio;
    throw ConfigError("data form: unknown value '" + s + "' (product | ratio)");
}

namespace {

void check_process(const oracle::OuProcess& p, const char* what) {
    if (!(p.nu > 0.0)) throw ConfigError(std::string(what) + ": reversion speed must be positive");
    if (!(p.sigma > 0.0)) throw ConfigError(std::string(what) + ": volatility must be positive");
}

/// Data term on `grid` for dG/ds = k p^, in the requested form.
Term density_term(const std::string& name, const Expr& dg, const Kernel& k, CollocationGrid grid,
                  const DensityEstimate& density, std::span<const int> density_coords,
                  DataForm form, double weight) {
    Term t;
    t.name = name;
    t.role = Term::Role::Data;
    t.expr = form == DataForm::Product ? dg : dg / k.k;
    t.weight = weight;
    std::vector<double> q(density_coords.size());
    for (const auto& p : grid.points) {
        for (std::size_t i = 0; i < q.size(); ++i) q[i] = p[density_coords[i]];
        const double dens = density(q);
        t.targets.push_back(form == DataForm::Product ? k.value(p) * dens : dens);
    }
    t.grid = std::move(grid);
    return t;
}

} // namespace

// --- Ornstein-Uhlenbeck ----------------------------------------------------

void OuParams::validate() const {
    check_process(process, "ou");
    if (!(x_max > x_min) || !(t_max > t_min)) throw ConfigError("ou: empty domain");
    if (!(t_min > process.t0)) throw ConfigError("ou: data slice must come after the start time");
    if (nx < 2 || nt < 2) throw ConfigError("ou: grid needs at least two points per axis");
    if (samples < 2) throw ConfigError("ou: need at least two samples");
    if (terminal < t_min || terminal > t_max) throw ConfigError("ou: terminal time outside the grid");
    for (double x : linspace(x_min, x_max, nx))
        if (std::abs(x) < 1e-12)
            throw ConfigError("ou: x grid contains the kernel zero x = 0; use an even point count");
}

std::vector<double> ou_slice_samples(const OuParams& p, std::uint64_t sample_seed) {
    return sample_normal(oracle::ou_mean(p.t_min, p.process),
                         std::sqrt(oracle::ou_variance(p.t_min, p.process)), p.samples, sample_seed);
}

SurrogateProblem european_option_problem(const OuParams& p, int moment, std::uint64_t sample_seed) {
    p.validate();
    if (moment < 1 || moment > 2) throw UsageError("european: moment must be 1 or 2");
    const double nu = p.process.nu, s2 = p.process.sigma * p.process.sigma;

    // Fokker-Planck for dX = -nu X dt + sigma dW
    const Expr x = input(0), f = unknown_f();
    const Expr fp = d(f, 1) - nu * d(x * f, 0) - 0.5 * s2 * d(d(f, 0), 0);
    const Kernel k = power_kernel(0, moment);
    const Expr residual = product_form(substitute_residual(fp, k), k);

    const auto xs = linspace(p.x_min, p.x_max, p.nx);
    const auto ts = linspace(p.t_min, p.t_max, p.nt);

    SurrogateProblem prob;
    prob.arity = 2;
    Term r;
    r.name = "residual";
    r.expr = residual;
    r.grid = CollocationGrid::product({xs, std::vector<double>(ts.begin() + 1, ts.end())});
    r.weight = p.residual_weight;
    prob.terms.push_back(std::move(r));

    const auto samples = ou_slice_samples(p, sample_seed);
    const DensityEstimate density({samples}, p.density, {p.x_min}, {p.x_max}, p.bins);
    const int coords[] = {0};
    prob.terms.push_back(density_term("data", d(surrogate(0), 0), k,
                                      CollocationGrid::product({xs, {p.t_min}}), density, coords,
                                      p.form, p.data_weight));
    return prob;
}

MomentReadout moment_readout(const Model& g1, const Model& g2, const OuParams& p, double t) {
    const double at[] = {0.0, t};
    MomentReadout r;
    r.t = t;
    r.mean = evaluate_transform(g1, p.x_min, p.x_max, at, 0);
    r.second = evaluate_transform(g2, p.x_min, p.x_max, at, 0);
    r.stddev = std::sqrt(std::max(r.second - r.mean * r.mean, 0.0));
    return r;
}

double payoff(const MomentReadout& r, double strike) { return std::max(r.mean - strike, 0.0); }

std::vector<MomentReadout> asian_readout(const Model& g1, const Model& g2, const OuParams& p,
                                         const std::vector<double>& times) {
    if (times.empty()) throw UsageError("asian: no averaging times");
    std::vector<MomentReadout> out;
    for (double t : times) {
        if (t < p.t_min - 1e-12 || t > p.t_max + 1e-12)
            throw UsageError("asian: time " + std::to_string(t) + " outside the trained domain");
        out.push_back(moment_readout(g1, g2, p, t));
    }
    return out;
}

// --- Basket ----------------------------------------------------------------

void BasketParams::validate() const {
    check_process(first, "basket asset 1");
    check_process(second, "basket asset 2");
    if (!(x1_max > x1_min) || !(x2_max > x2_min) || !(t_max > t_min))
        throw ConfigError("basket: empty domain");
    if (!(t_min > first.t0) || !(t_min > second.t0))
        throw ConfigError("basket: slices must come after the start time");
    if (nx1 < 2 || nx2 < 2 || nt < 1) throw ConfigError("basket: grid too small");
    if (samples < 2) throw ConfigError("basket: need at least two samples per slice");
}

Kernel basket_kernel() {
    return {"basket_mean", 0.5 * (input(0) + input(1)), {0, 1}, std::nullopt, "x0 + x1 = 0"};
}

SurrogateProblem basket_option_problem(const BasketParams& p, std::uint64_t sample_seed) {
    p.validate();
    const Kernel k = basket_kernel();
    const Expr dg = d(d(surrogate(0), 0), 1);
    const auto x1 = linspace(p.x1_min, p.x1_max, p.nx1);
    const auto x2 = linspace(p.x2_min, p.x2_max, p.nx2);
    const auto ts = p.nt == 1 ? std::vector<double>{p.t_min} : linspace(p.t_min, p.t_max, p.nt);

    SurrogateProblem prob;
    prob.arity = 3;
    const int coords[] = {0, 1};
    for (std::size_t j = 0; j < ts.size(); ++j) {
        const double t = ts[j];
        auto s1 = sample_normal(oracle::ou_mean(t, p.first), std::sqrt(oracle::ou_variance(t, p.first)),
                                p.samples, sample_seed + 2 * j);
        auto s2 = sample_normal(oracle::ou_mean(t, p.second),
                                std::sqrt(oracle::ou_variance(t, p.second)), p.samples,
                                sample_seed + 2 * j + 1);
        const DensityEstimate density({std::move(s1), std::move(s2)}, p.density,
                                      {p.x1_min, p.x2_min}, {p.x1_max, p.x2_max}, p.bins);
        auto grid = CollocationGrid::product({x1, x2, {t}}).without(
            [&](std::span<const double> q) { return k.vanishes_at(q, 1e-9); });
        prob.terms.push_back(density_term("slice_" + std::to_string(j), dg, k, std::move(grid),
                                          density, coords, p.form, p.data_weight));
    }
    return prob;
}

double basket_readout(const Model& g, const BasketParams& p, double t) {
    const double lo[] = {p.x1_min, p.x2_min}, hi[] = {p.x1_max, p.x2_max};
    const int vars[] = {0, 1};
    const double at[] = {0.0, 0.0, t};
    return evaluate_transform_corners(g, lo, hi, vars, at);
}

// --- Rotating vessel -------------------------------------------------------

void VesselParams::validate() const {
    const auto& v = vessel;
    if (!(v.rho > 0.0 && v.width > 0.0 && v.radius > 0.0 && v.h0 > 0.0 && v.g > 0.0))
        throw ConfigError("vessel: constants must be positive");
    if (nr < 2) throw ConfigError("vessel: radial grid too small");
    if (!(r_min_fraction > 0.0 && r_min_fraction < 1.0))
        throw ConfigError("vessel: first radius fraction must lie in (0, 1)");
}

Expr vessel_residual_in_h(const VesselParams& p) {
    // pressure balance along the free surface in the co-rotating frame
    const Expr r = input(0);
    const double rho = p.vessel.rho, w2 = p.omega * p.omega;
    return d(-0.5 * rho * w2 * r * r + rho * p.vessel.g * unknown_f() + p.p_air, 0);
}

SurrogateProblem moment_of_inertia_problem(const VesselParams& p) {
    p.validate();
    const auto& v = p.vessel;
    const Expr res_h = vessel_residual_in_h(p);
    const Kernel k2 = power_kernel(0, 2);
    const auto rs = linspace(p.r_min_fraction * v.radius, v.radius, p.nr);
    const auto grid = CollocationGrid::product({rs});

    SurrogateProblem prob;
    prob.arity = 1;
    prob.num_models = p.volume_surrogate ? 2 : 1;
    prob.terms.push_back({"residual_G", Term::Role::Residual,
                          product_form(substitute_residual(res_h, k2, 0), k2), grid, {},
                          p.residual_weight});
    if (p.volume_surrogate) {
        const Kernel one = identity_kernel(0);
        prob.terms.push_back({"residual_H", Term::Role::Residual,
                              substitute_residual(res_h, one, 1), grid, {}, p.residual_weight});
        const Expr volume = integral(one.name, {0}, {Limit::at(0.0)}, {Limit::at(v.radius)});
        prob.terms.push_back({"volume", Term::Role::Data, substitute_residual(volume, one, 1),
                              CollocationGrid::product({{v.radius}}), {v.h0 * v.radius},
                              p.volume_weight});
        const Expr r = input(0);
        prob.terms.push_back({"coupling", Term::Role::Residual,
                              d(surrogate(0), 0) - r * r * d(surrogate(1), 0), grid, {},
                              p.coupling_weight});
    } else {
        const double w2 = p.omega * p.omega, R = v.radius;
        const double edge = v.h0 - w2 * R * R / (6.0 * v.g) + w2 * R * R / (2.0 * v.g);
        const Expr r = input(0);
        prob.terms.push_back({"edge_height", Term::Role::Boundary, d(surrogate(0), 0) / (r * r),
                              CollocationGrid::product({{R}}), {edge}, p.volume_weight});
    }
    return prob;
}

double moi_readout(const Model& g, const VesselParams& p) {
    const double at[] = {0.0};
    return p.vessel.rho * p.vessel.width * evaluate_transform(g, 0.0, p.vessel.radius, at, 0);
}

// --- Advected charge -------------------------------------------------------

void AdvectionParams::validate() const {
    const auto& a = physics;
    if (!(a.D > 0.0)) throw ConfigError("advection: diffusion coefficient must be positive");
    if (!(a.width > 0.0) || !(a.mass > 0.0)) throw ConfigError("advection: bad initial drop");
    if (!(a.x_max > a.x_min) || !(t_max > a.t_init)) throw ConfigError("advection: empty domain");
    if (nx < 2 || nt < 1 || n_initial < 2) throw ConfigError("advection: grid too small");
}

Kernel potential_kernel(const AdvectionParams& p) {
    const auto& a = p.physics;
    const double off_axis = a.obs_y * a.obs_y + a.obs_z * a.obs_z;
    if (!(off_axis > 0.0))
        throw SingularKernelError("potential: observation point lies on the tube axis");
    const Expr dx = input(0) - a.obs_x;
    return {"inverse_distance", 1.0 / sqrt(dx * dx + off_axis), {0}, std::nullopt, "none"};
}

SurrogateProblem potential_problem(const AdvectionParams& p) {
    p.validate();
    const auto& a = p.physics;
    const Kernel k = potential_kernel(p);
    const Expr c = unknown_f();
    const Expr transport = d(c, 1) + a.v * d(c, 0) - a.D * d(d(c, 0), 0);
    const Expr residual = product_form(substitute_residual(transport, k), k);

    const auto xs = linspace(a.x_min, a.x_max, p.nx);
    auto ts = linspace(a.t_init, p.t_max, p.nt + 1);
    ts.erase(ts.begin());

    SurrogateProblem prob;
    prob.arity = 2;
    prob.terms.push_back({"residual", Term::Role::Residual, residual,
                          CollocationGrid::product({xs, ts}), {}, p.residual_weight});

    Term ic;
    ic.name = "initial";
    ic.role = Term::Role::Data;
    ic.expr = d(surrogate(0), 0);
    ic.grid = CollocationGrid::product({linspace(a.x_min, a.x_max, p.n_initial), {a.t_init}});
    ic.weight = p.initial_weight;
    const double s2 = a.width * a.width;
    for (const auto& q : ic.grid.points) {
        const double z = q[0] - a.center;
        const double drop = a.mass / std::sqrt(2.0 * std::numbers::pi * s2) * std::exp(-0.5 * z * z / s2);
        ic.targets.push_back(k.value(q) * drop);
    }
    prob.terms.push_back(std::move(ic));

    std::vector<double> all_t = ts;
    all_t.insert(all_t.begin(), a.t_init);
    prob.terms.push_back({"far_field", Term::Role::Boundary, d(surrogate(0), 0),
                          CollocationGrid::product({{a.x_min, a.x_max}, all_t}), {},
                          p.boundary_weight});
    return prob;
}

double potential_readout(const Model& g, const AdvectionParams& p, double t) {
    const double at[] = {0.0, t};
    return p.physics.lambda * evaluate_transform(g, p.physics.x_min, p.physics.x_max, at, 0);
}

// --- Population growth -----------------------------------------------------

void PopulationParams::validate() const {
    if (!(t_max > 0.0)) throw ConfigError("population: t_max must be positive");
    if (points < 2) throw ConfigError("population: need at least two collocation points");
}

Expr population_residual_in_b() {
    const Expr t = input(0);
    const Expr du = (6.0 - 3.5 * exp(0.5 * t) - 4.0 * cos(t)) / 4.0;
    const Expr memory = integral("identity", {0}, {Limit::at(0.0)}, {Limit::current()});
    return d(d(unknown_f(), 0), 0) - du - memory;
}

PinConditions population_pins() { return make_pin_conditions(0.0, {0.0, 1.0, -0.25}); }

SurrogateProblem population_problem(const PopulationParams& p) {
    p.validate();
    SurrogateProblem prob;
    prob.arity = 1;
    prob.terms.push_back({"residual", Term::Role::Residual,
                          substitute_residual(population_residual_in_b(), identity_kernel(0)),
                          CollocationGrid::product({linspace(0.0, p.t_max, p.points)}), {}, 1.0});
    return prob;
}

double population_readout(const Model& g, double t) {
    const double at[] = {t};
    return eval_derivative(g, at, {{1}, false}).value;
}

} // namespace autoint::problems
