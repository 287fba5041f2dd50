#pragma once

// Case-study problem factories and their transform readouts.

#include "autoint/density.hpp"
#include "autoint/model.hpp"
#include "autoint/oracles.hpp"
#include "autoint/pinning.hpp"
#include "autoint/training.hpp"
#include "autoint/transform.hpp"

#include <cstdint>
#include <vector>

namespace autoint::problems {

/// How sampled-density targets enter the loss: dG/ds = k p^ (product) or
/// (1/k) dG/ds = p^ (ratio).
enum class DataForm { Product, Ratio };
DataForm parse_data_form(const std::string& s);

// --- Ornstein-Uhlenbeck, one asset --------------------------------------------

struct OuParams {
    oracle::OuProcess process{};
    double strike = 0.06;
    double terminal = 0.5;
    double x_min = -5.0, x_max = 5.0;
    double t_min = 0.1, t_max = 0.5;
    int nx = 50, nt = 20;
    int samples = 50;
    DensityMethod density = DensityMethod::Kde;
    int bins = 20;
    DataForm form = DataForm::Product;
    double data_weight = 1.0;
    double residual_weight = 1.0;

    void validate() const;
};

/// Surrogate for the `moment`-th raw moment: kernel x^moment, Fokker-Planck
/// residual in product form on every grid time after t_min, sampled-density
/// data on the t_min slice. Inputs (x, t). Throws ConfigError when the x grid
/// hits the kernel zero at x = 0.
SurrogateProblem european_option_problem(const OuParams& p, int moment, std::uint64_t sample_seed);

/// The density samples drawn for the data slice.
std::vector<double> ou_slice_samples(const OuParams& p, std::uint64_t sample_seed);

struct MomentReadout {
    double t = 0.0;
    double mean = 0.0;
    double second = 0.0;
    double stddev = 0.0;
};

/// Two evaluations of g1 (kernel x) and two of g2 (kernel x^2) at time t.
MomentReadout moment_readout(const Model& g1, const Model& g2, const OuParams& p, double t);
/// (E[X_T] - K)^+
double payoff(const MomentReadout& r, double strike);
/// One moment readout per time; throws UsageError for an empty list or a time
/// outside [t_min, t_max].
std::vector<MomentReadout> asian_readout(const Model& g1, const Model& g2, const OuParams& p,
                                         const std::vector<double>& times);

// --- Two-asset basket ---------------------------------------------------------

struct BasketParams {
    oracle::OuProcess first{1.0, 5.0, 2.0, 0.0};
    oracle::OuProcess second{2.0, 3.0, 1.0, 0.0};
    double x1_min = -1.5, x1_max = 2.5;
    double x2_min = -3.0, x2_max = 3.5;
    double t_min = 0.3, t_max = 1.0;
    int nx1 = 20, nx2 = 20, nt = 15;
    int samples = 50;
    DensityMethod density = DensityMethod::Kde;
    int bins = 10;
    DataForm form = DataForm::Product;
    double data_weight = 1.0;

    void validate() const;
};

/// Data-only problem: d^2 G / dx1 dx2 against k p^ with k = (x1 + x2) / 2 on
/// each sampled slice. Inputs (x1, x2, t).
SurrogateProblem basket_option_problem(const BasketParams& p, std::uint64_t sample_seed);
/// Four-corner readout of E[(X1 + X2) / 2] at time t.
double basket_readout(const Model& g, const BasketParams& p, double t);
Kernel basket_kernel();

// --- Rotating vessel ----------------------------------------------------------

struct VesselParams {
    oracle::Vessel vessel{};
    double omega = 0.0;
    double p_air = 0.0;
    int nr = 40;
    double r_min_fraction = 0.02; ///< first collocation radius / R
    /// true: auxiliary plain-integral surrogate H with H(R) - H(0) = h0 R.
    /// false: closed-form constant of integration as a data term.
    bool volume_surrogate = true;
    double residual_weight = 1.0;
    double volume_weight = 1.0;
    double coupling_weight = 1.0;

    void validate() const;
};

/// Surrogate 0 is G with dG/dr = r^2 h; surrogate 1 (when volume_surrogate)
/// is H with dH/dr = h.
SurrogateProblem moment_of_inertia_problem(const VesselParams& p);
/// The free-surface balance over the unknown h, before substitution.
Expr vessel_residual_in_h(const VesselParams& p);
/// rho w (G(R) - G(0))
double moi_readout(const Model& g, const VesselParams& p);

// --- Advected charge ----------------------------------------------------------

struct AdvectionParams {
    oracle::Advection physics{};
    double t_max = 1.0;
    int nx = 61, nt = 10;
    int n_initial = 121;
    double residual_weight = 1.0;
    double initial_weight = 1.0;
    double boundary_weight = 1.0;

    void validate() const;
};

/// k = 1 / |r - r_obs| on the tube axis; throws SingularKernelError when the
/// observation point lies on the axis.
Kernel potential_kernel(const AdvectionParams& p);
SurrogateProblem potential_problem(const AdvectionParams& p);
/// lambda (G(x_max, t) - G(x_min, t))
double potential_readout(const Model& g, const AdvectionParams& p, double t);

// --- Population growth --------------------------------------------------------

struct PopulationParams {
    double t_max = 1.0;
    int points = 25;

    void validate() const;
};

/// The integro-differential residual over b after one Leibniz step:
///   b'' - u' - int_0^t b
Expr population_residual_in_b();
/// G(0) = 0, G'(0) = b(0) = 1, G''(0) = u(0) = -1/4
PinConditions population_pins();
SurrogateProblem population_problem(const PopulationParams& p);
/// b(t) = dG/dt
double population_readout(const Model& g, double t);

} // namespace autoint::problems
