#pragma once

// Ground truth for the case studies: closed-form densities and solutions plus
// quadrature. Nothing here touches towers or models, so the learned path and its
// checks share no integration or differentiation code.

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace autoint::oracle {

using Fn1 = std::function<double(double)>;

enum class Scheme { GaussLegendre, AdaptiveSimpson };

struct QuadratureRule {
    Scheme scheme = Scheme::GaussLegendre;
    int points = 20;          ///< Gauss-Legendre nodes per panel
    int panels = 50;          ///< Gauss-Legendre panels
    double tolerance = 1e-12; ///< adaptive Simpson absolute tolerance
    int max_depth = 50;
};

struct GaussNodes {
    std::vector<double> x, w; ///< on [-1, 1]
};

/// Gauss-Legendre nodes/weights by Newton iteration on P_n.
GaussNodes gauss_legendre_nodes(int n);

double gauss_legendre(const Fn1& f, double a, double b, int points, int panels = 1);
double adaptive_simpson(const Fn1& f, double a, double b, double tol, int max_depth = 50);
double integrate(const Fn1& f, double a, double b, const QuadratureRule& rule);

/// int_lower^upper k(s) f(s) ds.
double quadrature_transform(const Fn1& f, const Fn1& kernel, double lower, double upper,
                            const QuadratureRule& rule);

// --- Ornstein-Uhlenbeck (mean reversion level 0) ----------------------------

struct OuProcess {
    double sigma = 1.0;
    double nu = 5.0;
    double x0 = 2.0;
    double t0 = 0.0;
};

double ou_mean(double t, const OuProcess& p);
double ou_variance(double t, const OuProcess& p);
/// Gaussian density for a Dirac start at (x0, t0); throws DomainError for t <= t0.
double ou_pdf(double x, double t, const OuProcess& p);
/// Product of two independent OU densities.
double ou_pdf_2d(double x1, double x2, double t, const OuProcess& a, const OuProcess& b);
/// E[(x1 + x2) / 2] under ou_pdf_2d.
double basket_mean(double t, const OuProcess& a, const OuProcess& b);

// --- Population growth IDE --------------------------------------------------

/// b(t) = (e^{t/2} - sin t + cos t) / 2
double population_exact(double t);
/// u(t) = (6 (1 + t) - 7 e^{t/2} - 4 sin t) / 4
double population_source(double t);
/// b'(t) - u(t) - int_0^t (t - s) b(s) ds, the memory integral by quadrature.
double population_ide_residual(double t, const QuadratureRule& rule);

// --- Rotating vessel --------------------------------------------------------

struct Vessel {
    double rho = 1.0;
    double width = 0.1;
    double radius = 1.0;
    double h0 = 1.0;
    double g = 9.81;
};

/// Free-surface height h(r) = C + omega^2 r^2 / (2 g), C from volume conservation.
double moi_height(double r, double omega, const Vessel& v);
/// rho w (h0 R^3 / 3 + 2 omega^2 R^5 / (45 g))
double moi_exact(double omega, const Vessel& v);
/// Height from integrating dh/dr = omega^2 r / g numerically, constant fixed by
/// volume, then rho w int r^2 h dr by quadrature.
double moi_quadrature(double omega, const Vessel& v, const QuadratureRule& rule);

// --- Advected charge --------------------------------------------------------

struct Advection {
    double v = 1.0;
    double D = 0.1;
    double lambda = 1.0;
    double obs_x = 0.0, obs_y = 1.0, obs_z = 0.0;
    double mass = 1.0;
    double center = -2.0;
    double width = 0.2;
    double t_init = 0.1;
    double x_min = -6.0, x_max = 6.0;
};

/// Closed-form solution of C_t + v C_x = D C_xx from a Gaussian drop at t_init.
double advected_gaussian(double x, double t, const Advection& a);
/// 1 / |r - r_obs| for r = (x, 0, 0).
double inverse_distance(double x, const Advection& a);
/// lambda int_{x_min}^{x_max} C / |r - r_obs| dx.
double potential(double t, const Advection& a, const QuadratureRule& rule);

// --- Quantum circuit -------------------------------------------------------

/// <sum_q Z_q> from dense 2^n x 2^n gate matrices built by Kronecker products.
/// Chebyshev map R_y(2 (q + 1) arccos(x~)) on qubit q, then `depth` layers of
/// R_x R_z R_x per qubit (theta in that order, qubit-major) and a CNOT chain.
/// Qubit q is bit q of the basis index.
double dqc_dense_expectation(int n_qubits, int depth, std::span<const double> theta,
                             double x_tilde);

// --- Golden files -----------------------------------------------------------

struct GoldenValue {
    std::string case_id;
    std::string query;
    double value = 0.0;
    double tolerance = 0.0;
    std::string provenance;
};

void write_golden(const std::string& path, const std::vector<GoldenValue>& rows);
std::vector<GoldenValue> read_golden(const std::string& path);

/// Golden values for every case at the default constants.
std::vector<GoldenValue> reference_values();

} // namespace autoint::oracle
