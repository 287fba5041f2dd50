#include "autoint/oracles.hpp"

#include "autoint/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace autoint::oracle {

GaussNodes gauss_legendre_nodes(int n) {
    if (n < 1) throw UsageError("gauss_legendre: need at least one node");
    GaussNodes g;
    g.x.resize(n);
    g.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) { p1 = x; p0 = 1.0; }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        g.x[i] = -x;
        g.x[n - 1 - i] = x;
        g.w[i] = w;
        g.w[n - 1 - i] = w;
    }
    if (n % 2 == 1) g.x[n / 2] = 0.0;
    return g;
}

double gauss_legendre(const Fn1& f, double a, double b, int points, int panels) {
    if (panels < 1) throw UsageError("gauss_legendre: need at least one panel");
    const GaussNodes g = gauss_legendre_nodes(points);
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        const double mid = lo + 0.5 * h, half = 0.5 * h;
        double s = 0.0;
        for (int i = 0; i < points; ++i) s += g.w[i] * f(mid + half * g.x[i]);
        total += half * s;
    }
    return total;
}

namespace {

double simpson_step(const Fn1& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

double adaptive_simpson(const Fn1& f, double a, double b, double tol, int max_depth) {
    // split into a few panels first so narrow features are not missed
    constexpr int kPanels = 16;
    const double h = (b - a) / kPanels;
    double total = 0.0;
    for (int p = 0; p < kPanels; ++p) {
        const double lo = a + p * h, hi = lo + h, mid = lo + 0.5 * h;
        const double flo = f(lo), fmid = f(mid), fhi = f(hi);
        const double whole = h / 6.0 * (flo + 4.0 * fmid + fhi);
        total += simpson_step(f, lo, hi, flo, fmid, fhi, whole, tol / kPanels, max_depth);
    }
    return total;
}

double integrate(const Fn1& f, double a, double b, const QuadratureRule& rule) {
    if (rule.scheme == Scheme::GaussLegendre) return gauss_legendre(f, a, b, rule.points, rule.panels);
    return adaptive_simpson(f, a, b, rule.tolerance, rule.max_depth);
}

double quadrature_transform(const Fn1& f, const Fn1& kernel, double lower, double upper,
                            const QuadratureRule& rule) {
    return integrate([&](double s) { return kernel(s) * f(s); }, lower, upper, rule);
}

double ou_mean(double t, const OuProcess& p) { return p.x0 * std::exp(-p.nu * (t - p.t0)); }

double ou_variance(double t, const OuProcess& p) {
    return p.sigma * p.sigma / (2.0 * p.nu) * (1.0 - std::exp(-2.0 * p.nu * (t - p.t0)));
}

double ou_pdf(double x, double t, const OuProcess& p) {
    if (!(t > p.t0)) throw DomainError("ou_pdf: t must exceed the start time");
    const double norm = p.sigma * p.sigma / p.nu * (1.0 - std::exp(-2.0 * p.nu * (t - p.t0)));
    const double dx = x - ou_mean(t, p);
    return std::sqrt(1.0 / (std::numbers::pi * norm)) * std::exp(-dx * dx / norm);
}

double ou_pdf_2d(double x1, double x2, double t, const OuProcess& a, const OuProcess& b) {
    return ou_pdf(x1, t, a) * ou_pdf(x2, t, b);
}

double basket_mean(double t, const OuProcess& a, const OuProcess& b) {
    return 0.5 * (ou_mean(t, a) + ou_mean(t, b));
}

double population_exact(double t) {
    return 0.5 * (std::exp(0.5 * t) - std::sin(t) + std::cos(t));
}

double population_source(double t) {
    return (6.0 * (1.0 + t) - 7.0 * std::exp(0.5 * t) - 4.0 * std::sin(t)) / 4.0;
}

double population_ide_residual(double t, const QuadratureRule& rule) {
    const double db = 0.5 * (0.5 * std::exp(0.5 * t) - std::cos(t) - std::sin(t));
    const double memory =
        t > 0.0 ? integrate([t](double s) { return (t - s) * population_exact(s); }, 0.0, t, rule)
                : 0.0;
    return db - population_source(t) - memory;
}

double moi_height(double r, double omega, const Vessel& v) {
    const double c = v.h0 - omega * omega * v.radius * v.radius / (6.0 * v.g);
    return c + omega * omega * r * r / (2.0 * v.g);
}

double moi_exact(double omega, const Vessel& v) {
    const double R = v.radius;
    return v.rho * v.width *
           (v.h0 * R * R * R / 3.0 + 2.0 * omega * omega * std::pow(R, 5) / (45.0 * v.g));
}

double moi_quadrature(double omega, const Vessel& v, const QuadratureRule& rule) {
    // rise(r) = int_0^r omega^2 s / g ds
    auto rise = [&](double r) {
        return r > 0.0 ? integrate([&](double s) { return omega * omega * s / v.g; }, 0.0, r, rule)
                       : 0.0;
    };
    const double mean_rise = integrate(rise, 0.0, v.radius, rule) / v.radius;
    const double c = v.h0 - mean_rise;
    const double second =
        integrate([&](double r) { return r * r * (c + rise(r)); }, 0.0, v.radius, rule);
    return v.rho * v.width * second;
}

double advected_gaussian(double x, double t, const Advection& a) {
    const double s2 = a.width * a.width + 2.0 * a.D * (t - a.t_init);
    if (!(s2 > 0.0)) throw DomainError("advected_gaussian: non-positive spread");
    const double dx = x - a.center - a.v * (t - a.t_init);
    return a.mass / std::sqrt(2.0 * std::numbers::pi * s2) * std::exp(-dx * dx / (2.0 * s2));
}

double inverse_distance(double x, const Advection& a) {
    const double dx = x - a.obs_x;
    const double r2 = dx * dx + a.obs_y * a.obs_y + a.obs_z * a.obs_z;
    if (!(r2 > 0.0)) throw DomainError("inverse_distance: observation point on the tube axis");
    return 1.0 / std::sqrt(r2);
}

double potential(double t, const Advection& a, const QuadratureRule& rule) {
    return a.lambda * quadrature_transform([&](double x) { return advected_gaussian(x, t, a); },
                                           [&](double x) { return inverse_distance(x, a); },
                                           a.x_min, a.x_max, rule);
}

namespace {

using Dense = std::vector<std::vector<std::complex<double>>>;

Dense identity(std::size_t n) {
    Dense m(n, std::vector<std::complex<double>>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
    return m;
}

Dense kron(const Dense& a, const Dense& b) {
    const std::size_t na = a.size(), nb = b.size();
    Dense m(na * nb, std::vector<std::complex<double>>(na * nb, 0.0));
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < na; ++j)
            for (std::size_t k = 0; k < nb; ++k)
                for (std::size_t l = 0; l < nb; ++l) m[i * nb + k][j * nb + l] = a[i][j] * b[k][l];
    return m;
}

Dense matmul(const Dense& a, const Dense& b) {
    const std::size_t n = a.size();
    Dense m(n, std::vector<std::complex<double>>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j) m[i][j] += a[i][k] * b[k][j];
    return m;
}

// single-qubit u on qubit q of n; qubit n-1 is the leftmost Kronecker factor
Dense embed(const Dense& u, int q, int n) {
    Dense m = identity(1);
    for (int k = n - 1; k >= 0; --k) m = kron(m, k == q ? u : identity(2));
    return m;
}

Dense cnot(int control, int target, int n) {
    const std::size_t dim = std::size_t{1} << n;
    Dense m(dim, std::vector<std::complex<double>>(dim, 0.0));
    for (std::size_t i = 0; i < dim; ++i) {
        std::size_t j = (i >> control) & 1 ? i ^ (std::size_t{1} << target) : i;
        m[j][i] = 1.0;
    }
    return m;
}

Dense rot(char axis, double a) {
    const double c = std::cos(a / 2), s = std::sin(a / 2);
    const std::complex<double> i(0, 1);
    if (axis == 'x') return {{c, -i * s}, {-i * s, c}};
    if (axis == 'y') return {{c, -s}, {s, c}};
    return {{std::exp(-i * (a / 2)), 0.0}, {0.0, std::exp(i * (a / 2))}};
}

} // namespace

double dqc_dense_expectation(int n, int depth, std::span<const double> theta, double xt) {
    if (theta.size() != static_cast<std::size_t>(3 * n * depth))
        throw UsageError("dqc oracle: wrong parameter count");
    const std::size_t dim = std::size_t{1} << n;
    Dense u = identity(dim);
    const double phi = std::acos(xt);
    for (int q = 0; q < n; ++q) u = matmul(embed(rot('y', 2.0 * (q + 1) * phi), q, n), u);
    std::size_t p = 0;
    for (int l = 0; l < depth; ++l) {
        for (int q = 0; q < n; ++q) {
            u = matmul(embed(rot('x', theta[p]), q, n), u);
            u = matmul(embed(rot('z', theta[p + 1]), q, n), u);
            u = matmul(embed(rot('x', theta[p + 2]), q, n), u);
            p += 3;
        }
        for (int q = 0; q + 1 < n; ++q) u = matmul(cnot(q, q + 1, n), u);
    }
    double e = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        double z = 0.0;
        for (int q = 0; q < n; ++q) z += (i >> q) & 1 ? -1.0 : 1.0;
        e += z * std::norm(u[i][0]);
    }
    return e;
}

void write_golden(const std::string& path, const std::vector<GoldenValue>& rows) {
    std::ofstream os(path);
    if (!os) throw UsageError("golden: cannot write " + path);
    os << "case,query,value,tolerance,provenance\n";
    char buf[64];
    for (const auto& r : rows) {
        os << r.case_id << ',' << r.query << ',';
        std::snprintf(buf, sizeof buf, "%.12g", r.value);
        os << buf << ',';
        std::snprintf(buf, sizeof buf, "%.3g", r.tolerance);
        os << buf << ',' << r.provenance << '\n';
    }
}

std::vector<GoldenValue> read_golden(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw UsageError("golden: cannot read " + path);
    std::vector<GoldenValue> rows;
    std::string line;
    std::getline(is, line);
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        GoldenValue g;
        std::string value, tol;
        std::getline(ss, g.case_id, ',');
        std::getline(ss, g.query, ',');
        std::getline(ss, value, ',');
        std::getline(ss, tol, ',');
        std::getline(ss, g.provenance);
        g.value = std::stod(value);
        g.tolerance = std::stod(tol);
        rows.push_back(std::move(g));
    }
    return rows;
}

std::vector<GoldenValue> reference_values() {
    std::vector<GoldenValue> g;
    const OuProcess ou{};
    QuadratureRule simpson;
    simpson.scheme = Scheme::AdaptiveSimpson;
    simpson.tolerance = 1e-10;
    char q[64];

    const double m = ou_mean(0.5, ou);
    g.push_back({"european", "payoff", std::max(m - 0.06, 0.0), 1e-12, "closed form OU mean"});
    g.push_back({"european", "std", std::sqrt(ou_variance(0.5, ou)), 1e-12, "closed form OU variance"});
    g.push_back({"european", "mean_quadrature",
                 quadrature_transform([&](double x) { return ou_pdf(x, 0.5, ou); },
                                      [](double x) { return x; }, -5.0, 5.0, simpson),
                 1e-8, "adaptive simpson tol 1e-10 on -5..5"});
    for (int j = 0; j < 5; ++j) {
        const double t = 0.1 + 0.1 * j;
        std::snprintf(q, sizeof q, "mean@t=%g", t);
        g.push_back({"asian", q, ou_mean(t, ou), 1e-12, "closed form OU mean"});
    }
    const OuProcess a{1.0, 5.0, 2.0, 0.0}, b{2.0, 3.0, 1.0, 0.0};
    for (double t : {0.3, 0.5, 1.0}) {
        std::snprintf(q, sizeof q, "E@t=%g", t);
        g.push_back({"basket", q, basket_mean(t, a, b), 1e-12, "closed form product OU means"});
    }
    const Vessel v{};
    for (int w = 0; w <= 8; ++w) {
        std::snprintf(q, sizeof q, "I@omega=%d", w);
        g.push_back({"moi", q, moi_exact(w, v), 1e-8, "closed form; checked by nested quadrature"});
    }
    const Advection adv{};
    for (int j = 0; j < 10; ++j) {
        const double t = 0.1 + 0.1 * j;
        std::snprintf(q, sizeof q, "V@t=%g", t);
        g.push_back({"potential", q, potential(t, adv, simpson), 1e-8,
                     "adaptive simpson tol 1e-10 on -6..6"});
    }
    for (double t : {0.0, 0.5, 1.0}) {
        std::snprintf(q, sizeof q, "b@t=%g", t);
        g.push_back({"population", q, population_exact(t), 1e-12, "closed form solution"});
    }
    return g;
}

} // namespace autoint::oracle
