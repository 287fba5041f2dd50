#include "autoint/density.hpp"

#include "autoint/errors.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace autoint {

DensityMethod parse_density_method(const std::string& s) {
    if (s == "kde") return DensityMethod::Kde;
    if (s == "histogram") return DensityMethod::Histogram;
    throw ConfigError("density: unknown method '" + s + "' (kde | histogram)");
}

std::vector<double> sample_normal(double mean, double stddev, int n, std::uint64_t seed) {
    if (n < 0 || !(stddev >= 0.0)) throw UsageError("sample_normal: bad arguments");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(mean, stddev);
    std::vector<double> out(n);
    for (auto& v : out) v = dist(rng);
    return out;
}

double silverman_bandwidth(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 2) throw UsageError("silverman_bandwidth: need at least two samples");
    double mean = 0.0;
    for (double s : samples) mean += s;
    mean /= n;
    double var = 0.0;
    for (double s : samples) var += (s - mean) * (s - mean);
    var /= (n - 1);
    return 1.06 * std::sqrt(var) * std::pow(static_cast<double>(n), -0.2);
}

DensityEstimate::DensityEstimate(std::vector<std::vector<double>> samples, DensityMethod method,
                                 std::vector<double> lower, std::vector<double> upper, int bins)
    : samples_(std::move(samples)), method_(method), lo_(std::move(lower)), hi_(std::move(upper)),
      bins_(bins) {
    if (samples_.empty()) throw UsageError("density: no dimensions");
    const std::size_t n = samples_[0].size();
    for (const auto& s : samples_)
        if (s.size() != n) throw UsageError("density: ragged samples");
    if (method_ == DensityMethod::Kde) {
        for (const auto& s : samples_) h_.push_back(silverman_bandwidth(s));
        return;
    }
    const int d = dims();
    if (static_cast<int>(lo_.size()) != d || static_cast<int>(hi_.size()) != d || bins_ < 1)
        throw UsageError("density: histogram needs bounds per dimension and bins >= 1");
    std::size_t cells = 1;
    for (int k = 0; k < d; ++k) cells *= bins_;
    counts_.assign(cells, 0.0);
    double cell_volume = 1.0;
    for (int k = 0; k < d; ++k) cell_volume *= (hi_[k] - lo_[k]) / bins_;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t idx = 0;
        bool inside = true;
        for (int k = 0; k < d; ++k) {
            const int b = static_cast<int>(std::floor((samples_[k][i] - lo_[k]) / (hi_[k] - lo_[k]) * bins_));
            if (b < 0 || b >= bins_) { inside = false; break; }
            idx = idx * bins_ + b;
        }
        if (inside) counts_[idx] += 1.0;
    }
    for (auto& c : counts_) c /= (n * cell_volume);
}

double DensityEstimate::operator()(std::span<const double> x) const {
    const int d = dims();
    if (static_cast<int>(x.size()) != d) throw UsageError("density: dimension mismatch");
    if (method_ == DensityMethod::Histogram) {
        std::size_t idx = 0;
        for (int k = 0; k < d; ++k) {
            const int b = static_cast<int>(std::floor((x[k] - lo_[k]) / (hi_[k] - lo_[k]) * bins_));
            if (b < 0 || b >= bins_) return 0.0;
            idx = idx * bins_ + b;
        }
        return counts_[idx];
    }
    const std::size_t n = samples_[0].size();
    double norm = 1.0;
    for (int k = 0; k < d; ++k) norm *= 1.0 / (std::sqrt(2.0 * std::numbers::pi) * h_[k]);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double q = 0.0;
        for (int k = 0; k < d; ++k) {
            const double z = (x[k] - samples_[k][i]) / h_[k];
            q += z * z;
        }
        acc += std::exp(-0.5 * q);
    }
    return norm * acc / n;
}

} // namespace autoint
