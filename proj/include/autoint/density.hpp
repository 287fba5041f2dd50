#pragma once

// Density estimates from samples, used to turn sampled data slices into
// regression targets.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace autoint {

enum class DensityMethod { Kde, Histogram };

DensityMethod parse_density_method(const std::string& s);

/// n draws from N(mean, stddev^2), seeded.
std::vector<double> sample_normal(double mean, double stddev, int n, std::uint64_t seed);

/// 1.06 * sample std * n^(-1/5)
double silverman_bandwidth(std::span<const double> samples);

/// Gaussian KDE (product kernel in several dimensions) or a histogram over
/// [lower, upper] per dimension.
class DensityEstimate {
public:
    /// samples: one vector per dimension, all the same length.
    DensityEstimate(std::vector<std::vector<double>> samples, DensityMethod method,
                    std::vector<double> lower = {}, std::vector<double> upper = {}, int bins = 20);

    int dims() const { return static_cast<int>(samples_.size()); }
    const std::vector<double>& bandwidths() const { return h_; }
    double operator()(std::span<const double> x) const;

private:
    std::vector<std::vector<double>> samples_;
    DensityMethod method_;
    std::vector<double> h_;
    std::vector<double> lo_, hi_;
    int bins_;
    std::vector<double> counts_; ///< histogram, row-major over dims
};

} // namespace autoint
