#pragma once

// End-to-end case runs: config -> problem -> training -> readouts -> oracle
// comparison, plus writing the artifact directory.

#include "autoint/config.hpp"
#include "autoint/model.hpp"
#include "autoint/problems.hpp"
#include "autoint/training.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace autoint {

struct CaseOptions {
    /// Independent trainings (surrogates, sweep points) run concurrently.
    int jobs = 1;
    std::ostream* log = nullptr;
};

struct ComparisonRow {
    std::string query;
    double learned = 0.0;
    double oracle = 0.0;
};

struct CaseArtifacts {
    std::string case_id;
    std::vector<std::string> results_header;
    std::vector<std::vector<double>> results;
    std::vector<ComparisonRow> comparison;
    std::vector<std::pair<std::string, TrainReport>> reports;
    std::vector<std::pair<std::string, std::unique_ptr<Model>>> models;
};

/// Offset added to the run seed for every sampled data set.
inline constexpr std::uint64_t kSampleSeedOffset = 1000000;

/// Output root: $AUTOINT_OUTPUT_ROOT, else ./autoint_out.
std::string output_root();

/// Load `path` (may be empty), apply overrides, resolve against the case
/// schema. Defaulted keys are reported on `notices`.
RunConfig load_run_config(const std::string& case_id, const std::string& path,
                          const std::vector<std::pair<std::string, std::string>>& overrides,
                          std::ostream* notices);

OptimizerConfig optimizer_from(const RunConfig& cfg);
problems::OuParams ou_params_from(const RunConfig& cfg);
problems::BasketParams basket_params_from(const RunConfig& cfg);
problems::VesselParams vessel_params_from(const RunConfig& cfg, double omega);
problems::AdvectionParams advection_params_from(const RunConfig& cfg);
problems::PopulationParams population_params_from(const RunConfig& cfg);

/// Fresh surrogate for the configured model family with inputs in the box
/// [lower, upper].
std::unique_ptr<Model> make_model(const RunConfig& cfg, std::span<const double> lower,
                                  std::span<const double> upper, std::uint64_t init_seed);

/// Run a resolved config. Throws ConfigError / TrainingError.
CaseArtifacts run_case(const RunConfig& cfg, const CaseOptions& options);

/// results.csv, comparison.csv, report.json, loss_<name>.csv, model_<name>.json
void write_artifacts(const CaseArtifacts& art, const RunConfig& cfg, const std::string& dir);

/// Read <dir>/comparison.csv. Throws UsageError when missing or malformed.
std::vector<ComparisonRow> read_comparison(const std::string& dir);

} // namespace autoint
