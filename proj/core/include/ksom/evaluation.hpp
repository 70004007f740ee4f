#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ksom/dataset.hpp"
#include "ksom/imputation.hpp"
#include "ksom/som.hpp"
#include "ksom/superclass.hpp"

namespace ksom {

/// Gaussian clusters strung along one shared latent factor.
///
/// Each row draws a latent score s = center(cluster) + spread * z, rescaled to
/// unit variance; column j is sqrt(correlation) * s + sqrt(1 - correlation) * e_j,
/// then given its own offset and scale. Correlation 0 gives independent
/// columns, correlation near 1 makes every pair strongly correlated.
struct SyntheticSpec {
    std::size_t rows = 200;
    std::size_t cols = 11;
    std::size_t clusters = 3;
    double spread = 0.1;
    double correlation = 0.9;
    std::uint64_t seed = 1;

    void validate() const;
};

struct SyntheticData {
    Dataset data;
    std::vector<std::size_t> cluster;  // planted cluster per row
};

SyntheticData generate_synthetic_labeled(const SyntheticSpec& spec);
Dataset generate_synthetic(const SyntheticSpec& spec);

struct SuppressedCell {
    std::size_t row = 0;
    std::size_t column = 0;
    double truth = 0.0;
};

struct SuppressionPlan {
    std::size_t per_row = 0;
    std::uint64_t seed = 0;
    std::vector<SuppressedCell> cells;  // row-major order
};

struct Suppression {
    Dataset data;  // suppressed cells are masked and hold no value
    SuppressionPlan plan;
};

/// Masks exactly m more present cells in every row, chosen uniformly without replacement.
Suppression suppress(const Dataset& d, std::size_t m, std::uint64_t seed);

/// Mean of (estimate - truth)^2 over the plan's cells for column-mean imputation;
/// means come from the present values of `d`.
double baseline_mean_impute_mqe(const Dataset& d, const SuppressionPlan& plan);

/// Adjusted Rand index of two partitions of the same units (may be negative).
double adjusted_rand_index(const SuperClassing& a, const SuperClassing& b);

/// Adjusted Rand index clamped to [0, 1].
double superclass_stability(const SuperClassing& base, const SuperClassing& variant);

enum class RecoveryStrategy {
    /// Train a new map on the suppressed data.
    Retrain,
    /// Classify the suppressed rows on the map built from the unsuppressed data.
    ReuseBaseline,
};

enum class StabilityBasis {
    /// Partition of the rows: each row takes the super-class of its winning unit.
    Observations,
    /// Partition of the map units themselves.
    Units,
};

struct ExperimentConfig {
    GridTopology topology{3, 3};
    TrainingSchedule schedule;
    InitPolicy init = InitPolicy::UniformRange;
    ImputeMode mode = ImputeMode::Hard;
    std::size_t superclasses = 3;
    RecoveryStrategy strategy = RecoveryStrategy::Retrain;
    StabilityBasis stability = StabilityBasis::Observations;
};

struct RecoveryReport {
    std::size_t m = 0;
    double missing_fraction = 0.0;  // m / p
    std::size_t cells = 0;
    double mqe = 0.0;  // NaN when nothing was suppressed
    std::vector<double> column_mqe;  // NaN for columns without suppressed cells
    double stability = 1.0;
    double baseline_mqe = 0.0;
    std::uint64_t suppression_seed = 0;
    std::uint64_t training_seed = 0;
};

/// Standardize, suppress m values per row, rebuild (or reuse) the map, impute
/// the suppressed cells and score them in standardized units. Stability compares
/// the super-classes of this map with those of a map trained on the
/// unsuppressed data with the same training seed, on the basis chosen in config.
RecoveryReport recovery_experiment(const Dataset& raw, const ExperimentConfig& config, std::size_t m,
                                   std::uint64_t suppression_seed);

struct SweepConfig {
    ExperimentConfig experiment;
    std::size_t m_min = 1;
    std::size_t m_max = 8;
    std::size_t replicates = 10;
    std::uint64_t seed = 0;
};

struct SweepRow {
    std::size_t m = 0;
    long percent_missing = 0;
    double mqe = 0.0;
    double mqe_sd = 0.0;
    double stability = 0.0;
    double stability_sd = 0.0;
    double baseline_mqe = 0.0;
    double baseline_mqe_sd = 0.0;
    std::size_t replicates = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<RecoveryReport> runs;  // grouped by m, then replicate
};

/// Runs recovery_experiment for every m in [m_min, m_max] and every replicate.
/// Replicate r uses training seed derive_seed(seed, r) for all m.
SweepResult recovery_sweep(const Dataset& raw, const SweepConfig& config);

/// Columns: m,percent_missing,mqe,stability,baseline_mqe,mqe_sd,stability_sd,baseline_mqe_sd,replicates
void write_sweep_csv(std::ostream& out, const SweepResult& r);
/// One line per run: m,replicate,suppression_seed,training_seed,cells,mqe,stability,baseline_mqe
void write_runs_csv(std::ostream& out, const SweepResult& r, std::size_t replicates);
std::string sweep_to_json(const SweepResult& r, const std::string& config_json, const std::vector<std::string>& columns);

}  // namespace ksom
