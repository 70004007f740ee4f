#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ksom/dataset.hpp"
#include "ksom/som.hpp"

namespace ksom {

/// Soft class membership: softmax of the negated masked squared distances.
struct MembershipProfile {
    std::vector<double> probs;
    std::size_t winner = 0;  // argmax, lowest index on ties
};

MembershipProfile membership(const MaskedObservation& x, const Codebook& cb);

/// Discrete distribution of an estimator: value C_{i,k} with probability p_i.
struct EstimatorDistribution {
    std::vector<double> probs;
    std::vector<double> values;
};

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

/// Central interval of a discrete distribution at `level` in (0, 1).
///
/// With a = (1 - level) / 2 the upper bound is the smallest value v with
/// P(X <= v) >= 1 - a and the lower bound is the largest v with P(X >= v) >= 1 - a,
/// so a point mass gives a degenerate interval and the bounds mirror each other.
Interval quantile_interval(const EstimatorDistribution& dist, double level);

struct ComponentEstimate {
    std::size_t component = 0;
    double hard = 0.0;                 // winner's component
    std::optional<double> weighted;    // probability-weighted mean over units
    std::optional<EstimatorDistribution> distribution;
};

struct ImputationResult {
    std::size_t winner = 0;
    std::vector<ComponentEstimate> estimates;  // one per missing component, ascending

    const ComponentEstimate* find(std::size_t component) const;
    /// Observation with every missing component replaced by the chosen estimate.
    MaskedObservation completed(const MaskedObservation& x, bool weighted) const;
};

/// Winner's code-vector components for every missing component of x.
ImputationResult impute_hard(const MaskedObservation& x, const Codebook& cb);

/// Hard estimates plus membership-weighted means and their estimator distributions.
ImputationResult impute_weighted(const MaskedObservation& x, const Codebook& cb);

/// Throws ConfigError when the result carries no distribution for `component`
/// or `level` lies outside (0, 1).
Interval estimator_interval(const ImputationResult& r, std::size_t component, double level);

enum class ImputeMode { Hard, Weighted };

std::string_view to_string(ImputeMode mode);
ImputeMode parse_impute_mode(std::string_view text);

struct ImputeOptions {
    ImputeMode mode = ImputeMode::Hard;
    double level = 0.9;
    /// When set, the completed data and every reported number are mapped back to raw units.
    std::optional<ColumnStats> raw_units;
};

struct CellEstimate {
    std::size_t row = 0;
    std::size_t column = 0;
    double estimate = 0.0;
    Interval interval;
    std::size_t winner = 0;
};

struct ImputationReport {
    ImputeMode mode = ImputeMode::Hard;
    double level = 0.9;
    bool raw_units = false;
    /// Winning unit per row; empty for all-missing rows.
    std::vector<std::optional<std::size_t>> winners;
    std::vector<CellEstimate> cells;
    std::vector<std::size_t> all_missing_rows;  // left incomplete
};

struct DatasetImputation {
    Dataset completed;
    ImputationReport report;
};

DatasetImputation impute_dataset(const Dataset& d, const Codebook& cb, const ImputeOptions& options = {});

/// Columns: row,column,mode,estimate,interval_low,interval_high,winner_unit (row is 1-based).
void write_report_csv(std::ostream& out, const ImputationReport& report, const Dataset& d);
std::string report_to_json(const ImputationReport& report, const Dataset& d);

/// One line per observation: row, label, then p_0 .. p_{n-1}.
void write_membership_csv(std::ostream& out, const Dataset& d, const Codebook& cb);

}  // namespace ksom
