#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ksom/dataset.hpp"

namespace ksom {

/// Rectangular grid of map units, row-major linear indices.
class GridTopology {
public:
    GridTopology(std::size_t rows, std::size_t cols);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t units() const noexcept { return rows_ * cols_; }

    std::size_t row_of(std::size_t unit) const noexcept { return unit / cols_; }
    std::size_t col_of(std::size_t unit) const noexcept { return unit % cols_; }
    std::size_t index(std::size_t row, std::size_t col) const noexcept { return row * cols_ + col; }

    /// Chebyshev distance max(|dr|, |dc|) between two units.
    std::size_t distance(std::size_t a, std::size_t b) const noexcept;

    /// Units within Chebyshev `radius` of `unit`, ascending; radius 0 gives {unit}.
    std::vector<std::size_t> neighborhood(std::size_t unit, std::size_t radius) const;

    /// True when the given units form one 8-connected region.
    bool connected(std::span<const std::size_t> units) const;

    bool operator==(const GridTopology&) const = default;

private:
    std::size_t rows_;
    std::size_t cols_;
};

/// One fully defined code-vector per map unit.
class Codebook {
public:
    Codebook(GridTopology topology, std::size_t dim);
    Codebook(GridTopology topology, std::size_t dim, std::vector<double> flat);

    const GridTopology& topology() const noexcept { return topology_; }
    std::size_t units() const noexcept { return topology_.units(); }
    std::size_t dim() const noexcept { return dim_; }

    std::span<const double> vector(std::size_t unit) const { return {data_.data() + unit * dim_, dim_}; }
    std::span<double> vector(std::size_t unit) { return {data_.data() + unit * dim_, dim_}; }
    double at(std::size_t unit, std::size_t k) const { return data_[unit * dim_ + k]; }

    /// Row-major n x p storage.
    const std::vector<double>& flat() const noexcept { return data_; }

    bool operator==(const Codebook&) const = default;

private:
    GridTopology topology_;
    std::size_t dim_;
    std::vector<double> data_;
};

/// Learning-rate and neighborhood-radius sequences for online training.
///
/// eps(t) = eps0 * T0 / (T0 + t) with T0 = T / 10, a 1/t law starting at eps0.
/// radius(t) falls as an integer staircase from radius0 to 0, reaching 0 at
/// radius_decay * T; the remaining steps update the winner only.
struct TrainingSchedule {
    std::size_t iterations = 1500;
    double eps0 = 0.5;
    /// Defaults to max(rows, cols) / 2 when unset.
    std::optional<std::size_t> radius0;
    double radius_decay = 0.8;
    std::uint64_t seed = 0;

    void validate() const;

    double learning_rate(std::size_t t) const;
    std::size_t initial_radius(const GridTopology& topo) const;
    std::size_t radius(std::size_t t, const GridTopology& topo) const;
};

enum class InitPolicy {
    /// Uniform draws within each column's present-value range.
    UniformRange,
    /// Distinct complete rows; needs at least as many complete rows as units.
    SampleCompleteRows,
};

struct Assignment {
    std::size_t unit = 0;
    double distance = 0.0;  // masked squared distance to the winner

    bool operator==(const Assignment&) const = default;
};

/// Sum of (x_k - c_k)^2 over the components present in x.
double masked_sq_distance(const MaskedObservation& x, std::span<const double> c);

/// Unit with the smallest masked squared distance; ties go to the lowest index.
Assignment find_winner(const MaskedObservation& x, const Codebook& cb);

/// Moves the winner and its Chebyshev neighbors toward x on x's present components.
Assignment update_step(Codebook& cb, const MaskedObservation& x, double eps, std::size_t radius);

Codebook initialize_codebook(const Dataset& d, const GridTopology& topo, InitPolicy policy, std::uint64_t seed);

/// Called after step t (0-based) with the current codebook.
using TrainingObserver = std::function<void(std::size_t step, const Codebook& cb)>;

/// Online training from an initial codebook. Observations are drawn uniformly
/// with replacement; rows without any present component are rejected up front.
Codebook train(const Dataset& d, Codebook initial, const TrainingSchedule& schedule,
               const TrainingObserver& observer = {});

/// initialize_codebook followed by train; the init draw uses a seed derived from schedule.seed.
Codebook train(const Dataset& d, const GridTopology& topo, const TrainingSchedule& schedule,
               InitPolicy init = InitPolicy::UniformRange, const TrainingObserver& observer = {});

struct Classification {
    /// Empty entries for rows with no present component.
    std::vector<std::optional<Assignment>> rows;
    std::vector<std::size_t> all_missing_rows;
};

/// Nearest-unit allocation under the masked distance; the codebook is not modified.
Classification classify(const Dataset& d, const Codebook& cb);

struct QuantizationError {
    double value = 0.0;  // mean of winner distance / present count
    std::size_t used = 0;
    std::size_t excluded = 0;  // all-missing rows
};

QuantizationError quantization_error(const Dataset& d, const Codebook& cb);

}  // namespace ksom
