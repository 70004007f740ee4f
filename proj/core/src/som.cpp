#include "ksom/som.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ksom/error.hpp"
#include "ksom/rng.hpp"

namespace ksom {

namespace {

std::size_t abs_diff(std::size_t a, std::size_t b) { return a > b ? a - b : b - a; }

void require_dim(const Dataset& d, const Codebook& cb) {
    if (d.dim() != cb.dim()) {
        throw MismatchError("data has " + std::to_string(d.dim()) + " columns, codebook has " +
                            std::to_string(cb.dim()));
    }
}

}  // namespace

GridTopology::GridTopology(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
    if (rows == 0 || cols == 0) throw ConfigError("grid dimensions must be positive");
}

std::size_t GridTopology::distance(std::size_t a, std::size_t b) const noexcept {
    return std::max(abs_diff(row_of(a), row_of(b)), abs_diff(col_of(a), col_of(b)));
}

std::vector<std::size_t> GridTopology::neighborhood(std::size_t unit, std::size_t radius) const {
    const std::size_t r = row_of(unit);
    const std::size_t c = col_of(unit);
    const std::size_t r0 = r > radius ? r - radius : 0;
    const std::size_t c0 = c > radius ? c - radius : 0;
    const std::size_t r1 = std::min(rows_ - 1, r + radius);
    const std::size_t c1 = std::min(cols_ - 1, c + radius);
    std::vector<std::size_t> out;
    out.reserve((r1 - r0 + 1) * (c1 - c0 + 1));
    for (std::size_t rr = r0; rr <= r1; ++rr) {
        for (std::size_t cc = c0; cc <= c1; ++cc) out.push_back(index(rr, cc));
    }
    return out;
}

bool GridTopology::connected(std::span<const std::size_t> units) const {
    if (units.empty()) return true;
    std::vector<char> member(this->units(), 0);
    for (std::size_t u : units) member.at(u) = 1;
    std::vector<char> seen(this->units(), 0);
    std::vector<std::size_t> stack{units.front()};
    seen[units.front()] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t v : neighborhood(u, 1)) {
            if (member[v] && !seen[v]) {
                seen[v] = 1;
                ++reached;
                stack.push_back(v);
            }
        }
    }
    std::size_t distinct = 0;
    for (char m : member) distinct += m;
    return reached == distinct;
}

Codebook::Codebook(GridTopology topology, std::size_t dim)
    : topology_(topology), dim_(dim), data_(topology.units() * dim, 0.0) {
    if (dim == 0) throw ConfigError("codebook dimension must be positive");
}

Codebook::Codebook(GridTopology topology, std::size_t dim, std::vector<double> flat)
    : topology_(topology), dim_(dim), data_(std::move(flat)) {
    if (dim == 0) throw ConfigError("codebook dimension must be positive");
    if (data_.size() != topology_.units() * dim_) {
        throw MismatchError("codebook storage has " + std::to_string(data_.size()) + " values, expected " +
                            std::to_string(topology_.units() * dim_));
    }
    for (double v : data_) {
        if (!std::isfinite(v)) throw DataError("code-vectors must be finite");
    }
}

void TrainingSchedule::validate() const {
    if (iterations == 0) throw ConfigError("iterations must be positive");
    if (!(eps0 > 0.0 && eps0 <= 1.0)) throw ConfigError("eps0 must lie in (0, 1]");
    if (!(radius_decay >= 0.0 && radius_decay <= 1.0)) throw ConfigError("radius decay must lie in [0, 1]");
}

double TrainingSchedule::learning_rate(std::size_t t) const {
    const double t0 = static_cast<double>(iterations) / 10.0;
    return eps0 * t0 / (t0 + static_cast<double>(t));
}

std::size_t TrainingSchedule::initial_radius(const GridTopology& topo) const {
    return radius0.value_or(std::max(topo.rows(), topo.cols()) / 2);
}

std::size_t TrainingSchedule::radius(std::size_t t, const GridTopology& topo) const {
    const std::size_t r0 = initial_radius(topo);
    const double cutoff = radius_decay * static_cast<double>(iterations);
    const double tt = static_cast<double>(t);
    if (r0 == 0 || tt >= cutoff) return 0;
    const double r = std::ceil(static_cast<double>(r0) * (1.0 - tt / cutoff));
    return std::min(r0, static_cast<std::size_t>(r));
}

double masked_sq_distance(const MaskedObservation& x, std::span<const double> c) {
    if (x.all_missing()) throw AllMissingError();
    if (c.size() != x.dim()) throw MismatchError("observation and code-vector dimensions differ");
    double sum = 0.0;
    for (std::size_t k = 0; k < x.dim(); ++k) {
        if (x.is_missing(k)) continue;
        const double d = x.value(k) - c[k];
        sum += d * d;
    }
    return sum;
}

Assignment find_winner(const MaskedObservation& x, const Codebook& cb) {
    if (x.all_missing()) throw AllMissingError();
    Assignment best{0, std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < cb.units(); ++i) {
        const double d = masked_sq_distance(x, cb.vector(i));
        if (d < best.distance) best = {i, d};
    }
    return best;
}

Assignment update_step(Codebook& cb, const MaskedObservation& x, double eps, std::size_t radius) {
    if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("learning rate must lie in (0, 1]");
    const Assignment win = find_winner(x, cb);
    for (std::size_t unit : cb.topology().neighborhood(win.unit, radius)) {
        auto c = cb.vector(unit);
        for (std::size_t k = 0; k < x.dim(); ++k) {
            if (x.is_present(k)) c[k] += eps * (x.value(k) - c[k]);
        }
    }
    return win;
}

Codebook initialize_codebook(const Dataset& d, const GridTopology& topo, InitPolicy policy, std::uint64_t seed) {
    if (d.empty()) throw DataError("cannot initialize a codebook from an empty dataset");
    const std::size_t p = d.dim();
    Rng rng(seed);
    std::vector<double> flat;
    flat.reserve(topo.units() * p);

    switch (policy) {
    case InitPolicy::UniformRange: {
        std::vector<double> lo(p, std::numeric_limits<double>::infinity());
        std::vector<double> hi(p, -std::numeric_limits<double>::infinity());
        for (const auto& row : d.rows()) {
            for (std::size_t k = 0; k < p; ++k) {
                if (row.is_missing(k)) continue;
                lo[k] = std::min(lo[k], row.value(k));
                hi[k] = std::max(hi[k], row.value(k));
            }
        }
        for (std::size_t k = 0; k < p; ++k) {
            if (lo[k] > hi[k]) throw DataError("column '" + d.column_names()[k] + "' has no present value");
        }
        for (std::size_t u = 0; u < topo.units(); ++u) {
            for (std::size_t k = 0; k < p; ++k) flat.push_back(rng.uniform(lo[k], hi[k]));
        }
        break;
    }
    case InitPolicy::SampleCompleteRows: {
        std::vector<std::size_t> complete;
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (d[i].complete()) complete.push_back(i);
        }
        if (complete.size() < topo.units()) {
            throw ConfigError("complete-row initialization needs " + std::to_string(topo.units()) +
                              " complete rows, dataset has " + std::to_string(complete.size()));
        }
        // Partial Fisher-Yates: the first `units` slots become a uniform sample.
        for (std::size_t u = 0; u < topo.units(); ++u) {
            const std::size_t j = u + rng.index(complete.size() - u);
            std::swap(complete[u], complete[j]);
            const auto values = d[complete[u]].values();
            flat.insert(flat.end(), values.begin(), values.end());
        }
        break;
    }
    }
    return Codebook(topo, p, std::move(flat));
}

Codebook train(const Dataset& d, Codebook initial, const TrainingSchedule& schedule, const TrainingObserver& observer) {
    schedule.validate();
    if (d.empty()) throw DataError("cannot train on an empty dataset");
    require_dim(d, initial);

    std::vector<std::size_t> bad;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i].all_missing()) bad.push_back(i);
    }
    if (!bad.empty()) {
        std::string rows;
        for (std::size_t i = 0; i < bad.size(); ++i) rows += (i ? ", " : "") + std::to_string(bad[i] + 1);
        throw DataError("rows with every component missing cannot be used for training: " + rows);
    }

    Codebook cb = std::move(initial);
    const GridTopology topo = cb.topology();
    Rng draws(derive_seed(schedule.seed, 2));
    for (std::size_t t = 0; t < schedule.iterations; ++t) {
        const auto& x = d[draws.index(d.size())];
        update_step(cb, x, schedule.learning_rate(t), schedule.radius(t, topo));
        if (observer) observer(t, cb);
    }
    return cb;
}

Codebook train(const Dataset& d, const GridTopology& topo, const TrainingSchedule& schedule, InitPolicy init,
               const TrainingObserver& observer) {
    schedule.validate();
    return train(d, initialize_codebook(d, topo, init, derive_seed(schedule.seed, 1)), schedule, observer);
}

Classification classify(const Dataset& d, const Codebook& cb) {
    require_dim(d, cb);
    Classification out;
    out.rows.reserve(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i].all_missing()) {
            out.rows.emplace_back(std::nullopt);
            out.all_missing_rows.push_back(i);
        } else {
            out.rows.emplace_back(find_winner(d[i], cb));
        }
    }
    return out;
}

QuantizationError quantization_error(const Dataset& d, const Codebook& cb) {
    require_dim(d, cb);
    QuantizationError q;
    double sum = 0.0;
    for (const auto& row : d.rows()) {
        if (row.all_missing()) {
            ++q.excluded;
            continue;
        }
        sum += find_winner(row, cb).distance / static_cast<double>(row.present_count());
        ++q.used;
    }
    q.value = q.used ? sum / static_cast<double>(q.used) : 0.0;
    return q;
}

}  // namespace ksom
