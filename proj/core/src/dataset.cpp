#include "ksom/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ksom/error.hpp"

namespace ksom {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_same_layout(const Dataset& d, const ColumnStats& s) {
    if (d.dim() != s.dim() || s.std.size() != s.dim()) {
        throw MismatchError("dataset has " + std::to_string(d.dim()) + " columns but statistics cover " +
                            std::to_string(s.dim()));
    }
}

}  // namespace

MaskedObservation::MaskedObservation(std::vector<double> values, std::string label)
    : values_(std::move(values)), missing_(values_.size(), false), present_(values_.size()), label_(std::move(label)) {}

MaskedObservation::MaskedObservation(std::vector<double> values, std::span<const std::size_t> missing, std::string label)
    : MaskedObservation(std::move(values), std::move(label)) {
    for (std::size_t k : missing) {
        if (k >= dim()) throw DataError("missing index " + std::to_string(k) + " out of range");
        set_missing(k);
    }
}

std::vector<std::size_t> MaskedObservation::missing_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < dim(); ++k) {
        if (missing_[k]) out.push_back(k);
    }
    return out;
}

void MaskedObservation::set_value(std::size_t k, double v) {
    if (missing_[k]) {
        missing_[k] = false;
        ++present_;
    }
    values_[k] = v;
}

void MaskedObservation::set_missing(std::size_t k) {
    if (!missing_[k]) {
        missing_[k] = true;
        --present_;
    }
    values_[k] = kNaN;
}

Dataset::Dataset(std::vector<std::string> column_names, std::string label_name)
    : columns_(std::move(column_names)), label_name_(std::move(label_name)) {}

void Dataset::add(MaskedObservation obs) {
    if (obs.dim() != dim()) {
        throw MismatchError("observation has " + std::to_string(obs.dim()) + " components, dataset expects " +
                            std::to_string(dim()));
    }
    rows_.push_back(std::move(obs));
}

bool Dataset::has_labels() const {
    if (!label_name_.empty()) return true;
    return std::any_of(rows_.begin(), rows_.end(), [](const auto& r) { return !r.label().empty(); });
}

Dataset Dataset::select(std::span<const std::size_t> rows) const {
    Dataset out(columns_, label_name_);
    for (std::size_t i : rows) out.add(rows_.at(i));
    return out;
}

std::size_t Dataset::missing_cells() const {
    std::size_t n = 0;
    for (const auto& r : rows_) n += r.missing_count();
    return n;
}

ColumnStats column_stats(const Dataset& d) {
    const std::size_t p = d.dim();
    ColumnStats s;
    s.columns = d.column_names();
    s.mean.assign(p, 0.0);
    s.std.assign(p, 0.0);
    s.present_count.assign(p, 0);

    for (const auto& row : d.rows()) {
        for (std::size_t k = 0; k < p; ++k) {
            if (row.is_missing(k)) continue;
            s.mean[k] += row.value(k);
            ++s.present_count[k];
        }
    }
    for (std::size_t k = 0; k < p; ++k) {
        if (s.present_count[k] < 2) {
            throw DataError("column '" + s.columns[k] + "' has " + std::to_string(s.present_count[k]) +
                            " present values, need at least 2");
        }
        s.mean[k] /= static_cast<double>(s.present_count[k]);
    }
    for (const auto& row : d.rows()) {
        for (std::size_t k = 0; k < p; ++k) {
            if (row.is_missing(k)) continue;
            const double dv = row.value(k) - s.mean[k];
            s.std[k] += dv * dv;
        }
    }
    for (std::size_t k = 0; k < p; ++k) {
        s.std[k] = std::sqrt(s.std[k] / static_cast<double>(s.present_count[k]));
        if (!(s.std[k] > 0.0)) throw DataError("column '" + s.columns[k] + "' is constant over its present values");
    }
    return s;
}

Dataset standardize(const Dataset& d, const ColumnStats& s) {
    require_same_layout(d, s);
    for (double sd : s.std) {
        if (!(sd > 0.0)) throw DataError("standardization needs a positive std for every column");
    }
    Dataset out = d;
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto& row = out[i];
        for (std::size_t k = 0; k < out.dim(); ++k) {
            if (row.is_present(k)) row.set_value(k, (row.value(k) - s.mean[k]) / s.std[k]);
        }
    }
    return out;
}

Dataset destandardize(const Dataset& d, const ColumnStats& s) {
    require_same_layout(d, s);
    Dataset out = d;
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto& row = out[i];
        for (std::size_t k = 0; k < out.dim(); ++k) {
            if (row.is_present(k)) row.set_value(k, s.mean[k] + s.std[k] * row.value(k));
        }
    }
    return out;
}

CorrelationMatrix::CorrelationMatrix(std::size_t p) : p_(p), cells_(p * p), common_(p * p, 0) {}

void CorrelationMatrix::set(std::size_t i, std::size_t j, std::optional<double> r) {
    cells_[i * p_ + j] = r;
    cells_[j * p_ + i] = r;
}

void CorrelationMatrix::set_common_rows(std::size_t i, std::size_t j, std::size_t n) {
    common_[i * p_ + j] = n;
    common_[j * p_ + i] = n;
}

std::size_t CorrelationMatrix::undefined_count() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < p_; ++i) {
        for (std::size_t j = i + 1; j < p_; ++j) {
            if (!at(i, j)) ++n;
        }
    }
    return n;
}

CorrelationMatrix correlation_matrix(const Dataset& d) {
    const std::size_t p = d.dim();
    CorrelationMatrix m(p);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i; j < p; ++j) {
            // Two passes over the commonly present rows: means, then centered moments.
            std::size_t n = 0;
            double mi = 0.0, mj = 0.0;
            for (const auto& row : d.rows()) {
                if (row.is_missing(i) || row.is_missing(j)) continue;
                mi += row.value(i);
                mj += row.value(j);
                ++n;
            }
            m.set_common_rows(i, j, n);
            if (n < 2) {
                m.set(i, j, std::nullopt);
                continue;
            }
            mi /= static_cast<double>(n);
            mj /= static_cast<double>(n);
            double sij = 0.0, sii = 0.0, sjj = 0.0;
            for (const auto& row : d.rows()) {
                if (row.is_missing(i) || row.is_missing(j)) continue;
                const double a = row.value(i) - mi;
                const double b = row.value(j) - mj;
                sij += a * b;
                sii += a * a;
                sjj += b * b;
            }
            if (!(sii > 0.0) || !(sjj > 0.0)) {
                m.set(i, j, std::nullopt);
            } else if (i == j) {
                m.set(i, j, 1.0);
            } else {
                m.set(i, j, std::clamp(sij / std::sqrt(sii * sjj), -1.0, 1.0));
            }
        }
    }
    return m;
}

CorrelationSummary correlation_summary(const CorrelationMatrix& m, double threshold) {
    CorrelationSummary out;
    const std::size_t p = m.dim();
    out.pairs = p * (p - (p > 0 ? 1 : 0)) / 2;
    bool any = false;
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i + 1; j < p; ++j) {
            const auto r = m.at(i, j);
            if (!r) {
                ++out.undefined;
                continue;
            }
            if (*r > threshold) ++out.above_threshold;
            const double a = std::abs(*r);
            out.min_abs = any ? std::min(out.min_abs, a) : a;
            any = true;
        }
    }
    return out;
}

}  // namespace ksom
