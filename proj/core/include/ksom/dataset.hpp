#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ksom {

/// A p-dimensional observation with an explicit set of missing components.
///
/// Missing components hold a quiet NaN so that any code path that reads one
/// by mistake poisons its result instead of silently using a stale number.
class MaskedObservation {
public:
    MaskedObservation() = default;

    /// Fully present observation.
    explicit MaskedObservation(std::vector<double> values, std::string label = {});

    /// Observation whose components listed in `missing` (0-based) are absent.
    MaskedObservation(std::vector<double> values, std::span<const std::size_t> missing, std::string label = {});

    std::size_t dim() const noexcept { return values_.size(); }
    bool is_missing(std::size_t k) const { return missing_[k]; }
    bool is_present(std::size_t k) const { return !missing_[k]; }
    std::size_t present_count() const noexcept { return present_; }
    std::size_t missing_count() const noexcept { return dim() - present_; }
    bool complete() const noexcept { return present_ == dim(); }
    bool all_missing() const noexcept { return present_ == 0; }

    /// Raw value; only meaningful for present components.
    double value(std::size_t k) const { return values_[k]; }
    std::span<const double> values() const noexcept { return values_; }

    /// Indices of missing components, ascending.
    std::vector<std::size_t> missing_indices() const;

    void set_value(std::size_t k, double v);
    void set_missing(std::size_t k);

    const std::string& label() const noexcept { return label_; }
    void set_label(std::string label) { label_ = std::move(label); }

private:
    std::vector<double> values_;
    std::vector<bool> missing_;
    std::size_t present_ = 0;
    std::string label_;
};

/// Ordered observations sharing one column layout.
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(std::vector<std::string> column_names, std::string label_name = {});

    void add(MaskedObservation obs);

    std::size_t size() const noexcept { return rows_.size(); }
    bool empty() const noexcept { return rows_.empty(); }
    std::size_t dim() const noexcept { return columns_.size(); }

    const MaskedObservation& operator[](std::size_t i) const { return rows_[i]; }
    MaskedObservation& operator[](std::size_t i) { return rows_[i]; }
    const std::vector<MaskedObservation>& rows() const noexcept { return rows_; }

    const std::vector<std::string>& column_names() const noexcept { return columns_; }
    /// Header of the label column; empty when the data carried none.
    const std::string& label_name() const noexcept { return label_name_; }
    bool has_labels() const;

    /// Row subset, in the given order.
    Dataset select(std::span<const std::size_t> rows) const;

    std::size_t missing_cells() const;

private:
    std::vector<std::string> columns_;
    std::string label_name_;
    std::vector<MaskedObservation> rows_;
};

/// Per-column statistics over present values only (population std).
struct ColumnStats {
    std::vector<std::string> columns;
    std::vector<double> mean;
    std::vector<double> std;
    std::vector<std::size_t> present_count;

    std::size_t dim() const noexcept { return mean.size(); }
};

struct CsvOptions {
    std::string missing_marker = "NA";
    bool has_header = true;
    /// Header name, or a 0-based field index when there is no header.
    std::optional<std::string> label_column;
};

Dataset parse_csv(std::istream& in, const CsvOptions& options = {});
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Writes the label column first (when present), then the numeric columns.
void write_csv(std::ostream& out, const Dataset& d, const CsvOptions& options = {});
void save_csv(const std::filesystem::path& path, const Dataset& d, const CsvOptions& options = {});

/// Shortest decimal text that parses back to the same double.
std::string format_real(double v);

/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(const std::string& text);

/// Splits one CSV record; double quotes delimit fields and "" escapes a quote.
std::vector<std::string> split_csv_record(std::string_view line);

ColumnStats column_stats(const Dataset& d);

/// (x - mean) / std on present cells. Masks are carried over untouched.
Dataset standardize(const Dataset& d, const ColumnStats& s);
/// Inverse of standardize: mean + std * z on present cells.
Dataset destandardize(const Dataset& d, const ColumnStats& s);

/// Symmetric p x p Pearson matrix with pairwise deletion.
///
/// An entry is undefined when the pair shares fewer than two rows with both
/// values present, or when either column is constant over those rows.
class CorrelationMatrix {
public:
    explicit CorrelationMatrix(std::size_t p);

    std::size_t dim() const noexcept { return p_; }
    std::optional<double> at(std::size_t i, std::size_t j) const { return cells_[i * p_ + j]; }
    void set(std::size_t i, std::size_t j, std::optional<double> r);
    /// Rows with both columns present.
    std::size_t common_rows(std::size_t i, std::size_t j) const { return common_[i * p_ + j]; }
    void set_common_rows(std::size_t i, std::size_t j, std::size_t n);

    std::size_t undefined_count() const;

private:
    std::size_t p_;
    std::vector<std::optional<double>> cells_;
    std::vector<std::size_t> common_;
};

CorrelationMatrix correlation_matrix(const Dataset& d);

struct CorrelationSummary {
    std::size_t pairs = 0;            // p(p-1)/2 upper-triangle entries
    std::size_t above_threshold = 0;  // defined entries with r > threshold
    std::size_t undefined = 0;
    double min_abs = 0.0;             // over defined off-diagonal entries
};

CorrelationSummary correlation_summary(const CorrelationMatrix& m, double threshold);

}  // namespace ksom
