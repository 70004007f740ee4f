#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ksom/dataset.hpp"
#include "ksom/error.hpp"

namespace ksom {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

// RFC-4180-ish: double quotes delimit fields, "" is an escaped quote.
std::vector<std::string> split_fields(std::string_view line, std::size_t line_no) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(ch);
        }
    }
    if (quoted) throw DataError("line " + std::to_string(line_no) + ": unterminated quoted field");
    out.push_back(std::move(field));
    return out;
}

std::optional<double> parse_real(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || text.empty()) return std::nullopt;
    return v;
}

}  // namespace

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char ch : text) {
        if (ch == '"') out.push_back('"');
        out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

std::vector<std::string> split_csv_record(std::string_view line) { return split_fields(line, 0); }

std::string format_real(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

Dataset parse_csv(std::istream& in, const CsvOptions& options) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::size_t> line_numbers;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        records.push_back(split_fields(line, line_no));
        line_numbers.push_back(line_no);
    }
    if (records.empty()) throw DataError("CSV input is empty");

    const std::size_t width = records.front().size();
    for (std::size_t r = 0; r < records.size(); ++r) {
        if (records[r].size() != width) {
            throw DataError("line " + std::to_string(line_numbers[r]) + ": expected " + std::to_string(width) +
                            " fields, found " + std::to_string(records[r].size()));
        }
    }

    std::vector<std::string> header;
    std::size_t first_data = 0;
    if (options.has_header) {
        for (const auto& h : records.front()) header.emplace_back(trim(h));
        first_data = 1;
    }
    if (records.size() == first_data) throw DataError("CSV input has no data rows");

    std::optional<std::size_t> label_index;
    if (options.label_column) {
        const auto& name = *options.label_column;
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (header[c] == name) label_index = c;
        }
        if (!label_index) {
            std::size_t idx = 0;
            const auto [ptr, ec] = std::from_chars(name.data(), name.data() + name.size(), idx);
            if (ec != std::errc() || ptr != name.data() + name.size() || idx >= width) {
                throw ConfigError("label column '" + name + "' not found");
            }
            label_index = idx;
        }
    }

    std::vector<std::string> columns;
    std::vector<std::size_t> numeric_fields;
    for (std::size_t c = 0; c < width; ++c) {
        if (label_index && c == *label_index) continue;
        numeric_fields.push_back(c);
        columns.push_back(options.has_header ? header[c] : "V" + std::to_string(numeric_fields.size()));
    }
    if (columns.empty()) throw DataError("CSV input has no numeric column");

    std::string label_name;
    if (label_index) label_name = options.has_header ? header[*label_index] : "label";

    Dataset d(std::move(columns), std::move(label_name));
    for (std::size_t r = first_data; r < records.size(); ++r) {
        const auto& rec = records[r];
        const std::size_t row_index = r - first_data;
        std::string label = label_index ? std::string(trim(rec[*label_index])) : std::string();
        std::vector<double> values(numeric_fields.size(), 0.0);
        std::vector<std::size_t> missing;
        for (std::size_t j = 0; j < numeric_fields.size(); ++j) {
            const std::string_view cell = trim(rec[numeric_fields[j]]);
            if (cell.empty() || cell == options.missing_marker) {
                missing.push_back(j);
                continue;
            }
            const auto v = parse_real(cell);
            if (!v) {
                const std::string who = label.empty() ? std::to_string(row_index + 1) : "'" + label + "'";
                throw DataError("row " + who + " (line " + std::to_string(line_numbers[r]) + "), column " +
                                std::to_string(j + 1) + " ('" + d.column_names()[j] + "'): cannot parse '" +
                                std::string(cell) + "' as a number");
            }
            values[j] = *v;
        }
        d.add(MaskedObservation(std::move(values), missing, std::move(label)));
    }
    return d;
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return parse_csv(in, options);
}

void write_csv(std::ostream& out, const Dataset& d, const CsvOptions& options) {
    const bool labels = d.has_labels();
    if (options.has_header) {
        bool first = true;
        if (labels) {
            out << csv_field(d.label_name().empty() ? "label" : d.label_name());
            first = false;
        }
        for (const auto& c : d.column_names()) {
            if (!first) out << ',';
            out << csv_field(c);
            first = false;
        }
        out << '\n';
    }
    for (const auto& row : d.rows()) {
        bool first = true;
        if (labels) {
            out << csv_field(row.label());
            first = false;
        }
        for (std::size_t k = 0; k < row.dim(); ++k) {
            if (!first) out << ',';
            out << (row.is_missing(k) ? options.missing_marker : format_real(row.value(k)));
            first = false;
        }
        out << '\n';
    }
}

void save_csv(const std::filesystem::path& path, const Dataset& d, const CsvOptions& options) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    write_csv(out, d, options);
    if (!out) throw DataError("write failed for '" + path.string() + "'");
}

}  // namespace ksom
