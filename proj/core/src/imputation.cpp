#include "ksom/imputation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "ksom/error.hpp"

namespace ksom {

namespace {

// Cumulative sums are compared with a small slack so that e.g. 0.25 + 0.5 is
// judged to reach 0.75 despite rounding.
constexpr double kProbSlack = 1e-12;

double to_raw(double z, const ColumnStats& s, std::size_t k) { return s.mean[k] + s.std[k] * z; }

}  // namespace

MembershipProfile membership(const MaskedObservation& x, const Codebook& cb) {
    if (x.all_missing()) throw AllMissingError();
    const std::size_t n = cb.units();
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) dist[i] = masked_sq_distance(x, cb.vector(i));
    const double dmin = *std::min_element(dist.begin(), dist.end());

    MembershipProfile out;
    out.probs.resize(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out.probs[i] = std::exp(-(dist[i] - dmin));
        total += out.probs[i];
    }
    for (double& p : out.probs) p /= total;
    out.winner = static_cast<std::size_t>(std::max_element(out.probs.begin(), out.probs.end()) - out.probs.begin());
    return out;
}

Interval quantile_interval(const EstimatorDistribution& dist, double level) {
    if (!(level > 0.0 && level < 1.0)) throw ConfigError("interval level must lie in (0, 1)");
    if (dist.values.empty() || dist.values.size() != dist.probs.size()) {
        throw ConfigError("estimator distribution is empty or inconsistent");
    }
    std::vector<std::size_t> order(dist.values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return dist.values[a] < dist.values[b]; });
    const double target = 1.0 - (1.0 - level) / 2.0;

    Interval out{dist.values[order.back()], dist.values[order.back()]};
    double cum = 0.0;
    for (std::size_t idx : order) {
        cum += dist.probs[idx];
        if (cum >= target - kProbSlack) {
            out.high = dist.values[idx];
            break;
        }
    }
    out.low = dist.values[order.front()];
    cum = 0.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        cum += dist.probs[*it];
        if (cum >= target - kProbSlack) {
            out.low = dist.values[*it];
            break;
        }
    }
    return out;
}

const ComponentEstimate* ImputationResult::find(std::size_t component) const {
    for (const auto& e : estimates) {
        if (e.component == component) return &e;
    }
    return nullptr;
}

MaskedObservation ImputationResult::completed(const MaskedObservation& x, bool weighted) const {
    MaskedObservation out = x;
    for (const auto& e : estimates) out.set_value(e.component, weighted && e.weighted ? *e.weighted : e.hard);
    return out;
}

ImputationResult impute_hard(const MaskedObservation& x, const Codebook& cb) {
    if (x.dim() != cb.dim()) throw MismatchError("observation and codebook dimensions differ");
    ImputationResult r;
    r.winner = find_winner(x, cb).unit;
    for (std::size_t k : x.missing_indices()) {
        ComponentEstimate e;
        e.component = k;
        e.hard = cb.at(r.winner, k);
        r.estimates.push_back(std::move(e));
    }
    return r;
}

ImputationResult impute_weighted(const MaskedObservation& x, const Codebook& cb) {
    ImputationResult r = impute_hard(x, cb);
    if (r.estimates.empty()) return r;
    const MembershipProfile m = membership(x, cb);
    for (auto& e : r.estimates) {
        EstimatorDistribution dist;
        dist.probs = m.probs;
        dist.values.resize(cb.units());
        double w = 0.0;
        for (std::size_t i = 0; i < cb.units(); ++i) {
            dist.values[i] = cb.at(i, e.component);
            w += m.probs[i] * dist.values[i];
        }
        // Rounding in the weights can push the mean a hair outside the support.
        const auto [lo, hi] = std::minmax_element(dist.values.begin(), dist.values.end());
        e.weighted = std::clamp(w, *lo, *hi);
        e.distribution = std::move(dist);
    }
    return r;
}

Interval estimator_interval(const ImputationResult& r, std::size_t component, double level) {
    const ComponentEstimate* e = r.find(component);
    if (!e) throw ConfigError("component " + std::to_string(component) + " was not imputed");
    if (!e->distribution) throw ConfigError("no estimator distribution for component " + std::to_string(component));
    return quantile_interval(*e->distribution, level);
}

std::string_view to_string(ImputeMode mode) { return mode == ImputeMode::Hard ? "hard" : "weighted"; }

ImputeMode parse_impute_mode(std::string_view text) {
    if (text == "hard") return ImputeMode::Hard;
    if (text == "weighted") return ImputeMode::Weighted;
    throw ConfigError("unknown imputation mode '" + std::string(text) + "' (expected hard or weighted)");
}

DatasetImputation impute_dataset(const Dataset& d, const Codebook& cb, const ImputeOptions& options) {
    if (d.dim() != cb.dim()) {
        throw MismatchError("data has " + std::to_string(d.dim()) + " columns, codebook has " +
                            std::to_string(cb.dim()));
    }
    if (!(options.level > 0.0 && options.level < 1.0)) throw ConfigError("interval level must lie in (0, 1)");
    if (options.raw_units && options.raw_units->dim() != d.dim()) {
        throw MismatchError("raw-unit statistics do not match the data");
    }
    const bool weighted = options.mode == ImputeMode::Weighted;

    DatasetImputation out{Dataset(d.column_names(), d.label_name()), {}};
    out.report.mode = options.mode;
    out.report.level = options.level;
    out.report.raw_units = options.raw_units.has_value();

    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto& x = d[i];
        if (x.all_missing()) {
            out.report.winners.emplace_back(std::nullopt);
            out.report.all_missing_rows.push_back(i);
            out.completed.add(x);
            continue;
        }
        const ImputationResult r = impute_weighted(x, cb);
        out.report.winners.emplace_back(r.winner);
        out.completed.add(r.completed(x, weighted));
        for (const auto& e : r.estimates) {
            CellEstimate c;
            c.row = i;
            c.column = e.component;
            c.estimate = weighted ? *e.weighted : e.hard;
            c.interval = quantile_interval(*e.distribution, options.level);
            c.winner = r.winner;
            out.report.cells.push_back(c);
        }
    }

    if (options.raw_units) {
        const ColumnStats& s = *options.raw_units;
        out.completed = destandardize(out.completed, s);
        for (auto& c : out.report.cells) {
            c.estimate = to_raw(c.estimate, s, c.column);
            c.interval.low = to_raw(c.interval.low, s, c.column);
            c.interval.high = to_raw(c.interval.high, s, c.column);
        }
    }
    return out;
}

void write_report_csv(std::ostream& out, const ImputationReport& report, const Dataset& d) {
    out << "row,column,mode,estimate,interval_low,interval_high,winner_unit\n";
    for (const auto& c : report.cells) {
        out << (c.row + 1) << ',' << csv_field(d.column_names()[c.column]) << ',' << to_string(report.mode) << ','
            << format_real(c.estimate) << ',' << format_real(c.interval.low) << ',' << format_real(c.interval.high)
            << ',' << c.winner << '\n';
    }
}

std::string report_to_json(const ImputationReport& report, const Dataset& d) {
    nlohmann::ordered_json j;
    j["mode"] = to_string(report.mode);
    j["level"] = report.level;
    j["units"] = report.raw_units ? "raw" : "standardized";
    auto& rows = j["rows"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < report.winners.size(); ++i) {
        nlohmann::ordered_json r;
        r["row"] = i + 1;
        if (i < d.size() && !d[i].label().empty()) r["label"] = d[i].label();
        if (report.winners[i]) {
            r["winner_unit"] = *report.winners[i];
        } else {
            r["winner_unit"] = nullptr;
        }
        rows.push_back(std::move(r));
    }
    auto& cells = j["cells"] = nlohmann::ordered_json::array();
    for (const auto& c : report.cells) {
        cells.push_back({{"row", c.row + 1},
                         {"column", d.column_names()[c.column]},
                         {"estimate", c.estimate},
                         {"interval_low", c.interval.low},
                         {"interval_high", c.interval.high},
                         {"winner_unit", c.winner}});
    }
    j["all_missing_rows"] = nlohmann::ordered_json::array();
    for (std::size_t i : report.all_missing_rows) j["all_missing_rows"].push_back(i + 1);
    return j.dump(2) + "\n";
}

void write_membership_csv(std::ostream& out, const Dataset& d, const Codebook& cb) {
    out << "row,label";
    for (std::size_t i = 0; i < cb.units(); ++i) out << ",p" << i;
    out << '\n';
    for (std::size_t r = 0; r < d.size(); ++r) {
        out << (r + 1) << ',' << csv_field(d[r].label());
        if (d[r].all_missing()) {
            for (std::size_t i = 0; i < cb.units(); ++i) out << ",NA";
        } else {
            for (double p : membership(d[r], cb).probs) out << ',' << format_real(p);
        }
        out << '\n';
    }
}

}  // namespace ksom
