#include "ksom/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "ksom/error.hpp"
#include "ksom/rng.hpp"

namespace ksom {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double choose2(double n) { return n * (n - 1.0) / 2.0; }

struct MeanSd {
    double mean = kNaN;
    double sd = kNaN;
};

// Sample standard deviation; a single value has sd 0. NaN inputs are skipped.
MeanSd mean_sd(const std::vector<double>& xs) {
    std::vector<double> v;
    for (double x : xs) {
        if (!std::isnan(x)) v.push_back(x);
    }
    MeanSd out;
    if (v.empty()) return out;
    out.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    return out;
}

nlohmann::ordered_json real_or_null(double v) {
    return std::isnan(v) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(v);
}

std::string csv_real(double v) { return std::isnan(v) ? std::string("NA") : format_real(v); }

SuperClassing superclasses_of(const Codebook& cb, std::size_t k) { return cut(agglomerate(cb), k); }

}  // namespace

void SyntheticSpec::validate() const {
    if (rows == 0 || cols == 0) throw ConfigError("synthetic data needs at least one row and one column");
    if (clusters == 0 || clusters > rows) throw ConfigError("cluster count must lie in [1, rows]");
    if (!(spread >= 0.0)) throw ConfigError("cluster spread must be nonnegative");
    if (!(correlation >= 0.0 && correlation <= 1.0)) throw ConfigError("correlation strength must lie in [0, 1]");
    if (clusters == 1 && spread == 0.0) throw ConfigError("a single cluster with zero spread has no variance");
}

SyntheticData generate_synthetic_labeled(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);

    std::vector<double> centers(spec.clusters, 0.0);
    if (spec.clusters > 1) {
        for (std::size_t c = 0; c < spec.clusters; ++c) {
            centers[c] = -1.0 + 2.0 * static_cast<double>(c) / static_cast<double>(spec.clusters - 1);
        }
    }
    const double center_mean = std::accumulate(centers.begin(), centers.end(), 0.0) / static_cast<double>(spec.clusters);
    double center_var = 0.0;
    for (double c : centers) center_var += (c - center_mean) * (c - center_mean);
    center_var /= static_cast<double>(spec.clusters);
    const double latent_sd = std::sqrt(center_var + spec.spread * spec.spread);

    std::vector<double> offset(spec.cols), scale(spec.cols);
    for (std::size_t j = 0; j < spec.cols; ++j) {
        offset[j] = rng.uniform(-5.0, 5.0);
        scale[j] = rng.uniform(0.5, 3.0);
    }
    const double shared = std::sqrt(spec.correlation);
    const double own = std::sqrt(1.0 - spec.correlation);

    std::vector<std::string> names;
    for (std::size_t j = 0; j < spec.cols; ++j) names.push_back("X" + std::to_string(j + 1));
    SyntheticData out{Dataset(std::move(names), "id"), {}};
    const std::size_t width = std::to_string(spec.rows).size();
    for (std::size_t i = 0; i < spec.rows; ++i) {
        const std::size_t c = i % spec.clusters;
        const double s = (centers[c] - center_mean + spec.spread * rng.normal()) / latent_sd;
        std::vector<double> values(spec.cols);
        for (std::size_t j = 0; j < spec.cols; ++j) {
            values[j] = offset[j] + scale[j] * (shared * s + own * rng.normal());
        }
        std::string idx = std::to_string(i + 1);
        idx.insert(0, width - idx.size(), '0');
        out.data.add(MaskedObservation(std::move(values), "c" + std::to_string(c + 1) + "-" + idx));
        out.cluster.push_back(c);
    }
    return out;
}

Dataset generate_synthetic(const SyntheticSpec& spec) { return generate_synthetic_labeled(spec).data; }

Suppression suppress(const Dataset& d, std::size_t m, std::uint64_t seed) {
    if (d.dim() > 0 && m > d.dim() - 1) {
        throw ConfigError("cannot suppress " + std::to_string(m) + " of " + std::to_string(d.dim()) + " values per row");
    }
    Suppression out{d, {m, seed, {}}};
    if (m == 0) return out;
    Rng rng(seed);
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto& row = d[i];
        if (row.present_count() <= m) {
            throw DataError("row " + std::to_string(i + 1) + " has " + std::to_string(row.present_count()) +
                            " present values, cannot suppress " + std::to_string(m));
        }
        std::vector<std::size_t> present;
        for (std::size_t k = 0; k < row.dim(); ++k) {
            if (row.is_present(k)) present.push_back(k);
        }
        for (std::size_t s = 0; s < m; ++s) {
            const std::size_t j = s + rng.index(present.size() - s);
            std::swap(present[s], present[j]);
        }
        std::sort(present.begin(), present.begin() + static_cast<std::ptrdiff_t>(m));
        for (std::size_t s = 0; s < m; ++s) {
            const std::size_t k = present[s];
            out.plan.cells.push_back({i, k, row.value(k)});
            out.data[i].set_missing(k);
        }
    }
    return out;
}

double baseline_mean_impute_mqe(const Dataset& d, const SuppressionPlan& plan) {
    if (plan.cells.empty()) return kNaN;
    std::vector<double> sum(d.dim(), 0.0);
    std::vector<std::size_t> count(d.dim(), 0);
    for (const auto& row : d.rows()) {
        for (std::size_t k = 0; k < d.dim(); ++k) {
            if (row.is_present(k)) {
                sum[k] += row.value(k);
                ++count[k];
            }
        }
    }
    double total = 0.0;
    for (const auto& c : plan.cells) {
        if (c.column >= d.dim()) throw MismatchError("suppression plan refers to a column outside the data");
        if (count[c.column] == 0) throw DataError("column '" + d.column_names()[c.column] + "' has no present value");
        const double e = sum[c.column] / static_cast<double>(count[c.column]) - c.truth;
        total += e * e;
    }
    return total / static_cast<double>(plan.cells.size());
}

double adjusted_rand_index(const SuperClassing& a, const SuperClassing& b) {
    if (a.assignment.size() != b.assignment.size()) throw MismatchError("partitions cover different unit counts");
    const std::size_t n = a.assignment.size();
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> table;
    std::map<std::size_t, std::size_t> rows, cols;
    for (std::size_t i = 0; i < n; ++i) {
        ++table[{a.assignment[i], b.assignment[i]}];
        ++rows[a.assignment[i]];
        ++cols[b.assignment[i]];
    }
    double index = 0.0, sum_a = 0.0, sum_b = 0.0;
    for (const auto& [_, c] : table) index += choose2(static_cast<double>(c));
    for (const auto& [_, c] : rows) sum_a += choose2(static_cast<double>(c));
    for (const auto& [_, c] : cols) sum_b += choose2(static_cast<double>(c));
    const double total = choose2(static_cast<double>(n));
    if (total == 0.0) return 1.0;
    const double expected = sum_a * sum_b / total;
    const double max_index = (sum_a + sum_b) / 2.0;
    // Both partitions trivial (all singletons or all in one) and therefore equal.
    if (max_index == expected) return 1.0;
    return (index - expected) / (max_index - expected);
}

double superclass_stability(const SuperClassing& base, const SuperClassing& variant) {
    return std::clamp(adjusted_rand_index(base, variant), 0.0, 1.0);
}

RecoveryReport recovery_experiment(const Dataset& raw, const ExperimentConfig& config, std::size_t m,
                                   std::uint64_t suppression_seed) {
    if (config.superclasses < 1 || config.superclasses > config.topology.units()) {
        throw ConfigError("super-class count must lie in [1, map units]");
    }
    const Dataset z = standardize(raw, column_stats(raw));

    RecoveryReport rep;
    rep.m = m;
    rep.missing_fraction = static_cast<double>(m) / static_cast<double>(raw.dim());
    rep.suppression_seed = suppression_seed;
    rep.training_seed = config.schedule.seed;
    rep.column_mqe.assign(raw.dim(), kNaN);

    const Codebook baseline = train(z, config.topology, config.schedule, config.init);
    const SuperClassing base_sc = superclasses_of(baseline, config.superclasses);

    // The truth travels only inside the plan; the suppressed data holds NaN there.
    const Suppression sup = suppress(z, m, suppression_seed);
    if (sup.plan.cells.empty()) {
        rep.mqe = kNaN;
        rep.baseline_mqe = kNaN;
        return rep;
    }

    const Codebook map = config.strategy == RecoveryStrategy::Retrain
                             ? train(sup.data, config.topology, config.schedule, config.init)
                             : baseline;
    const SuperClassing variant_sc = superclasses_of(map, config.superclasses);
    if (config.stability == StabilityBasis::Units) {
        rep.stability = superclass_stability(base_sc, variant_sc);
    } else {
        // Each row joins the super-class of its winning unit: the complete row on
        // the baseline map, the suppressed row on the variant map.
        std::vector<std::size_t> base_labels(z.size()), variant_labels(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) {
            base_labels[i] = base_sc.assignment[find_winner(z[i], baseline).unit];
            variant_labels[i] = variant_sc.assignment[find_winner(sup.data[i], map).unit];
        }
        rep.stability =
            superclass_stability(partition_from_labels(base_labels), partition_from_labels(variant_labels));
    }

    std::vector<double> col_sum(raw.dim(), 0.0);
    std::vector<std::size_t> col_n(raw.dim(), 0);
    double total = 0.0;
    std::size_t current_row = SIZE_MAX;
    ImputationResult imputed;
    for (const auto& cell : sup.plan.cells) {
        if (cell.row != current_row) {
            current_row = cell.row;
            imputed = config.mode == ImputeMode::Hard ? impute_hard(sup.data[cell.row], map)
                                                      : impute_weighted(sup.data[cell.row], map);
        }
        const ComponentEstimate* e = imputed.find(cell.column);
        const double estimate = config.mode == ImputeMode::Hard ? e->hard : *e->weighted;
        const double err = (estimate - cell.truth) * (estimate - cell.truth);
        total += err;
        col_sum[cell.column] += err;
        ++col_n[cell.column];
    }
    rep.cells = sup.plan.cells.size();
    rep.mqe = total / static_cast<double>(rep.cells);
    for (std::size_t k = 0; k < raw.dim(); ++k) {
        if (col_n[k]) rep.column_mqe[k] = col_sum[k] / static_cast<double>(col_n[k]);
    }
    rep.baseline_mqe = baseline_mean_impute_mqe(sup.data, sup.plan);
    return rep;
}

SweepResult recovery_sweep(const Dataset& raw, const SweepConfig& config) {
    if (config.replicates == 0) throw ConfigError("replicate count must be positive");
    if (config.m_min > config.m_max) throw ConfigError("m_min exceeds m_max");
    if (config.m_max >= raw.dim()) {
        throw ConfigError("m_max must be below the column count (" + std::to_string(raw.dim()) + ")");
    }
    SweepResult out;
    for (std::size_t m = config.m_min; m <= config.m_max; ++m) {
        std::vector<double> mqe, stab, base;
        for (std::size_t r = 0; r < config.replicates; ++r) {
            ExperimentConfig ec = config.experiment;
            ec.schedule.seed = derive_seed(config.seed, r);
            const std::uint64_t sup_seed = derive_seed(derive_seed(config.seed, r), 1000 + m);
            out.runs.push_back(recovery_experiment(raw, ec, m, sup_seed));
            mqe.push_back(out.runs.back().mqe);
            stab.push_back(out.runs.back().stability);
            base.push_back(out.runs.back().baseline_mqe);
        }
        SweepRow row;
        row.m = m;
        row.percent_missing = std::lround(100.0 * static_cast<double>(m) / static_cast<double>(raw.dim()));
        const auto q = mean_sd(mqe), s = mean_sd(stab), b = mean_sd(base);
        row.mqe = q.mean;
        row.mqe_sd = q.sd;
        row.stability = s.mean;
        row.stability_sd = s.sd;
        row.baseline_mqe = b.mean;
        row.baseline_mqe_sd = b.sd;
        row.replicates = config.replicates;
        out.rows.push_back(row);
    }
    return out;
}

void write_sweep_csv(std::ostream& out, const SweepResult& r) {
    out << "m,percent_missing,mqe,stability,baseline_mqe,mqe_sd,stability_sd,baseline_mqe_sd,replicates\n";
    for (const auto& row : r.rows) {
        out << row.m << ',' << row.percent_missing << ',' << csv_real(row.mqe) << ',' << csv_real(row.stability) << ','
            << csv_real(row.baseline_mqe) << ',' << csv_real(row.mqe_sd) << ',' << csv_real(row.stability_sd) << ','
            << csv_real(row.baseline_mqe_sd) << ',' << row.replicates << '\n';
    }
}

void write_runs_csv(std::ostream& out, const SweepResult& r, std::size_t replicates) {
    out << "m,replicate,suppression_seed,training_seed,cells,mqe,stability,baseline_mqe\n";
    for (std::size_t i = 0; i < r.runs.size(); ++i) {
        const auto& run = r.runs[i];
        out << run.m << ',' << (replicates ? i % replicates : 0) << ',' << run.suppression_seed << ','
            << run.training_seed << ',' << run.cells << ',' << csv_real(run.mqe) << ',' << csv_real(run.stability)
            << ',' << csv_real(run.baseline_mqe) << '\n';
    }
}

std::string sweep_to_json(const SweepResult& r, const std::string& config_json, const std::vector<std::string>& columns) {
    using ojson = nlohmann::ordered_json;
    ojson j;
    j["config"] = ojson::parse(config_json.empty() ? "{}" : config_json);
    j["units"] = "standardized";
    auto& rows = j["table"] = ojson::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"m", row.m},
                        {"percent_missing", row.percent_missing},
                        {"mqe", real_or_null(row.mqe)},
                        {"stability", real_or_null(row.stability)},
                        {"baseline_mqe", real_or_null(row.baseline_mqe)},
                        {"mqe_sd", real_or_null(row.mqe_sd)},
                        {"stability_sd", real_or_null(row.stability_sd)},
                        {"baseline_mqe_sd", real_or_null(row.baseline_mqe_sd)},
                        {"replicates", row.replicates}});
    }
    auto& runs = j["runs"] = ojson::array();
    for (const auto& run : r.runs) {
        ojson per_col = ojson::object();
        for (std::size_t k = 0; k < run.column_mqe.size() && k < columns.size(); ++k) {
            per_col[columns[k]] = real_or_null(run.column_mqe[k]);
        }
        runs.push_back({{"m", run.m},
                        {"missing_fraction", run.missing_fraction},
                        {"suppression_seed", run.suppression_seed},
                        {"training_seed", run.training_seed},
                        {"cells", run.cells},
                        {"mqe", real_or_null(run.mqe)},
                        {"stability", real_or_null(run.stability)},
                        {"baseline_mqe", real_or_null(run.baseline_mqe)},
                        {"column_mqe", std::move(per_col)}});
    }
    return j.dump(2) + "\n";
}

}  // namespace ksom
