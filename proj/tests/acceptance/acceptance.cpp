// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ksom/ksom.hpp"

using namespace ksom;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<std::string> names(std::size_t p) {
    std::vector<std::string> out;
    for (std::size_t k = 0; k < p; ++k) out.push_back("v" + std::to_string(k + 1));
    return out;
}

MaskedObservation random_obs(std::mt19937_64& g, std::size_t p) {
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::bernoulli_distribution miss(0.35);
    std::vector<double> v(p);
    std::vector<std::size_t> missing;
    for (std::size_t k = 0; k < p; ++k) {
        v[k] = u(g);
        if (miss(g)) missing.push_back(k);
    }
    if (missing.size() == p) missing.pop_back();
    return MaskedObservation(v, missing);
}

Codebook random_codebook(std::mt19937_64& g, std::size_t rows, std::size_t cols, std::size_t p) {
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::vector<double> flat(rows * cols * p);
    for (auto& x : flat) x = u(g);
    return Codebook(GridTopology(rows, cols), p, flat);
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

Outcome masked_winner_oracle() {
    const auto t0 = Clock::now();
    std::mt19937_64 g(101);
    std::size_t mismatches = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t p = 1 + g() % 8, n = 1 + g() % 12;
        const Codebook cb = random_codebook(g, 1, n, p);
        const MaskedObservation x = random_obs(g, p);
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t u = 0; u < n; ++u) {
            double s = 0.0;
            for (std::size_t k = 0; k < p; ++k) {
                if (!x.is_missing(k)) s += (x.value(k) - cb.at(u, k)) * (x.value(k) - cb.at(u, k));
            }
            if (s < best_d) {
                best_d = s;
                best = u;
            }
        }
        const Assignment a = find_winner(x, cb);
        if (a.unit != best || a.distance != best_d) ++mismatches;
    }
    const double secs = seconds_since(t0);
    return {mismatches == 0 && secs < 5.0, fmt("%.0f mismatches in 1000 cases, %.3f s", static_cast<double>(mismatches), secs)};
}

Outcome update_locality() {
    std::mt19937_64 g(202);
    std::size_t violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t rows = 1 + g() % 5, cols = 1 + g() % 5, p = 1 + g() % 6;
        Codebook cb = random_codebook(g, rows, cols, p);
        const Codebook before = cb;
        const MaskedObservation x = random_obs(g, p);
        const std::size_t radius = g() % 3;
        const double eps = std::uniform_real_distribution<double>(0.01, 1.0)(g);
        const std::size_t w = update_step(cb, x, eps, radius).unit;
        for (std::size_t u = 0; u < cb.units(); ++u) {
            const bool near = cb.topology().distance(u, w) <= radius;
            for (std::size_t k = 0; k < p; ++k) {
                const bool moved = cb.at(u, k) != before.at(u, k);
                if (moved && (!near || x.is_missing(k))) ++violations;
                if (!near || x.is_missing(k)) {
                    if (std::memcmp(&cb.flat()[u * p + k], &before.flat()[u * p + k], sizeof(double)) != 0) ++violations;
                }
            }
        }
    }
    return {violations == 0, fmt("%.0f violations in 1000 steps", static_cast<double>(violations))};
}

Outcome softmax_contract() {
    std::mt19937_64 g(303);
    double worst_sum = 0.0, worst_shift = 0.0;
    std::size_t argmax_bad = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t p = 1 + g() % 6;
        const Codebook cb = random_codebook(g, 1 + g() % 4, 1 + g() % 4, p);
        const MaskedObservation x = random_obs(g, p);
        const MembershipProfile m = membership(x, cb);
        worst_sum = std::max(worst_sum, std::abs(std::accumulate(m.probs.begin(), m.probs.end(), 0.0) - 1.0));

        // An extra component on which every unit agrees adds the same constant to each distance.
        const double shift = std::uniform_real_distribution<double>(0.0, 20.0)(g);
        std::vector<double> flat;
        for (std::size_t u = 0; u < cb.units(); ++u) {
            for (std::size_t k = 0; k < p; ++k) flat.push_back(cb.at(u, k));
            flat.push_back(0.0);
        }
        const Codebook shifted(cb.topology(), p + 1, flat);
        std::vector<double> v(x.values().begin(), x.values().end());
        v.push_back(std::sqrt(shift));
        const auto miss = x.missing_indices();
        const MembershipProfile ms = membership(MaskedObservation(v, miss), shifted);
        for (std::size_t u = 0; u < cb.units(); ++u) worst_shift = std::max(worst_shift, std::abs(ms.probs[u] - m.probs[u]));

        const std::size_t arg = static_cast<std::size_t>(std::max_element(m.probs.begin(), m.probs.end()) - m.probs.begin());
        if (arg != find_winner(x, cb).unit) ++argmax_bad;
    }
    const bool pass = worst_sum <= 1e-12 && worst_shift <= 1e-12 && argmax_bad == 0;
    return {pass, fmt("max |sum-1| %.2e, max shift drift %.2e, argmax mismatches %.0f", worst_sum, worst_shift,
                      static_cast<double>(argmax_bad))};
}

Outcome imputation_identities() {
    std::mt19937_64 g(404);
    std::size_t bad = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t p = 2 + g() % 6;
        Codebook cb = random_codebook(g, 1 + g() % 3, 2 + g() % 3, p);
        const MaskedObservation x = random_obs(g, p);

        const ImputationResult w = impute_weighted(x, cb);
        for (const auto& e : w.estimates) {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (std::size_t u = 0; u < cb.units(); ++u) {
                lo = std::min(lo, cb.at(u, e.component));
                hi = std::max(hi, cb.at(u, e.component));
            }
            if (*e.weighted < lo || *e.weighted > hi) ++bad;
        }

        // Point mass: move every other unit far away on a present component.
        Codebook far = cb;
        std::size_t present = 0;
        while (x.is_missing(present)) ++present;
        const std::size_t keep = g() % cb.units();
        for (std::size_t u = 0; u < cb.units(); ++u) {
            if (u != keep) far.vector(u)[present] = 1e6;
        }
        const ImputationResult pw = impute_weighted(x, far), ph = impute_hard(x, far);
        for (std::size_t i = 0; i < pw.estimates.size(); ++i) {
            if (*pw.estimates[i].weighted != ph.estimates[i].hard) ++bad;
        }

        std::vector<double> full(x.values().begin(), x.values().end());
        for (auto& v : full) {
            if (std::isnan(v)) v = 0.5;
        }
        Dataset d(names(p));
        d.add(MaskedObservation(full));
        const auto r = impute_dataset(d, cb, ImputeOptions{ImputeMode::Weighted, 0.9, std::nullopt});
        if (!r.report.cells.empty()) ++bad;
        for (std::size_t k = 0; k < p; ++k) {
            if (r.completed[0].value(k) != full[k]) ++bad;
        }
    }
    return {bad == 0, fmt("%.0f violations in 1000 cases", static_cast<double>(bad))};
}

SweepConfig protocol_config() {
    SweepConfig c;
    c.experiment.topology = GridTopology(3, 3);
    c.experiment.schedule.iterations = 1500;
    c.experiment.superclasses = 3;
    c.m_min = 1;
    c.m_max = 8;
    c.replicates = 10;
    c.seed = 2024;
    return c;
}

SyntheticSpec protocol_data() {
    SyntheticSpec s;
    s.rows = 200;
    s.cols = 11;
    s.clusters = 3;
    s.correlation = 0.9;
    s.spread = 0.1;
    s.seed = 7;
    return s;
}

std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        for (std::size_t t = i; t <= j; ++t) r[idx[t]] = (static_cast<double>(i + j) / 2.0) + 1.0;
        i = j + 1;
    }
    return r;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    const auto ra = ranks(a), rb = ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n, mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

struct ProtocolRun {
    SweepResult result;
    double seconds = 0.0;
    double min_pair_r = 0.0;
};

const ProtocolRun& protocol_run() {
    static const ProtocolRun run = [] {
        ProtocolRun r;
        const Dataset raw = generate_synthetic(protocol_data());
        r.min_pair_r = correlation_summary(correlation_matrix(raw), 0.8).min_abs;
        const auto t0 = Clock::now();
        r.result = recovery_sweep(raw, protocol_config());
        r.seconds = seconds_since(t0);
        return r;
    }();
    return run;
}

Outcome table_protocol() {
    const ProtocolRun& run = protocol_run();
    std::vector<double> ms, mqe;
    bool beats_baseline = true;
    std::ostringstream table;
    for (const auto& row : run.result.rows) {
        ms.push_back(static_cast<double>(row.m));
        mqe.push_back(row.mqe);
        if (row.m <= 5 && !(row.mqe < row.baseline_mqe)) beats_baseline = false;
        table << " m" << row.m << "=" << fmt("%.3f/%.3f", row.mqe, row.baseline_mqe);
    }
    const double rho = spearman(ms, mqe);
    const bool pass = run.min_pair_r > 0.8 && rho > 0.8 && beats_baseline && run.seconds < 120.0;
    return {pass, fmt("min pairwise r %.3f, spearman %.3f, %.2f s;", run.min_pair_r, rho, run.seconds) + table.str()};
}

Outcome stability_protocol() {
    const ProtocolRun& run = protocol_run();
    const std::size_t reps = protocol_config().replicates;
    bool pass = true;
    std::ostringstream detail;
    for (const auto& row : run.result.rows) {
        if (row.m > 3) continue;
        std::size_t below = 0;
        for (const auto& rep : run.result.runs) {
            if (rep.m == row.m && rep.stability < 0.9) ++below;
        }
        const bool ok = row.stability >= 0.9 || below <= 1;
        pass = pass && ok;
        detail << "; m" << row.m << ": mean " << fmt("%.3f", row.stability) << ", " << below << "/" << reps << " below";
    }
    return {pass, detail.str().substr(2)};
}

Outcome extreme_sparsity() {
    SyntheticSpec spec;
    spec.rows = 200;
    spec.cols = 15;
    spec.correlation = 0.9;
    spec.seed = 15;
    const Dataset raw = generate_synthetic(spec);
    const Dataset z = standardize(raw, column_stats(raw));
    const Suppression s = suppress(z, 9, 99);
    const double frac = static_cast<double>(s.data.missing_cells()) / static_cast<double>(z.size() * z.dim());

    TrainingSchedule sched;
    sched.seed = 3;
    const Codebook cb = train(s.data, GridTopology(3, 3), sched, InitPolicy::UniformRange);
    const Classification c = classify(s.data, cb);
    const bool all_classified = std::all_of(c.rows.begin(), c.rows.end(), [](const auto& a) { return a.has_value(); });
    const auto imp = impute_dataset(s.data, cb);
    double mqe = 0.0;
    for (const auto& cell : s.plan.cells) {
        const double e = imp.completed[cell.row].value(cell.column) - cell.truth;
        mqe += e * e;
    }
    mqe /= static_cast<double>(s.plan.cells.size());
    const double base = baseline_mean_impute_mqe(s.data, s.plan);
    const bool pass = std::abs(frac - 0.6) < 1e-12 && all_classified && mqe < base;
    return {pass, fmt("%.0f%% masked, mqe %.3f vs baseline %.3f", 100.0 * frac, mqe, base) +
                      (all_classified ? ", every row classified" : ", unclassified rows")};
}

Outcome determinism_persistence() {
    const Dataset raw = generate_synthetic(protocol_data());
    const ColumnStats stats = column_stats(raw);
    const Dataset z = standardize(raw, stats);
    auto build = [&] {
        TrainingSchedule s;
        s.seed = 31;
        Codebook cb = train(z, GridTopology(7, 7), s, InitPolicy::UniformRange);
        s.radius0 = s.initial_radius(cb.topology());
        return Model{std::move(cb), raw.column_names(), stats, s, InitPolicy::UniformRange, "{}"};
    };
    const auto dir = std::filesystem::temp_directory_path() / "ksom_acceptance";
    std::filesystem::create_directories(dir);
    save_model(dir / "a.json", build());
    save_model(dir / "b.json", build());
    auto slurp = [](const std::filesystem::path& p) {
        std::ifstream f(p, std::ios::binary);
        std::ostringstream s;
        s << f.rdbuf();
        return s.str();
    };
    const bool identical = slurp(dir / "a.json") == slurp(dir / "b.json");
    const Model back = load_model(dir / "a.json");
    const Model fresh = build();
    const bool exact = back.codebook.flat().size() == fresh.codebook.flat().size() &&
                       std::memcmp(back.codebook.flat().data(), fresh.codebook.flat().data(),
                                   fresh.codebook.flat().size() * sizeof(double)) == 0;
    std::filesystem::remove_all(dir);
    return {identical && exact, std::string(identical ? "model files identical" : "model files differ") +
                                    (exact ? ", reload bit-exact" : ", reload differs")};
}

Outcome hierarchy_correctness() {
    std::mt19937_64 g(909);
    std::uniform_real_distribution<double> jitter(-0.05, 0.05);
    std::vector<std::size_t> planted{0, 0, 0, 1, 1, 1, 2, 2, 2};
    std::shuffle(planted.begin(), planted.end(), g);
    std::vector<double> flat;
    for (std::size_t u = 0; u < 9; ++u) {
        for (std::size_t k = 0; k < 3; ++k) flat.push_back((k == planted[u] ? 5.0 : 0.0) + jitter(g));
    }
    const SuperClassing sc = cut(agglomerate(flat, 9, 3), 3);
    const bool recovered = adjusted_rand_index(sc, partition_from_labels(planted)) == 1.0;

    std::size_t non_monotone = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const Codebook cb = random_codebook(g, 1 + g() % 7, 2 + g() % 6, 1 + g() % 5);
        const Dendrogram dg = agglomerate(cb);
        for (std::size_t j = 1; j < dg.merges.size(); ++j) {
            if (dg.merges[j].height < dg.merges[j - 1].height) ++non_monotone;
        }
    }
    return {recovered && non_monotone == 0,
            std::string(recovered ? "triplets recovered" : "triplets not recovered") +
                fmt(", %.0f non-monotone heights over 100 codebooks", static_cast<double>(non_monotone))};
}

Outcome ari_oracle() {
    std::mt19937_64 g(1010);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + g() % 11, ka = 1 + g() % 4, kb = 1 + g() % 4;
        std::vector<std::size_t> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = g() % ka;
            b[i] = g() % kb;
        }
        std::vector<std::vector<double>> table(ka, std::vector<double>(kb, 0.0));
        for (std::size_t i = 0; i < n; ++i) table[a[i]][b[i]] += 1.0;
        auto c2 = [](double x) { return x * (x - 1.0) / 2.0; };
        double sum_ij = 0, sum_a = 0, sum_b = 0;
        for (std::size_t r = 0; r < ka; ++r) {
            double row = 0;
            for (std::size_t c = 0; c < kb; ++c) {
                sum_ij += c2(table[r][c]);
                row += table[r][c];
            }
            sum_a += c2(row);
        }
        for (std::size_t c = 0; c < kb; ++c) {
            double col = 0;
            for (std::size_t r = 0; r < ka; ++r) col += table[r][c];
            sum_b += c2(col);
        }
        const double expected = sum_a * sum_b / c2(static_cast<double>(n));
        const double max_index = (sum_a + sum_b) / 2.0;
        const double ari = max_index == expected ? 1.0 : (sum_ij - expected) / (max_index - expected);
        const double got = superclass_stability(partition_from_labels(a), partition_from_labels(b));
        worst = std::max(worst, std::abs(got - std::clamp(ari, 0.0, 1.0)));
    }
    return {worst <= 1e-12, fmt("max deviation %.2e over 100 pairs", worst)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"masked winner matches exhaustive scan", masked_winner_oracle},
        {"update touches only present components of the neighborhood", update_locality},
        {"membership softmax contract", softmax_contract},
        {"imputation identities", imputation_identities},
        {"suppression sweep: MQE trend and baseline", table_protocol},
        {"super-class stability for m <= 3", stability_protocol},
        {"60% missing: training, classification, imputation", extreme_sparsity},
        {"determinism and model persistence", determinism_persistence},
        {"hierarchical clustering correctness", hierarchy_correctness},
        {"adjusted Rand index oracle", ari_oracle},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
