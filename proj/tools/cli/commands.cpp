#include "commands.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "ksom/ksom.hpp"
#include "render.hpp"

namespace ksom::cli {

namespace {

CsvOptions csv_options(const InputArgs& a) {
    CsvOptions o;
    o.missing_marker = a.missing_marker;
    o.has_header = !a.no_header;
    if (!a.label_column.empty()) o.label_column = a.label_column;
    return o;
}

Dataset load_input(const InputArgs& a) {
    if (a.input.empty()) throw ConfigError("--input is required");
    return load_csv(a.input, csv_options(a));
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write '" + path + "'");
    f << content;
    if (!f) throw DataError("write failed for '" + path + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

// CSV artifacts cannot carry the run configuration inline, so it goes next to them.
void write_run_echo(const std::string& artifact, const std::string& config_json) {
    if (!artifact.empty()) write_file(artifact + ".run.json", config_json + "\n");
}

void require_columns(const Dataset& d, const Model& m, bool check_names) {
    if (d.dim() != m.codebook.dim()) {
        throw MismatchError("data has " + std::to_string(d.dim()) + " columns, model expects " +
                            std::to_string(m.codebook.dim()));
    }
    if (check_names && d.column_names() != m.column_names) {
        for (std::size_t k = 0; k < d.dim(); ++k) {
            if (d.column_names()[k] != m.column_names[k]) {
                throw MismatchError("column " + std::to_string(k + 1) + " is '" + d.column_names()[k] +
                                    "' in the data but '" + m.column_names[k] + "' in the model");
            }
        }
    }
}

TrainingSchedule make_schedule(std::size_t iters, double eps0, std::optional<std::size_t> radius0, double decay,
                               std::uint64_t seed) {
    TrainingSchedule s;
    s.iterations = iters;
    s.eps0 = eps0;
    s.radius0 = radius0;
    s.radius_decay = decay;
    s.seed = seed;
    s.validate();
    return s;
}

std::string row_name(const Dataset& d, std::size_t i) {
    return d[i].label().empty() ? "row " + std::to_string(i + 1) : "row " + std::to_string(i + 1) + " (" + d[i].label() + ")";
}

}  // namespace

void cmd_train(const TrainArgs& o, const std::string& config_json, std::ostream& out, std::ostream& err) {
    const GridTopology topo(o.rows, o.cols);
    TrainingSchedule schedule = make_schedule(o.iters, o.eps0, o.radius0, o.radius_decay, o.seed);
    const InitPolicy init = parse_init_policy(o.init);
    if (o.standardize_on != "training" && o.standardize_on != "all") {
        throw ConfigError("--standardize-on must be 'training' or 'all'");
    }
    if (o.output.empty()) throw ConfigError("--output is required");

    const Dataset raw = load_input(o.data);
    if (o.min_present > raw.dim()) throw ConfigError("--min-present exceeds the column count");

    std::vector<std::size_t> training_rows, supplementary_rows;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const bool keep = raw[i].present_count() >= o.min_present && !raw[i].all_missing();
        (keep ? training_rows : supplementary_rows).push_back(i);
    }
    if (o.min_present == 0) {
        // Nothing routes all-missing rows away; training rejects them with their row numbers.
        training_rows.clear();
        for (std::size_t i = 0; i < raw.size(); ++i) training_rows.push_back(i);
        supplementary_rows.clear();
    }
    for (std::size_t i : supplementary_rows) {
        if (raw[i].all_missing()) err << "warning: " << row_name(raw, i) << " has no present value\n";
    }
    if (training_rows.empty()) throw DataError("no row has at least " + std::to_string(o.min_present) + " present values");

    const Dataset train_raw = raw.select(training_rows);
    const ColumnStats stats = column_stats(o.standardize_on == "all" ? raw : train_raw);
    const Dataset z = standardize(train_raw, stats);
    schedule.radius0 = schedule.initial_radius(topo);

    std::ostringstream log;
    log << "step,learning_rate,radius,quantization_error\n";
    const std::size_t every = std::max<std::size_t>(1, o.checkpoints ? schedule.iterations / o.checkpoints : schedule.iterations);
    const TrainingObserver observer = [&](std::size_t t, const Codebook& cb) {
        if ((t + 1) % every == 0 || t + 1 == schedule.iterations) {
            log << (t + 1) << ',' << format_real(schedule.learning_rate(t)) << ',' << schedule.radius(t, topo) << ','
                << format_real(quantization_error(z, cb).value) << '\n';
        }
    };
    Codebook cb = train(z, topo, schedule, init, o.checkpoints ? observer : TrainingObserver{});

    const Model model{std::move(cb), raw.column_names(), stats, schedule, init, config_json};
    save_model(o.output, model);
    if (!o.log.empty()) write_file(o.log, log.str());

    out << "training rows: " << training_rows.size() << '\n'
        << "supplementary rows: " << supplementary_rows.size() << '\n'
        << "map: " << topo.rows() << 'x' << topo.cols() << " (" << topo.units() << " units)\n"
        << "iterations: " << schedule.iterations << '\n'
        << "final quantization error: " << format_real(quantization_error(z, model.codebook).value) << '\n';
    if (o.checkpoints) out << log.str();
}

void cmd_classify(const ClassifyArgs& o, const std::string& config_json, std::ostream& out, std::ostream& err) {
    if (o.model.empty()) throw ConfigError("--model is required");
    const Model model = load_model(o.model);
    const Dataset raw = load_input(o.data);
    require_columns(raw, model, !o.data.no_header);
    const Dataset z = standardize(raw, model.stats);
    const Codebook& cb = model.codebook;
    const Classification cls = classify(z, cb);

    std::ostringstream csv;
    csv << "row,label,unit,unit_row,unit_col,distance,supplementary";
    if (o.probs) {
        for (std::size_t i = 0; i < cb.units(); ++i) csv << ",p" << i;
    }
    csv << '\n';
    for (std::size_t i = 0; i < z.size(); ++i) {
        const bool supplementary = z[i].present_count() < o.min_present;
        csv << (i + 1) << ',' << csv_field(z[i].label()) << ',';
        if (const auto& a = cls.rows[i]) {
            csv << a->unit << ',' << cb.topology().row_of(a->unit) << ',' << cb.topology().col_of(a->unit) << ','
                << format_real(a->distance);
        } else {
            csv << "NA,NA,NA,NA";
        }
        csv << ',' << (supplementary ? 1 : 0);
        if (o.probs) {
            if (cls.rows[i]) {
                for (double p : membership(z[i], cb).probs) csv << ',' << format_real(p);
            } else {
                for (std::size_t u = 0; u < cb.units(); ++u) csv << ",NA";
            }
        }
        csv << '\n';
    }
    for (std::size_t i : cls.all_missing_rows) err << "warning: " << row_name(raw, i) << " has no present value; not classified\n";

    if (o.output.empty()) {
        out << csv.str();
    } else {
        write_file(o.output, csv.str());
        write_run_echo(o.output, config_json);
        out << "classified rows: " << (z.size() - cls.all_missing_rows.size()) << " of " << z.size() << '\n';
    }
    if (!o.membership.empty()) {
        std::ostringstream mem;
        write_membership_csv(mem, z, cb);
        write_file(o.membership, mem.str());
    }
}

void cmd_impute(const ImputeArgs& o, const std::string& config_json, std::ostream& out, std::ostream& err) {
    if (o.model.empty()) throw ConfigError("--model is required");
    ksom::ImputeOptions opts;
    opts.mode = parse_impute_mode(o.mode);
    opts.level = o.level;
    if (!(o.level > 0.0 && o.level < 1.0)) throw ConfigError("--level must lie in (0, 1)");
    const Model model = load_model(o.model);
    const Dataset raw = load_input(o.data);
    require_columns(raw, model, !o.data.no_header);
    if (o.raw_units) opts.raw_units = model.stats;

    const Dataset z = standardize(raw, model.stats);
    DatasetImputation result = impute_dataset(z, model.codebook, opts);
    // Present cells keep their original text-exact values in raw units.
    Dataset completed = result.completed;
    if (o.raw_units) {
        completed = raw;
        for (const auto& c : result.report.cells) completed[c.row].set_value(c.column, c.estimate);
    }
    for (std::size_t i : result.report.all_missing_rows) err << "warning: " << row_name(raw, i) << " has no present value; left incomplete\n";

    CsvOptions csv = csv_options(o.data);
    csv.has_header = true;
    std::ostringstream data_out;
    write_csv(data_out, completed, csv);
    if (o.output.empty()) {
        out << data_out.str();
    } else {
        write_file(o.output, data_out.str());
        write_run_echo(o.output, config_json);
        out << "imputed cells: " << result.report.cells.size() << " (" << to_string(opts.mode) << ", "
            << (o.raw_units ? "raw" : "standardized") << " units)\n";
    }
    if (!o.report.empty()) {
        std::ostringstream rep;
        write_report_csv(rep, result.report, z);
        write_file(o.report, rep.str());
    }
    if (!o.report_json.empty()) write_file(o.report_json, report_to_json(result.report, z));
}

void cmd_superclass(const SuperclassArgs& o, const std::string& config_json, std::ostream& out, std::ostream&) {
    if (o.model.empty()) throw ConfigError("--model is required");
    const Model model = load_model(o.model);
    const GridTopology& topo = model.codebook.topology();
    if (o.k < 1 || o.k > topo.units()) {
        throw ConfigError("--k must lie in [1, " + std::to_string(topo.units()) + "]");
    }
    const Dendrogram dg = agglomerate(model.codebook);
    const SuperClassing sc = cut(dg, o.k);

    std::ostringstream csv;
    write_superclass_csv(csv, sc, topo);
    if (o.output.empty()) {
        out << csv.str();
    } else {
        write_file(o.output, csv.str());
        write_run_echo(o.output, config_json);
    }
    if (!o.dendrogram.empty()) write_file(o.dendrogram, dendrogram_to_json(dg));

    const auto contiguous = superclass_contiguity(sc, topo);
    std::size_t connected = 0;
    for (bool c : contiguous) connected += c ? 1 : 0;
    if (!o.output.empty()) {
        out << "super-classes: " << sc.k << " over " << topo.units() << " units\n";
        for (std::size_t g = 0; g < sc.k; ++g) {
            out << "  S" << (g + 1) << ": " << sc.members[g].size() << " units" << (contiguous[g] ? "" : " (not contiguous)")
                << '\n';
        }
        out << "contiguous super-classes: " << connected << " of " << sc.k << '\n';
    }
}

void cmd_evaluate(const EvaluateArgs& o, const std::string& config_json, std::ostream& out, std::ostream&) {
    SweepConfig sc;
    sc.experiment.topology = GridTopology(o.rows, o.cols);
    sc.experiment.schedule = make_schedule(o.iters, o.eps0, o.radius0, o.radius_decay, o.seed);
    sc.experiment.init = parse_init_policy(o.init);
    sc.experiment.mode = parse_impute_mode(o.mode);
    sc.experiment.superclasses = o.k;
    if (o.strategy == "retrain") {
        sc.experiment.strategy = RecoveryStrategy::Retrain;
    } else if (o.strategy == "reuse") {
        sc.experiment.strategy = RecoveryStrategy::ReuseBaseline;
    } else {
        throw ConfigError("--strategy must be 'retrain' or 'reuse'");
    }
    if (o.stability == "observations") {
        sc.experiment.stability = StabilityBasis::Observations;
    } else if (o.stability == "units") {
        sc.experiment.stability = StabilityBasis::Units;
    } else {
        throw ConfigError("--stability must be 'observations' or 'units'");
    }
    if (o.k < 1 || o.k > sc.experiment.topology.units()) throw ConfigError("--k must lie in [1, map units]");
    if (o.replicates == 0) throw ConfigError("--replicates must be positive");
    if (o.m_min == 0 || o.m_min > o.m_max) throw ConfigError("need 1 <= --m-min <= --m-max");
    sc.m_min = o.m_min;
    sc.m_max = o.m_max;
    sc.replicates = o.replicates;
    sc.seed = o.seed;

    const std::size_t p = o.data.input.empty() ? o.synthetic_cols : 0;
    if (p && o.m_max >= p) {
        throw ConfigError("--m-max must be below the column count (" + std::to_string(p) + ")");
    }
    Dataset data;
    if (o.data.input.empty()) {
        SyntheticSpec spec;
        spec.rows = o.synthetic_rows;
        spec.cols = o.synthetic_cols;
        spec.clusters = o.clusters;
        spec.spread = o.spread;
        spec.correlation = o.correlation;
        spec.seed = o.data_seed;
        data = generate_synthetic(spec);
    } else {
        data = load_input(o.data);
        if (o.m_max >= data.dim()) {
            throw ConfigError("--m-max must be below the column count (" + std::to_string(data.dim()) + ")");
        }
    }

    const SweepResult result = recovery_sweep(data, sc);
    std::ostringstream table;
    write_sweep_csv(table, result);
    if (o.output.empty()) {
        out << table.str();
    } else {
        write_file(o.output, table.str());
        write_run_echo(o.output, config_json);
        out << table.str();
    }
    if (!o.json.empty()) write_file(o.json, sweep_to_json(result, config_json, data.column_names()));
    if (!o.runs.empty()) {
        std::ostringstream runs;
        write_runs_csv(runs, result, o.replicates);
        write_file(o.runs, runs.str());
    }
}

void cmd_render(const RenderArgs& o, const std::string& config_json, std::ostream& out, std::ostream&) {
    if (o.model.empty()) throw ConfigError("--model is required");
    if (o.assignments.empty()) throw ConfigError("--assignments is required");
    const Model model = load_model(o.model);
    const GridTopology& topo = model.codebook.topology();

    std::ifstream af(o.assignments, std::ios::binary);
    if (!af) throw DataError("cannot open '" + o.assignments + "'");
    const auto entries = read_assignments(af, topo);

    std::optional<SuperClassing> sc;
    if (!o.superclasses.empty()) {
        std::istringstream sf(read_file(o.superclasses));
        sc = read_superclass_csv(sf, topo);
    }
    cli::RenderOptions ro;
    ro.max_labels = o.max_labels;
    ro.title = o.title;
    ro.config_json = config_json;
    if (!o.output.empty()) write_file(o.output, render_svg(topo, entries, sc, ro));
    const std::string text = render_text(topo, entries, sc, ro);
    if (o.text.empty()) {
        out << text;
    } else {
        write_file(o.text, text);
    }
}

}  // namespace ksom::cli
