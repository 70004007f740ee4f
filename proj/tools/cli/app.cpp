#include "app.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "ksom/error.hpp"

namespace ksom::cli {

namespace {

using Json = nlohmann::ordered_json;

const std::set<std::string> kCommands = {"train", "classify", "impute", "superclass", "evaluate", "render"};

std::string flag_name(std::string key) {
    for (char& c : key) {
        if (c == '_') c = '-';
    }
    return "--" + key;
}

bool passed(const std::vector<std::string>& args, const std::string& flag) {
    for (const auto& a : args) {
        if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    }
    return false;
}

std::string scalar_text(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_number_float()) return v.dump();
    throw ConfigError("config values must be strings, numbers or booleans");
}

// Turns a JSON config file into extra arguments. Flags given on the command line win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;

    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    Json cfg;
    try {
        cfg = Json::parse(f);
    } catch (const Json::exception& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!cfg.is_object()) throw ConfigError("config file '" + path + "' must hold a JSON object");

    const bool has_command = !args.empty() && kCommands.count(args.front());
    if (!has_command) {
        const auto it = cfg.find("command");
        if (it == cfg.end() || !it->is_string()) throw ConfigError("no command given on the command line or in the config file");
        args.insert(args.begin(), it->get<std::string>());
    }
    for (const auto& [key, value] : cfg.items()) {
        if (key == "command") continue;
        const std::string flag = flag_name(key);
        if (flag == "--config" || passed(args, flag)) continue;
        if (value.is_null()) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back(flag);
            continue;
        }
        args.push_back(flag);
        args.push_back(scalar_text(value));
    }
    return args;
}

Json typed(const std::string& s) {
    if (s == "true") return true;
    if (s == "false") return false;
    std::uint64_t u = 0;
    auto [pu, eu] = std::from_chars(s.data(), s.data() + s.size(), u);
    if (eu == std::errc{} && pu == s.data() + s.size() && !s.empty()) return u;
    double d = 0.0;
    auto [pd, ed] = std::from_chars(s.data(), s.data() + s.size(), d);
    if (ed == std::errc{} && pd == s.data() + s.size() && !s.empty()) return d;
    return s;
}

// The effective configuration: every option of the chosen command, given or defaulted.
std::string config_echo(const CLI::App& sub) {
    Json j;
    j["command"] = sub.get_name();
    for (const CLI::Option* opt : sub.get_options()) {
        const std::string name = opt->get_single_name();
        if (name.rfind("help", 0) == 0 || name == "config") continue;
        std::string key = name;
        for (char& c : key) {
            if (c == '-') c = '_';
        }
        if (opt->get_type_size() == 0) {
            j[key] = opt->count() > 0;
        } else if (opt->count() > 0) {
            j[key] = typed(opt->results().back());
        } else if (!opt->get_default_str().empty()) {
            j[key] = typed(opt->get_default_str());
        } else {
            j[key] = nullptr;
        }
    }
    return j.dump(2);
}

void add_input(CLI::App* app, InputArgs& a, bool required) {
    auto* in = app->add_option("--input", a.input, "CSV file with one observation per row");
    if (required) in->required();
    app->add_option("--missing-marker", a.missing_marker, "Cell text that marks a missing value");
    app->add_option("--label-column", a.label_column, "Column (name or 0-based index) holding row labels");
    app->add_flag("--no-header", a.no_header, "The CSV has no header line");
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Kohonen maps for incomplete data", "ksom"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    std::string config_path;
    app.set_help_all_flag("--help-all", "Show help for every command");

    TrainArgs train;
    std::size_t train_radius0 = 0;
    auto* t = app.add_subcommand("train", "Train a map and save the model");
    add_input(t, train.data, true);
    t->add_option("--output,-o", train.output, "Model file (JSON)")->required();
    t->add_option("--log", train.log, "Training log CSV");
    t->add_option("--rows", train.rows, "Map rows")->check(CLI::PositiveNumber);
    t->add_option("--cols", train.cols, "Map columns")->check(CLI::PositiveNumber);
    t->add_option("--iters", train.iters, "Training steps (one observation each)")->check(CLI::PositiveNumber);
    t->add_option("--eps0", train.eps0, "Initial learning rate");
    auto* tr0 = t->add_option("--radius0", train_radius0, "Initial neighborhood radius (default max(rows,cols)/2)");
    t->add_option("--radius-decay", train.radius_decay, "Fraction of training over which the radius shrinks to 0");
    t->add_option("--seed", train.seed, "Random seed");
    t->add_option("--init", train.init, "uniform-range or complete-rows");
    t->add_option("--min-present", train.min_present, "Rows with fewer present values are supplementary");
    t->add_option("--standardize-on", train.standardize_on, "training or all");
    t->add_option("--checkpoints", train.checkpoints, "Quantization-error checkpoints (0 disables)");
    t->add_option("--config", config_path, "JSON file with option values");

    ClassifyArgs classify;
    auto* c = app.add_subcommand("classify", "Assign observations to map units");
    add_input(c, classify.data, true);
    c->add_option("--model,-m", classify.model, "Model file")->required();
    c->add_option("--output,-o", classify.output, "Assignment CSV (default stdout)");
    c->add_option("--membership", classify.membership, "Membership probability CSV");
    c->add_flag("--probs", classify.probs, "Append membership probabilities to the assignment CSV");
    c->add_option("--min-present", classify.min_present, "Rows with fewer present values are flagged supplementary");
    c->add_option("--config", config_path, "JSON file with option values");

    ImputeArgs impute;
    auto* im = app.add_subcommand("impute", "Estimate missing values");
    add_input(im, impute.data, true);
    im->add_option("--model,-m", impute.model, "Model file")->required();
    im->add_option("--output,-o", impute.output, "Completed CSV (default stdout)");
    im->add_option("--report", impute.report, "Per-cell report CSV");
    im->add_option("--report-json", impute.report_json, "Per-cell report JSON");
    im->add_option("--mode", impute.mode, "hard or weighted");
    im->add_option("--level", impute.level, "Interval coverage level");
    im->add_flag("--raw-units", impute.raw_units, "Write estimates in the input's units");
    im->add_option("--config", config_path, "JSON file with option values");

    SuperclassArgs superclass;
    auto* s = app.add_subcommand("superclass", "Group map units into super-classes");
    s->add_option("--model,-m", superclass.model, "Model file")->required();
    s->add_option("--output,-o", superclass.output, "Super-class CSV (default stdout)");
    s->add_option("--dendrogram", superclass.dendrogram, "Dendrogram JSON");
    s->add_option("--k", superclass.k, "Number of super-classes");
    s->add_option("--config", config_path, "JSON file with option values");

    EvaluateArgs evaluate;
    std::size_t eval_radius0 = 0;
    auto* e = app.add_subcommand("evaluate", "Missing-data recovery sweep");
    add_input(e, evaluate.data, false);
    e->add_option("--synthetic-rows", evaluate.synthetic_rows, "Synthetic observations");
    e->add_option("--synthetic-cols", evaluate.synthetic_cols, "Synthetic variables");
    e->add_option("--clusters", evaluate.clusters, "Synthetic clusters");
    e->add_option("--spread", evaluate.spread, "Within-cluster spread of the latent factor");
    e->add_option("--correlation", evaluate.correlation, "Between-column correlation of the synthetic data");
    e->add_option("--data-seed", evaluate.data_seed, "Seed for synthetic data");
    e->add_option("--rows", evaluate.rows, "Map rows")->check(CLI::PositiveNumber);
    e->add_option("--cols", evaluate.cols, "Map columns")->check(CLI::PositiveNumber);
    e->add_option("--iters", evaluate.iters, "Training steps")->check(CLI::PositiveNumber);
    e->add_option("--eps0", evaluate.eps0, "Initial learning rate");
    auto* er0 = e->add_option("--radius0", eval_radius0, "Initial neighborhood radius");
    e->add_option("--radius-decay", evaluate.radius_decay, "Fraction of training over which the radius shrinks to 0");
    e->add_option("--seed", evaluate.seed, "Seed for suppression and training");
    e->add_option("--init", evaluate.init, "uniform-range or complete-rows");
    e->add_option("--mode", evaluate.mode, "hard or weighted");
    e->add_option("--k", evaluate.k, "Number of super-classes");
    e->add_option("--replicates", evaluate.replicates, "Runs per m");
    e->add_option("--m-min", evaluate.m_min, "Smallest number of suppressed values per row");
    e->add_option("--m-max", evaluate.m_max, "Largest number of suppressed values per row");
    e->add_option("--strategy", evaluate.strategy, "retrain or reuse");
    e->add_option("--stability", evaluate.stability, "observations or units");
    e->add_option("--output,-o", evaluate.output, "Summary table CSV");
    e->add_option("--json", evaluate.json, "Summary JSON");
    e->add_option("--runs", evaluate.runs, "Per-run CSV");
    e->add_option("--config", config_path, "JSON file with option values");

    RenderArgs render;
    auto* r = app.add_subcommand("render", "Draw the map with its members");
    r->add_option("--model,-m", render.model, "Model file")->required();
    r->add_option("--assignments,-a", render.assignments, "Assignment CSV from classify")->required();
    r->add_option("--superclasses", render.superclasses, "Super-class CSV");
    r->add_option("--output,-o", render.output, "SVG file");
    r->add_option("--text", render.text, "Text grid file (default stdout)");
    r->add_option("--title", render.title, "Title");
    r->add_option("--max-labels", render.max_labels, "Labels per cell in the text grid");
    r->add_option("--config", config_path, "JSON file with option values");

    try {
        args = expand_config(std::move(args));
        std::reverse(args.begin(), args.end());
        app.parse(args);
        if (tr0->count()) train.radius0 = train_radius0;
        if (er0->count()) evaluate.radius0 = eval_radius0;

        for (CLI::App* sub : app.get_subcommands()) {
            const std::string echo = config_echo(*sub);
            const std::string name = sub->get_name();
            if (name == "train") cmd_train(train, echo, out, err);
            if (name == "classify") cmd_classify(classify, echo, out, err);
            if (name == "impute") cmd_impute(impute, echo, out, err);
            if (name == "superclass") cmd_superclass(superclass, echo, out, err);
            if (name == "evaluate") cmd_evaluate(evaluate, echo, out, err);
            if (name == "render") cmd_render(render, echo, out, err);
        }
        return kExitOk;
    } catch (const CLI::ParseError& ex) {
        const int code = app.exit(ex, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    } catch (const ConfigError& ex) {
        err << "error: " << ex.what() << '\n';
        return kExitConfig;
    } catch (const MismatchError& ex) {
        err << "error: " << ex.what() << '\n';
        return kExitMismatch;
    } catch (const DataError& ex) {
        err << "error: " << ex.what() << '\n';
        return kExitData;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace ksom::cli
