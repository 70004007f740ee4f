#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace ksom::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitData = 3,
    kExitMismatch = 4,
};

struct InputArgs {
    std::string input;
    std::string missing_marker = "NA";
    std::string label_column;
    bool no_header = false;
};

struct TrainArgs {
    InputArgs data;
    std::string output;
    std::string log;
    std::size_t rows = 7;
    std::size_t cols = 7;
    std::size_t iters = 1500;
    double eps0 = 0.5;
    std::optional<std::size_t> radius0;
    double radius_decay = 0.8;
    std::uint64_t seed = 0;
    std::string init = "uniform-range";
    std::size_t min_present = 1;
    std::string standardize_on = "training";
    std::size_t checkpoints = 10;
};

struct ClassifyArgs {
    InputArgs data;
    std::string model;
    std::string output;
    std::string membership;
    bool probs = false;
    std::size_t min_present = 0;
};

struct ImputeArgs {
    InputArgs data;
    std::string model;
    std::string output;
    std::string report;
    std::string report_json;
    std::string mode = "hard";
    double level = 0.9;
    bool raw_units = false;
};

struct SuperclassArgs {
    std::string model;
    std::string output;
    std::string dendrogram;
    std::size_t k = 3;
};

struct EvaluateArgs {
    InputArgs data;
    std::size_t synthetic_rows = 200;
    std::size_t synthetic_cols = 11;
    std::size_t clusters = 3;
    double spread = 0.1;
    double correlation = 0.9;
    std::uint64_t data_seed = 1;
    std::size_t rows = 3;
    std::size_t cols = 3;
    std::size_t iters = 1500;
    double eps0 = 0.5;
    std::optional<std::size_t> radius0;
    double radius_decay = 0.8;
    std::uint64_t seed = 0;
    std::string init = "uniform-range";
    std::string mode = "hard";
    std::size_t k = 3;
    std::size_t replicates = 10;
    std::size_t m_min = 1;
    std::size_t m_max = 8;
    std::string strategy = "retrain";
    std::string stability = "observations";
    std::string output;
    std::string json;
    std::string runs;
};

struct RenderArgs {
    std::string model;
    std::string assignments;
    std::string superclasses;
    std::string output;
    std::string text;
    std::string title;
    std::size_t max_labels = 4;
};

// Each command writes its artifacts and a short human-readable summary to `out`.
// `config_json` is the echoed run configuration. Library exceptions propagate.
void cmd_train(const TrainArgs& o, const std::string& config_json, std::ostream& out, std::ostream& err);
void cmd_classify(const ClassifyArgs& o, const std::string& config_json, std::ostream& out, std::ostream& err);
void cmd_impute(const ImputeArgs& o, const std::string& config_json, std::ostream& out, std::ostream& err);
void cmd_superclass(const SuperclassArgs& o, const std::string& config_json, std::ostream& out, std::ostream& err);
void cmd_evaluate(const EvaluateArgs& o, const std::string& config_json, std::ostream& out, std::ostream& err);
void cmd_render(const RenderArgs& o, const std::string& config_json, std::ostream& out, std::ostream& err);

}  // namespace ksom::cli
