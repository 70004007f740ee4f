#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ksom/dataset.hpp"
#include "ksom/som.hpp"

namespace ksom {

/// A trained map plus everything needed to apply it to new raw data.
struct Model {
    Codebook codebook;
    std::vector<std::string> column_names;
    ColumnStats stats;
    TrainingSchedule schedule;
    InitPolicy init = InitPolicy::UniformRange;
    /// Run configuration echoed verbatim; must be a JSON object.
    std::string config_json = "{}";
};

std::string_view to_string(InitPolicy policy);
InitPolicy parse_init_policy(std::string_view text);

/// JSON object keyed column/mean/std/present_count, one array entry per column.
std::string stats_to_json(const ColumnStats& s);
ColumnStats stats_from_json(std::string_view text);

/// Doubles are written in shortest round-trip form, so reload is bit-exact.
std::string model_to_json(const Model& m);
Model model_from_json(std::string_view text);

void save_model(const std::filesystem::path& path, const Model& m);
Model load_model(const std::filesystem::path& path);

}  // namespace ksom
