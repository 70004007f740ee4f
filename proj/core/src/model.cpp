#include "ksom/model.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ksom/error.hpp"

namespace ksom {

namespace {

using ojson = nlohmann::ordered_json;

ojson stats_json(const ColumnStats& s) {
    ojson arr = ojson::array();
    for (std::size_t k = 0; k < s.dim(); ++k) {
        arr.push_back({{"column", k < s.columns.size() ? s.columns[k] : std::string()},
                       {"mean", s.mean[k]},
                       {"std", s.std[k]},
                       {"present_count", s.present_count[k]}});
    }
    return arr;
}

ColumnStats stats_from(const nlohmann::json& arr) {
    ColumnStats s;
    for (const auto& e : arr) {
        s.columns.push_back(e.at("column").get<std::string>());
        s.mean.push_back(e.at("mean").get<double>());
        s.std.push_back(e.at("std").get<double>());
        s.present_count.push_back(e.at("present_count").get<std::size_t>());
    }
    return s;
}

}  // namespace

std::string_view to_string(InitPolicy policy) {
    return policy == InitPolicy::UniformRange ? "uniform-range" : "complete-rows";
}

InitPolicy parse_init_policy(std::string_view text) {
    if (text == "uniform-range") return InitPolicy::UniformRange;
    if (text == "complete-rows") return InitPolicy::SampleCompleteRows;
    throw ConfigError("unknown init policy '" + std::string(text) + "' (expected uniform-range or complete-rows)");
}

std::string stats_to_json(const ColumnStats& s) { return stats_json(s).dump(2) + "\n"; }

ColumnStats stats_from_json(std::string_view text) {
    try {
        return stats_from(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("invalid statistics JSON: ") + e.what());
    }
}

std::string model_to_json(const Model& m) {
    const Codebook& cb = m.codebook;
    ojson j;
    j["format"] = "ksom-model/1";
    j["rows"] = cb.topology().rows();
    j["cols"] = cb.topology().cols();
    j["p"] = cb.dim();
    j["column_names"] = m.column_names;
    j["stats"] = stats_json(m.stats);
    ojson vectors = ojson::array();
    for (std::size_t u = 0; u < cb.units(); ++u) {
        const auto v = cb.vector(u);
        vectors.push_back(std::vector<double>(v.begin(), v.end()));
    }
    j["vectors"] = std::move(vectors);
    ojson sched;
    sched["iterations"] = m.schedule.iterations;
    sched["eps0"] = m.schedule.eps0;
    sched["radius0"] = m.schedule.initial_radius(cb.topology());
    sched["radius_decay"] = m.schedule.radius_decay;
    sched["init"] = to_string(m.init);
    j["schedule"] = std::move(sched);
    j["seed"] = m.schedule.seed;
    try {
        j["config"] = ojson::parse(m.config_json.empty() ? "{}" : m.config_json);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config echo is not valid JSON: ") + e.what());
    }
    return j.dump(2) + "\n";
}

Model model_from_json(std::string_view text) {
    try {
        const auto j = ojson::parse(text);
        const GridTopology topo(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
        const std::size_t p = j.at("p").get<std::size_t>();
        const auto& vectors = j.at("vectors");
        if (vectors.size() != topo.units()) throw DataError("model lists the wrong number of code-vectors");
        std::vector<double> flat;
        flat.reserve(topo.units() * p);
        for (const auto& v : vectors) {
            if (v.size() != p) throw DataError("code-vector length differs from p");
            for (const auto& x : v) flat.push_back(x.get<double>());
        }
        TrainingSchedule sched;
        const auto& s = j.at("schedule");
        sched.iterations = s.at("iterations").get<std::size_t>();
        sched.eps0 = s.at("eps0").get<double>();
        sched.radius0 = s.at("radius0").get<std::size_t>();
        sched.radius_decay = s.at("radius_decay").get<double>();
        sched.seed = j.at("seed").get<std::uint64_t>();

        Model m{Codebook(topo, p, std::move(flat)), j.at("column_names").get<std::vector<std::string>>(),
                stats_from(j.at("stats")), sched, parse_init_policy(s.at("init").get<std::string>()),
                j.contains("config") ? j.at("config").dump() : std::string("{}")};
        if (m.column_names.size() != p || m.stats.dim() != p) {
            throw DataError("model column metadata does not match p");
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("invalid model JSON: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const Model& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << model_to_json(m);
    if (!out) throw DataError("write failed for '" + path.string() + "'");
}

Model load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

}  // namespace ksom
