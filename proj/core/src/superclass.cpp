#include "ksom/superclass.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "ksom/error.hpp"

namespace ksom {

Dendrogram agglomerate(const Codebook& cb) { return agglomerate(cb.flat(), cb.units(), cb.dim()); }

Dendrogram agglomerate(std::span<const double> flat, std::size_t count, std::size_t dim) {
    if (count < 2) throw ConfigError("hierarchical clustering needs at least two code-vectors");
    if (flat.size() != count * dim) throw MismatchError("code-vector storage does not match count x dim");

    // Slot s holds the active cluster with node id ids[s]; slots keep leaf order,
    // and a merged cluster takes the slot of its smaller-id member.
    std::vector<double> dist(count * count, 0.0);
    for (std::size_t a = 0; a < count; ++a) {
        for (std::size_t b = a + 1; b < count; ++b) {
            double s = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                const double d = flat[a * dim + k] - flat[b * dim + k];
                s += d * d;
            }
            dist[a * count + b] = dist[b * count + a] = std::sqrt(s);
        }
    }
    std::vector<std::size_t> ids(count);
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    std::vector<std::size_t> sizes(count, 1);
    std::vector<bool> active(count, true);

    Dendrogram dg;
    dg.leaves = count;
    for (std::size_t step = 0; step + 1 < count; ++step) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 0;
        std::pair<std::size_t, std::size_t> best_ids{SIZE_MAX, SIZE_MAX};
        for (std::size_t i = 0; i < count; ++i) {
            if (!active[i]) continue;
            for (std::size_t j = i + 1; j < count; ++j) {
                if (!active[j]) continue;
                const double d = dist[i * count + j];
                const std::pair<std::size_t, std::size_t> pair_ids{std::min(ids[i], ids[j]), std::max(ids[i], ids[j])};
                if (d < best || (d == best && pair_ids < best_ids)) {
                    best = d;
                    bi = i;
                    bj = j;
                    best_ids = pair_ids;
                }
            }
        }

        const double ni = static_cast<double>(sizes[bi]);
        const double nj = static_cast<double>(sizes[bj]);
        for (std::size_t m = 0; m < count; ++m) {
            if (!active[m] || m == bi || m == bj) continue;
            const double nm = static_cast<double>(sizes[m]);
            const double dim_ = dist[m * count + bi];
            const double djm = dist[m * count + bj];
            const double v = ((ni + nm) * dim_ * dim_ + (nj + nm) * djm * djm - nm * best * best) / (ni + nj + nm);
            dist[m * count + bi] = dist[bi * count + m] = std::sqrt(std::max(v, 0.0));
        }

        dg.merges.push_back({best_ids.first, best_ids.second, best, sizes[bi] + sizes[bj]});
        sizes[bi] += sizes[bj];
        ids[bi] = count + step;
        active[bj] = false;
    }
    return dg;
}

SuperClassing cut(const Dendrogram& dg, std::size_t k) {
    const std::size_t n = dg.leaves;
    if (k < 1 || k > n) throw ConfigError("cut level k=" + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
    if (dg.merges.size() + 1 != n) throw DataError("dendrogram has an inconsistent merge count");

    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    // Any leaf under a node serves as that node's representative.
    std::vector<std::size_t> rep(2 * n - 1);
    std::iota(rep.begin(), rep.begin() + static_cast<std::ptrdiff_t>(n), std::size_t{0});
    for (std::size_t j = 0; j < dg.merges.size(); ++j) {
        const auto& m = dg.merges[j];
        if (m.left >= n + j || m.right >= n + j) throw DataError("dendrogram references a future node");
        rep[n + j] = rep[m.left];
        if (j < n - k) parent[find(rep[m.right])] = find(rep[m.left]);
    }
    std::vector<std::size_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = find(i);
    return partition_from_labels(labels);
}

SuperClassing partition_from_labels(std::span<const std::size_t> labels) {
    SuperClassing sc;
    std::map<std::size_t, std::size_t> renumber;
    sc.assignment.resize(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto [it, inserted] = renumber.emplace(labels[i], renumber.size());
        if (inserted) sc.members.emplace_back();
        sc.assignment[i] = it->second;
        sc.members[it->second].push_back(i);
    }
    sc.k = sc.members.size();
    return sc;
}

std::vector<bool> superclass_contiguity(const SuperClassing& sc, const GridTopology& topo) {
    if (sc.assignment.size() != topo.units()) throw MismatchError("super-classing does not cover the grid");
    std::vector<bool> out;
    out.reserve(sc.members.size());
    for (const auto& group : sc.members) out.push_back(topo.connected(group));
    return out;
}

std::string dendrogram_to_json(const Dendrogram& dg) {
    nlohmann::ordered_json j;
    j["leaves"] = dg.leaves;
    j["linkage"] = "ward";
    auto& merges = j["merges"] = nlohmann::ordered_json::array();
    for (const auto& m : dg.merges) {
        merges.push_back({{"left", m.left}, {"right", m.right}, {"height", m.height}, {"size", m.size}});
    }
    return j.dump(2) + "\n";
}

Dendrogram dendrogram_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        Dendrogram dg;
        dg.leaves = j.at("leaves").get<std::size_t>();
        for (const auto& m : j.at("merges")) {
            dg.merges.push_back({m.at("left").get<std::size_t>(), m.at("right").get<std::size_t>(),
                                 m.at("height").get<double>(), m.at("size").get<std::size_t>()});
        }
        return dg;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("invalid dendrogram JSON: ") + e.what());
    }
}

void write_superclass_csv(std::ostream& out, const SuperClassing& sc, const GridTopology& topo) {
    if (sc.assignment.size() != topo.units()) throw MismatchError("super-classing does not cover the grid");
    out << "unit_row,unit_col,superclass_id\n";
    for (std::size_t u = 0; u < topo.units(); ++u) {
        out << topo.row_of(u) << ',' << topo.col_of(u) << ',' << sc.assignment[u] << '\n';
    }
}

SuperClassing read_superclass_csv(std::istream& in, const GridTopology& topo) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("super-class file is empty");
    std::vector<std::size_t> labels(topo.units(), SIZE_MAX);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::size_t r = 0, c = 0, id = 0;
        char comma1 = 0, comma2 = 0;
        if (!(fields >> r >> comma1 >> c >> comma2 >> id) || comma1 != ',' || comma2 != ',' || r >= topo.rows() ||
            c >= topo.cols()) {
            throw DataError("super-class file line " + std::to_string(line_no) + " is malformed");
        }
        labels[topo.index(r, c)] = id;
    }
    if (std::find(labels.begin(), labels.end(), SIZE_MAX) != labels.end()) {
        throw DataError("super-class file does not cover every unit");
    }
    return partition_from_labels(labels);
}

}  // namespace ksom
