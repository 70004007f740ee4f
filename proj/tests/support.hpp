#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "ksom/ksom.hpp"

namespace ksom::test {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline std::vector<std::string> names(std::size_t p) {
    std::vector<std::string> out;
    for (std::size_t k = 0; k < p; ++k) out.push_back("v" + std::to_string(k + 1));
    return out;
}

// NaN entries become missing components.
inline MaskedObservation obs(std::vector<double> v, std::string label = {}) {
    std::vector<std::size_t> miss;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (std::isnan(v[k])) {
            miss.push_back(k);
            v[k] = 0.0;
        }
    }
    return MaskedObservation(std::move(v), miss, std::move(label));
}

inline Dataset dataset(const std::vector<std::vector<double>>& rows) {
    Dataset d(names(rows.empty() ? 0 : rows.front().size()));
    for (const auto& r : rows) d.add(obs(r));
    return d;
}

// Random observation with at least one present component.
inline MaskedObservation random_obs(std::mt19937_64& g, std::size_t p, double missing_rate = 0.3) {
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::bernoulli_distribution miss(missing_rate);
    std::uniform_int_distribution<std::size_t> keep(0, p - 1);
    std::vector<double> v(p);
    for (auto& x : v) x = miss(g) ? kNaN : u(g);
    const std::size_t k = keep(g);
    if (std::isnan(v[k])) v[k] = u(g);
    return obs(v);
}

inline Codebook random_codebook(std::mt19937_64& g, std::size_t rows, std::size_t cols, std::size_t p) {
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::vector<double> flat(rows * cols * p);
    for (auto& x : flat) x = u(g);
    return Codebook(GridTopology(rows, cols), p, flat);
}

}  // namespace ksom::test
