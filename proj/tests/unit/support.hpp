#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "hypertree/jacobi.hpp"

namespace hypertree::testing {

inline double rel(double a, double b) {
    const double d = std::abs(a - b);
    return b == 0.0 ? d : d / std::abs(b);
}

inline ParticleSystem random_system(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> mass(0.5, 2.0);
    std::normal_distribution<double> g(0.0, 1.0);
    ParticleSystem s;
    for (std::size_t i = 0; i < n; ++i) {
        s.masses.push_back(mass(rng));
        s.positions.push_back({g(rng), g(rng), g(rng)});
        s.velocities.push_back({g(rng), g(rng), g(rng)});
    }
    return s;
}

inline VecN random_vector(std::size_t d, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    VecN v(d);
    for (auto& x : v) x = g(rng);
    return v;
}

/// Random full binary tree over particles 1..n in s-expression form.
inline std::string random_tree_text(std::size_t n, std::mt19937_64& rng) {
    std::vector<std::string> parts;
    for (std::size_t i = 1; i <= n; ++i) parts.push_back(std::to_string(i));
    std::shuffle(parts.begin(), parts.end(), rng);
    while (parts.size() > 1) {
        std::uniform_int_distribution<std::size_t> pick(0, parts.size() - 2);
        const std::size_t i = pick(rng);
        parts[i] = "(" + parts[i] + " " + parts[i + 1] + ")";
        parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(i) + 1);
    }
    return parts.front();
}

}  // namespace hypertree::testing
