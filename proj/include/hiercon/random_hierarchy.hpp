#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "hiercon/hierarchy.hpp"

namespace hiercon {

/// Distribution for property sweeps: group sizes uniform in [1, max_group_size],
/// a random spanning tree per group plus extra edges, weights log-uniform in
/// [weight_min, weight_max], random stochastic collecting rows.
struct RandomHierarchyOptions {
    std::size_t max_layers = 4;
    std::size_t max_physical = 20;
    std::size_t min_physical = 2;
    std::size_t max_group_size = 4;
    double extra_edge_probability = 0.3;
    double weight_min = 0.5;
    double weight_max = 2.0;
    bool random_edge_weights = true;
    bool random_collecting = true;
    double max_hop_delay = 0.0;  // hop delays uniform in [0, max_hop_delay]
};

inline constexpr std::uint64_t kDefaultSeed = 42;

[[nodiscard]] HierarchySpec random_hierarchy(std::mt19937_64& rng, const RandomHierarchyOptions& opts = {});

/// Random connected group on `size` nodes.
[[nodiscard]] GroupSpec random_group(std::mt19937_64& rng, std::size_t size, const RandomHierarchyOptions& opts);

/// Redraws every collecting row of `spec` with positive stochastic entries.
void redraw_collecting(std::mt19937_64& rng, HierarchySpec& spec);

}  // namespace hiercon
