#include "hiercon/random_hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hiercon {

namespace {

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
}

std::vector<double> stochastic_row(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::vector<double> row(n);
    for (auto& c : row) {
        c = u(rng);
    }
    const double sum = std::accumulate(row.begin(), row.end(), 0.0);
    for (auto& c : row) {
        c /= sum;
    }
    // Push the rounding residue into the largest entry so the row sums to 1.
    const double residue = 1.0 - std::accumulate(row.begin(), row.end(), 0.0);
    *std::max_element(row.begin(), row.end()) += residue;
    return row;
}

}  // namespace

GroupSpec random_group(std::mt19937_64& rng, std::size_t size, const RandomHierarchyOptions& opts) {
    GroupSpec g;
    g.size = size;
    auto weight = [&] {
        return opts.random_edge_weights ? log_uniform(rng, opts.weight_min, opts.weight_max) : 1.0;
    };
    std::vector<std::size_t> order(size);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::vector<bool>> present(size, std::vector<bool>(size, false));
    for (std::size_t k = 1; k < size; ++k) {
        std::uniform_int_distribution<std::size_t> pick(0, k - 1);
        const auto a = order[pick(rng)];
        const auto b = order[k];
        g.edges.push_back({std::min(a, b), std::max(a, b), weight()});
        present[a][b] = present[b][a] = true;
    }
    std::bernoulli_distribution extra(opts.extra_edge_probability);
    for (std::size_t a = 0; a < size; ++a) {
        for (std::size_t b = a + 1; b < size; ++b) {
            if (!present[a][b] && extra(rng)) {
                g.edges.push_back({a, b, weight()});
            }
        }
    }
    return g;
}

void redraw_collecting(std::mt19937_64& rng, HierarchySpec& spec) {
    for (std::size_t l = 0; l + 1 < spec.layers.size(); ++l) {
        std::vector<std::vector<double>> rows;
        for (const auto& g : spec.layers[l].groups) {
            rows.push_back(stochastic_row(rng, g.size));
        }
        spec.layers[l].collecting = std::move(rows);
    }
}

HierarchySpec random_hierarchy(std::mt19937_64& rng, const RandomHierarchyOptions& opts) {
    std::uniform_int_distribution<std::size_t> layer_count(1, opts.max_layers);
    std::uniform_int_distribution<std::size_t> group_size(1, opts.max_group_size);

    // Build sizes top-down and reject hierarchies outside the physical-size window.
    std::vector<std::vector<std::size_t>> sizes;
    for (;;) {
        sizes.clear();
        const std::size_t M = layer_count(rng);
        sizes.resize(M);
        std::size_t groups = 1;
        for (std::size_t l = M; l-- > 0;) {
            std::size_t nodes = 0;
            for (std::size_t p = 0; p < groups; ++p) {
                sizes[l].push_back(group_size(rng));
                nodes += sizes[l].back();
            }
            groups = nodes;
        }
        if (groups >= opts.min_physical && groups <= opts.max_physical) {
            break;
        }
    }

    HierarchySpec spec;
    for (const auto& layer_sizes : sizes) {
        LayerSpec layer;
        for (auto k : layer_sizes) {
            layer.groups.push_back(random_group(rng, k, opts));
        }
        spec.layers.push_back(std::move(layer));
    }
    const std::size_t n1 = spec.layers.front().node_count();
    for (std::size_t i = 0; i < n1; ++i) {
        spec.physical_weights.push_back(log_uniform(rng, opts.weight_min, opts.weight_max));
    }
    std::uniform_real_distribution<double> delay(0.0, opts.max_hop_delay);
    for (std::size_t l = 0; l + 1 < spec.layers.size(); ++l) {
        spec.hop_delays.push_back(opts.max_hop_delay > 0.0 ? delay(rng) : 0.0);
    }
    if (opts.random_collecting) {
        redraw_collecting(rng, spec);
    }
    return spec;
}

}  // namespace hiercon
