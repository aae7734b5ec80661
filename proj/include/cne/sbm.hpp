#pragma once

#include <random>
#include <stdexcept>
#include <vector>

#include "cne/graph.hpp"

namespace cne {

// Erdos-Renyi G(n, p), seeded.
inline Graph generate_er(int n, double p, std::uint64_t seed) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("p must be in [0,1]");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<NodePair> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (coin(rng) < p) edges.emplace_back(i, j);
    return Graph::from_edges(n, std::move(edges));
}

// Stochastic block model with per-block-pair link probabilities. The block
// assignment is attached to the returned graph.
inline Graph generate_sbm(const std::vector<int>& block_sizes,
                          const std::vector<std::vector<double>>& probs, std::uint64_t seed) {
    const int B = static_cast<int>(block_sizes.size());
    if (static_cast<int>(probs.size()) != B)
        throw std::invalid_argument("probability matrix must be B x B");
    int n = 0;
    std::vector<int> blocks;
    for (int b = 0; b < B; ++b) {
        if (static_cast<int>(probs[b].size()) != B)
            throw std::invalid_argument("probability matrix must be B x B");
        n += block_sizes[b];
        blocks.insert(blocks.end(), block_sizes[b], b);
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<NodePair> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (coin(rng) < probs[blocks[i]][blocks[j]]) edges.emplace_back(i, j);
    Graph g = Graph::from_edges(n, std::move(edges));
    g.set_blocks(std::move(blocks));
    return g;
}

}  // namespace cne
