#pragma once

#include <cstddef>
#include <vector>

#include "taxsim/rng.hpp"
#include "taxsim/types.hpp"

namespace taxsim {

/**
 * Imitation topology. Either the fully-connected marker (every player is a
 * neighbor of every other) or a Watts-Strogatz small-world graph built from
 * the k=4 ring: each node tied to its two nearest neighbors on each side,
 * then each ring edge independently rewired with probability r by re-aiming
 * its far endpoint at a uniformly random non-adjacent, non-self node.
 *
 * The graph is undirected, has no self-loops or duplicate edges, and keeps
 * exactly 2N edges under any rewiring rate. Immutable after construction.
 */
struct SocialGraph {
    enum class Topology { FullyConnected, SmallWorld };

    Topology topology = Topology::FullyConnected;
    int n_nodes = 0;
    std::vector<std::vector<int>> adjacency;  // SmallWorld only
    int rewired_edges = 0;                    // SmallWorld bookkeeping

    int degree(int node) const;
    bool has_edge(int u, int v) const;
    std::size_t edge_count() const;

    template <typename Fn>
    void for_each_neighbor(int node, Fn&& fn) const {
        if (topology == Topology::FullyConnected) {
            for (int j = 0; j < n_nodes; ++j) {
                if (j != node) fn(j);
            }
        } else {
            for (int j : adjacency[static_cast<std::size_t>(node)]) fn(j);
        }
    }
};

SocialGraph build_graph(int n_players, SocialGraph::Topology topology,
                        double rewire_r, RngStream& rng);

// Neighbor list in a stable deterministic order. FullyConnected: all other
// indices ascending. SmallWorld ring order is (i-2, i-1, i+1, i+2) before
// rewiring; rewired entries replace the old endpoint in place.
// Throws IndexOutOfRangeError for an invalid index.
std::vector<int> neighbors(const SocialGraph& graph, int node);

// Edge list as "u v" lines, each undirected edge once with u < v.
std::string graph_edge_list(const SocialGraph& graph);

}  // namespace taxsim
