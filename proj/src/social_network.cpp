#include "taxsim/social_network.hpp"

#include <algorithm>
#include <sstream>

namespace taxsim {

int SocialGraph::degree(int node) const {
    if (topology == Topology::FullyConnected) return n_nodes - 1;
    return static_cast<int>(adjacency[static_cast<std::size_t>(node)].size());
}

bool SocialGraph::has_edge(int u, int v) const {
    if (u == v) return false;
    if (topology == Topology::FullyConnected) return true;
    const auto& nbrs = adjacency[static_cast<std::size_t>(u)];
    return std::find(nbrs.begin(), nbrs.end(), v) != nbrs.end();
}

std::size_t SocialGraph::edge_count() const {
    if (topology == Topology::FullyConnected) {
        return static_cast<std::size_t>(n_nodes) * (n_nodes - 1) / 2;
    }
    std::size_t deg_sum = 0;
    for (const auto& nbrs : adjacency) deg_sum += nbrs.size();
    return deg_sum / 2;
}

SocialGraph build_graph(int n_players, SocialGraph::Topology topology,
                        double rewire_r, RngStream& rng) {
    SocialGraph graph;
    graph.topology = topology;
    graph.n_nodes = n_players;
    if (topology == SocialGraph::Topology::FullyConnected) {
        if (n_players < 2) {
            throw PopulationTooSmallError("fully connected graph needs at least 2 players");
        }
        return graph;
    }

    // ring with k=4 must be simple
    if (n_players < 5) {
        throw PopulationTooSmallError("small-world ring with k=4 needs at least 5 players (got " +
                                      std::to_string(n_players) + ")");
    }

    const int n = n_players;
    graph.adjacency.assign(static_cast<std::size_t>(n), {});
    for (int i = 0; i < n; ++i) {
        auto& nbrs = graph.adjacency[static_cast<std::size_t>(i)];
        nbrs = {(i - 2 + n) % n, (i - 1 + n) % n, (i + 1) % n, (i + 2) % n};
    }

    // Rewire each of the 2N original ring edges independently, keeping the
    // home endpoint and re-aiming the other at an eligible random node.
    auto replace_entry = [](std::vector<int>& nbrs, int old_v, int new_v) {
        auto it = std::find(nbrs.begin(), nbrs.end(), old_v);
        *it = new_v;
    };
    auto erase_entry = [](std::vector<int>& nbrs, int v) {
        auto it = std::find(nbrs.begin(), nbrs.end(), v);
        nbrs.erase(it);
    };

    for (int offset : {1, 2}) {
        for (int i = 0; i < n; ++i) {
            if (!rng.bernoulli(rewire_r)) continue;
            if (graph.degree(i) >= n - 1) continue;  // no eligible target
            const int old_target = (i + offset) % n;
            int fresh;
            do {
                fresh = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(n)));
            } while (fresh == i || graph.has_edge(i, fresh));
            replace_entry(graph.adjacency[static_cast<std::size_t>(i)], old_target, fresh);
            erase_entry(graph.adjacency[static_cast<std::size_t>(old_target)], i);
            graph.adjacency[static_cast<std::size_t>(fresh)].push_back(i);
            graph.rewired_edges += 1;
        }
    }
    return graph;
}

std::vector<int> neighbors(const SocialGraph& graph, int node) {
    if (node < 0 || node >= graph.n_nodes) {
        throw IndexOutOfRangeError("player index " + std::to_string(node) +
                                   " outside population of " + std::to_string(graph.n_nodes));
    }
    std::vector<int> out;
    if (graph.topology == SocialGraph::Topology::FullyConnected) {
        out.reserve(static_cast<std::size_t>(graph.n_nodes) - 1);
        for (int j = 0; j < graph.n_nodes; ++j) {
            if (j != node) out.push_back(j);
        }
        return out;
    }
    return graph.adjacency[static_cast<std::size_t>(node)];
}

std::string graph_edge_list(const SocialGraph& graph) {
    std::ostringstream os;
    if (graph.topology == SocialGraph::Topology::FullyConnected) {
        for (int u = 0; u < graph.n_nodes; ++u) {
            for (int v = u + 1; v < graph.n_nodes; ++v) {
                os << u << ' ' << v << '\n';
            }
        }
        return os.str();
    }
    for (int u = 0; u < graph.n_nodes; ++u) {
        for (int v : graph.adjacency[static_cast<std::size_t>(u)]) {
            if (u < v) os << u << ' ' << v << '\n';
        }
    }
    return os.str();
}

}  // namespace taxsim
