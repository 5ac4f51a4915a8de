#include <doctest.h>

#include <algorithm>
#include <set>

#include "oracles.hpp"
#include "taxsim/social_network.hpp"

using namespace taxsim;

namespace {

void check_graph_invariants(const SocialGraph& g) {
    // undirected, no self loops, no duplicates, degree sum 4N
    std::size_t degree_sum = 0;
    for (int u = 0; u < g.n_nodes; ++u) {
        const auto& nbrs = g.adjacency[static_cast<std::size_t>(u)];
        degree_sum += nbrs.size();
        std::set<int> seen;
        for (int v : nbrs) {
            CHECK(v != u);
            CHECK(seen.insert(v).second);
            CHECK(g.has_edge(v, u));
        }
    }
    CHECK(degree_sum == static_cast<std::size_t>(4 * g.n_nodes));
    CHECK(g.edge_count() == static_cast<std::size_t>(2 * g.n_nodes));
}

}  // namespace

TEST_CASE("unrewired graph is the exact k=4 ring") {
    RngStream rng(1, 0);
    const auto g = build_graph(10, SocialGraph::Topology::SmallWorld, 0.0, rng);
    CHECK(g.rewired_edges == 0);
    for (int i = 0; i < 10; ++i) CHECK(g.degree(i) == 4);
    CHECK(neighbors(g, 0) == std::vector<int>{8, 9, 1, 2});
    CHECK(neighbors(g, 5) == std::vector<int>{3, 4, 6, 7});
    check_graph_invariants(g);
}

TEST_CASE("fully connected neighbors are all the others") {
    RngStream rng(1, 1);
    const auto g = build_graph(4, SocialGraph::Topology::FullyConnected, 0.0, rng);
    CHECK(neighbors(g, 2) == std::vector<int>{0, 1, 3});
    CHECK(g.degree(2) == 3);
    CHECK(g.has_edge(0, 3));
    CHECK_FALSE(g.has_edge(1, 1));
}

TEST_CASE("neighbor queries reject bad indices") {
    RngStream rng(1, 2);
    const auto g = build_graph(10, SocialGraph::Topology::SmallWorld, 0.0, rng);
    CHECK_THROWS_AS(neighbors(g, -1), IndexOutOfRangeError);
    CHECK_THROWS_AS(neighbors(g, 10), IndexOutOfRangeError);
}

TEST_CASE("small-world construction needs at least 5 nodes") {
    RngStream rng(1, 3);
    CHECK_THROWS_AS(build_graph(4, SocialGraph::Topology::SmallWorld, 0.0, rng),
                    PopulationTooSmallError);
    CHECK_NOTHROW(build_graph(5, SocialGraph::Topology::SmallWorld, 0.0, rng));
}

TEST_CASE("property: full rewiring keeps the edge count at exactly 2N") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        RngStream rng(seed, 10);
        const auto g = build_graph(300, SocialGraph::Topology::SmallWorld, 1.0, rng);
        check_graph_invariants(g);
        CHECK(g.rewired_edges == 600);
    }
}

TEST_CASE("property: adjacency stays symmetric and simple under any r") {
    for (double r : {0.0, 0.02, 0.3, 1.0}) {
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            RngStream rng(seed, 20);
            const auto g = build_graph(200, SocialGraph::Topology::SmallWorld, r, rng);
            check_graph_invariants(g);
        }
    }
}

TEST_CASE("rewired edge count follows the binomial oracle") {
    // Binomial(2N, r) with N=1000, r=0.02: mean 40, sd ~6.26; the mean over
    // 10 seeds has sd ~1.98
    std::vector<double> counts;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        RngStream rng(seed, 30);
        const auto g = build_graph(1000, SocialGraph::Topology::SmallWorld, 0.02, rng);
        counts.push_back(static_cast<double>(g.rewired_edges));
    }
    const double sd_of_mean = std::sqrt(2000.0 * 0.02 * 0.98 / 10.0);
    CHECK(std::abs(oracle::mean(counts) - 40.0) <= 3.0 * sd_of_mean);
}

TEST_CASE("property: small rewiring keeps clustering but collapses path length") {
    RngStream ring_rng(0, 40);
    const auto ring = build_graph(1000, SocialGraph::Topology::SmallWorld, 0.0, ring_rng);
    const double ring_clustering = oracle::average_clustering(ring);
    const double ring_path = oracle::mean_shortest_path(ring);
    CHECK(ring_clustering == doctest::Approx(0.5));     // k=4 ring value
    CHECK(ring_path == doctest::Approx(125.25).epsilon(0.01));

    std::vector<double> clusterings, paths;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        RngStream rng(seed, 41);
        const auto g = build_graph(1000, SocialGraph::Topology::SmallWorld, 0.02, rng);
        clusterings.push_back(oracle::average_clustering(g));
        paths.push_back(oracle::mean_shortest_path(g));
    }
    CHECK(oracle::mean(clusterings) > 0.7 * ring_clustering);
    CHECK(oracle::mean(paths) < 0.5 * ring_path);
}

TEST_CASE("edge list emits each undirected edge once") {
    RngStream rng(3, 50);
    const auto g = build_graph(8, SocialGraph::Topology::SmallWorld, 0.0, rng);
    const std::string dump = graph_edge_list(g);
    const std::size_t lines = static_cast<std::size_t>(std::count(dump.begin(), dump.end(), '\n'));
    CHECK(lines == g.edge_count());
    CHECK(dump.find("0 1\n") != std::string::npos);
    CHECK(dump.find("1 0\n") == std::string::npos);
}
