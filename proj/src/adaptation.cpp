#include "taxsim/adaptation.hpp"

#include <algorithm>

namespace taxsim {

namespace {

double clamp01(double b) { return std::clamp(b, 0.0, 1.0); }

NeighborhoodCensus census_from_counts(Category own, int taxpayers, int evaders, int mixed) {
    NeighborhoodCensus census;
    census.taxpayers = taxpayers;
    census.evaders = evaders;
    census.mixed = mixed;
    switch (own) {
        case Category::Taxpayer: census.same_category = taxpayers; break;
        case Category::Evader: census.same_category = evaders; break;
        case Category::Mixed: census.same_category = mixed; break;
    }
    census.other_categories = taxpayers + evaders + mixed - census.same_category;
    return census;
}

}  // namespace

NeighborhoodCensus neighborhood_census(const std::vector<Category>& snapshot,
                                       const SocialGraph& graph, int player) {
    if (player < 0 || player >= graph.n_nodes) {
        throw IndexOutOfRangeError("player index " + std::to_string(player) +
                                   " outside population of " + std::to_string(graph.n_nodes));
    }
    int counts[3] = {0, 0, 0};
    graph.for_each_neighbor(player, [&](int j) {
        counts[static_cast<int>(snapshot[static_cast<std::size_t>(j)])] += 1;
    });
    return census_from_counts(snapshot[static_cast<std::size_t>(player)],
                              counts[0], counts[1], counts[2]);
}

double imitation_update(Category category, double believeness,
                        const NeighborhoodCensus& census, const Params& params) {
    const double step = params.imitation_factor * params.delta_b;
    double b = believeness;
    if (category != Category::Mixed) {
        if (census.same_category < census.other_categories) {
            b -= step;
        } else {
            b += step;
        }
        return clamp01(b);
    }

    const int others = census.taxpayers + census.evaders;
    if (census.mixed < others) {
        if (census.evaders > census.taxpayers) {
            b -= step;
        } else {
            b += step;
        }
        return clamp01(b);
    }
    // mixed majority (or tie): move toward 0.5 without crossing it
    if (b > 0.5) {
        b = std::max(0.5, b - step);
    } else if (b < 0.5) {
        b = std::min(0.5, b + step);
    }
    return clamp01(b);
}

double capital_factor_update(const PlayerState& player, const Params& params) {
    if (player.capital >= 0.0) return player.believeness;
    const double step = params.capital_factor * params.delta_b;
    double b = player.believeness;
    if (player.category != Category::Mixed) {
        b -= step;
    } else {
        b += (b >= 0.5) ? step : -step;
    }
    return clamp01(b);
}

void resolve_transition(PlayerState& player, double redraw_uniform) {
    if (player.category == Category::Mixed) {
        if (player.believeness <= 0.0) {
            player.category = Category::Evader;
            player.believeness = redraw_uniform;
        } else if (player.believeness >= 1.0) {
            player.category = Category::Taxpayer;
            player.believeness = redraw_uniform;
        }
        return;
    }
    if (player.believeness <= 0.0) {
        player.category = Category::Mixed;
        player.believeness = redraw_uniform;
    }
}

const char* update_order_name(UpdateOrder order) {
    return order == UpdateOrder::ImitationFirst ? "imitation-first" : "capital-first";
}

void adaptation_step(std::vector<PlayerState>& players, const SocialGraph& graph,
                     const Params& params, RngStream& rng, UpdateOrder order) {
    const std::size_t n = players.size();

    std::vector<Category> snapshot(n);
    for (std::size_t i = 0; i < n; ++i) snapshot[i] = players[i].category;

    // one redraw value per player, drawn in index order, so the per-player
    // updates below could run in any order with the same result
    std::vector<double> redraw(n);
    for (std::size_t i = 0; i < n; ++i) redraw[i] = rng.uniform01();

    // fully-connected censuses come from global totals instead of a scan
    int totals[3] = {0, 0, 0};
    const bool fully_connected = graph.topology == SocialGraph::Topology::FullyConnected;
    if (fully_connected) {
        for (Category c : snapshot) totals[static_cast<int>(c)] += 1;
    }

    for (std::size_t i = 0; i < n; ++i) {
        PlayerState& p = players[i];
        NeighborhoodCensus census;
        if (fully_connected) {
            int counts[3] = {totals[0], totals[1], totals[2]};
            counts[static_cast<int>(snapshot[i])] -= 1;
            census = census_from_counts(snapshot[i], counts[0], counts[1], counts[2]);
        } else {
            census = neighborhood_census(snapshot, graph, static_cast<int>(i));
        }
        if (order == UpdateOrder::ImitationFirst) {
            p.believeness = imitation_update(p.category, p.believeness, census, params);
            p.believeness = capital_factor_update(p, params);
        } else {
            p.believeness = capital_factor_update(p, params);
            p.believeness = imitation_update(p.category, p.believeness, census, params);
        }
        resolve_transition(p, redraw[i]);
    }
}

}  // namespace taxsim
