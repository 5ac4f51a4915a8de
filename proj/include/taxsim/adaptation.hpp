#pragma once

#include <vector>

#include "taxsim/rng.hpp"
#include "taxsim/social_network.hpp"
#include "taxsim/types.hpp"

namespace taxsim {

// Category counts over one player's neighborhood, taken against a frozen
// snapshot of categories so the synchronous update never sees a same-turn
// change.
struct NeighborhoodCensus {
    int same_category = 0;
    int other_categories = 0;
    int taxpayers = 0;
    int evaders = 0;
    int mixed = 0;
};

NeighborhoodCensus neighborhood_census(const std::vector<Category>& snapshot,
                                       const SocialGraph& graph, int player);

// Relative order of the two believeness updates within a turn. They commute
// except through clamping and the mixed players' pull toward 0.5, so the
// order is exposed for sensitivity checks.
enum class UpdateOrder { ImitationFirst, CapitalFirst };

const char* update_order_name(UpdateOrder order);

/**
 * Imitation rule. Taxpayers and evaders drift by IF*delta_b: down when their
 * category is a strict neighborhood minority, up otherwise (ties included).
 * Mixed players in a non-mixed-majority neighborhood drift down when evaders
 * outnumber taxpayers and up otherwise; in a mixed-majority (or tied)
 * neighborhood they move toward 0.5 without overshooting it.
 * Returns the new believeness, clamped to [0,1].
 */
double imitation_update(Category category, double believeness,
                        const NeighborhoodCensus& census, const Params& params);

// Economic-dissatisfaction rule, active only while capital is strictly
// negative: taxpayers and evaders lose CF*delta_b of believeness; mixed
// players move away from 0.5 in whichever direction they already lean
// (the >= 0.5 side increases). Returns the new believeness, clamped.
double capital_factor_update(const PlayerState& player, const Params& params);

// Category switching once believeness hits a boundary. Taxpayers/evaders at
// B <= 0 become mixed; mixed players become evaders at B <= 0 and taxpayers
// at B >= 1. Every category change redraws believeness as the supplied
// uniform [0,1) value.
void resolve_transition(PlayerState& player, double redraw_uniform);

/**
 * One synchronous adaptation pass over the whole population: censuses are
 * computed from a snapshot of categories, then the imitation rule, the
 * capital-factor rule and the transition rule run for every player. The
 * transition redraws come from one uniform pre-drawn per player in index
 * order, so the result does not depend on the order players are visited.
 */
void adaptation_step(std::vector<PlayerState>& players, const SocialGraph& graph,
                     const Params& params, RngStream& rng,
                     UpdateOrder order = UpdateOrder::ImitationFirst);

}  // namespace taxsim
