#pragma once

#include <vector>

#include "taxsim/rng.hpp"
#include "taxsim/types.hpp"

namespace taxsim {

// Per-turn bookkeeping for conservation checks:
// sum(capital after) - sum(before) == total_gain - penalty_h * caught_evaders.
struct TurnOutcome {
    int caught_evaders = 0;   // audited Game B plays this turn (mixed included)
    int total_donated = 0;    // tax_d * number of Game A plays this turn
    int total_gain = 0;       // gain_g * n_players
};

// Every player's capital increases by exactly gain_g.
void apply_gain(std::vector<PlayerState>& players, const Params& params);

// Game A: the donor gives away tax_d units, one each to tax_d distinct
// recipients drawn uniformly from the other players. Zero-sum across the
// population. Throws PopulationTooSmallError if fewer than tax_d others exist.
void play_game_a(std::size_t donor, std::vector<PlayerState>& players,
                 const Params& params, RngStream& rng);

// Game B: with probability audit_p the player loses penalty_h units, which
// are destroyed, not redistributed. Returns whether the audit hit.
bool play_game_b(std::size_t player, std::vector<PlayerState>& players,
                 const Params& params, RngStream& rng);

// One synchronous turn: gain for everyone, then each player plays her game
// in ascending index order. Taxpayers play A, evaders play B, mixed players
// flip a fresh fair coin between A and B each turn.
TurnOutcome step_turn(std::vector<PlayerState>& players, const Params& params,
                      RngStream& rng);

}  // namespace taxsim
