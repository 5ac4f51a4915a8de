#pragma once

#include <vector>

#include "taxsim/adaptation.hpp"
#include "taxsim/rng.hpp"
#include "taxsim/social_network.hpp"
#include "taxsim/turn_engine.hpp"
#include "taxsim/types.hpp"

namespace taxsim {

// Starting believeness for committed players. The base game never states
// initial commitment, so the mode is a config knob; half-one is the default
// used by the reported threshold experiments.
enum class BelievenessInit {
    UniformHalfOne,  // taxpayers/evaders start in [0.5, 1)
    UniformZeroOne,  // taxpayers/evaders start anywhere in [0, 1)
    AllOne,          // everyone starts a zealot
};

const char* believeness_init_name(BelievenessInit mode);

struct InitialFractions {
    double taxpayers = 0.6;
    double evaders = 0.4;
    double mixed = 0.0;

    bool operator==(const InitialFractions&) const = default;
};

// Exact category counts (largest-remainder rounding of the fractions),
// placed uniformly at random. Mixed players start undecided at B=0.5.
// Throws InvalidParamError when the fractions do not sum to 1.
std::vector<PlayerState> make_population(const Params& params,
                                         const InitialFractions& fractions,
                                         BelievenessInit mode, RngStream& rng);

// Base game: categories stay fixed, step_turn repeated params.turns times.
RunResult run_fixed(const Params& params, const InitialFractions& fractions,
                    RngStream& rng);

// Adaptive game: each turn interleaves step_turn with adaptation_step on the
// given imitation topology.
RunResult run_adaptive(const Params& params, const InitialFractions& fractions,
                       const SocialGraph& graph, BelievenessInit mode,
                       RngStream& rng, UpdateOrder order = UpdateOrder::ImitationFirst);

}  // namespace taxsim
