#include "taxsim/simulation.hpp"

#include <cmath>

namespace taxsim {

const char* believeness_init_name(BelievenessInit mode) {
    switch (mode) {
        case BelievenessInit::UniformHalfOne: return "uniform-half-one";
        case BelievenessInit::UniformZeroOne: return "uniform-zero-one";
        case BelievenessInit::AllOne: return "all-one";
    }
    return "?";
}

namespace {

// Largest-remainder apportionment of n slots over the three fractions.
void category_counts(int n, const InitialFractions& f, int out[3]) {
    const double fracs[3] = {f.taxpayers, f.evaders, f.mixed};
    double remainders[3];
    int assigned = 0;
    for (int k = 0; k < 3; ++k) {
        const double exact = fracs[k] * n;
        out[k] = static_cast<int>(std::floor(exact));
        remainders[k] = exact - out[k];
        assigned += out[k];
    }
    while (assigned < n) {
        int best = 0;
        for (int k = 1; k < 3; ++k) {
            if (remainders[k] > remainders[best]) best = k;
        }
        out[best] += 1;
        remainders[best] = -1.0;
        assigned += 1;
    }
}

}  // namespace

std::vector<PlayerState> make_population(const Params& params,
                                         const InitialFractions& fractions,
                                         BelievenessInit mode, RngStream& rng) {
    const double sum = fractions.taxpayers + fractions.evaders + fractions.mixed;
    if (fractions.taxpayers < 0.0 || fractions.evaders < 0.0 || fractions.mixed < 0.0 ||
        std::abs(sum - 1.0) > 1e-9) {
        throw InvalidParamError({{"initial_fractions",
                                  std::to_string(fractions.taxpayers) + "/" +
                                      std::to_string(fractions.evaders) + "/" +
                                      std::to_string(fractions.mixed),
                                  "fractions >= 0 and sum to 1"}});
    }

    const int n = params.n_players;
    int counts[3];
    category_counts(n, fractions, counts);

    std::vector<PlayerState> players(static_cast<std::size_t>(n));
    std::size_t idx = 0;
    for (int k = 0; k < 3; ++k) {
        for (int c = 0; c < counts[k]; ++c) {
            players[idx++].category = static_cast<Category>(k);
        }
    }

    // Fisher-Yates over categories for a spatially uniform placement
    for (std::size_t i = static_cast<std::size_t>(n) - 1; i > 0; --i) {
        const std::size_t j = rng.uniform_index(i + 1);
        std::swap(players[i].category, players[j].category);
    }

    for (auto& p : players) {
        p.capital = 0.0;
        if (p.category == Category::Mixed) {
            p.believeness = 0.5;  // undecided
            continue;
        }
        switch (mode) {
            case BelievenessInit::UniformHalfOne: p.believeness = rng.uniform(0.5, 1.0); break;
            case BelievenessInit::UniformZeroOne: p.believeness = rng.uniform01(); break;
            case BelievenessInit::AllOne: p.believeness = 1.0; break;
        }
    }
    return players;
}

RunResult run_fixed(const Params& params, const InitialFractions& fractions,
                    RngStream& rng) {
    auto players = make_population(params, fractions, BelievenessInit::AllOne, rng);
    RunResult result;
    result.params = params;
    result.stream_id = rng.stream_id();
    result.append(measure_population(players));
    for (int t = 0; t < params.turns; ++t) {
        step_turn(players, params, rng);
        result.append(measure_population(players));
    }
    return result;
}

RunResult run_adaptive(const Params& params, const InitialFractions& fractions,
                       const SocialGraph& graph, BelievenessInit mode,
                       RngStream& rng, UpdateOrder order) {
    auto players = make_population(params, fractions, mode, rng);
    RunResult result;
    result.params = params;
    result.stream_id = rng.stream_id();
    result.append(measure_population(players));
    for (int t = 0; t < params.turns; ++t) {
        step_turn(players, params, rng);
        adaptation_step(players, graph, params, rng, order);
        result.append(measure_population(players));
    }
    return result;
}

}  // namespace taxsim
