#include "taxsim/turn_engine.hpp"

#include <algorithm>

namespace taxsim {

void apply_gain(std::vector<PlayerState>& players, const Params& params) {
    const double g = static_cast<double>(params.gain_g);
    for (auto& p : players) {
        p.capital += g;
    }
}

void play_game_a(std::size_t donor, std::vector<PlayerState>& players,
                 const Params& params, RngStream& rng) {
    const std::size_t n = players.size();
    const std::size_t d = static_cast<std::size_t>(params.tax_d);
    if (n < d + 1) {
        throw PopulationTooSmallError("game A needs at least tax_d other players (n_players=" +
                                      std::to_string(n) + ", tax_d=" + std::to_string(params.tax_d) + ")");
    }

    players[donor].capital -= static_cast<double>(params.tax_d);

    if (d == n - 1) {
        // forced: every other player receives one unit
        for (std::size_t i = 0; i < n; ++i) {
            if (i != donor) players[i].capital += 1.0;
        }
        return;
    }

    // d distinct recipients, donor excluded, uniform without replacement.
    // d is small relative to n in every model setting, so redraw on collision.
    std::size_t stack_buf[16];
    std::vector<std::size_t> heap_buf;
    std::size_t* chosen = stack_buf;
    if (d > std::size(stack_buf)) {
        heap_buf.resize(d);
        chosen = heap_buf.data();
    }
    std::size_t taken = 0;
    while (taken < d) {
        std::size_t r = rng.uniform_index(n - 1);
        if (r >= donor) ++r;  // skip the donor slot
        bool duplicate = false;
        for (std::size_t k = 0; k < taken; ++k) {
            if (chosen[k] == r) {
                duplicate = true;
                break;
            }
        }
        if (duplicate) continue;
        chosen[taken++] = r;
        players[r].capital += 1.0;
    }
}

bool play_game_b(std::size_t player, std::vector<PlayerState>& players,
                 const Params& params, RngStream& rng) {
    if (rng.bernoulli(params.audit_p)) {
        players[player].capital -= static_cast<double>(params.penalty_h);
        return true;
    }
    return false;
}

TurnOutcome step_turn(std::vector<PlayerState>& players, const Params& params,
                      RngStream& rng) {
    TurnOutcome outcome;
    apply_gain(players, params);
    outcome.total_gain = params.gain_g * static_cast<int>(players.size());

    for (std::size_t i = 0; i < players.size(); ++i) {
        bool plays_a;
        switch (players[i].category) {
            case Category::Taxpayer: plays_a = true; break;
            case Category::Evader: plays_a = false; break;
            case Category::Mixed: plays_a = rng.bernoulli(0.5); break;
            default: plays_a = false; break;
        }
        if (plays_a) {
            play_game_a(i, players, params, rng);
            outcome.total_donated += params.tax_d;
        } else {
            if (play_game_b(i, players, params, rng)) {
                outcome.caught_evaders += 1;
            }
        }
    }
    return outcome;
}

}  // namespace taxsim
