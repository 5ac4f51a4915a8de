#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace taxsim {

enum class Category { Taxpayer, Evader, Mixed };

const char* category_name(Category c);

/**
 * All model constants. Defaults are the null settings of the base game
 * (p=0.4, d=2, h=3, g=1) plus the adaptive-dynamics constants
 * (delta_b=0.01, rewire_r=0.02, IF=CF=1).
 *
 * Population size and turn count are artifact choices: n_players=1000 keeps
 * statistical noise below ~1% on 1%-step sweeps at desk-scale runtime.
 */
struct Params {
    int n_players = 1000;
    int tax_d = 2;             // units donated per Game A play
    int penalty_h = 3;         // units destroyed on a lost audit
    double audit_p = 0.4;      // audit probability per Game B play
    int gain_g = 1;            // external gain per player per turn
    double imitation_factor = 1.0;   // IF
    double capital_factor = 1.0;     // CF
    double delta_b = 0.01;     // believeness step
    double rewire_r = 0.02;    // small-world rewiring probability
    int turns = 100;
    std::uint64_t seed = 0;

    bool operator==(const Params&) const = default;
};

struct ParamViolation {
    std::string name;
    std::string value;
    std::string constraint;
};

// Returns every violated invariant; empty means the bundle is valid.
// `relax_game_inequalities` drops the h>d and g<d constraints, which the
// per-point parameter sweeps deliberately cross (d is swept past h and down
// to g); base-model validation keeps them strict.
std::vector<ParamViolation> validate_params(const Params& params,
                                            bool relax_game_inequalities = false);

class InvalidParamError : public std::runtime_error {
public:
    explicit InvalidParamError(std::vector<ParamViolation> violations);
    const std::vector<ParamViolation>& violations() const { return violations_; }

private:
    std::vector<ParamViolation> violations_;
};

// Throws InvalidParamError listing every violation; returns params unchanged.
Params validated(const Params& params);

class PopulationTooSmallError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IndexOutOfRangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

class NoFlipFoundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MixedNotClassifiableError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PlayerState {
    Category category = Category::Mixed;
    double capital = 0.0;        // starts at 0; may go negative without bound
    double believeness = 1.0;    // kept in [0,1] by every update
};

// One row of per-turn statistics. Category averages are absent when the
// category is empty that turn, never reported as 0.
struct PopulationStats {
    double fraction_taxpayers = 0.0;
    double fraction_evaders = 0.0;
    double fraction_mixed = 0.0;
    double avg_capital_all = 0.0;
    std::optional<double> avg_capital_taxpayers;
    std::optional<double> avg_capital_evaders;
    std::optional<double> avg_capital_mixed;
};

PopulationStats measure_population(const std::vector<PlayerState>& players);

/**
 * Full per-turn time series of one run. Arrays have turns+1 entries,
 * index 0 being the initial state. Fractions sum to 1 each turn.
 */
struct RunResult {
    Params params;               // snapshot, includes the master seed
    std::uint64_t stream_id = 0; // rng stream this run consumed
    std::vector<double> fraction_taxpayers;
    std::vector<double> fraction_evaders;
    std::vector<double> fraction_mixed;
    std::vector<double> avg_capital_all;
    std::vector<std::optional<double>> avg_capital_taxpayers;
    std::vector<std::optional<double>> avg_capital_evaders;
    std::vector<std::optional<double>> avg_capital_mixed;

    std::size_t turn_count() const { return fraction_taxpayers.size(); }
    void append(const PopulationStats& stats);
};

}  // namespace taxsim
