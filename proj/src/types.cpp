#include "taxsim/types.hpp"

#include <cstdio>
#include <sstream>

namespace taxsim {

const char* category_name(Category c) {
    switch (c) {
        case Category::Taxpayer: return "taxpayer";
        case Category::Evader: return "evader";
        case Category::Mixed: return "mixed";
    }
    return "?";
}

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::string num(int v) { return std::to_string(v); }

}  // namespace

std::vector<ParamViolation> validate_params(const Params& p, bool relax_game_inequalities) {
    std::vector<ParamViolation> out;
    auto bad = [&](const std::string& name, const std::string& value, const std::string& constraint) {
        out.push_back({name, value, constraint});
    };

    if (p.n_players <= 0) bad("n_players", num(p.n_players), "n_players > 0");
    if (p.tax_d <= 0) bad("tax_d", num(p.tax_d), "tax_d > 0");
    if (p.penalty_h <= 0) bad("penalty_h", num(p.penalty_h), "penalty_h > 0");
    if (!relax_game_inequalities && p.penalty_h <= p.tax_d)
        bad("penalty_h", num(p.penalty_h), "h > d");
    if (p.gain_g <= 0) bad("gain_g", num(p.gain_g), "gain_g > 0");
    if (!relax_game_inequalities && p.gain_g >= p.tax_d)
        bad("gain_g", num(p.gain_g), "g < d");
    if (p.audit_p < 0.0 || p.audit_p > 1.0) bad("audit_p", num(p.audit_p), "0 <= p <= 1");
    if (p.imitation_factor < 0.0) bad("imitation_factor", num(p.imitation_factor), "IF >= 0");
    if (p.capital_factor < 0.0) bad("capital_factor", num(p.capital_factor), "CF >= 0");
    if (!(p.delta_b > 0.0 && p.delta_b < 1.0)) bad("delta_b", num(p.delta_b), "0 < delta_b < 1");
    if (p.rewire_r < 0.0 || p.rewire_r > 1.0) bad("rewire_r", num(p.rewire_r), "0 <= r <= 1");
    if (p.turns <= 0) bad("turns", num(p.turns), "turns > 0");
    return out;
}

namespace {

std::string describe(const std::vector<ParamViolation>& violations) {
    std::ostringstream os;
    os << "invalid parameters:";
    for (const auto& v : violations) {
        os << " [" << v.name << "=" << v.value << " violates " << v.constraint << "]";
    }
    return os.str();
}

}  // namespace

InvalidParamError::InvalidParamError(std::vector<ParamViolation> violations)
    : std::runtime_error(describe(violations)), violations_(std::move(violations)) {}

Params validated(const Params& params) {
    auto violations = validate_params(params);
    if (!violations.empty()) {
        throw InvalidParamError(std::move(violations));
    }
    return params;
}

PopulationStats measure_population(const std::vector<PlayerState>& players) {
    PopulationStats stats;
    const auto n = players.size();
    if (n == 0) return stats;

    int counts[3] = {0, 0, 0};
    double sums[3] = {0.0, 0.0, 0.0};
    double total = 0.0;
    for (const auto& p : players) {
        const int k = static_cast<int>(p.category);
        counts[k] += 1;
        sums[k] += p.capital;
        total += p.capital;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    stats.fraction_taxpayers = counts[0] * inv_n;
    stats.fraction_evaders = counts[1] * inv_n;
    stats.fraction_mixed = counts[2] * inv_n;
    stats.avg_capital_all = total * inv_n;
    if (counts[0] > 0) stats.avg_capital_taxpayers = sums[0] / counts[0];
    if (counts[1] > 0) stats.avg_capital_evaders = sums[1] / counts[1];
    if (counts[2] > 0) stats.avg_capital_mixed = sums[2] / counts[2];
    return stats;
}

void RunResult::append(const PopulationStats& s) {
    fraction_taxpayers.push_back(s.fraction_taxpayers);
    fraction_evaders.push_back(s.fraction_evaders);
    fraction_mixed.push_back(s.fraction_mixed);
    avg_capital_all.push_back(s.avg_capital_all);
    avg_capital_taxpayers.push_back(s.avg_capital_taxpayers);
    avg_capital_evaders.push_back(s.avg_capital_evaders);
    avg_capital_mixed.push_back(s.avg_capital_mixed);
}

}  // namespace taxsim
