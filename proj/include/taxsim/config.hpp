#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "taxsim/experiment.hpp"
#include "taxsim/simulation.hpp"
#include "taxsim/social_network.hpp"
#include "taxsim/types.hpp"

namespace taxsim {

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message)
        : std::runtime_error("config error: key '" + key + "': " + message),
          key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

enum class ExperimentKind { FractionSweep, AdaptiveRun, CriticalFraction, ParamSweep };

const char* experiment_kind_name(ExperimentKind kind);

/**
 * Everything one invocation needs, read from a flat `key = value` file with
 * one [section] per experiment. Unknown keys and unknown sections are
 * errors. The struct round-trips losslessly through serialize()/parse().
 */
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::FractionSweep;
    bool kind_set = false;
    Params params;
    bool seed_set = false;
    std::string output_dir = "out";
    int jobs = 1;
    UpdateOrder update_order = UpdateOrder::ImitationFirst;

    // [fraction-sweep]
    int fraction_replicas = 20;
    bool fraction_rescale = false;

    // [adaptive-run]
    InitialFractions run_fractions{0.6, 0.4, 0.0};
    SocialGraph::Topology run_topology = SocialGraph::Topology::SmallWorld;
    BelievenessInit run_init = BelievenessInit::UniformHalfOne;
    bool run_dump_graph = false;

    // [critical-fraction]
    double critical_grid_min = 0.40;
    double critical_grid_max = 0.70;
    double critical_grid_step = 0.01;
    double critical_refine_to = 0.005;
    int critical_replicas = 20;
    BelievenessInit critical_init = BelievenessInit::UniformHalfOne;

    // [param-sweep]
    SweepAxis sweep_axis = SweepAxis::PenaltyH;
    double sweep_grid_min = 0.0;  // 0/0/0 means: use the axis default grid
    double sweep_grid_max = 0.0;
    double sweep_grid_step = 0.0;
    InitialFractions sweep_fractions{0.6, 0.4, 0.0};
    int sweep_replicas = 20;
    BelievenessInit sweep_init = BelievenessInit::UniformHalfOne;

    bool operator==(const ExperimentConfig&) const = default;

    std::vector<double> sweep_grid() const;
    CriticalSearchOptions critical_options() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);
std::string serialize_config(const ExperimentConfig& config);

// FNV-1a over the canonical serialization, as a 16-digit hex string.
std::string config_hash(const ExperimentConfig& config);

BelievenessInit parse_believeness_init(const std::string& value, const std::string& key);
UpdateOrder parse_update_order(const std::string& value, const std::string& key);
SweepAxis parse_sweep_axis(const std::string& value, const std::string& key);
ExperimentKind parse_experiment_kind(const std::string& value, const std::string& key);

}  // namespace taxsim
