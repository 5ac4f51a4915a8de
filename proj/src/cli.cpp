#include "taxsim/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "taxsim/config.hpp"
#include "taxsim/csv_io.hpp"
#include "taxsim/experiment.hpp"
#include "taxsim/simulation.hpp"

namespace taxsim {

namespace {

namespace fs = std::filesystem;

std::uint64_t parse_u64_or_throw(const std::string& value) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
        throw ConfigError("TAXSIM_SEED", "expected an unsigned integer, got '" + value + "'");
    }
}

struct CommonFlags {
    std::string config_path;
    std::uint64_t seed = 0;
    std::string output_dir;
    int jobs = 0;
    // model overrides
    int n_players = 0, tax_d = 0, penalty_h = 0, gain_g = 0, turns = 0;
    double audit_p = 0, imitation_factor = 0, capital_factor = 0, delta_b = 0, rewire_r = 0;

    CLI::Option* config_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* output_opt = nullptr;
    CLI::Option* jobs_opt = nullptr;
    CLI::Option* n_players_opt = nullptr;
    CLI::Option* tax_d_opt = nullptr;
    CLI::Option* penalty_h_opt = nullptr;
    CLI::Option* gain_g_opt = nullptr;
    CLI::Option* turns_opt = nullptr;
    CLI::Option* audit_p_opt = nullptr;
    CLI::Option* imitation_opt = nullptr;
    CLI::Option* capital_opt = nullptr;
    CLI::Option* delta_b_opt = nullptr;
    CLI::Option* rewire_r_opt = nullptr;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    f.config_opt = cmd->add_option("--config", f.config_path, "Configuration file");
    f.seed_opt = cmd->add_option("--seed", f.seed, "Master seed (overrides config and TAXSIM_SEED)");
    f.output_opt = cmd->add_option("--output-dir", f.output_dir, "Output directory");
    f.jobs_opt = cmd->add_option("--jobs", f.jobs, "Worker threads for replicas/grid points");
    f.n_players_opt = cmd->add_option("--n-players", f.n_players, "Population size");
    f.tax_d_opt = cmd->add_option("--tax-d", f.tax_d, "Tax payment d");
    f.penalty_h_opt = cmd->add_option("--penalty-h", f.penalty_h, "Evasion penalty h");
    f.gain_g_opt = cmd->add_option("--gain-g", f.gain_g, "External gain g");
    f.turns_opt = cmd->add_option("--turns", f.turns, "Turns per run");
    f.audit_p_opt = cmd->add_option("--audit-p", f.audit_p, "Audit probability p");
    f.imitation_opt = cmd->add_option("--imitation-factor", f.imitation_factor, "Imitation factor IF");
    f.capital_opt = cmd->add_option("--capital-factor", f.capital_factor, "Capital factor CF");
    f.delta_b_opt = cmd->add_option("--delta-b", f.delta_b, "Believeness step");
    f.rewire_r_opt = cmd->add_option("--rewire-r", f.rewire_r, "Rewiring probability r");
}

// flag > TAXSIM_SEED > config file
void resolve_seed(ExperimentConfig& cfg, const CommonFlags& f) {
    if (f.seed_opt->count() > 0) {
        cfg.params.seed = f.seed;
        cfg.seed_set = true;
        return;
    }
    if (cfg.seed_set) {
        if (const char* env = std::getenv("TAXSIM_SEED")) {
            cfg.params.seed = parse_u64_or_throw(env);
            return;
        }
        return;
    }
    if (const char* env = std::getenv("TAXSIM_SEED")) {
        cfg.params.seed = parse_u64_or_throw(env);
        cfg.seed_set = true;
        return;
    }
    throw ConfigError("seed", "required (pass --seed, set TAXSIM_SEED or add it to the config)");
}

ExperimentConfig resolve_config(const CommonFlags& f, ExperimentKind kind) {
    ExperimentConfig cfg;
    if (f.config_opt->count() > 0) {
        cfg = load_config_file(f.config_path);
    }
    if (cfg.kind_set && cfg.kind != kind) {
        throw ConfigError("experiment",
                          std::string("config declares '") + experiment_kind_name(cfg.kind) +
                              "' but the subcommand runs '" + experiment_kind_name(kind) + "'");
    }
    cfg.kind = kind;
    cfg.kind_set = true;

    if (f.output_opt->count() > 0) cfg.output_dir = f.output_dir;
    if (f.jobs_opt->count() > 0) cfg.jobs = f.jobs;
    if (f.n_players_opt->count() > 0) cfg.params.n_players = f.n_players;
    if (f.tax_d_opt->count() > 0) cfg.params.tax_d = f.tax_d;
    if (f.penalty_h_opt->count() > 0) cfg.params.penalty_h = f.penalty_h;
    if (f.gain_g_opt->count() > 0) cfg.params.gain_g = f.gain_g;
    if (f.turns_opt->count() > 0) cfg.params.turns = f.turns;
    if (f.audit_p_opt->count() > 0) cfg.params.audit_p = f.audit_p;
    if (f.imitation_opt->count() > 0) cfg.params.imitation_factor = f.imitation_factor;
    if (f.capital_opt->count() > 0) cfg.params.capital_factor = f.capital_factor;
    if (f.delta_b_opt->count() > 0) cfg.params.delta_b = f.delta_b;
    if (f.rewire_r_opt->count() > 0) cfg.params.rewire_r = f.rewire_r;

    resolve_seed(cfg, f);
    return cfg;
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
    return (fs::path(cfg.output_dir) / name).string();
}

void write_outputs(const ExperimentConfig& cfg, const std::string& subcommand,
                   const std::string& csv_name, const std::string& csv_body) {
    write_text_atomic(out_path(cfg, csv_name), csv_body);
    write_text_atomic(out_path(cfg, csv_name + ".meta"), meta_text(cfg, subcommand));
    std::cout << "wrote " << out_path(cfg, csv_name) << "\n";
}

int cmd_sweep_fraction(ExperimentConfig cfg) {
    validated(cfg.params);
    const auto result =
        sweep_fraction(cfg.params, cfg.fraction_rescale, cfg.fraction_replicas, cfg.jobs);
    write_outputs(cfg, "sweep-fraction", "fraction_sweep.csv",
                  fraction_sweep_csv(result, cfg.params));
    auto show = [](const char* name, const std::optional<Crossing>& c) {
        if (c) {
            std::cout << "  " << name << " = " << format_number(c->value) << " +/- "
                      << format_number(c->half_width) << "\n";
        }
    };
    std::cout << "thresholds:\n";
    show("f_th", result.thresholds.f_th);
    show("a", result.thresholds.a);
    show("b", result.thresholds.b);
    show("c", result.thresholds.c);
    return 0;
}

int cmd_run(ExperimentConfig cfg) {
    validated(cfg.params);
    RngStream rng(cfg.params.seed, 0);
    const SocialGraph graph =
        build_graph(cfg.params.n_players, cfg.run_topology, cfg.params.rewire_r, rng);
    const RunResult result =
        run_adaptive(cfg.params, cfg.run_fractions, graph, cfg.run_init, rng, cfg.update_order);
    write_outputs(cfg, "run", "adaptive_run.csv", run_result_csv(result));
    if (cfg.run_dump_graph) {
        write_text_atomic(out_path(cfg, "graph.edges"), graph_edge_list(graph));
        std::cout << "wrote " << out_path(cfg, "graph.edges") << "\n";
    }
    const std::size_t last = result.turn_count() - 1;
    std::cout << "final fractions: taxpayers " << format_number(result.fraction_taxpayers[last])
              << ", evaders " << format_number(result.fraction_evaders[last]) << ", mixed "
              << format_number(result.fraction_mixed[last]) << "\n";
    return 0;
}

int cmd_find_threshold(ExperimentConfig cfg) {
    validated(cfg.params);
    const auto result = find_critical_initial_fraction(cfg.params, cfg.critical_options());
    write_outputs(cfg, "find-threshold", "critical_fraction.csv",
                  critical_fraction_csv(result, cfg.params));
    std::cout << "critical initial taxpayer fraction = " << format_number(result.value)
              << " +/- " << format_number(result.half_width) << " (believeness_init "
              << believeness_init_name(result.init_mode) << ")\n";
    return 0;
}

int cmd_sweep_param(ExperimentConfig cfg) {
    validated(cfg.params);
    const auto grid = cfg.sweep_grid();
    const auto curve = sweep_parameter(cfg.params, cfg.sweep_axis, grid, cfg.sweep_fractions,
                                       cfg.sweep_replicas, cfg.sweep_init, cfg.jobs,
                                       cfg.update_order);
    const std::string name = std::string("param_sweep_") + sweep_axis_name(cfg.sweep_axis) + ".csv";
    write_outputs(cfg, "sweep-param", name, param_sweep_csv(curve, cfg.params));
    for (const auto& point : curve.points) {
        if (point.skipped) {
            std::cout << "skipped " << curve.swept_variable << " = " << format_number(point.value)
                      << ": " << point.skip_reason << "\n";
        }
    }
    return 0;
}

int cmd_validate_config(const std::string& path) {
    const ExperimentConfig cfg = load_config_file(path);
    const auto violations = validate_params(cfg.params);
    if (!violations.empty()) {
        for (const auto& v : violations) {
            std::cerr << "invalid " << v.name << " = " << v.value << " (wants " << v.constraint
                      << ")\n";
        }
        return 1;
    }
    std::cout << "config OK (" << config_hash(cfg) << ")\n";
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"taxsim: agent-based tax-compliance game simulator"};
    app.require_subcommand(1);

    CommonFlags sweep_fraction_flags, run_flags, threshold_flags, sweep_param_flags;

    auto* sweep_fraction_cmd = app.add_subcommand(
        "sweep-fraction", "Sweep the taxpayer fraction 0..100% in the base game");
    add_common_flags(sweep_fraction_cmd, sweep_fraction_flags);
    bool rescale_flag = false;
    int fraction_replicas = 0;
    auto* rescale_opt = sweep_fraction_cmd->add_flag(
        "--rescale", rescale_flag, "Shift curves so the all-evader community ends at 0");
    auto* fraction_replicas_opt =
        sweep_fraction_cmd->add_option("--replicas", fraction_replicas, "Replicas per grid point");

    auto* run_cmd = app.add_subcommand("run", "Single adaptive run with full time series");
    add_common_flags(run_cmd, run_flags);
    double run_tax = 0, run_evad = 0, run_mixed = 0;
    std::string run_topology, run_init;
    bool dump_graph = false;
    auto* run_tax_opt = run_cmd->add_option("--initial-taxpayers", run_tax, "Initial taxpayer fraction");
    auto* run_evad_opt = run_cmd->add_option("--initial-evaders", run_evad, "Initial evader fraction");
    auto* run_mixed_opt = run_cmd->add_option("--initial-mixed", run_mixed, "Initial mixed fraction");
    auto* run_topology_opt =
        run_cmd->add_option("--topology", run_topology, "small-world or fully-connected");
    auto* run_init_opt = run_cmd->add_option("--believeness-init", run_init,
                                             "uniform-half-one, uniform-zero-one or all-one");
    auto* dump_graph_opt =
        run_cmd->add_flag("--dump-graph", dump_graph, "Also write the edge list");

    auto* threshold_cmd = app.add_subcommand(
        "find-threshold", "Locate the critical initial taxpayer fraction");
    add_common_flags(threshold_cmd, threshold_flags);
    double grid_min = 0, grid_max = 0, grid_step = 0, refine_to = 0;
    int threshold_replicas = 0;
    std::string threshold_init;
    auto* grid_min_opt = threshold_cmd->add_option("--grid-min", grid_min, "Scan start");
    auto* grid_max_opt = threshold_cmd->add_option("--grid-max", grid_max, "Scan end");
    auto* grid_step_opt = threshold_cmd->add_option("--grid-step", grid_step, "Scan step");
    auto* refine_opt = threshold_cmd->add_option("--refine-to", refine_to, "Bisection bracket width");
    auto* threshold_replicas_opt =
        threshold_cmd->add_option("--replicas", threshold_replicas, "Replicas per point");
    auto* threshold_init_opt =
        threshold_cmd->add_option("--believeness-init", threshold_init, "Initial believeness mode");

    auto* sweep_param_cmd =
        app.add_subcommand("sweep-param", "Sweep tax, penalty or audit probability");
    add_common_flags(sweep_param_cmd, sweep_param_flags);
    std::string axis_name;
    double ps_grid_min = 0, ps_grid_max = 0, ps_grid_step = 0;
    double ps_tax = 0, ps_evad = 0, ps_mixed = 0;
    int ps_replicas = 0;
    std::string ps_init;
    auto* axis_opt =
        sweep_param_cmd->add_option("--axis", axis_name, "tax_d, penalty_h or audit_p");
    auto* ps_grid_min_opt = sweep_param_cmd->add_option("--grid-min", ps_grid_min, "Grid start");
    auto* ps_grid_max_opt = sweep_param_cmd->add_option("--grid-max", ps_grid_max, "Grid end");
    auto* ps_grid_step_opt = sweep_param_cmd->add_option("--grid-step", ps_grid_step, "Grid step");
    auto* ps_tax_opt =
        sweep_param_cmd->add_option("--initial-taxpayers", ps_tax, "Initial taxpayer fraction");
    auto* ps_evad_opt =
        sweep_param_cmd->add_option("--initial-evaders", ps_evad, "Initial evader fraction");
    auto* ps_mixed_opt =
        sweep_param_cmd->add_option("--initial-mixed", ps_mixed, "Initial mixed fraction");
    auto* ps_replicas_opt =
        sweep_param_cmd->add_option("--replicas", ps_replicas, "Replicas per grid point");
    auto* ps_init_opt =
        sweep_param_cmd->add_option("--believeness-init", ps_init, "Initial believeness mode");

    auto* validate_cmd = app.add_subcommand("validate-config", "Check a configuration file");
    std::string validate_path;
    validate_cmd->add_option("--config", validate_path, "Configuration file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (validate_cmd->parsed()) {
            return cmd_validate_config(validate_path);
        }
        if (sweep_fraction_cmd->parsed()) {
            ExperimentConfig cfg =
                resolve_config(sweep_fraction_flags, ExperimentKind::FractionSweep);
            if (rescale_opt->count() > 0) cfg.fraction_rescale = rescale_flag;
            if (fraction_replicas_opt->count() > 0) cfg.fraction_replicas = fraction_replicas;
            return cmd_sweep_fraction(std::move(cfg));
        }
        if (run_cmd->parsed()) {
            ExperimentConfig cfg = resolve_config(run_flags, ExperimentKind::AdaptiveRun);
            if (run_tax_opt->count() > 0) cfg.run_fractions.taxpayers = run_tax;
            if (run_evad_opt->count() > 0) cfg.run_fractions.evaders = run_evad;
            if (run_mixed_opt->count() > 0) cfg.run_fractions.mixed = run_mixed;
            if (run_topology_opt->count() > 0) {
                cfg.run_topology = run_topology == "small-world"
                                       ? SocialGraph::Topology::SmallWorld
                                       : (run_topology == "fully-connected"
                                              ? SocialGraph::Topology::FullyConnected
                                              : throw ConfigError("topology",
                                                                  "expected small-world or "
                                                                  "fully-connected, got '" +
                                                                      run_topology + "'"));
            }
            if (run_init_opt->count() > 0)
                cfg.run_init = parse_believeness_init(run_init, "believeness-init");
            if (dump_graph_opt->count() > 0) cfg.run_dump_graph = dump_graph;
            return cmd_run(std::move(cfg));
        }
        if (threshold_cmd->parsed()) {
            ExperimentConfig cfg = resolve_config(threshold_flags, ExperimentKind::CriticalFraction);
            if (grid_min_opt->count() > 0) cfg.critical_grid_min = grid_min;
            if (grid_max_opt->count() > 0) cfg.critical_grid_max = grid_max;
            if (grid_step_opt->count() > 0) cfg.critical_grid_step = grid_step;
            if (refine_opt->count() > 0) cfg.critical_refine_to = refine_to;
            if (threshold_replicas_opt->count() > 0) cfg.critical_replicas = threshold_replicas;
            if (threshold_init_opt->count() > 0)
                cfg.critical_init = parse_believeness_init(threshold_init, "believeness-init");
            return cmd_find_threshold(std::move(cfg));
        }
        ExperimentConfig cfg = resolve_config(sweep_param_flags, ExperimentKind::ParamSweep);
        if (axis_opt->count() > 0) cfg.sweep_axis = parse_sweep_axis(axis_name, "axis");
        if (ps_grid_min_opt->count() > 0) cfg.sweep_grid_min = ps_grid_min;
        if (ps_grid_max_opt->count() > 0) cfg.sweep_grid_max = ps_grid_max;
        if (ps_grid_step_opt->count() > 0) cfg.sweep_grid_step = ps_grid_step;
        if (ps_tax_opt->count() > 0) cfg.sweep_fractions.taxpayers = ps_tax;
        if (ps_evad_opt->count() > 0) cfg.sweep_fractions.evaders = ps_evad;
        if (ps_mixed_opt->count() > 0) cfg.sweep_fractions.mixed = ps_mixed;
        if (ps_replicas_opt->count() > 0) cfg.sweep_replicas = ps_replicas;
        if (ps_init_opt->count() > 0)
            cfg.sweep_init = parse_believeness_init(ps_init, "believeness-init");
        return cmd_sweep_param(std::move(cfg));
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const InvalidParamError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace taxsim
