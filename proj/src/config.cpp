#include "taxsim/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace taxsim {

const char* experiment_kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::FractionSweep: return "fraction-sweep";
        case ExperimentKind::AdaptiveRun: return "adaptive-run";
        case ExperimentKind::CriticalFraction: return "critical-fraction";
        case ExperimentKind::ParamSweep: return "param-sweep";
    }
    return "?";
}

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

int parse_int(const std::string& value, const std::string& key) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key, "expected an integer, got '" + value + "'");
    }
}

std::uint64_t parse_u64(const std::string& value, const std::string& key) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
        throw ConfigError(key, "expected an unsigned integer, got '" + value + "'");
    }
}

double parse_double(const std::string& value, const std::string& key) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key, "expected a number, got '" + value + "'");
    }
}

bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw ConfigError(key, "expected true or false, got '" + value + "'");
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const char* topology_name(SocialGraph::Topology t) {
    return t == SocialGraph::Topology::SmallWorld ? "small-world" : "fully-connected";
}

SocialGraph::Topology parse_topology(const std::string& value, const std::string& key) {
    if (value == "small-world") return SocialGraph::Topology::SmallWorld;
    if (value == "fully-connected") return SocialGraph::Topology::FullyConnected;
    throw ConfigError(key, "expected small-world or fully-connected, got '" + value + "'");
}

}  // namespace

BelievenessInit parse_believeness_init(const std::string& value, const std::string& key) {
    if (value == "uniform-half-one") return BelievenessInit::UniformHalfOne;
    if (value == "uniform-zero-one") return BelievenessInit::UniformZeroOne;
    if (value == "all-one") return BelievenessInit::AllOne;
    throw ConfigError(key, "expected uniform-half-one, uniform-zero-one or all-one, got '" +
                               value + "'");
}

UpdateOrder parse_update_order(const std::string& value, const std::string& key) {
    if (value == "imitation-first") return UpdateOrder::ImitationFirst;
    if (value == "capital-first") return UpdateOrder::CapitalFirst;
    throw ConfigError(key, "expected imitation-first or capital-first, got '" + value + "'");
}

SweepAxis parse_sweep_axis(const std::string& value, const std::string& key) {
    if (value == "tax_d") return SweepAxis::TaxD;
    if (value == "penalty_h") return SweepAxis::PenaltyH;
    if (value == "audit_p") return SweepAxis::AuditP;
    throw ConfigError(key, "expected tax_d, penalty_h or audit_p, got '" + value + "'");
}

ExperimentKind parse_experiment_kind(const std::string& value, const std::string& key) {
    if (value == "fraction-sweep") return ExperimentKind::FractionSweep;
    if (value == "adaptive-run") return ExperimentKind::AdaptiveRun;
    if (value == "critical-fraction") return ExperimentKind::CriticalFraction;
    if (value == "param-sweep") return ExperimentKind::ParamSweep;
    throw ConfigError(key, "unknown experiment '" + value + "'");
}

std::vector<double> ExperimentConfig::sweep_grid() const {
    if (sweep_grid_step <= 0.0) {
        return default_axis_grid(sweep_axis);
    }
    std::vector<double> grid;
    const auto n = static_cast<std::size_t>(
        std::floor((sweep_grid_max - sweep_grid_min) / sweep_grid_step + 1e-9)) + 1;
    for (std::size_t i = 0; i < n; ++i) {
        grid.push_back(sweep_grid_min + static_cast<double>(i) * sweep_grid_step);
    }
    return grid;
}

CriticalSearchOptions ExperimentConfig::critical_options() const {
    CriticalSearchOptions options;
    options.grid_min = critical_grid_min;
    options.grid_max = critical_grid_max;
    options.grid_step = critical_grid_step;
    options.refine_to = critical_refine_to;
    options.replicas = critical_replicas;
    options.init_mode = critical_init;
    options.update_order = update_order;
    options.jobs = jobs;
    return options;
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;  // "" = top level
    int line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;

        if (stripped.front() == '[') {
            if (stripped.back() != ']') {
                throw ConfigError(stripped, "malformed section header on line " + std::to_string(line_no));
            }
            section = trim(stripped.substr(1, stripped.size() - 2));
            if (section != "model" && section != "fraction-sweep" && section != "adaptive-run" &&
                section != "critical-fraction" && section != "param-sweep") {
                throw ConfigError(section, "unknown section");
            }
            continue;
        }

        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(stripped, "expected 'key = value' on line " + std::to_string(line_no));
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        const std::string qualified = section.empty() ? key : section + "." + key;

        if (section.empty()) {
            if (key == "experiment") {
                cfg.kind = parse_experiment_kind(value, qualified);
                cfg.kind_set = true;
            } else if (key == "seed") {
                cfg.params.seed = parse_u64(value, qualified);
                cfg.seed_set = true;
            } else if (key == "output_dir") {
                cfg.output_dir = value;
            } else if (key == "jobs") {
                cfg.jobs = parse_int(value, qualified);
            } else {
                throw ConfigError(qualified, "unknown key");
            }
        } else if (section == "model") {
            if (key == "n_players") cfg.params.n_players = parse_int(value, qualified);
            else if (key == "tax_d") cfg.params.tax_d = parse_int(value, qualified);
            else if (key == "penalty_h") cfg.params.penalty_h = parse_int(value, qualified);
            else if (key == "audit_p") cfg.params.audit_p = parse_double(value, qualified);
            else if (key == "gain_g") cfg.params.gain_g = parse_int(value, qualified);
            else if (key == "imitation_factor") cfg.params.imitation_factor = parse_double(value, qualified);
            else if (key == "capital_factor") cfg.params.capital_factor = parse_double(value, qualified);
            else if (key == "delta_b") cfg.params.delta_b = parse_double(value, qualified);
            else if (key == "rewire_r") cfg.params.rewire_r = parse_double(value, qualified);
            else if (key == "turns") cfg.params.turns = parse_int(value, qualified);
            else if (key == "update_order") cfg.update_order = parse_update_order(value, qualified);
            else throw ConfigError(qualified, "unknown key");
        } else if (section == "fraction-sweep") {
            if (key == "replicas") cfg.fraction_replicas = parse_int(value, qualified);
            else if (key == "rescale") cfg.fraction_rescale = parse_bool(value, qualified);
            else throw ConfigError(qualified, "unknown key");
        } else if (section == "adaptive-run") {
            if (key == "initial_taxpayers") cfg.run_fractions.taxpayers = parse_double(value, qualified);
            else if (key == "initial_evaders") cfg.run_fractions.evaders = parse_double(value, qualified);
            else if (key == "initial_mixed") cfg.run_fractions.mixed = parse_double(value, qualified);
            else if (key == "topology") cfg.run_topology = parse_topology(value, qualified);
            else if (key == "believeness_init") cfg.run_init = parse_believeness_init(value, qualified);
            else if (key == "dump_graph") cfg.run_dump_graph = parse_bool(value, qualified);
            else throw ConfigError(qualified, "unknown key");
        } else if (section == "critical-fraction") {
            if (key == "grid_min") cfg.critical_grid_min = parse_double(value, qualified);
            else if (key == "grid_max") cfg.critical_grid_max = parse_double(value, qualified);
            else if (key == "grid_step") cfg.critical_grid_step = parse_double(value, qualified);
            else if (key == "refine_to") cfg.critical_refine_to = parse_double(value, qualified);
            else if (key == "replicas") cfg.critical_replicas = parse_int(value, qualified);
            else if (key == "believeness_init") cfg.critical_init = parse_believeness_init(value, qualified);
            else throw ConfigError(qualified, "unknown key");
        } else {  // param-sweep
            if (key == "axis") cfg.sweep_axis = parse_sweep_axis(value, qualified);
            else if (key == "grid_min") cfg.sweep_grid_min = parse_double(value, qualified);
            else if (key == "grid_max") cfg.sweep_grid_max = parse_double(value, qualified);
            else if (key == "grid_step") cfg.sweep_grid_step = parse_double(value, qualified);
            else if (key == "initial_taxpayers") cfg.sweep_fractions.taxpayers = parse_double(value, qualified);
            else if (key == "initial_evaders") cfg.sweep_fractions.evaders = parse_double(value, qualified);
            else if (key == "initial_mixed") cfg.sweep_fractions.mixed = parse_double(value, qualified);
            else if (key == "replicas") cfg.sweep_replicas = parse_int(value, qualified);
            else if (key == "believeness_init") cfg.sweep_init = parse_believeness_init(value, qualified);
            else throw ConfigError(qualified, "unknown key");
        }
    }
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config", "cannot open '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "# taxsim configuration, format_version 1\n";
    if (c.kind_set) os << "experiment = " << experiment_kind_name(c.kind) << "\n";
    if (c.seed_set) os << "seed = " << c.params.seed << "\n";
    os << "output_dir = " << c.output_dir << "\n";
    os << "jobs = " << c.jobs << "\n";
    os << "\n[model]\n";
    os << "n_players = " << c.params.n_players << "\n";
    os << "tax_d = " << c.params.tax_d << "\n";
    os << "penalty_h = " << c.params.penalty_h << "\n";
    os << "audit_p = " << fmt_double(c.params.audit_p) << "\n";
    os << "gain_g = " << c.params.gain_g << "\n";
    os << "imitation_factor = " << fmt_double(c.params.imitation_factor) << "\n";
    os << "capital_factor = " << fmt_double(c.params.capital_factor) << "\n";
    os << "delta_b = " << fmt_double(c.params.delta_b) << "\n";
    os << "rewire_r = " << fmt_double(c.params.rewire_r) << "\n";
    os << "turns = " << c.params.turns << "\n";
    os << "update_order = " << update_order_name(c.update_order) << "\n";
    os << "\n[fraction-sweep]\n";
    os << "replicas = " << c.fraction_replicas << "\n";
    os << "rescale = " << (c.fraction_rescale ? "true" : "false") << "\n";
    os << "\n[adaptive-run]\n";
    os << "initial_taxpayers = " << fmt_double(c.run_fractions.taxpayers) << "\n";
    os << "initial_evaders = " << fmt_double(c.run_fractions.evaders) << "\n";
    os << "initial_mixed = " << fmt_double(c.run_fractions.mixed) << "\n";
    os << "topology = " << topology_name(c.run_topology) << "\n";
    os << "believeness_init = " << believeness_init_name(c.run_init) << "\n";
    os << "dump_graph = " << (c.run_dump_graph ? "true" : "false") << "\n";
    os << "\n[critical-fraction]\n";
    os << "grid_min = " << fmt_double(c.critical_grid_min) << "\n";
    os << "grid_max = " << fmt_double(c.critical_grid_max) << "\n";
    os << "grid_step = " << fmt_double(c.critical_grid_step) << "\n";
    os << "refine_to = " << fmt_double(c.critical_refine_to) << "\n";
    os << "replicas = " << c.critical_replicas << "\n";
    os << "believeness_init = " << believeness_init_name(c.critical_init) << "\n";
    os << "\n[param-sweep]\n";
    os << "axis = " << sweep_axis_name(c.sweep_axis) << "\n";
    os << "grid_min = " << fmt_double(c.sweep_grid_min) << "\n";
    os << "grid_max = " << fmt_double(c.sweep_grid_max) << "\n";
    os << "grid_step = " << fmt_double(c.sweep_grid_step) << "\n";
    os << "initial_taxpayers = " << fmt_double(c.sweep_fractions.taxpayers) << "\n";
    os << "initial_evaders = " << fmt_double(c.sweep_fractions.evaders) << "\n";
    os << "initial_mixed = " << fmt_double(c.sweep_fractions.mixed) << "\n";
    os << "replicas = " << c.sweep_replicas << "\n";
    os << "believeness_init = " << believeness_init_name(c.sweep_init) << "\n";
    return os.str();
}

std::string config_hash(const ExperimentConfig& config) {
    const std::string text = serialize_config(config);
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

}  // namespace taxsim
