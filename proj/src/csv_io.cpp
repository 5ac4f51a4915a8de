#include "taxsim/csv_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace taxsim {

std::string format_number(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", value);
    return buf;
}

void write_text_atomic(const std::string& path, const std::string& body) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        }
        out << body;
        out.flush();
        if (!out) {
            throw std::runtime_error("write failed for '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("rename to '" + target.string() + "' failed: " + ec.message());
    }
}

namespace {

void echo_params(std::ostringstream& os, const Params& p) {
    os << "# format_version = 1\n";
    os << "# n_players = " << p.n_players << "\n";
    os << "# tax_d = " << p.tax_d << "\n";
    os << "# penalty_h = " << p.penalty_h << "\n";
    os << "# audit_p = " << format_number(p.audit_p) << "\n";
    os << "# gain_g = " << p.gain_g << "\n";
    os << "# imitation_factor = " << format_number(p.imitation_factor) << "\n";
    os << "# capital_factor = " << format_number(p.capital_factor) << "\n";
    os << "# delta_b = " << format_number(p.delta_b) << "\n";
    os << "# rewire_r = " << format_number(p.rewire_r) << "\n";
    os << "# turns = " << p.turns << "\n";
    os << "# seed = " << p.seed << "\n";
}

void put_stat(std::ostringstream& os, const SummaryStat& s) {
    if (s.n > 0) {
        os << ',' << format_number(s.mean) << ',' << format_number(s.sd);
    } else {
        os << ",,";
    }
}

void put_optional(std::ostringstream& os, const std::optional<double>& v) {
    os << ',';
    if (v) os << format_number(*v);
}

}  // namespace

std::string fraction_sweep_csv(const FractionSweepResult& result, const Params& params) {
    std::ostringstream os;
    echo_params(os, params);
    os << "# rescaled = " << (result.rescaled ? "true" : "false") << "\n";
    os << "f,mean_C_all,sd_C_all,mean_C_taxpayers,sd_C_taxpayers,"
          "mean_C_evaders,sd_C_evaders,n_replicas\n";
    for (const auto& point : result.curve.points) {
        os << format_number(point.value);
        put_stat(os, point.c_all);
        put_stat(os, point.c_taxpayers);
        put_stat(os, point.c_evaders);
        os << ',' << point.replicas << '\n';
    }
    auto footer = [&](const char* name, const std::optional<Crossing>& c) {
        if (c) {
            os << "#threshold " << name << ' ' << format_number(c->value) << ' '
               << format_number(c->half_width) << '\n';
        }
    };
    footer("f_th", result.thresholds.f_th);
    footer("a", result.thresholds.a);
    footer("b", result.thresholds.b);
    footer("c", result.thresholds.c);
    return os.str();
}

std::string param_sweep_csv(const SweepCurve& curve, const Params& params) {
    std::ostringstream os;
    echo_params(os, params);
    os << curve.swept_variable
       << ",mean_frac_taxpayers,sd_frac_taxpayers,mean_frac_evaders,sd_frac_evaders,"
          "mean_frac_mixed,sd_frac_mixed,mean_C_all,sd_C_all,mean_C_taxpayers,sd_C_taxpayers,"
          "mean_C_evaders,sd_C_evaders,mean_C_mixed,sd_C_mixed,n_replicas\n";
    for (const auto& point : curve.points) {
        if (point.skipped) {
            os << "#skipped " << format_number(point.value) << ' ' << point.skip_reason << '\n';
            continue;
        }
        os << format_number(point.value);
        put_stat(os, point.frac_taxpayers);
        put_stat(os, point.frac_evaders);
        put_stat(os, point.frac_mixed);
        put_stat(os, point.c_all);
        put_stat(os, point.c_taxpayers);
        put_stat(os, point.c_evaders);
        put_stat(os, point.c_mixed);
        os << ',' << point.replicas << '\n';
    }
    return os.str();
}

std::string run_result_csv(const RunResult& run) {
    std::ostringstream os;
    echo_params(os, run.params);
    os << "# stream_id = " << run.stream_id << "\n";
    os << "turn,fraction_taxpayers,fraction_evaders,fraction_mixed,"
          "avg_capital_all,avg_capital_taxpayers,avg_capital_evaders,avg_capital_mixed\n";
    for (std::size_t t = 0; t < run.turn_count(); ++t) {
        os << t << ',' << format_number(run.fraction_taxpayers[t]) << ','
           << format_number(run.fraction_evaders[t]) << ','
           << format_number(run.fraction_mixed[t]) << ','
           << format_number(run.avg_capital_all[t]);
        put_optional(os, run.avg_capital_taxpayers[t]);
        put_optional(os, run.avg_capital_evaders[t]);
        put_optional(os, run.avg_capital_mixed[t]);
        os << '\n';
    }
    return os.str();
}

std::string critical_fraction_csv(const CriticalFractionResult& result, const Params& params) {
    std::ostringstream os;
    echo_params(os, params);
    os << "initial_fraction,n_replicas,n_taxpayer_dominant,n_capital_positive,n_better\n";
    for (const auto& point : result.scan) {
        os << format_number(point.f) << ',' << point.replicas << ','
           << point.taxpayer_dominant << ',' << point.capital_positive << ','
           << point.better << '\n';
    }
    os << "#critical " << format_number(result.value) << ' '
       << format_number(result.half_width) << '\n';
    os << "#believeness_init " << believeness_init_name(result.init_mode) << '\n';
    return os.str();
}

std::string meta_text(const ExperimentConfig& config, const std::string& subcommand) {
    std::ostringstream os;
    os << "format_version = 1\n";
    os << "subcommand = " << subcommand << "\n";
    os << "config_hash = " << config_hash(config) << "\n";
    os << "master_seed = " << config.params.seed << "\n";
    os << "\n# full configuration echo\n";
    os << serialize_config(config);
    return os.str();
}

}  // namespace taxsim
