#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <vector>

#include "taxsim/cli.hpp"
#include "taxsim/config.hpp"
#include "taxsim/csv_io.hpp"

using namespace taxsim;
namespace fs = std::filesystem;

namespace {

int cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"taxsim"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("taxsim_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string write_config(const fs::path& dir, const std::string& body,
                         const std::string& name = "test.cfg") {
    const fs::path path = dir / name;
    std::ofstream out(path);
    out << body;
    out.close();
    return path.string();
}

const std::string kTinyModel =
    "[model]\n"
    "n_players = 40\n"
    "turns = 15\n";

std::vector<std::string> data_lines(const std::string& csv) {
    std::vector<std::string> rows;
    std::istringstream in(csv);
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        rows.push_back(line);
    }
    return rows;
}

std::vector<std::string> split_fields(const std::string& row) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(row);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!row.empty() && row.back() == ',') fields.push_back("");
    return fields;
}

}  // namespace

TEST_CASE("config round-trips losslessly") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::ParamSweep;
    cfg.kind_set = true;
    cfg.params.seed = 987654321;
    cfg.seed_set = true;
    cfg.params.n_players = 512;
    cfg.params.audit_p = 0.375;
    cfg.output_dir = "results/run one";
    cfg.jobs = 3;
    cfg.fraction_rescale = true;
    cfg.run_fractions = {0.55, 0.35, 0.10};
    cfg.run_topology = SocialGraph::Topology::FullyConnected;
    cfg.run_init = BelievenessInit::AllOne;
    cfg.critical_grid_step = 0.02;
    cfg.sweep_axis = SweepAxis::AuditP;
    cfg.sweep_grid_min = 0.0;
    cfg.sweep_grid_max = 1.0;
    cfg.sweep_grid_step = 0.25;
    cfg.sweep_init = BelievenessInit::UniformZeroOne;

    const ExperimentConfig back = parse_config(serialize_config(cfg));
    CHECK(back == cfg);
}

TEST_CASE("property: randomized configs survive the round trip") {
    RngStream rng(2026, 0);
    for (int trial = 0; trial < 60; ++trial) {
        ExperimentConfig cfg;
        cfg.kind_set = rng.bernoulli(0.8);
        if (cfg.kind_set) cfg.kind = static_cast<ExperimentKind>(rng.uniform_below(4));
        cfg.seed_set = rng.bernoulli(0.8);
        if (cfg.seed_set) cfg.params.seed = rng.next_u64();
        cfg.params.n_players = 2 + static_cast<int>(rng.uniform_below(5000));
        cfg.params.tax_d = 1 + static_cast<int>(rng.uniform_below(9));
        cfg.params.penalty_h = 1 + static_cast<int>(rng.uniform_below(12));
        cfg.params.audit_p = rng.uniform01();
        cfg.params.imitation_factor = rng.uniform(0.0, 8.0);
        cfg.params.capital_factor = rng.uniform(0.0, 8.0);
        cfg.params.delta_b = rng.uniform(0.001, 0.2);
        cfg.params.rewire_r = rng.uniform01();
        cfg.params.turns = 1 + static_cast<int>(rng.uniform_below(4000));
        cfg.jobs = 1 + static_cast<int>(rng.uniform_below(16));
        cfg.update_order = rng.bernoulli(0.5) ? UpdateOrder::ImitationFirst
                                              : UpdateOrder::CapitalFirst;
        cfg.fraction_replicas = 1 + static_cast<int>(rng.uniform_below(40));
        cfg.fraction_rescale = rng.bernoulli(0.5);
        cfg.run_fractions = {rng.uniform01(), rng.uniform01(), rng.uniform01()};
        cfg.run_topology = rng.bernoulli(0.5) ? SocialGraph::Topology::SmallWorld
                                              : SocialGraph::Topology::FullyConnected;
        cfg.run_init = static_cast<BelievenessInit>(rng.uniform_below(3));
        cfg.run_dump_graph = rng.bernoulli(0.5);
        cfg.critical_grid_min = rng.uniform(0.0, 0.5);
        cfg.critical_grid_max = rng.uniform(0.5, 1.0);
        cfg.critical_grid_step = rng.uniform(0.001, 0.1);
        cfg.critical_refine_to = rng.uniform(0.001, 0.05);
        cfg.critical_replicas = 1 + static_cast<int>(rng.uniform_below(30));
        cfg.critical_init = static_cast<BelievenessInit>(rng.uniform_below(3));
        cfg.sweep_axis = static_cast<SweepAxis>(rng.uniform_below(3));
        cfg.sweep_grid_min = rng.uniform(0.0, 5.0);
        cfg.sweep_grid_max = rng.uniform(5.0, 10.0);
        cfg.sweep_grid_step = rng.uniform(0.1, 2.0);
        cfg.sweep_fractions = {rng.uniform01(), rng.uniform01(), rng.uniform01()};
        cfg.sweep_replicas = 1 + static_cast<int>(rng.uniform_below(30));
        cfg.sweep_init = static_cast<BelievenessInit>(rng.uniform_below(3));

        CAPTURE(trial);
        CHECK(parse_config(serialize_config(cfg)) == cfg);
    }
}

TEST_CASE("unknown keys and sections are named errors") {
    CHECK_THROWS_WITH_AS(parse_config("sead = 4\n"), "config error: key 'sead': unknown key",
                         ConfigError);
    try {
        parse_config("[model]\nn_playerz = 10\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "model.n_playerz");
    }
    CHECK_THROWS_AS(parse_config("[nonsense]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[model]\nn_players = ten\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[fraction-sweep]\nrescale = yes\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("seed 42\n"), ConfigError);
}

TEST_CASE("config hash tracks content") {
    ExperimentConfig a;
    ExperimentConfig b;
    CHECK(config_hash(a) == config_hash(b));
    b.params.audit_p = 0.41;
    CHECK(config_hash(a) != config_hash(b));
    CHECK(config_hash(a).size() == 16);
}

TEST_CASE("numbers are written with 9 significant digits") {
    CHECK(format_number(0.1234567894) == "0.123456789");
    CHECK(format_number(100.0) == "100");
    CHECK(format_number(-20.5) == "-20.5");
    CHECK(format_number(123456789012.0) == "1.23456789e+11");
}

TEST_CASE("atomic writes leave no temporary behind") {
    const auto dir = fresh_dir("atomic");
    const auto path = dir / "nested" / "file.txt";
    write_text_atomic(path.string(), "hello\n");
    CHECK(slurp(path) == "hello\n");
    CHECK_FALSE(fs::exists(path.string() + ".tmp"));
    // overwrite keeps working
    write_text_atomic(path.string(), "bye\n");
    CHECK(slurp(path) == "bye\n");
}

TEST_CASE("validate-config passes a good file and names the bad key") {
    const auto dir = fresh_dir("validate");
    const auto good = write_config(dir, "seed = 1\n[model]\nn_players = 100\n");
    CHECK(cli({"validate-config", "--config", good}) == 0);

    const auto bad = write_config(dir, "seed = 1\n[model]\npenalty_h = 2\n");
    CHECK(cli({"validate-config", "--config", bad}) == 1);

    const auto typo = write_config(dir, "seeed = 1\n");
    CHECK(cli({"validate-config", "--config", typo}) == 1);

    CHECK(cli({"validate-config", "--config", (dir / "absent.cfg").string()}) == 1);
}

TEST_CASE("sweep-fraction CLI writes reproducible outputs") {
    const auto dir = fresh_dir("sweep_fraction");
    const auto cfg = write_config(dir, kTinyModel + "[fraction-sweep]\nreplicas = 3\n");

    const auto out1 = dir / "out1";
    const auto out2 = dir / "out2";
    CHECK(cli({"sweep-fraction", "--config", cfg, "--seed", "42",
               "--output-dir", out1.string()}) == 0);
    CHECK(cli({"sweep-fraction", "--config", cfg, "--seed", "42",
               "--output-dir", out2.string()}) == 0);

    const std::string csv1 = slurp(out1 / "fraction_sweep.csv");
    const std::string csv2 = slurp(out2 / "fraction_sweep.csv");
    CHECK(csv1 == csv2);  // same command, same seed, byte-identical body

    // param echo in the file header and the documented column set
    CHECK(csv1.find("# n_players = 40\n") != std::string::npos);
    CHECK(csv1.find("f,mean_C_all,sd_C_all,mean_C_taxpayers,sd_C_taxpayers,"
                    "mean_C_evaders,sd_C_evaders,n_replicas\n") != std::string::npos);

    // threshold footer format is pinned: "#threshold <name> <value> <half_width>"
    const std::regex footer("#threshold (f_th|a|b|c) -?[0-9.]+(e[-+][0-9]+)? [0-9.]+(e[-+][0-9]+)?");
    std::istringstream csv_in(csv1);
    std::string line;
    int footers = 0;
    while (std::getline(csv_in, line)) {
        if (line.rfind("#threshold", 0) == 0) {
            CHECK(std::regex_match(line, footer));
            ++footers;
        }
    }
    CHECK(footers >= 1);

    const auto rows = data_lines(csv1);
    REQUIRE(rows.size() == 101);
    // f=0: taxpayer columns empty; f=1: evader columns empty
    const auto first = split_fields(rows.front());
    REQUIRE(first.size() == 8);
    CHECK(first[0] == "0");
    CHECK(first[3].empty());
    CHECK(first[4].empty());
    CHECK_FALSE(first[5].empty());
    const auto last = split_fields(rows.back());
    CHECK(last[5].empty());
    CHECK(last[6].empty());
    CHECK(last[7] == "3");

    const std::string meta = slurp(out1 / "fraction_sweep.csv.meta");
    CHECK(meta.find("subcommand = sweep-fraction\n") != std::string::npos);
    CHECK(meta.find("master_seed = 42\n") != std::string::npos);
    CHECK(meta.find("config_hash = ") != std::string::npos);
    CHECK(meta.find("n_players = 40\n") != std::string::npos);

    // a different seed changes the body
    const auto out3 = dir / "out3";
    CHECK(cli({"sweep-fraction", "--config", cfg, "--seed", "43",
               "--output-dir", out3.string()}) == 0);
    CHECK(slurp(out3 / "fraction_sweep.csv") != csv1);

    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        CHECK(entry.path().extension() != ".tmp");
    }
}

TEST_CASE("run CLI emits turns+1 rows and the edge list on request") {
    const auto dir = fresh_dir("run");
    const auto cfg = write_config(dir, kTinyModel +
                                           "[adaptive-run]\n"
                                           "initial_taxpayers = 0.5\n"
                                           "initial_evaders = 0.5\n"
                                           "initial_mixed = 0\n");
    const auto out = dir / "out";
    CHECK(cli({"run", "--config", cfg, "--seed", "7", "--output-dir", out.string(),
               "--dump-graph"}) == 0);
    const auto rows = data_lines(slurp(out / "adaptive_run.csv"));
    CHECK(rows.size() == 16);  // turns + 1 including t=0
    const auto first = split_fields(rows.front());
    REQUIRE(first.size() == 8);
    CHECK(first[0] == "0");
    CHECK(first[1] == "0.5");
    CHECK(first[7].empty());  // no mixed players at the start

    const std::string edges = slurp(out / "graph.edges");
    CHECK(std::count(edges.begin(), edges.end(), '\n') == 2 * 40);
}

TEST_CASE("seed resolution order is flag, then env, then config") {
    const auto dir = fresh_dir("seed");
    const auto with_seed = write_config(dir, "seed = 5\n" + kTinyModel, "with_seed.cfg");
    const auto without_seed = write_config(dir, kTinyModel, "without_seed.cfg");

    // no seed anywhere: config error
    const auto out = dir / "out";
    CHECK(cli({"run", "--config", without_seed, "--output-dir", out.string()}) == 1);

    // config seed works
    CHECK(cli({"run", "--config", with_seed, "--output-dir", (dir / "a").string()}) == 0);

    // env overrides config
    ::setenv("TAXSIM_SEED", "9", 1);
    CHECK(cli({"run", "--config", with_seed, "--output-dir", (dir / "b").string()}) == 0);
    CHECK(slurp(dir / "b" / "adaptive_run.csv.meta").find("master_seed = 9\n") !=
          std::string::npos);

    // flag overrides env
    CHECK(cli({"run", "--config", with_seed, "--seed", "11",
               "--output-dir", (dir / "c").string()}) == 0);
    CHECK(slurp(dir / "c" / "adaptive_run.csv.meta").find("master_seed = 11\n") !=
          std::string::npos);

    ::setenv("TAXSIM_SEED", "not-a-number", 1);
    CHECK(cli({"run", "--config", with_seed, "--output-dir", (dir / "d").string()}) == 1);
    ::unsetenv("TAXSIM_SEED");
}

TEST_CASE("config experiment kind must match the subcommand") {
    const auto dir = fresh_dir("kind");
    const auto cfg = write_config(dir, "experiment = param-sweep\nseed = 1\n" + kTinyModel);
    CHECK(cli({"sweep-fraction", "--config", cfg, "--output-dir", (dir / "out").string()}) == 1);
}

TEST_CASE("invalid model parameters exit with a config error") {
    const auto dir = fresh_dir("badparams");
    const auto cfg = write_config(dir, "seed = 1\n[model]\npenalty_h = 2\n");
    CHECK(cli({"run", "--config", cfg, "--output-dir", (dir / "out").string()}) == 1);
    CHECK(cli({"run", "--config", cfg, "--penalty-h", "4",
               "--output-dir", (dir / "out").string()}) == 0);
}

TEST_CASE("runtime failures exit with code 2") {
    const auto dir = fresh_dir("runtime");
    const auto blocker = dir / "blocker";
    std::ofstream(blocker) << "not a directory";
    const auto cfg = write_config(dir, "seed = 1\n" + kTinyModel);
    CHECK(cli({"run", "--config", cfg, "--output-dir",
               (blocker / "nested").string()}) == 2);
}

TEST_CASE("sweep-param CLI names the output after the axis") {
    const auto dir = fresh_dir("sweep_param");
    const auto cfg = write_config(dir, kTinyModel +
                                           "[param-sweep]\n"
                                           "axis = audit_p\n"
                                           "grid_min = 0\n"
                                           "grid_max = 1\n"
                                           "grid_step = 0.5\n"
                                           "replicas = 2\n");
    const auto out = dir / "out";
    CHECK(cli({"sweep-param", "--config", cfg, "--seed", "3",
               "--output-dir", out.string()}) == 0);
    const auto rows = data_lines(slurp(out / "param_sweep_audit_p.csv"));
    CHECK(rows.size() == 3);
}

TEST_CASE("find-threshold CLI writes the scan and the critical footer") {
    const auto dir = fresh_dir("threshold");
    const auto cfg = write_config(dir,
                                  "[model]\n"
                                  "n_players = 100\n"
                                  "turns = 120\n"
                                  "imitation_factor = 0\n"
                                  "capital_factor = 0\n"
                                  "[critical-fraction]\n"
                                  "grid_min = 0.4\n"
                                  "grid_max = 0.6\n"
                                  "grid_step = 0.05\n"
                                  "replicas = 3\n");
    const auto out = dir / "out";
    CHECK(cli({"find-threshold", "--config", cfg, "--seed", "12",
               "--output-dir", out.string()}) == 0);
    const std::string csv = slurp(out / "critical_fraction.csv");
    CHECK(csv.find("initial_fraction,n_replicas,n_taxpayer_dominant,"
                   "n_capital_positive,n_better\n") != std::string::npos);
    CHECK(csv.find("#critical ") != std::string::npos);
    CHECK(csv.find("#believeness_init uniform-half-one\n") != std::string::npos);
}
