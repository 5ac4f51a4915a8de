#pragma once

#include <string>

#include "taxsim/config.hpp"
#include "taxsim/experiment.hpp"
#include "taxsim/types.hpp"

namespace taxsim {

// Numbers in output files carry 9 significant digits.
std::string format_number(double value);

// Write-then-rename so readers never observe a partial file.
// Throws std::runtime_error naming the path on I/O failure.
void write_text_atomic(const std::string& path, const std::string& body);

// CSV bodies. Each starts with a commented parameter echo and a header row;
// missing values (empty categories) are empty fields.
std::string fraction_sweep_csv(const FractionSweepResult& result, const Params& params);
std::string param_sweep_csv(const SweepCurve& curve, const Params& params);
std::string run_result_csv(const RunResult& run);
std::string critical_fraction_csv(const CriticalFractionResult& result, const Params& params);

// Sidecar `<name>.meta`: producing subcommand, config hash, master seed and
// the full configuration echo.
std::string meta_text(const ExperimentConfig& config, const std::string& subcommand);

}  // namespace taxsim
