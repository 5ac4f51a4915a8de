#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "taxsim/simulation.hpp"
#include "taxsim/types.hpp"

namespace taxsim {

// Mean and sample standard deviation over the replicas where the quantity
// was defined (empty categories leave gaps).
struct SummaryStat {
    int n = 0;
    double mean = 0.0;
    double sd = 0.0;

    double standard_error() const;
};

SummaryStat summarize(const std::vector<std::optional<double>>& values);

struct SweepPoint {
    double value = 0.0;   // swept-variable value at this grid point
    int replicas = 0;
    bool skipped = false;
    std::string skip_reason;
    SummaryStat frac_taxpayers, frac_evaders, frac_mixed;
    SummaryStat c_all, c_taxpayers, c_evaders, c_mixed;
};

// Final-state statistics as a function of one swept variable.
struct SweepCurve {
    std::string swept_variable;
    int replicas = 0;
    std::vector<SweepPoint> points;
};

// Interpolated zero crossing with a delta-method confidence half-width.
struct Crossing {
    double value = 0.0;
    double half_width = 0.0;
};

// f_th: taxpayer zero crossing of the rescaled curves; a/b/c: evader,
// collective, taxpayer zero crossings of the unrescaled curves.
struct ThresholdReport {
    std::optional<Crossing> f_th;
    std::optional<Crossing> a;
    std::optional<Crossing> b;
    std::optional<Crossing> c;
};

// First negative-to-nonnegative crossing of the mean curve, linearly
// interpolated between adjacent defined grid points.
std::optional<Crossing> first_upward_crossing(const std::vector<double>& xs,
                                              const std::vector<SummaryStat>& ys);

struct FractionSweepResult {
    SweepCurve curve;            // rescaled when requested
    ThresholdReport thresholds;
    bool rescaled = false;
    double rescale_offset = 0.0; // replica-averaged collective capital at f=0
};

/**
 * Base-game sweep of the taxpayer fraction f over 0..100% in 1% steps with
 * fixed categories and replica averaging. The threshold report always holds
 * both the rescaled crossing f_th and the unrescaled crossings a, b, c;
 * `rescale` only selects which curves the result carries.
 */
FractionSweepResult sweep_fraction(const Params& params, bool rescale,
                                   int replicas, int jobs = 1);

enum class CipollaLabel { Smart, Naive, Bandit, Stupid };

const char* cipolla_label_name(CipollaLabel label);

// Quadrant of the Cipolla diagram for a fixed-strategy player at taxpayer
// fraction f. Boundaries map to the upper side (Smart / Bandit). Throws
// MixedNotClassifiableError for mixed players and InvalidParamError when the
// needed thresholds are missing from the report.
CipollaLabel classify_cipolla(Category category, double f,
                              const ThresholdReport& thresholds);

struct CriticalScanPoint {
    double f = 0.0;
    int replicas = 0;
    int taxpayer_dominant = 0;  // runs with final taxpayer fraction above evader fraction
    int capital_positive = 0;   // runs with positive collective capital trend at the end
    int better = 0;             // runs satisfying both
};

struct CriticalFractionResult {
    double value = 0.0;
    double half_width = 0.0;
    int replicas = 0;
    BelievenessInit init_mode = BelievenessInit::UniformHalfOne;
    std::vector<CriticalScanPoint> scan;  // grid points then bisection probes
};

struct CriticalSearchOptions {
    double grid_min = 0.40;
    double grid_max = 0.70;
    double grid_step = 0.01;
    double refine_to = 0.005;  // bisection stops once the bracket is this wide
    int replicas = 20;
    BelievenessInit init_mode = BelievenessInit::UniformHalfOne;
    UpdateOrder update_order = UpdateOrder::ImitationFirst;
    int jobs = 1;
};

/**
 * Critical initial taxpayer fraction of the adaptive dynamics on the
 * small-world topology. A run counts as "better" when taxpayers end ahead of
 * evaders and the collective capital still grows over the last tenth of the
 * run; the critical value brackets where the replica-majority outcome flips,
 * refined by bisection. Throws NoFlipFoundError when the grid outcome never
 * flips.
 */
CriticalFractionResult find_critical_initial_fraction(const Params& params,
                                                      const CriticalSearchOptions& options);

// Bracket [i, i+1] around the outcome flip: i is the largest not-good index,
// and everything above it is good. nullopt when the sequence never flips.
std::optional<std::size_t> flip_bracket(const std::vector<bool>& good);

enum class SweepAxis { TaxD, PenaltyH, AuditP };

const char* sweep_axis_name(SweepAxis axis);

// Panel ranges of the tax / penalty / audit-probability studies.
std::vector<double> default_axis_grid(SweepAxis axis);

/**
 * Adaptive-model sweep of one policy parameter. Grid points that violate the
 * base-game inequalities (d >= h, g >= d) still run, since the studies
 * deliberately sweep across them; any other invariant violation marks the
 * point skipped with a reason instead of aborting the sweep.
 */
SweepCurve sweep_parameter(const Params& base, SweepAxis axis,
                           const std::vector<double>& grid,
                           const InitialFractions& fractions, int replicas,
                           BelievenessInit mode, int jobs = 1,
                           UpdateOrder order = UpdateOrder::ImitationFirst);

// Run `count` independent tasks on up to `jobs` worker threads. Tasks write
// only to their own slots; the first exception, if any, is rethrown.
void parallel_for(std::size_t count, int jobs,
                  const std::function<void(std::size_t)>& fn);

}  // namespace taxsim
