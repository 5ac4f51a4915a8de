#include "taxsim/experiment.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <thread>

namespace taxsim {

double SummaryStat::standard_error() const {
    if (n <= 0) return 0.0;
    return sd / std::sqrt(static_cast<double>(n));
}

SummaryStat summarize(const std::vector<std::optional<double>>& values) {
    SummaryStat s;
    double sum = 0.0;
    for (const auto& v : values) {
        if (v) {
            sum += *v;
            s.n += 1;
        }
    }
    if (s.n == 0) return s;
    s.mean = sum / s.n;
    double ss = 0.0;
    for (const auto& v : values) {
        if (v) {
            const double d = *v - s.mean;
            ss += d * d;
        }
    }
    s.sd = (s.n > 1) ? std::sqrt(ss / (s.n - 1)) : 0.0;
    return s;
}

void parallel_for(std::size_t count, int jobs,
                  const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const int workers = static_cast<int>(std::min<std::size_t>(count, static_cast<std::size_t>(jobs)));
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

namespace {

struct ReplicaFinals {
    std::optional<double> frac_t, frac_e, frac_m;
    std::optional<double> c_all, c_t, c_e, c_m;
};

ReplicaFinals finals_of(const RunResult& run) {
    ReplicaFinals f;
    const std::size_t last = run.turn_count() - 1;
    f.frac_t = run.fraction_taxpayers[last];
    f.frac_e = run.fraction_evaders[last];
    f.frac_m = run.fraction_mixed[last];
    f.c_all = run.avg_capital_all[last];
    f.c_t = run.avg_capital_taxpayers[last];
    f.c_e = run.avg_capital_evaders[last];
    f.c_m = run.avg_capital_mixed[last];
    return f;
}

void aggregate_point(SweepPoint& point, const std::vector<ReplicaFinals>& finals) {
    auto collect = [&](auto member) {
        std::vector<std::optional<double>> vals;
        vals.reserve(finals.size());
        for (const auto& f : finals) vals.push_back(f.*member);
        return summarize(vals);
    };
    point.frac_taxpayers = collect(&ReplicaFinals::frac_t);
    point.frac_evaders = collect(&ReplicaFinals::frac_e);
    point.frac_mixed = collect(&ReplicaFinals::frac_m);
    point.c_all = collect(&ReplicaFinals::c_all);
    point.c_taxpayers = collect(&ReplicaFinals::c_t);
    point.c_evaders = collect(&ReplicaFinals::c_e);
    point.c_mixed = collect(&ReplicaFinals::c_m);
}

std::uint64_t stream_id_for(std::size_t point_index, std::size_t replica) {
    return (static_cast<std::uint64_t>(point_index) << 32) | static_cast<std::uint64_t>(replica);
}

void require_increasing(const std::vector<double>& grid) {
    if (grid.empty()) {
        throw InvalidParamError({{"grid", "[]", "grid must be non-empty"}});
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw InvalidParamError({{"grid", std::to_string(grid[i]), "grid strictly increasing"}});
        }
    }
}

}  // namespace

std::optional<Crossing> first_upward_crossing(const std::vector<double>& xs,
                                              const std::vector<SummaryStat>& ys) {
    std::optional<std::size_t> prev;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (ys[i].n == 0) continue;
        if (prev) {
            const double y1 = ys[*prev].mean;
            const double y2 = ys[i].mean;
            if (y1 < 0.0 && y2 >= 0.0) {
                const double x1 = xs[*prev];
                const double x2 = xs[i];
                const double slope = (y2 - y1) / (x2 - x1);
                Crossing c;
                c.value = x1 - y1 / slope;
                const double se = 0.5 * (ys[*prev].standard_error() + ys[i].standard_error());
                c.half_width = se / slope;
                return c;
            }
        }
        prev = i;
    }
    return std::nullopt;
}

FractionSweepResult sweep_fraction(const Params& params, bool rescale,
                                   int replicas, int jobs) {
    const Params checked = validated(params);
    if (replicas < 1) {
        throw InvalidParamError({{"replicas", std::to_string(replicas), "replicas >= 1"}});
    }

    constexpr int kGridPoints = 101;
    const std::size_t total = static_cast<std::size_t>(kGridPoints) * static_cast<std::size_t>(replicas);
    std::vector<ReplicaFinals> finals(total);

    parallel_for(total, jobs, [&](std::size_t task) {
        const std::size_t point = task / static_cast<std::size_t>(replicas);
        const std::size_t replica = task % static_cast<std::size_t>(replicas);
        const double f = static_cast<double>(point) / (kGridPoints - 1);
        RngStream rng(checked.seed, stream_id_for(point, replica));
        InitialFractions fractions{f, 1.0 - f, 0.0};
        finals[task] = finals_of(run_fixed(checked, fractions, rng));
    });

    FractionSweepResult result;
    result.curve.swept_variable = "f";
    result.curve.replicas = replicas;
    result.curve.points.resize(kGridPoints);

    std::vector<double> xs(kGridPoints);
    std::vector<SummaryStat> y_all(kGridPoints), y_tax(kGridPoints), y_evad(kGridPoints);
    for (int i = 0; i < kGridPoints; ++i) {
        auto& point = result.curve.points[static_cast<std::size_t>(i)];
        point.value = static_cast<double>(i) / (kGridPoints - 1);
        point.replicas = replicas;
        std::vector<ReplicaFinals> slice(
            finals.begin() + static_cast<std::ptrdiff_t>(i) * replicas,
            finals.begin() + (static_cast<std::ptrdiff_t>(i) + 1) * replicas);
        aggregate_point(point, slice);
        xs[static_cast<std::size_t>(i)] = point.value;
        y_all[static_cast<std::size_t>(i)] = point.c_all;
        y_tax[static_cast<std::size_t>(i)] = point.c_taxpayers;
        y_evad[static_cast<std::size_t>(i)] = point.c_evaders;
    }

    // thresholds a/b/c come from the unrescaled curves, f_th from the
    // taxpayer curve shifted by the f=0 collective baseline
    result.thresholds.a = first_upward_crossing(xs, y_evad);
    result.thresholds.b = first_upward_crossing(xs, y_all);
    result.thresholds.c = first_upward_crossing(xs, y_tax);

    const double baseline = y_all.front().mean;
    result.rescale_offset = baseline;
    std::vector<SummaryStat> y_tax_rescaled = y_tax;
    for (auto& s : y_tax_rescaled) {
        if (s.n > 0) s.mean -= baseline;
    }
    result.thresholds.f_th = first_upward_crossing(xs, y_tax_rescaled);

    if (rescale) {
        result.rescaled = true;
        for (auto& point : result.curve.points) {
            if (point.c_all.n > 0) point.c_all.mean -= baseline;
            if (point.c_taxpayers.n > 0) point.c_taxpayers.mean -= baseline;
            if (point.c_evaders.n > 0) point.c_evaders.mean -= baseline;
            if (point.c_mixed.n > 0) point.c_mixed.mean -= baseline;
        }
    }
    return result;
}

const char* cipolla_label_name(CipollaLabel label) {
    switch (label) {
        case CipollaLabel::Smart: return "smart";
        case CipollaLabel::Naive: return "naive";
        case CipollaLabel::Bandit: return "bandit";
        case CipollaLabel::Stupid: return "stupid";
    }
    return "?";
}

CipollaLabel classify_cipolla(Category category, double f,
                              const ThresholdReport& thresholds) {
    if (category == Category::Mixed) {
        throw MixedNotClassifiableError("mixed players have no Cipolla quadrant");
    }
    if (!thresholds.a || !thresholds.c) {
        throw InvalidParamError({{"thresholds", "missing", "a and c crossings required"}});
    }
    if (category == Category::Taxpayer) {
        return (f >= thresholds.c->value) ? CipollaLabel::Smart : CipollaLabel::Naive;
    }
    return (f >= thresholds.a->value) ? CipollaLabel::Bandit : CipollaLabel::Stupid;
}

std::optional<std::size_t> flip_bracket(const std::vector<bool>& good) {
    std::optional<std::size_t> last_bad;
    for (std::size_t i = good.size(); i-- > 0;) {
        if (!good[i]) {
            last_bad = i;
            break;
        }
    }
    if (!last_bad) return std::nullopt;             // good everywhere: flip below the grid
    if (*last_bad + 1 >= good.size()) return std::nullopt;  // never good above
    return last_bad;
}

namespace {

struct OutcomeCounts {
    int taxpayer_dominant = 0;
    int capital_positive = 0;
    int better = 0;
};

// A run is "better" when taxpayers end ahead of evaders and the collective
// capital still grows over the last tenth of the turns. Both conditions are
// counted separately so thresholds can be re-derived under either alone.
OutcomeCounts adaptive_outcomes(const Params& params, double initial_taxpayers,
                                BelievenessInit mode, UpdateOrder order,
                                std::size_t point_index, int replicas, int jobs,
                                std::vector<CriticalScanPoint>* scan_out) {
    std::vector<OutcomeCounts> per_replica(static_cast<std::size_t>(replicas));

    parallel_for(static_cast<std::size_t>(replicas), jobs, [&](std::size_t r) {
        RngStream rng(params.seed, stream_id_for(point_index, r));
        SocialGraph graph = build_graph(params.n_players, SocialGraph::Topology::SmallWorld,
                                        params.rewire_r, rng);
        InitialFractions fractions{initial_taxpayers, 1.0 - initial_taxpayers, 0.0};
        RunResult run = run_adaptive(params, fractions, graph, mode, rng, order);

        const std::size_t last = run.turn_count() - 1;
        const std::size_t window = std::max<std::size_t>(1, (run.turn_count() - 1) / 10);
        const std::size_t start = last - window;
        const bool dominant = run.fraction_taxpayers[last] > run.fraction_evaders[last];
        const double trend =
            (run.avg_capital_all[last] - run.avg_capital_all[start]) / static_cast<double>(window);
        OutcomeCounts& out = per_replica[r];
        out.taxpayer_dominant = dominant ? 1 : 0;
        out.capital_positive = (trend > 0.0) ? 1 : 0;
        out.better = (dominant && trend > 0.0) ? 1 : 0;
    });

    OutcomeCounts total;
    for (const auto& o : per_replica) {
        total.taxpayer_dominant += o.taxpayer_dominant;
        total.capital_positive += o.capital_positive;
        total.better += o.better;
    }
    if (scan_out) {
        scan_out->push_back({initial_taxpayers, replicas, total.taxpayer_dominant,
                             total.capital_positive, total.better});
    }
    return total;
}

}  // namespace

CriticalFractionResult find_critical_initial_fraction(const Params& params,
                                                      const CriticalSearchOptions& options) {
    const Params checked = validated(params);
    if (options.replicas < 1 || options.grid_step <= 0.0 ||
        options.grid_max <= options.grid_min) {
        throw InvalidParamError({{"critical_search", "options", "replicas >= 1, step > 0, max > min"}});
    }

    const auto n_grid = static_cast<std::size_t>(
        std::floor((options.grid_max - options.grid_min) / options.grid_step + 1e-9)) + 1;
    std::vector<double> grid(n_grid);
    for (std::size_t i = 0; i < n_grid; ++i) {
        grid[i] = options.grid_min + static_cast<double>(i) * options.grid_step;
    }

    CriticalFractionResult result;
    result.replicas = options.replicas;
    result.init_mode = options.init_mode;

    const int majority = options.replicas / 2;  // strict majority: better > replicas/2
    std::vector<bool> good(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto counts = adaptive_outcomes(checked, grid[i], options.init_mode,
                                              options.update_order, i, options.replicas,
                                              options.jobs, &result.scan);
        good[i] = counts.better > majority;
    }

    const auto bracket = flip_bracket(good);
    if (!bracket) {
        throw NoFlipFoundError("replica-majority outcome never flips on the scanned grid [" +
                               std::to_string(options.grid_min) + ", " +
                               std::to_string(options.grid_max) + "]");
    }

    double lo = grid[*bracket];
    double hi = grid[*bracket + 1];
    std::size_t probe_index = grid.size();
    while (hi - lo > options.refine_to) {
        const double mid = 0.5 * (lo + hi);
        const auto counts = adaptive_outcomes(checked, mid, options.init_mode,
                                              options.update_order, probe_index++,
                                              options.replicas, options.jobs, &result.scan);
        if (counts.better > majority) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    result.value = 0.5 * (lo + hi);
    result.half_width = 0.5 * (hi - lo);
    return result;
}

const char* sweep_axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::TaxD: return "tax_d";
        case SweepAxis::PenaltyH: return "penalty_h";
        case SweepAxis::AuditP: return "audit_p";
    }
    return "?";
}

std::vector<double> default_axis_grid(SweepAxis axis) {
    std::vector<double> grid;
    if (axis == SweepAxis::AuditP) {
        for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
    } else {
        for (int v = 1; v <= 10; ++v) grid.push_back(v);
    }
    return grid;
}

SweepCurve sweep_parameter(const Params& base, SweepAxis axis,
                           const std::vector<double>& grid,
                           const InitialFractions& fractions, int replicas,
                           BelievenessInit mode, int jobs, UpdateOrder order) {
    require_increasing(grid);
    if (replicas < 1) {
        throw InvalidParamError({{"replicas", std::to_string(replicas), "replicas >= 1"}});
    }

    SweepCurve curve;
    curve.swept_variable = sweep_axis_name(axis);
    curve.replicas = replicas;
    curve.points.resize(grid.size());

    // resolve per-point parameter bundles first; invalid points are skipped
    std::vector<Params> point_params(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        SweepPoint& point = curve.points[i];
        point.value = grid[i];
        point.replicas = replicas;
        Params p = base;
        if (axis == SweepAxis::AuditP) {
            p.audit_p = grid[i];
        } else {
            const double rounded = std::round(grid[i]);
            if (std::abs(grid[i] - rounded) > 1e-9) {
                point.skipped = true;
                point.skip_reason = std::string(sweep_axis_name(axis)) + " must be an integer";
                continue;
            }
            if (axis == SweepAxis::TaxD) {
                p.tax_d = static_cast<int>(rounded);
            } else {
                p.penalty_h = static_cast<int>(rounded);
            }
        }
        // the studies sweep across h<=d and d<=g on purpose; anything else is a real error
        const auto violations = validate_params(p, /*relax_game_inequalities=*/true);
        if (!violations.empty()) {
            point.skipped = true;
            point.skip_reason = violations.front().name + " violates " + violations.front().constraint;
            continue;
        }
        point_params[i] = p;
    }

    std::vector<ReplicaFinals> finals(grid.size() * static_cast<std::size_t>(replicas));
    std::vector<std::size_t> tasks;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (curve.points[i].skipped) continue;
        for (int r = 0; r < replicas; ++r) {
            tasks.push_back(i * static_cast<std::size_t>(replicas) + static_cast<std::size_t>(r));
        }
    }

    parallel_for(tasks.size(), jobs, [&](std::size_t t) {
        const std::size_t task = tasks[t];
        const std::size_t point = task / static_cast<std::size_t>(replicas);
        const std::size_t replica = task % static_cast<std::size_t>(replicas);
        const Params& p = point_params[point];
        RngStream rng(p.seed, stream_id_for(point, replica));
        SocialGraph graph = build_graph(p.n_players, SocialGraph::Topology::SmallWorld,
                                        p.rewire_r, rng);
        finals[task] = finals_of(run_adaptive(p, fractions, graph, mode, rng, order));
    });

    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (curve.points[i].skipped) continue;
        std::vector<ReplicaFinals> slice(
            finals.begin() + static_cast<std::ptrdiff_t>(i * static_cast<std::size_t>(replicas)),
            finals.begin() + static_cast<std::ptrdiff_t>((i + 1) * static_cast<std::size_t>(replicas)));
        aggregate_point(curve.points[i], slice);
    }
    return curve;
}

}  // namespace taxsim
