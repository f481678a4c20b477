#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "excut/dynamics.hpp"
#include "excut/equilibrium.hpp"
#include "excut/errors.hpp"
#include "excut/laws.hpp"
#include "excut/parallel.hpp"
#include "excut/piles.hpp"
#include "excut/rng.hpp"
#include "excut/stats.hpp"

namespace excut {

/// A measured (or closed-form) scalar with its provenance.
struct Statistic {
    std::string name;
    double value = 0.0;
    double se = 0.0;
    double bias_bound = 0.0;
    std::uint64_t samples = 0;
    bool exact = false;
};

/// Replica stream factory: replica i draws from (master, ns | i).
struct Seeder {
    std::uint64_t master = 0;
    std::uint64_t ns = stream_ns::replica;

    RandomStream make(std::uint64_t replica) const { return RandomStream(master, ns | replica); }
};

/// || eta - flat ||_1 with compensated summation.
inline double l1_to_flat(const Configuration& cfg) {
    const double u = 1.0 / double(cfg.n());
    CompensatedSum s;
    for (double v : cfg.energy) s.add(std::abs(v - u));
    return s.value();
}

/// min over label permutations of || a - b o sigma ||_1; by the 1-d transport
/// rearrangement this is the L1 distance between the two sorted vectors.
inline double sorted_l1(const Configuration& a, const Configuration& b) {
    if (a.energy.size() != b.energy.size())
        fail(errc::dimension_mismatch, "configurations differ in size");
    std::vector<double> sa = a.energy, sb = b.energy;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    CompensatedSum s;
    for (std::size_t i = 0; i < sa.size(); ++i) s.add(std::abs(sa[i] - sb[i]));
    return s.value();
}

enum class Metric { Plain, Sorted };

inline const char* to_string(Metric m) { return m == Metric::Plain ? "plain" : "sorted"; }

namespace detail {

inline double metric_value(Metric metric, const Configuration& a, const Configuration& b) {
    if (metric == Metric::Sorted) return sorted_l1(a, b);
    if (a.energy.size() != b.energy.size())
        fail(errc::dimension_mismatch, "configurations differ in size");
    CompensatedSum s;
    for (std::size_t i = 0; i < a.energy.size(); ++i)
        s.add(std::abs(a.energy[i] - b.energy[i]));
    return s.value();
}

}  // namespace detail

/// Distance-to-equilibrium estimates along a nondecreasing time grid, one
/// shared trajectory per replica (Dirac start at site 0), coupled to an
/// equilibrium sample obtained by continuing the same chain `horizon` steps
/// past the last grid time. GAM substitutes its exact flat limit; SEM
/// flattens the horizon state to its average and reports the measured
/// flattening error inside the bias bound.
inline std::vector<Statistic> distance_curve(ModelKind model, const RedistributionLaw& law,
                                             int n, const std::vector<std::uint64_t>& ts,
                                             std::uint64_t horizon, std::uint64_t replicas,
                                             const Seeder& seeder, Metric metric,
                                             int threads = 0) {
    if (ts.empty()) fail(errc::invalid_parameter, "empty time grid");
    if (!std::is_sorted(ts.begin(), ts.end()))
        fail(errc::invalid_parameter, "time grid must be nondecreasing");
    if (replicas < 1) fail(errc::invalid_parameter, "need at least one replica");
    const std::size_t grid = ts.size();
    std::vector<std::vector<double>> values(grid, std::vector<double>(replicas, 0.0));
    std::vector<double> flatten_bias(model == ModelKind::SEM ? replicas : 0, 0.0);
    std::vector<double> centered_sq(model == ModelKind::SEM ? replicas : 0, 0.0);

    for_each_replica(replicas, threads, [&](std::uint64_t rep) {
        RandomStream rng = seeder.make(rep);
        Configuration cfg = dirac(model, n, 0);
        if (model == ModelKind::GAM) {
            const Configuration ref = flat_configuration(model, n);
            for (std::size_t g = 0; g < grid; ++g) {
                run(cfg, law, ts[g] - cfg.step, rng);
                values[g][rep] = detail::metric_value(metric, cfg, ref);
            }
            return;
        }
        std::vector<Configuration> snaps;
        snaps.reserve(grid);
        for (std::size_t g = 0; g < grid; ++g) {
            run(cfg, law, ts[g] - cfg.step, rng);
            snaps.push_back(cfg);
        }
        run(cfg, law, horizon, rng);
        Configuration limit = cfg;
        if (model == ModelKind::SEM) {
            const double avg = average(cfg);
            CompensatedSum l1, sq;
            for (double v : cfg.energy) {
                l1.add(std::abs(v - avg));
                sq.add((v - avg) * (v - avg));
            }
            flatten_bias[rep] = l1.value();
            centered_sq[rep] = sq.value();
            limit.energy.assign(std::size_t(n), avg);
        }
        for (std::size_t g = 0; g < grid; ++g)
            values[g][rep] = detail::metric_value(metric, snaps[g], limit);
    });

    // Horizon bias: L2 contraction tail for SRM; for SEM the measured
    // flattening error plus the remaining drift of the flat height.
    double bias = 0.0;
    if (model == ModelKind::SRM) {
        const double lambda = rates(n, law).lambda_srm;
        bias = std::sqrt(2.0 * double(n)) * std::exp(-0.5 * lambda * double(horizon));
    } else if (model == ModelKind::SEM) {
        RunningMoments fb, cs;
        for (std::uint64_t r = 0; r < replicas; ++r) {
            fb.add(flatten_bias[r]);
            cs.add(centered_sq[r]);
        }
        const double m = law.ex2();
        const double lambda_sem = rates(n, law).lambda_sem;
        const double a_n = 2.0 * (4.0 * m - 1.0) / double(n - 1);
        const double height_drift =
            a_n > 0.0 ? double(n) * std::sqrt(a_n / (double(n) * lambda_sem) * cs.mean()) : 0.0;
        bias = fb.mean() + height_drift;
    }

    std::vector<Statistic> out(grid);
    for (std::size_t g = 0; g < grid; ++g) {
        RunningMoments acc;
        for (std::uint64_t r = 0; r < replicas; ++r) acc.add(values[g][r]);
        out[g].name = metric == Metric::Plain ? "coupling_l1" : "coupling_sorted_l1";
        out[g].value = acc.mean();
        out[g].se = acc.stderr_mean();
        out[g].bias_bound = bias;
        out[g].samples = replicas;
    }
    return out;
}

/// Canonical-coupling distance at a single time.
inline Statistic canonical_coupling_distance(ModelKind model, const RedistributionLaw& law,
                                             int n, std::uint64_t t, std::uint64_t horizon,
                                             std::uint64_t replicas, const Seeder& seeder,
                                             Metric metric, int threads = 0) {
    return distance_curve(model, law, n, {t}, horizon, replicas, seeder, metric, threads)[0];
}

/// Horizon long enough that the residual mean-square coupling bias is below
/// e^{-16} relative: 16 relaxation times of the model at hand.
inline std::uint64_t default_horizon(ModelKind model, int n, const RedistributionLaw& law) {
    if (model == ModelKind::GAM) return 0;  // exact flat limit, no horizon needed
    const double lambda = rates(n, law).of(model);
    return std::uint64_t(std::llround(16.0 / lambda));
}

/// Distance curve over a time grid with the monotonicity-friendly shared
/// replicas and the default horizon.
inline std::vector<Statistic> monotonicity_curve(ModelKind model, const RedistributionLaw& law,
                                                 int n, const std::vector<std::uint64_t>& ts,
                                                 std::uint64_t replicas, const Seeder& seeder,
                                                 Metric metric = Metric::Plain,
                                                 int threads = 0) {
    return distance_curve(model, law, n, ts, default_horizon(model, n, law), replicas, seeder,
                          metric, threads);
}

/// Mean threshold masses ||eta_t^theta||_1 over replicas, measured along one
/// shared pile trajectory per replica at each grid time, for every theta in
/// `thetas`. The discard floor must sit at or below log(min theta).
inline std::vector<std::vector<Statistic>> pile_mass_curve(
    ModelKind model, const RedistributionLaw& law, int n,
    const std::vector<std::uint64_t>& ts, const std::vector<double>& thetas, double floor_log,
    std::uint64_t replicas, const Seeder& seeder, int threads = 0) {
    if (ts.empty() || thetas.empty()) fail(errc::invalid_parameter, "empty measurement grid");
    if (!std::is_sorted(ts.begin(), ts.end()))
        fail(errc::invalid_parameter, "time grid must be nondecreasing");
    const std::size_t grid = ts.size(), nth = thetas.size();
    std::vector<std::vector<std::vector<double>>> values(
        grid, std::vector<std::vector<double>>(nth, std::vector<double>(replicas, 0.0)));

    for_each_replica(
        replicas, threads,
        [&]() { return PileSet(model, n, 0, floor_log); },
        [&](PileSet& ps, std::uint64_t rep) {
            ps.reset(0);
            RandomStream rng = seeder.make(rep);
            for (std::size_t g = 0; g < grid; ++g) {
                while (ps.step() < ts[g]) ps.advance(law, rng);
                for (std::size_t j = 0; j < nth; ++j)
                    values[g][j][rep] = ps.threshold_mass(thetas[j]);
            }
        });

    std::vector<std::vector<Statistic>> out(grid, std::vector<Statistic>(nth));
    for (std::size_t g = 0; g < grid; ++g) {
        for (std::size_t j = 0; j < nth; ++j) {
            RunningMoments acc;
            for (std::uint64_t r = 0; r < replicas; ++r) acc.add(values[g][j][r]);
            out[g][j].name = "threshold_mass";
            out[g][j].value = acc.mean();
            out[g][j].se = acc.stderr_mean();
            out[g][j].samples = replicas;
        }
    }
    return out;
}

/// Update-count census: replica means of |A_{s,t}| for s = 0..s_max plus the
/// total pile count.
struct PileCounts {
    std::vector<RunningMoments> per_updates;  // index s
    RunningMoments total;
};

inline PileCounts pile_count_census(ModelKind model, const RedistributionLaw& law, int n,
                                    std::uint64_t t, std::uint32_t s_max, double floor_log,
                                    std::uint64_t replicas, const Seeder& seeder,
                                    int threads = 0) {
    std::vector<std::vector<double>> counts(std::size_t(s_max) + 1,
                                            std::vector<double>(replicas, 0.0));
    std::vector<double> totals(replicas, 0.0);
    for_each_replica(
        replicas, threads,
        [&]() { return PileSet(model, n, 0, floor_log); },
        [&](PileSet& ps, std::uint64_t rep) {
            ps.reset(0);
            RandomStream rng = seeder.make(rep);
            while (ps.step() < t) ps.advance(law, rng);
            const auto hist = ps.counts_by_updates();
            for (const auto& [s, c] : hist) {
                if (s <= s_max) counts[s][rep] = double(c);
            }
            totals[rep] = double(ps.live_piles());
        });
    PileCounts out;
    out.per_updates.resize(std::size_t(s_max) + 1);
    for (std::uint32_t s = 0; s <= s_max; ++s)
        for (std::uint64_t r = 0; r < replicas; ++r) out.per_updates[s].add(counts[s][r]);
    for (std::uint64_t r = 0; r < replicas; ++r) out.total.add(totals[r]);
    return out;
}

/// Conservative finite-n lower-bound diagnostic for the permutation-invariant
/// distance: 2 E||eta^{+,gamma}||_1 - 2 sqrt(e^{-psi} * n E||eta_inf||_2^2).
inline double w1_lower_bound_diagnostic(double mean_large_pile_mass, double psi,
                                        double stationary_nl2) {
    return 2.0 * mean_large_pile_mass - 2.0 * std::sqrt(std::exp(-psi) * stationary_nl2);
}

}  // namespace excut
