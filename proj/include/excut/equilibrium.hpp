#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "excut/dynamics.hpp"
#include "excut/errors.hpp"
#include "excut/laws.hpp"
#include "excut/rng.hpp"
#include "excut/stats.hpp"

namespace excut {

/// Exact one-step mean-square contraction rates. All three agree to leading
/// order 2(1 - 2 E[X^2])/n, and lambda_sem equals lambda_srm identically.
struct ContractionRates {
    int n = 0;
    double ex2 = 0.0;
    double lambda_srm = 0.0;
    double lambda_gam = 0.0;
    double lambda_sem = 0.0;

    double of(ModelKind m) const {
        switch (m) {
            case ModelKind::SRM: return lambda_srm;
            case ModelKind::SEM: return lambda_sem;
            case ModelKind::GAM: return lambda_gam;
        }
        return 0.0;
    }
};

inline ContractionRates rates(int n, const RedistributionLaw& law) {
    if (n < 2) fail(errc::invalid_parameter, "need at least two particles");
    ContractionRates r;
    r.n = n;
    const double m = law.ex2();
    const double dn = double(n);
    r.ex2 = m;
    r.lambda_srm = 2.0 / dn * (1.0 - 2.0 * m * (dn - 2.0) / (dn - 1.0));
    r.lambda_gam = 2.0 / (dn - 1.0) * (1.0 - 2.0 * m);
    r.lambda_sem = r.lambda_gam + 2.0 * (4.0 * m - 1.0) / (dn * (dn - 1.0));
    return r;
}

/// Exact E[ || v M ||_2^2 ] over the uniform ordered pair and the law of X,
/// by enumerating all n(n-1) pairs; the inner expectation is a quadratic in X
/// and integrates through E[X] = 1/2 and E[X^2]. SEM uses R^T, whose second
/// moment coincides with Q's.
inline double one_step_l2(std::span<const double> v, const RedistributionLaw& law,
                          ModelKind kind) {
    const int n = int(v.size());
    if (n < 2 || n > 64) fail(errc::unsupported_size, "pair enumeration is capped at n <= 64");
    const double m = law.ex2();
    CompensatedSum base;
    for (double vi : v) base.add(vi * vi);
    const double l2 = base.value();

    CompensatedSum delta;
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
            if (x == y) continue;
            const double vx = v[std::size_t(x)], vy = v[std::size_t(y)];
            double expected;
            if (kind == ModelKind::SRM) {
                const double s = vx + vy;
                expected = 2.0 * m * s * s;
            } else {
                expected = 2.0 * m * (vx * vx + vy * vy) + (2.0 - 4.0 * m) * vx * vy;
            }
            delta.add(expected - vx * vx - vy * vy);
        }
    }
    return l2 + delta.value() / (double(n) * double(n - 1));
}

/// One equalization step in mean square: returns the exact pair
/// (E[<v'>^2], E[||v' - <v'>||_2^2]) with
///   E[<v'>^2]          = (1 - c) <v>^2 + (c/n) ||v||_2^2,
///   c                  = 2 (4 E[X^2] - 1) / (n (n-1)),
///   E[||v'-<v'>||_2^2] = (1 - lambda_sem) ||v - <v>||_2^2.
inline std::pair<double, double> mean_square_recursion(std::span<const double> v,
                                                       const RedistributionLaw& law) {
    const int n = int(v.size());
    if (n < 2 || n > 64) fail(errc::unsupported_size, "pair enumeration is capped at n <= 64");
    const double m = law.ex2();
    CompensatedSum sum, sq;
    for (double vi : v) {
        sum.add(vi);
        sq.add(vi * vi);
    }
    const double avg = sum.value() / double(n);
    const double l2 = sq.value();
    const double c = 2.0 * (4.0 * m - 1.0) / (double(n) * double(n - 1));
    const double next_mean_sq = (1.0 - c) * avg * avg + c / double(n) * l2;
    const double centered = l2 - double(n) * avg * avg;
    const double lambda_sem = rates(n, law).lambda_sem;
    const double next_centered = (1.0 - lambda_sem) * centered;
    return {next_mean_sq, next_centered};
}

/// Stationary second moment of the redistribution model:
///   n E[ ||eta_inf||_2^2 ] = 4 E[X^2] / (lambda_srm (n-1)),
/// with large-n limit 2 E[X^2] / (1 - 2 E[X^2]).
struct StationaryMoment {
    double value = 0.0;
    double limit = 0.0;
};

inline StationaryMoment stationary_second_moment(int n, const RedistributionLaw& law) {
    const auto r = rates(n, law);
    StationaryMoment s;
    s.value = 4.0 * r.ex2 / (r.lambda_srm * double(n - 1));
    s.limit = 2.0 * r.ex2 / (1.0 - 2.0 * r.ex2);
    return s;
}

inline std::uint64_t default_burn(int n) {
    return std::uint64_t(std::llround(12.0 * double(n) * std::log(double(n))));
}

struct StationarySample {
    Configuration config;
    bool exact = false;  // false: long-run approximation after `burn` steps
};

/// Long-run approximate equilibrium sample: run the chain `burn` steps from
/// the flat start (SRM, GAM) or from a Dirac mass (SEM, whose limit depends
/// on the initial state).
inline Configuration sample_stationary_longrun(ModelKind model, int n,
                                               const RedistributionLaw& law, RandomStream& rng,
                                               std::uint64_t burn) {
    Configuration cfg = model == ModelKind::SEM ? dirac(model, n, 0) : flat_configuration(model, n);
    run(cfg, law, burn, rng);
    return cfg;
}

/// Equilibrium sampler. Exact where the stationary state is known in closed
/// form: GAM is flat; symmetric-Beta redistribution gives the Dirichlet state
/// for SRM and a flat state at Beta(alpha, alpha(n-1)) height for SEM (from a
/// Dirac start); a point mass at 1/2 collapses all three models to the
/// averaging process with flat limit. Everything else falls back to the
/// long-run approximation.
inline StationarySample sample_stationary(ModelKind model, int n, const RedistributionLaw& law,
                                          RandomStream& rng,
                                          std::optional<std::uint64_t> burn = std::nullopt) {
    if (n < 2) fail(errc::invalid_parameter, "need at least two particles");
    StationarySample out;
    if (model == ModelKind::GAM || law.kind() == LawKind::PointHalf) {
        out.config = flat_configuration(model, n);
        out.exact = true;
        return out;
    }
    if (law.kind() == LawKind::BetaSymmetric) {
        const double alpha = law.beta_alpha();
        if (model == ModelKind::SRM) {
            Configuration cfg;
            cfg.model = model;
            cfg.energy.resize(std::size_t(n));
            CompensatedSum total;
            for (auto& e : cfg.energy) {
                e = rng.next_gamma(alpha);
                total.add(e);
            }
            const double sum = total.value();
            for (auto& e : cfg.energy) e /= sum;
            out.config = std::move(cfg);
            out.exact = true;
            return out;
        }
        // SEM: flat at height Beta(alpha, alpha (n-1)).
        const double y = rng.next_beta(alpha, alpha * double(n - 1));
        out.config.model = model;
        out.config.energy.assign(std::size_t(n), y);
        out.exact = true;
        return out;
    }
    out.config =
        sample_stationary_longrun(model, n, law, rng, burn.value_or(default_burn(n)));
    out.exact = false;
    return out;
}

}  // namespace excut
