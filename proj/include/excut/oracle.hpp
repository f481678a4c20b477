#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "excut/errors.hpp"
#include "excut/laws.hpp"
#include "excut/rng.hpp"
#include "excut/special.hpp"

namespace excut {

/// Cutoff location and window for n particles under a given law:
///   t_ent = n log n / (2h),  t_w = (1+r) (n/2) sqrt(log n / h).
struct CutoffSchedule {
    int n = 0;
    EntropicConstants constants;
    double t_ent = 0.0;
    double t_w = 0.0;
};

inline CutoffSchedule schedule(int n, const EntropicConstants& k) {
    if (n < 2) fail(errc::invalid_parameter, "need at least two particles");
    if (!(k.h > 0.0)) fail(errc::degenerate_law, "entropic constant h must be positive");
    CutoffSchedule s;
    s.n = n;
    s.constants = k;
    const double ln = std::log(double(n));
    s.t_ent = double(n) * ln / (2.0 * k.h);
    s.t_w = (1.0 + k.r) * double(n) / 2.0 * std::sqrt(ln / k.h);
    return s;
}

/// Integer step count for t_ent + beta * t_w, rounded to nearest and clamped
/// at zero.
inline std::uint64_t profile_time(const CutoffSchedule& s, double beta) {
    const double t = s.t_ent + beta * s.t_w;
    return t <= 0.0 ? 0 : std::uint64_t(std::llround(t));
}

/// Limiting mass profile of piles above the moving threshold:
/// Phi(-(beta (1+r) + gamma) / sqrt(1+r^2)).
inline double clt_profile(double beta, double gamma, const EntropicConstants& k) {
    if (!(k.h > 0.0)) fail(errc::degenerate_law, "entropic constant h must be positive");
    return normal_cdf(-(beta * (1.0 + k.r) + gamma) / std::sqrt(1.0 + k.r * k.r));
}

/// Limiting worst-case W1 profile: 2 Phi(-beta (1+r) / sqrt(1+r^2)).
inline double theorem_profile(double beta, const EntropicConstants& k) {
    return 2.0 * clt_profile(beta, 0.0, k);
}

struct OracleSpec {
    std::uint64_t t = 0;
    int n = 2;
    double theta = 0.0;
    RedistributionLaw law = RedistributionLaw::point_half();
    std::uint64_t samples = 1'000'000;
};

struct OracleEstimate {
    double value = 0.0;
    double se = 0.0;
    std::uint64_t samples = 0;
    bool exact = false;
};

/// Bin(t, p) by CDF inversion; cost O(mean) per draw, exact for the regimes
/// used here (mean well below 10^3).
inline std::uint64_t draw_binomial(std::uint64_t t, double p, RandomStream& rng) {
    if (t == 0 || p <= 0.0) return 0;
    if (p >= 1.0) return t;
    const double u = rng.next_double();
    double pmf = std::exp(double(t) * std::log1p(-p));
    double cdf = pmf;
    const double ratio = p / (1.0 - p);
    std::uint64_t k = 0;
    while (u >= cdf && k < t) {
        pmf *= double(t - k) / double(k + 1) * ratio;
        cdf += pmf;
        ++k;
    }
    return k;
}

/// Monte Carlo estimate of P(sum_{i<=T} log Xhat_i >= log theta) with
/// T ~ Bin(t, 2/n). The partial sums are nonincreasing, so a sample can stop
/// as soon as it crosses below log theta.
inline OracleEstimate threshold_probability(const OracleSpec& spec, RandomStream& rng) {
    if (spec.n < 2) fail(errc::invalid_parameter, "need at least two particles");
    if (spec.samples < 1) fail(errc::invalid_parameter, "need at least one sample");
    if (spec.theta < 0.0 || spec.theta > 1.0)
        fail(errc::invalid_parameter, "theta must lie in [0,1]");
    if (spec.theta == 0.0) return {1.0, 0.0, spec.samples, true};

    const double lt = std::log(spec.theta);
    const double p = 2.0 / double(spec.n);
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < spec.samples; ++i) {
        const std::uint64_t T = draw_binomial(spec.t, p, rng);
        double acc = 0.0;
        bool hit = acc >= lt;
        for (std::uint64_t j = 0; j < T && hit; ++j) {
            acc += std::log(spec.law.sample_size_biased(rng));
            hit = acc >= lt;
        }
        hits += hit ? 1 : 0;
    }
    const double est = double(hits) / double(spec.samples);
    const double se = std::sqrt(est * (1.0 - est) / double(spec.samples));
    return {est, se, spec.samples, false};
}

namespace detail {

/// P(sum of s size-biased log-atoms >= lt) by exact enumeration of atom
/// multiplicities.
inline double discrete_sum_tail(const std::vector<Atom>& sb, std::uint64_t s, double lt) {
    const std::size_t k = sb.size();
    std::vector<double> lw(k), lx(k);
    for (std::size_t i = 0; i < k; ++i) {
        lw[i] = sb[i].w > 0.0 ? std::log(sb[i].w) : -std::numeric_limits<double>::infinity();
        lx[i] = std::log(sb[i].x);
    }
    double total = 0.0;
    std::vector<std::uint64_t> counts(k, 0);
    // Recurse over atom counts c_0..c_{k-1} with sum s.
    auto rec = [&](auto&& self, std::size_t idx, std::uint64_t left) -> void {
        if (idx + 1 == k) {
            counts[idx] = left;
            double logp = std::lgamma(double(s) + 1.0);
            double value = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                if (counts[i] == 0) continue;
                if (lw[i] == -std::numeric_limits<double>::infinity()) return;
                logp += double(counts[i]) * lw[i] - std::lgamma(double(counts[i]) + 1.0);
                value += double(counts[i]) * lx[i];
            }
            if (value >= lt) total += std::exp(logp);
            return;
        }
        for (std::uint64_t c = 0; c <= left; ++c) {
            counts[idx] = c;
            self(self, idx + 1, left - c);
        }
    };
    rec(rec, 0, s);
    return total;
}

}  // namespace detail

/// Exact evaluation where available: always for a point mass at 1/2, and for
/// discrete laws whenever Bin(t, 2/n) is concentrated below 40 updates. The
/// returned se bounds the truncation error (zero for the point mass).
inline std::optional<OracleEstimate> threshold_probability_exact(const OracleSpec& spec) {
    if (spec.theta == 0.0) return OracleEstimate{1.0, 0.0, 0, true};
    const double lt = std::log(spec.theta);
    const double p = 2.0 / double(spec.n);

    if (spec.law.kind() == LawKind::PointHalf) {
        // Partial sums are s * log(1/2): replicate the running-sum comparison
        // to keep boundary cases consistent with the sampling path.
        const double step_log = std::log(0.5);
        if (lt > 0.0) return OracleEstimate{0.0, 0.0, 0, true};
        double acc = 0.0;
        std::uint64_t kstar = 0;
        while (kstar < spec.t) {
            const double next = acc + step_log;
            if (next < lt) break;
            acc = next;
            ++kstar;
        }
        return OracleEstimate{binomial_cdf(spec.t, p, kstar), 0.0, 0, true};
    }

    if (spec.law.is_discrete()) {
        constexpr std::uint64_t kMaxTerms = 40;
        const double tail = 1.0 - binomial_cdf(spec.t, p, kMaxTerms);
        if (tail > 1e-13) return std::nullopt;
        double total = 0.0;
        for (std::uint64_t s = 0; s <= std::min(kMaxTerms, spec.t); ++s) {
            const double q =
                s == 0 ? (lt <= 0.0 ? 1.0 : 0.0)
                       : detail::discrete_sum_tail(spec.law.size_biased_atoms(), s, lt);
            total += binomial_pmf(spec.t, p, s) * q;
        }
        return OracleEstimate{total + 0.5 * tail, tail, 0, true};
    }
    return std::nullopt;
}

}  // namespace excut
