#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "excut/errors.hpp"
#include "excut/rng.hpp"
#include "excut/special.hpp"
#include "excut/stats.hpp"

namespace excut {

enum class LawKind { PointHalf, BetaSymmetric, TwoPoint, DiscreteSymmetric };

struct Atom {
    double x;
    double w;
};

/// Entropic constants of a redistribution law:
///   h  = E[-log Xhat] = E[-2 X log X]
///   s2 = Var(log Xhat)
///   r  = sqrt(s2) / h
/// where Xhat is the size-biased version of X. ex2 = E[X^2] is always exact
/// for the closed law menu; h and s2 carry standard errors when estimated by
/// Monte Carlo.
struct EntropicConstants {
    double h = 0.0;
    double s2 = 0.0;
    double r = 0.0;
    double ex2 = 0.0;
    bool monte_carlo = false;
    std::uint64_t samples = 0;
    double se_h = 0.0;
    double se_s2 = 0.0;
    double se_r = 0.0;
};

/// A redistribution fraction X in [0,1]: symmetric (X ~ 1-X) and
/// non-degenerate (not Bernoulli). The menu is closed: a point mass at 1/2,
/// symmetric Beta, a symmetric two-point law, or a finite symmetric discrete
/// law. Construction validates both assumptions; instances are immutable and
/// freely shared across threads.
class RedistributionLaw {
public:
    static RedistributionLaw point_half() {
        RedistributionLaw law(LawKind::PointHalf);
        law.atoms_ = {{0.5, 1.0}};
        law.finalize();
        return law;
    }

    static RedistributionLaw beta(double alpha) {
        if (!(alpha > 0.0) || !std::isfinite(alpha))
            fail(errc::invalid_parameter, "beta law needs alpha > 0");
        RedistributionLaw law(LawKind::BetaSymmetric);
        law.alpha_ = alpha;
        return law;
    }

    static RedistributionLaw two_point(double a) {
        if (!(a > 0.0 && a < 1.0))
            fail(errc::invalid_parameter, "two-point law needs a in (0,1)");
        RedistributionLaw law(LawKind::TwoPoint);
        law.a_ = a;
        law.atoms_ = {{std::min(a, 1.0 - a), 0.5}, {std::max(a, 1.0 - a), 0.5}};
        if (a == 0.5) law.atoms_ = {{0.5, 1.0}};
        law.finalize();
        return law;
    }

    static RedistributionLaw discrete(std::vector<Atom> atoms) {
        RedistributionLaw law(LawKind::DiscreteSymmetric);
        law.atoms_ = std::move(atoms);
        law.check_discrete();
        law.finalize();
        return law;
    }

    LawKind kind() const { return kind_; }
    double beta_alpha() const { return alpha_; }
    const std::vector<Atom>& atoms() const { return atoms_; }

    bool is_discrete() const { return kind_ != LawKind::BetaSymmetric; }

    /// E[X] = 1/2 for every symmetric law.
    double mean() const { return 0.5; }

    /// E[X^2], exact. Lies in [1/4, 1/2) by symmetry and non-degeneracy.
    double ex2() const {
        switch (kind_) {
            case LawKind::PointHalf: return 0.25;
            case LawKind::BetaSymmetric: return (alpha_ + 1.0) / (2.0 * (2.0 * alpha_ + 1.0));
            default: {
                double s = 0.0;
                for (const auto& a : atoms_) s += a.w * a.x * a.x;
                return s;
            }
        }
    }

    double sample(RandomStream& rng) const {
        switch (kind_) {
            case LawKind::PointHalf: return 0.5;
            case LawKind::BetaSymmetric: return rng.next_beta(alpha_, alpha_);
            default: return pick(atoms_, rng);
        }
    }

    /// Size-biased draw: P(Xhat <= s) = 2 E[X 1_{X <= s}]. For Beta(a,a) this
    /// is Beta(a+1, a); discrete atoms are reweighted by 2x (an atom at zero
    /// gets weight zero).
    double sample_size_biased(RandomStream& rng) const {
        switch (kind_) {
            case LawKind::PointHalf: return 0.5;
            case LawKind::BetaSymmetric: return rng.next_beta(alpha_ + 1.0, alpha_);
            default: return pick(size_biased_, rng);
        }
    }

    const std::vector<Atom>& size_biased_atoms() const { return size_biased_; }

    /// Closed-form constants; exact finite sums for discrete laws, digamma /
    /// trigamma for Beta.
    EntropicConstants entropic_constants() const {
        EntropicConstants k;
        k.ex2 = ex2();
        switch (kind_) {
            case LawKind::PointHalf:
                k.h = std::log(2.0);
                k.s2 = 0.0;
                break;
            case LawKind::BetaSymmetric:
                k.h = digamma(2.0 * alpha_ + 1.0) - digamma(alpha_ + 1.0);
                k.s2 = trigamma(alpha_ + 1.0) - trigamma(2.0 * alpha_ + 1.0);
                break;
            default: {
                double h = 0.0, lx2 = 0.0;
                for (const auto& a : size_biased_) {
                    if (a.w == 0.0) continue;  // atom at zero: x log x -> 0
                    const double lx = std::log(a.x);
                    h -= a.w * lx;
                    lx2 += a.w * lx * lx;
                }
                k.h = h;
                k.s2 = std::max(0.0, lx2 - h * h);
                break;
            }
        }
        k.r = k.h > 0.0 ? std::sqrt(k.s2) / k.h : 0.0;
        return k;
    }

    /// Monte Carlo constants over the size-biased law, with standard errors
    /// per constant (delta method for r, including the mean/variance
    /// covariance term).
    EntropicConstants entropic_constants_mc(std::uint64_t samples, RandomStream& rng) const {
        RunningMoments mom;
        for (std::uint64_t i = 0; i < samples; ++i) {
            const double x = sample_size_biased(rng);
            mom.add(-std::log(x));
        }
        EntropicConstants k;
        k.monte_carlo = true;
        k.samples = samples;
        k.ex2 = ex2();
        k.h = mom.mean();
        k.s2 = mom.variance();
        k.se_h = mom.stderr_mean();
        k.se_s2 = mom.stderr_variance();
        k.r = k.s2 > 0.0 && k.h > 0.0 ? std::sqrt(k.s2) / k.h : 0.0;
        if (k.s2 > 0.0 && k.h > 0.0) {
            const double n = double(samples);
            const double var_h = mom.central2() / n;
            const double var_s2 = k.se_s2 * k.se_s2;
            const double cov = mom.central3() / n;
            const double gh = -std::sqrt(k.s2) / (k.h * k.h);
            const double gs = 1.0 / (2.0 * std::sqrt(k.s2) * k.h);
            const double v = gh * gh * var_h + gs * gs * var_s2 + 2.0 * gh * gs * cov;
            k.se_r = v > 0.0 ? std::sqrt(v) : 0.0;
        }
        return k;
    }

    /// Configuration-text form: point-half | beta:A | two-point:A |
    /// discrete:x1,w1;x2,w2;...
    std::string spec_string() const {
        switch (kind_) {
            case LawKind::PointHalf: return "point-half";
            case LawKind::BetaSymmetric: return "beta:" + fmt(alpha_);
            case LawKind::TwoPoint: return "two-point:" + fmt(a_);
            default: {
                std::string s = "discrete:";
                for (std::size_t i = 0; i < atoms_.size(); ++i) {
                    if (i) s += ';';
                    s += fmt(atoms_[i].x) + "," + fmt(atoms_[i].w);
                }
                return s;
            }
        }
    }

private:
    explicit RedistributionLaw(LawKind kind) : kind_(kind) {}

    static std::string fmt(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }

    static double pick(const std::vector<Atom>& atoms, RandomStream& rng) {
        double u = rng.next_double();
        for (const auto& a : atoms) {
            if (u < a.w) return a.x;
            u -= a.w;
        }
        return atoms.back().x;
    }

    void check_discrete() {
        constexpr double tol = 1e-12;
        std::vector<Atom> kept;
        double wsum = 0.0;
        for (const auto& a : atoms_) {
            if (!(a.x >= 0.0 && a.x <= 1.0))
                fail(errc::invalid_parameter, "atom outside [0,1]");
            if (a.w < -tol) fail(errc::invalid_parameter, "negative atom weight");
            if (a.w <= 0.0) continue;
            kept.push_back(a);
            wsum += a.w;
        }
        if (kept.empty()) fail(errc::invalid_parameter, "no atoms with positive weight");
        if (std::abs(wsum - 1.0) > tol)
            fail(errc::invalid_parameter, "atom weights must sum to 1");
        std::sort(kept.begin(), kept.end(), [](const Atom& l, const Atom& r) { return l.x < r.x; });
        // Merge atoms that coincide within tolerance.
        std::vector<Atom> merged;
        for (const auto& a : kept) {
            if (!merged.empty() && std::abs(merged.back().x - a.x) <= tol)
                merged.back().w += a.w;
            else
                merged.push_back(a);
        }
        kept = std::move(merged);
        // Reflection test: every atom must pair with one at 1-x of equal weight.
        std::vector<bool> used(kept.size(), false);
        for (std::size_t i = 0; i < kept.size(); ++i) {
            const double rx = 1.0 - kept[i].x;
            bool matched = false;
            for (std::size_t j = 0; j < kept.size(); ++j) {
                if (used[j] && j != i) continue;
                if (std::abs(kept[j].x - rx) <= tol && std::abs(kept[j].w - kept[i].w) <= tol) {
                    if (j != i) used[j] = true;
                    matched = true;
                    break;
                }
            }
            if (!matched) fail(errc::asymmetric_law, "law is not invariant under x -> 1-x");
        }
        atoms_ = std::move(kept);
    }

    void finalize() {
        double interior = 0.0;
        for (const auto& a : atoms_)
            if (a.x > 0.0 && a.x < 1.0) interior += a.w;
        if (interior <= 0.0)
            fail(errc::degenerate_law, "all mass on {0,1}: Bernoulli laws are excluded");
        // Size-biased reweighting by 2x; normalize to absorb rounding.
        size_biased_.clear();
        double total = 0.0;
        for (const auto& a : atoms_) total += 2.0 * a.x * a.w;
        for (const auto& a : atoms_) size_biased_.push_back({a.x, 2.0 * a.x * a.w / total});
    }

    LawKind kind_;
    double alpha_ = 0.0;
    double a_ = 0.0;
    std::vector<Atom> atoms_;
    std::vector<Atom> size_biased_;
};

/// Parse the configuration-text law syntax. Malformed text raises
/// ConfigError; semantically invalid parameters raise the law errors.
inline RedistributionLaw parse_law(const std::string& spec) {
    auto number = [](const std::string& s) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size()) fail(errc::config_error, "trailing characters in number: " + s);
            return v;
        } catch (const Error&) {
            throw;
        } catch (...) {
            fail(errc::config_error, "bad number: " + s);
        }
    };
    if (spec == "point-half") return RedistributionLaw::point_half();
    if (spec.rfind("beta:", 0) == 0) return RedistributionLaw::beta(number(spec.substr(5)));
    if (spec.rfind("two-point:", 0) == 0)
        return RedistributionLaw::two_point(number(spec.substr(10)));
    if (spec.rfind("discrete:", 0) == 0) {
        std::vector<Atom> atoms;
        std::string body = spec.substr(9);
        std::size_t start = 0;
        while (start <= body.size()) {
            const std::size_t end = std::min(body.find(';', start), body.size());
            const std::string pair = body.substr(start, end - start);
            const std::size_t comma = pair.find(',');
            if (comma == std::string::npos)
                fail(errc::config_error, "discrete atom needs x,w: " + pair);
            atoms.push_back({number(pair.substr(0, comma)), number(pair.substr(comma + 1))});
            if (end == body.size()) break;
            start = end + 1;
        }
        return RedistributionLaw::discrete(std::move(atoms));
    }
    fail(errc::config_error, "unknown law spec: " + spec);
}

}  // namespace excut
