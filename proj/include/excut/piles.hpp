#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "excut/dynamics.hpp"
#include "excut/errors.hpp"
#include "excut/laws.hpp"
#include "excut/rng.hpp"
#include "excut/stats.hpp"

namespace excut {

/// One energy fragment. Sizes multiply down as products of X factors, so they
/// are stored in log space; `updates` counts the exchange events the fragment
/// has been through.
struct Pile {
    double log_size = 0.0;
    std::uint32_t updates = 0;
};

/// Threshold family theta = e^psi / n with psi = gamma * sqrt(h log n).
struct ThresholdSpec {
    double gamma = 0.0;
    double psi = 0.0;
    double theta = 0.0;
};

inline ThresholdSpec make_threshold(double gamma, int n, const EntropicConstants& k) {
    if (!(gamma > 0.0)) fail(errc::invalid_parameter, "threshold gamma must be positive");
    if (n < 2) fail(errc::invalid_parameter, "need at least two particles");
    ThresholdSpec spec;
    spec.gamma = gamma;
    spec.psi = gamma * std::sqrt(k.h * std::log(double(n)));
    spec.theta = std::exp(spec.psi) / double(n);
    return spec;
}

/// Fragment-level refinement of the exchange dynamics, started from a single
/// unit pile. Every event splits each pile at the two chosen sites in two;
/// per-site sums reproduce the direct dynamics driven by the same events.
/// Children falling below `floor_log` are folded into a per-site residual so
/// that the reconstruction stays exact while memory stays bounded.
class PileSet {
public:
    static constexpr std::uint64_t kDefaultCap = 100'000'000;

    PileSet(ModelKind model, int n, int x0, double floor_log = -60.0,
            std::uint64_t cap = kDefaultCap)
        : model_(model), n_(n), floor_log_(floor_log), cap_(cap) {
        if (n < 2) fail(errc::invalid_parameter, "need at least two particles");
        if (x0 < 0 || x0 >= n) fail(errc::index_out_of_range, "initial site out of range");
        site_.resize(std::size_t(n));
        residual_.assign(std::size_t(n), 0.0);
        reset(x0);
    }

    void reset(int x0) {
        if (x0 < 0 || x0 >= n_) fail(errc::index_out_of_range, "initial site out of range");
        for (auto& bucket : site_) bucket.clear();
        residual_.assign(std::size_t(n_), 0.0);
        site_[std::size_t(x0)].push_back(Pile{0.0, 0});
        live_ = 1;
        step_ = 0;
    }

    ModelKind model() const { return model_; }
    int n() const { return n_; }
    std::uint64_t step() const { return step_; }
    std::uint64_t live_piles() const { return live_; }
    double floor_log() const { return floor_log_; }
    const std::vector<Pile>& at_site(int x) const { return site_[std::size_t(x)]; }

    /// Apply one exchange event: every pile at x or y splits into two
    /// children carrying factors X and 1-X (both X, resp. both 1-X, for SEM),
    /// one child per destination site, updates incremented on both. The two
    /// residuals transform by the same 2x2 site-mass update, which keeps the
    /// per-site reconstruction exact no matter how much mass has been
    /// discarded.
    void apply(const ExchangeEvent& ev) {
        if (ev.x < 0 || ev.x >= n_ || ev.y < 0 || ev.y >= n_ || ev.x == ev.y)
            fail(errc::index_out_of_range, "bad event pair");
        ++step_;
        auto& bx = site_[std::size_t(ev.x)];
        auto& by = site_[std::size_t(ev.y)];
        double& rx = residual_[std::size_t(ev.x)];
        double& ry = residual_[std::size_t(ev.y)];
        if (bx.empty() && by.empty() && rx == 0.0 && ry == 0.0) return;

        const double X = ev.xval;
        switch (model_) {
            case ModelKind::SRM: {
                const double s = rx + ry;
                rx = X * s;
                ry = (1.0 - X) * s;
                break;
            }
            case ModelKind::SEM: {
                const double v = X * rx + (1.0 - X) * ry;
                rx = v;
                ry = v;
                break;
            }
            case ModelKind::GAM: {
                const double nx = X * rx + (1.0 - X) * ry;
                const double ny = (1.0 - X) * rx + X * ry;
                rx = nx;
                ry = ny;
                break;
            }
        }
        if (bx.empty() && by.empty()) return;

        const double lx = std::log(ev.xval);
        const double l1x = std::log(1.0 - ev.xval);
        scratch_x_.clear();
        scratch_y_.clear();
        scratch_x_.swap(bx);
        scratch_y_.swap(by);
        live_ -= scratch_x_.size() + scratch_y_.size();

        switch (model_) {
            case ModelKind::SRM:
                for (const Pile& p : scratch_x_) {
                    emit(ev.x, p.log_size + lx, p.updates);
                    emit(ev.y, p.log_size + l1x, p.updates);
                }
                for (const Pile& p : scratch_y_) {
                    emit(ev.x, p.log_size + lx, p.updates);
                    emit(ev.y, p.log_size + l1x, p.updates);
                }
                break;
            case ModelKind::SEM:
                for (const Pile& p : scratch_x_) {
                    emit(ev.x, p.log_size + lx, p.updates);
                    emit(ev.y, p.log_size + lx, p.updates);
                }
                for (const Pile& p : scratch_y_) {
                    emit(ev.x, p.log_size + l1x, p.updates);
                    emit(ev.y, p.log_size + l1x, p.updates);
                }
                break;
            case ModelKind::GAM:
                for (const Pile& p : scratch_x_) {
                    emit(ev.x, p.log_size + lx, p.updates);
                    emit(ev.y, p.log_size + l1x, p.updates);
                }
                for (const Pile& p : scratch_y_) {
                    emit(ev.y, p.log_size + lx, p.updates);
                    emit(ev.x, p.log_size + l1x, p.updates);
                }
                break;
        }
        if (live_ > cap_)
            fail(errc::cap_exceeded, "live pile count exceeded the configured cap");
    }

    /// Advance one step, drawing the pair first and the redistribution value
    /// only if some pile or residual mass is actually affected.
    void advance(const RedistributionLaw& law, RandomStream& rng) {
        const auto [x, y] = draw_pair(n_, rng);
        if (site_[std::size_t(x)].empty() && site_[std::size_t(y)].empty() &&
            residual_[std::size_t(x)] == 0.0 && residual_[std::size_t(y)] == 0.0) {
            ++step_;
            return;
        }
        apply(ExchangeEvent{x, y, law.sample(rng)});
    }

    /// Total size of piles with |zeta| >= theta. theta = 0 returns the full
    /// reconstruction including the residual.
    double threshold_mass(double theta) const {
        CompensatedSum s;
        if (theta == 0.0) {
            for (const auto& bucket : site_)
                for (const Pile& p : bucket) s.add(std::exp(p.log_size));
            for (double r : residual_) s.add(r);
            return s.value();
        }
        const double lt = std::log(theta);
        if (lt < floor_log_ - 1e-9)
            fail(errc::threshold_below_floor,
                 "threshold below the discard floor: qualifying piles may have been dropped");
        for (const auto& bucket : site_)
            for (const Pile& p : bucket)
                if (p.log_size >= lt) s.add(std::exp(p.log_size));
        return s.value();
    }

    /// Histogram of per-pile update counts (floor-discarded piles excluded).
    std::map<std::uint32_t, std::uint64_t> counts_by_updates() const {
        std::map<std::uint32_t, std::uint64_t> hist;
        for (const auto& bucket : site_)
            for (const Pile& p : bucket) ++hist[p.updates];
        return hist;
    }

    /// Per-site energies: pile sums plus residual, for reconstruction checks.
    std::vector<double> site_masses() const {
        std::vector<double> out(std::size_t(n_), 0.0);
        for (int x = 0; x < n_; ++x) {
            CompensatedSum s;
            for (const Pile& p : site_[std::size_t(x)]) s.add(std::exp(p.log_size));
            s.add(residual_[std::size_t(x)]);
            out[std::size_t(x)] = s.value();
        }
        return out;
    }

    double residual_mass() const {
        CompensatedSum s;
        for (double r : residual_) s.add(r);
        return s.value();
    }

private:
    void emit(std::int32_t dest, double log_size, std::uint32_t parent_updates) {
        const std::uint32_t u =
            parent_updates == UINT32_MAX ? parent_updates : parent_updates + 1;
        if (log_size < floor_log_) {
            residual_[std::size_t(dest)] += std::exp(log_size);
            return;
        }
        site_[std::size_t(dest)].push_back(Pile{log_size, u});
        ++live_;
    }

    ModelKind model_;
    int n_;
    double floor_log_;
    std::uint64_t cap_;
    std::uint64_t live_ = 0;
    std::uint64_t step_ = 0;
    std::vector<std::vector<Pile>> site_;
    std::vector<double> residual_;
    std::vector<Pile> scratch_x_, scratch_y_;
};

inline PileSet pile_init(ModelKind model, int n, int x0, double floor_log = -60.0) {
    return PileSet(model, n, x0, floor_log);
}

inline double large_pile_mass(const PileSet& ps, const ThresholdSpec& spec) {
    return ps.threshold_mass(spec.theta);
}

}  // namespace excut
