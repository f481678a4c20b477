#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "excut/errors.hpp"
#include "excut/laws.hpp"
#include "excut/rng.hpp"
#include "excut/stats.hpp"

namespace excut {

/// The three pairwise exchange mechanisms. With the pair (x,y) and fraction X:
///   SRM: (x,y) <- (X (ex+ey), (1-X)(ex+ey))     redistributes the pair sum
///   SEM: both  <- X ex + (1-X) ey               equalizes to one mixture
///   GAM: (x,y) <- (X ex + (1-X) ey, (1-X) ex + X ey)
/// SRM and GAM conserve total energy; SEM obeys the maximum principle.
enum class ModelKind { SRM, SEM, GAM };

inline const char* to_string(ModelKind m) {
    switch (m) {
        case ModelKind::SRM: return "srm";
        case ModelKind::SEM: return "sem";
        case ModelKind::GAM: return "gam";
    }
    return "?";
}

inline ModelKind parse_model(const std::string& s) {
    if (s == "srm") return ModelKind::SRM;
    if (s == "sem") return ModelKind::SEM;
    if (s == "gam") return ModelKind::GAM;
    fail(errc::config_error, "unknown model: " + s);
}

/// Energy configuration of n particles at discrete time `step`.
struct Configuration {
    ModelKind model = ModelKind::SRM;
    std::vector<double> energy;
    std::uint64_t step = 0;

    int n() const { return int(energy.size()); }
};

/// One exchange event: an ordered pair of distinct sites plus the realized
/// redistribution fraction.
struct ExchangeEvent {
    std::int32_t x = 0;
    std::int32_t y = 0;
    double xval = 0.5;
};

inline Configuration dirac(ModelKind model, int n, int x0) {
    if (n < 2) fail(errc::invalid_parameter, "need at least two particles");
    if (x0 < 0 || x0 >= n) fail(errc::index_out_of_range, "dirac site out of range");
    Configuration cfg;
    cfg.model = model;
    cfg.energy.assign(std::size_t(n), 0.0);
    cfg.energy[std::size_t(x0)] = 1.0;
    return cfg;
}

inline Configuration flat_configuration(ModelKind model, int n) {
    if (n < 2) fail(errc::invalid_parameter, "need at least two particles");
    Configuration cfg;
    cfg.model = model;
    cfg.energy.assign(std::size_t(n), 1.0 / double(n));
    return cfg;
}

/// Uniform ordered pair of distinct sites: draw x, then shift y past x.
inline std::pair<std::int32_t, std::int32_t> draw_pair(int n, RandomStream& rng) {
    const auto x = std::int32_t(rng.next_below(std::uint64_t(n)));
    auto y = std::int32_t(rng.next_below(std::uint64_t(n) - 1));
    if (y >= x) ++y;
    return {x, y};
}

inline ExchangeEvent draw_event(int n, const RedistributionLaw& law, RandomStream& rng) {
    const auto [x, y] = draw_pair(n, rng);
    return {x, y, law.sample(rng)};
}

/// Apply one exchange event in place; only entries x and y change.
///
/// The mixture entries are written as X*ex + (1-X)*ey so that all three
/// models produce bit-identical trajectories for X = 1/2. SEM entries are
/// clamped into [min(ex,ey), max(ex,ey)]: the update is a convex
/// combination, and the clamp keeps the maximum principle exact under
/// floating-point rounding.
inline void step(Configuration& cfg, const ExchangeEvent& ev) {
    const int n = cfg.n();
    if (ev.x < 0 || ev.x >= n || ev.y < 0 || ev.y >= n || ev.x == ev.y)
        fail(errc::index_out_of_range, "bad event pair");
    double& ex = cfg.energy[std::size_t(ev.x)];
    double& ey = cfg.energy[std::size_t(ev.y)];
    const double X = ev.xval;
    switch (cfg.model) {
        case ModelKind::SRM: {
            const double s = ex + ey;
            ex = X * s;
            ey = (1.0 - X) * s;
            break;
        }
        case ModelKind::SEM: {
            const double lo = std::min(ex, ey), hi = std::max(ex, ey);
            const double v = std::clamp(X * ex + (1.0 - X) * ey, lo, hi);
            ex = v;
            ey = v;
            break;
        }
        case ModelKind::GAM: {
            const double nx = X * ex + (1.0 - X) * ey;
            const double ny = (1.0 - X) * ex + X * ey;
            ex = nx;
            ey = ny;
            break;
        }
    }
    ++cfg.step;
}

inline void run(Configuration& cfg, const RedistributionLaw& law, std::uint64_t steps,
                RandomStream& rng) {
    for (std::uint64_t i = 0; i < steps; ++i) step(cfg, draw_event(cfg.n(), law, rng));
}

/// Dense random-matrix representation of one event. Left action on a row
/// vector reproduces `step`: SRM -> R, SEM -> R^T, GAM -> Q. Test-only,
/// capped at n <= 64.
struct ExchangeMatrix {
    int n = 0;
    ModelKind kind = ModelKind::SRM;
    std::vector<double> m;  // row-major n*n

    double at(int i, int j) const { return m[std::size_t(i) * std::size_t(n) + std::size_t(j)]; }
};

inline ExchangeMatrix matrix_of(const ExchangeEvent& ev, int n, ModelKind kind) {
    if (n < 2 || n > 64) fail(errc::unsupported_size, "dense matrices are capped at n <= 64");
    if (ev.x < 0 || ev.x >= n || ev.y < 0 || ev.y >= n || ev.x == ev.y)
        fail(errc::index_out_of_range, "bad event pair");
    ExchangeMatrix em;
    em.n = n;
    em.kind = kind;
    em.m.assign(std::size_t(n) * std::size_t(n), 0.0);
    for (int i = 0; i < n; ++i) em.m[std::size_t(i) * std::size_t(n) + std::size_t(i)] = 1.0;
    const double X = ev.xval;
    auto set = [&](int i, int j, double v) {
        em.m[std::size_t(i) * std::size_t(n) + std::size_t(j)] = v;
    };
    switch (kind) {
        case ModelKind::SRM:  // r = [[X, 1-X], [X, 1-X]]
            set(ev.x, ev.x, X);
            set(ev.x, ev.y, 1.0 - X);
            set(ev.y, ev.x, X);
            set(ev.y, ev.y, 1.0 - X);
            break;
        case ModelKind::SEM:  // r^T = [[X, X], [1-X, 1-X]]
            set(ev.x, ev.x, X);
            set(ev.x, ev.y, X);
            set(ev.y, ev.x, 1.0 - X);
            set(ev.y, ev.y, 1.0 - X);
            break;
        case ModelKind::GAM:  // q = [[X, 1-X], [1-X, X]]
            set(ev.x, ev.x, X);
            set(ev.x, ev.y, 1.0 - X);
            set(ev.y, ev.x, 1.0 - X);
            set(ev.y, ev.y, X);
            break;
    }
    return em;
}

/// Row vector times matrix.
inline std::vector<double> apply_matrix(const std::vector<double>& row, const ExchangeMatrix& em) {
    if (int(row.size()) != em.n) fail(errc::dimension_mismatch, "row/matrix size mismatch");
    std::vector<double> out(row.size(), 0.0);
    for (int j = 0; j < em.n; ++j) {
        CompensatedSum s;
        for (int i = 0; i < em.n; ++i) s.add(row[std::size_t(i)] * em.at(i, j));
        out[std::size_t(j)] = s.value();
    }
    return out;
}

inline double total_mass(const Configuration& cfg) {
    CompensatedSum s;
    for (double v : cfg.energy) s.add(v);
    return s.value();
}

inline double average(const Configuration& cfg) { return total_mass(cfg) / double(cfg.n()); }

inline double max_entry(const Configuration& cfg) {
    double m = cfg.energy.empty() ? 0.0 : cfg.energy[0];
    for (double v : cfg.energy) m = std::max(m, v);
    return m;
}

}  // namespace excut
