#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "excut/observables.hpp"
#include "excut/oracle.hpp"
#include "helpers.hpp"

using namespace excut;

TEST_CASE("l1 distance to the flat configuration") {
    REQUIRE(l1_to_flat(dirac(ModelKind::GAM, 8, 3)) ==
            Catch::Approx(2.0 * (1.0 - 1.0 / 8.0)).margin(1e-15));
    REQUIRE(l1_to_flat(flat_configuration(ModelKind::GAM, 8)) == 0.0);
    RandomStream rng(3, 0);
    for (int rep = 0; rep < 50; ++rep) {
        Configuration c{ModelKind::SRM, {}, 0};
        c.energy.resize(12);
        double sum = 0.0;
        for (auto& v : c.energy) sum += (v = rng.next_open());
        for (auto& v : c.energy) v /= sum;
        const double d = l1_to_flat(c);
        REQUIRE(d >= 0.0);
        REQUIRE(d <= 2.0 * (1.0 - 1.0 / 12.0) + 1e-12);
    }
}

TEST_CASE("sorted l1 is the permutation-minimal distance") {
    Configuration a{ModelKind::SRM, {0.5, 0.3, 0.2}, 0};
    Configuration b{ModelKind::SRM, {0.2, 0.5, 0.3}, 0};
    REQUIRE(sorted_l1(a, b) == 0.0);

    const int n = 6;
    REQUIRE(sorted_l1(dirac(ModelKind::SRM, n, 2), flat_configuration(ModelKind::SRM, n)) ==
            Catch::Approx(2.0 * (1.0 - 1.0 / n)).margin(1e-15));

    Configuration bad{ModelKind::SRM, {0.1, 0.9, 0.0}, 0};
    Configuration bigger{ModelKind::SRM, {0.25, 0.25, 0.25, 0.25}, 0};
    REQUIRE_THROWS_AS(sorted_l1(bad, bigger), Error);

    SECTION("factorial brute force for n <= 7") {
        RandomStream rng(5, 0);
        for (int rep = 0; rep < 50; ++rep) {
            const int m = 2 + int(rng.next_below(6));
            Configuration u{ModelKind::SRM, {}, 0}, v{ModelKind::SRM, {}, 0};
            u.energy.resize(std::size_t(m));
            v.energy.resize(std::size_t(m));
            for (auto& e : u.energy) e = rng.next_double();
            for (auto& e : v.energy) e = rng.next_double();
            std::vector<int> perm(static_cast<std::size_t>(m));
            std::iota(perm.begin(), perm.end(), 0);
            double best = 1e300;
            do {
                double d = 0.0;
                for (int i = 0; i < m; ++i)
                    d += std::abs(u.energy[std::size_t(i)] -
                                  v.energy[std::size_t(perm[std::size_t(i)])]);
                best = std::min(best, d);
            } while (std::next_permutation(perm.begin(), perm.end()));
            REQUIRE(std::abs(sorted_l1(u, v) - best) < 1e-12);
        }
    }
    SECTION("pseudometric properties") {
        RandomStream rng(7, 0);
        for (int rep = 0; rep < 100; ++rep) {
            Configuration x{ModelKind::SRM, {}, 0}, y = x, z = x;
            x.energy.resize(9);
            y.energy.resize(9);
            z.energy.resize(9);
            for (auto& e : x.energy) e = rng.next_double();
            for (auto& e : y.energy) e = rng.next_double();
            for (auto& e : z.energy) e = rng.next_double();
            REQUIRE(sorted_l1(x, y) == sorted_l1(y, x));
            REQUIRE(sorted_l1(x, z) <= sorted_l1(x, y) + sorted_l1(y, z) + 1e-12);
        }
    }
}

TEST_CASE("canonical coupling distance") {
    const auto law = RedistributionLaw::beta(1.0);
    const Seeder seeder{404, stream_ns::replica};
    SECTION("t = 0 for the averaging model is exact and deterministic") {
        const Statistic s = canonical_coupling_distance(ModelKind::GAM, law, 64, 0, 0, 200,
                                                        seeder, Metric::Plain, 2);
        REQUIRE(s.value == Catch::Approx(2.0 * (1.0 - 1.0 / 64.0)).margin(1e-12));
        REQUIRE(s.se == Catch::Approx(0.0).margin(1e-15));
    }
    SECTION("t = 0 for the redistribution model sits at the maximal distance") {
        const int n = 32;
        const std::uint64_t horizon = default_horizon(ModelKind::SRM, n, law);
        const Statistic s = canonical_coupling_distance(ModelKind::SRM, law, n, 0, horizon,
                                                        2000, seeder, Metric::Plain, 2);
        REQUIRE(testutil::zscore(s.value, s.se, 2.0 * (1.0 - 1.0 / n), 0.0) < 4.0);
        REQUIRE(s.bias_bound < 0.01);
    }
    SECTION("plain estimate for the averaging model equals mean l1_to_flat") {
        const int n = 24;
        const std::uint64_t t = 100;
        const Statistic s = canonical_coupling_distance(ModelKind::GAM, law, n, t, 0, 500,
                                                        seeder, Metric::Plain, 2);
        RunningMoments direct;
        for (std::uint64_t rep = 0; rep < 500; ++rep) {
            RandomStream rng = seeder.make(rep);
            Configuration c = dirac(ModelKind::GAM, n, 0);
            run(c, law, t, rng);
            direct.add(l1_to_flat(c));
        }
        REQUIRE(s.value == direct.mean());  // same streams, same reduction order
    }
    SECTION("sorted never exceeds plain; equal for the flat-limit models") {
        const int n = 16;
        const std::vector<std::uint64_t> ts{0, 60, 200};
        for (ModelKind m : {ModelKind::SRM, ModelKind::SEM, ModelKind::GAM}) {
            const std::uint64_t horizon = default_horizon(m, n, law);
            const auto plain =
                distance_curve(m, law, n, ts, horizon, 400, seeder, Metric::Plain, 2);
            const auto sorted =
                distance_curve(m, law, n, ts, horizon, 400, seeder, Metric::Sorted, 2);
            for (std::size_t g = 0; g < ts.size(); ++g) {
                REQUIRE(sorted[g].value <= plain[g].value + 1e-12);
                if (m != ModelKind::SRM)
                    REQUIRE(sorted[g].value == Catch::Approx(plain[g].value).margin(1e-12));
            }
        }
    }
}

TEST_CASE("monotone distance curve for the averaging model") {
    const auto law = RedistributionLaw::point_half();
    const auto k = law.entropic_constants();
    const int n = 64;
    const auto sched = schedule(n, k);
    // Grid up to 4 t_ent: at n = 64 the L2 envelope sqrt(n (1-lambda)^t) only
    // becomes negligible well past 2 t_ent.
    std::vector<std::uint64_t> ts;
    for (int i = 0; i < 7; ++i)
        ts.push_back(std::uint64_t(std::llround(4.0 * sched.t_ent * double(i) / 6.0)));
    const Seeder seeder{505, stream_ns::replica};
    const auto curve = monotonicity_curve(ModelKind::GAM, law, n, ts, 2000, seeder,
                                          Metric::Plain, 2);
    for (std::size_t i = 1; i < curve.size(); ++i)
        REQUIRE(curve[i].value <=
                curve[i - 1].value + 4.0 * (curve[i].se + curve[i - 1].se));
    REQUIRE(curve.front().value == Catch::Approx(2.0 * (1.0 - 1.0 / n)).margin(1e-12));
    REQUIRE(curve.back().value < 0.06);
}

TEST_CASE("pile mass curve agrees with the exact oracle") {
    const auto law = RedistributionLaw::two_point(0.25);
    const int n = 20;
    const std::vector<std::uint64_t> ts{50};
    const std::vector<double> thetas{0.02, 0.2};
    const Seeder seeder{606, stream_ns::replica};
    const auto curve =
        pile_mass_curve(ModelKind::SRM, law, n, ts, thetas, std::log(0.02), 4000, seeder, 2);
    for (std::size_t j = 0; j < thetas.size(); ++j) {
        OracleSpec spec{50, n, thetas[j], law, 1};
        const auto exact = threshold_probability_exact(spec);
        REQUIRE(exact.has_value());
        INFO("theta = " << thetas[j]);
        REQUIRE(testutil::zscore(curve[0][j].value, curve[0][j].se, exact->value, exact->se) <
                4.5);
    }
}

TEST_CASE("update census runner matches the direct loop") {
    const auto law = RedistributionLaw::beta(1.0);
    const Seeder seeder{707, stream_ns::replica};
    const auto census =
        pile_count_census(ModelKind::SRM, law, 10, 30, 4, -60.0, 300, seeder, 2);
    REQUIRE(census.total.count() == 300);
    // Replica 0 recomputed by hand must match the census slot exactly.
    PileSet ps(ModelKind::SRM, 10, 0);
    RandomStream rng = seeder.make(0);
    while (ps.step() < 30) ps.advance(law, rng);
    const auto hist = ps.counts_by_updates();
    double total = 0.0;
    for (const auto& [s, c] : hist) total += double(c);
    REQUIRE(total == double(ps.live_piles()));
}

TEST_CASE("lower-bound diagnostic stays below twice the pile mass") {
    REQUIRE(w1_lower_bound_diagnostic(0.5, 2.0, 1.8) ==
            Catch::Approx(1.0 - 2.0 * std::sqrt(std::exp(-2.0) * 1.8)).margin(1e-15));
}
