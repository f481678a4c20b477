#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "excut/dynamics.hpp"
#include "excut/equilibrium.hpp"
#include "excut/errors.hpp"
#include "excut/laws.hpp"
#include "excut/observables.hpp"
#include "excut/oracle.hpp"
#include "excut/parallel.hpp"
#include "excut/piles.hpp"
#include "excut/special.hpp"

namespace excut {

constexpr const char* kRngAlgorithm = "philox4x64-10";

struct ExperimentConfig {
    std::string command;
    std::string model = "srm";
    std::string law = "beta:1";
    int n = 64;
    std::vector<std::uint64_t> times;
    std::vector<double> betas{-2.0, -1.0, 0.0, 1.0, 2.0};
    double gamma = 0.3;
    std::vector<double> thetas;
    std::uint64_t replicas = 1000;
    std::uint64_t seed = 1;
    std::string out;                  // empty: stdout
    std::string format = "csv";      // csv | json
    int threads = 0;                  // 0: hardware concurrency
    std::uint64_t oracle_samples = 1'000'000;
    double floor_log = -60.0;
    std::uint32_t s_max = 10;
    std::optional<std::uint64_t> burn;
    std::optional<std::uint64_t> horizon;
    std::string profile_kind = "distance";  // distance | piles | both
    std::string metric = "plain";           // plain | sorted
    std::uint64_t event_budget = 100'000'000'000;  // replicas x steps ceiling
};

namespace detail {

inline Metric parse_metric(const std::string& name) {
    if (name == "plain") return Metric::Plain;
    if (name == "sorted") return Metric::Sorted;
    fail(errc::config_error, "metric must be plain or sorted");
}

/// Replica experiments refuse configurations whose total event count would
/// run away; callers raise the budget knowingly instead of hanging.
inline void check_event_budget(const ExperimentConfig& cfg, std::uint64_t steps_per_replica) {
    if (cfg.replicas != 0 && steps_per_replica > cfg.event_budget / cfg.replicas)
        fail(errc::budget_exceeded,
             "replicas x steps exceeds the event budget (" +
                 std::to_string(cfg.replicas) + " x " + std::to_string(steps_per_replica) +
                 " > " + std::to_string(cfg.event_budget) + "); raise --event-budget");
}

}  // namespace detail

struct ResultRow {
    std::string statistic;
    double value = 0.0;
    std::optional<double> se;
    std::optional<double> bias_bound;
    std::optional<std::uint64_t> t;
    std::optional<double> beta;
    std::optional<double> gamma;
    std::optional<std::uint64_t> samples;
    std::int64_t wallclock_ms = 0;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<ResultRow> rows;
};

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\";\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

class RowBuilder {
public:
    RowBuilder(ExperimentResult& result)
        : result_(result), start_(std::chrono::steady_clock::now()) {}

    ResultRow& add(const std::string& statistic, double value) {
        ResultRow row;
        row.statistic = statistic;
        row.value = value;
        row.wallclock_ms = elapsed_ms();
        result_.rows.push_back(std::move(row));
        return result_.rows.back();
    }

    ResultRow& add_stat(const Statistic& s, std::string name = {}) {
        ResultRow& row = add(name.empty() ? s.name : std::move(name), s.value);
        if (!s.exact) row.se = s.se;
        if (s.bias_bound > 0.0) row.bias_bound = s.bias_bound;
        if (s.samples > 0) row.samples = s.samples;
        return row;
    }

    std::int64_t elapsed_ms() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    ExperimentResult& result_;
    std::chrono::steady_clock::time_point start_;
};

inline double zscore(double a, double sa, double b, double sb) {
    const double denom = std::sqrt(sa * sa + sb * sb);
    const double diff = std::abs(a - b);
    if (denom == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return diff / denom;
}

}  // namespace detail

/// Geometric 6-point default threshold grid on [e^-8, 1].
inline std::vector<double> default_theta_grid() {
    std::vector<double> thetas;
    for (int j = 0; j < 6; ++j) thetas.push_back(std::exp(-8.0 * double(5 - j) / 5.0));
    return thetas;
}

namespace commands {

inline void constants(const ExperimentConfig& cfg, detail::RowBuilder& rows) {
    const RedistributionLaw law = parse_law(cfg.law);
    const EntropicConstants k = law.entropic_constants();
    rows.add("h", k.h);
    rows.add("s2", k.s2);
    rows.add("r", k.r);
    rows.add("ex2", k.ex2);
    const ContractionRates cr = rates(cfg.n, law);
    rows.add("lambda_srm", cr.lambda_srm);
    rows.add("lambda_gam", cr.lambda_gam);
    rows.add("lambda_sem", cr.lambda_sem);
    const CutoffSchedule sched = schedule(cfg.n, k);
    rows.add("t_ent", sched.t_ent);
    rows.add("t_w", sched.t_w);
    const StationaryMoment sm = stationary_second_moment(cfg.n, law);
    rows.add("stationary_n_l2", sm.value);
    rows.add("stationary_n_l2_limit", sm.limit);
}

inline void simulate(const ExperimentConfig& cfg, detail::RowBuilder& rows) {
    const RedistributionLaw law = parse_law(cfg.law);
    const ModelKind model = parse_model(cfg.model);
    std::vector<std::uint64_t> ts = cfg.times;
    if (ts.empty()) fail(errc::config_error, "simulate needs --t checkpoints");
    if (!std::is_sorted(ts.begin(), ts.end()))
        fail(errc::config_error, "checkpoints must be nondecreasing");
    detail::check_event_budget(cfg, ts.back());
    const std::size_t grid = ts.size();
    enum { kMass, kMax, kAvg, kL1, kStats };
    std::vector<std::vector<std::vector<double>>> vals(
        kStats, std::vector<std::vector<double>>(grid, std::vector<double>(cfg.replicas)));
    Seeder seeder{cfg.seed, stream_ns::replica};
    for_each_replica(cfg.replicas, cfg.threads, [&](std::uint64_t rep) {
        RandomStream rng = seeder.make(rep);
        Configuration c = dirac(model, cfg.n, 0);
        for (std::size_t g = 0; g < grid; ++g) {
            run(c, law, ts[g] - c.step, rng);
            vals[kMass][g][rep] = total_mass(c);
            vals[kMax][g][rep] = max_entry(c);
            vals[kAvg][g][rep] = average(c);
            vals[kL1][g][rep] = l1_to_flat(c);
        }
    });
    const char* names[kStats] = {"total_mass", "max_entry", "average", "l1_to_flat"};
    for (std::size_t g = 0; g < grid; ++g) {
        for (int s = 0; s < kStats; ++s) {
            RunningMoments acc;
            for (std::uint64_t r = 0; r < cfg.replicas; ++r) acc.add(vals[s][g][r]);
            ResultRow& row = rows.add(names[s], acc.mean());
            row.t = ts[g];
            row.se = acc.stderr_mean();
            row.samples = cfg.replicas;
        }
    }
}

inline void piles(const ExperimentConfig& cfg, detail::RowBuilder& rows) {
    const RedistributionLaw law = parse_law(cfg.law);
    const ModelKind model = parse_model(cfg.model);
    std::vector<std::uint64_t> ts = cfg.times;
    if (ts.empty()) fail(errc::config_error, "piles needs --t checkpoints");
    if (!std::is_sorted(ts.begin(), ts.end()))
        fail(errc::config_error, "checkpoints must be nondecreasing");
    std::vector<double> thetas = cfg.thetas.empty() ? default_theta_grid() : cfg.thetas;
    for (double th : thetas)
        if (std::log(th) < cfg.floor_log)
            fail(errc::config_error, "theta grid reaches below the discard floor");
    detail::check_event_budget(cfg, 2 * ts.back());  // mass curve plus census pass

    Seeder seeder{cfg.seed, stream_ns::replica};
    const auto curve = pile_mass_curve(model, law, cfg.n, ts, thetas, cfg.floor_log,
                                       cfg.replicas, seeder, cfg.threads);
    RandomStream oracle_rng(cfg.seed, stream_ns::oracle);
    for (std::size_t g = 0; g < ts.size(); ++g) {
        for (std::size_t j = 0; j < thetas.size(); ++j) {
            // theta rides in the statistic name; the schema keeps a fixed column set.
            const std::string tag = "@theta=" + detail::format_double(thetas[j]);
            ResultRow& row = rows.add_stat(curve[g][j], "threshold_mass" + tag);
            row.t = ts[g];
            OracleSpec spec{ts[g], cfg.n, thetas[j], law, cfg.oracle_samples};
            const OracleEstimate oe = threshold_probability(spec, oracle_rng);
            ResultRow& orow = rows.add("oracle_threshold_probability" + tag, oe.value);
            orow.t = ts[g];
            orow.se = oe.se;
            orow.samples = oe.samples;
        }
    }
    // Update-count census at the final checkpoint against 2^s P(T=s).
    const PileCounts census = pile_count_census(model, law, cfg.n, ts.back(), cfg.s_max,
                                                cfg.floor_log, cfg.replicas, seeder, cfg.threads);
    const double p = 2.0 / double(cfg.n);
    for (std::uint32_t s = 0; s <= cfg.s_max; ++s) {
        ResultRow& row = rows.add("pile_count@s=" + std::to_string(s),
                                  census.per_updates[s].mean());
        row.t = ts.back();
        row.se = census.per_updates[s].stderr_mean();
        row.samples = cfg.replicas;
        ResultRow& erow = rows.add("expected_pile_count@s=" + std::to_string(s),
                                   std::pow(2.0, double(s)) * binomial_pmf(ts.back(), p, s));
        erow.t = ts.back();
    }
    ResultRow& trow = rows.add("pile_count_total", census.total.mean());
    trow.t = ts.back();
    trow.se = census.total.stderr_mean();
    trow.samples = cfg.replicas;
    ResultRow& erow = rows.add("expected_pile_count_total",
                               std::pow(1.0 + p, double(ts.back())));
    erow.t = ts.back();
}

inline void identity(const ExperimentConfig& cfg, detail::RowBuilder& rows) {
    const RedistributionLaw law = parse_law(cfg.law);
    const ModelKind model = parse_model(cfg.model);
    std::vector<std::uint64_t> ts = cfg.times;
    if (ts.empty()) fail(errc::config_error, "identity needs --t checkpoints");
    if (!std::is_sorted(ts.begin(), ts.end()))
        fail(errc::config_error, "checkpoints must be nondecreasing");
    std::vector<double> thetas = cfg.thetas.empty() ? default_theta_grid() : cfg.thetas;
    detail::check_event_budget(cfg, ts.back());
    // The discard floor sits exactly at the smallest threshold: children that
    // can never qualify are dropped, which keeps the run cheap without
    // touching any reported mass.
    double floor_log = 0.0;
    for (double th : thetas) floor_log = std::min(floor_log, std::log(th));

    Seeder seeder{cfg.seed, stream_ns::replica};
    const auto curve = pile_mass_curve(model, law, cfg.n, ts, thetas, floor_log, cfg.replicas,
                                       seeder, cfg.threads);
    RandomStream oracle_rng(cfg.seed, stream_ns::oracle);
    for (std::size_t g = 0; g < ts.size(); ++g) {
        for (std::size_t j = 0; j < thetas.size(); ++j) {
            const std::string tag = "@theta=" + detail::format_double(thetas[j]);
            ResultRow& prow = rows.add("pile_mean" + tag, curve[g][j].value);
            prow.t = ts[g];
            prow.se = curve[g][j].se;
            prow.samples = curve[g][j].samples;
            OracleSpec spec{ts[g], cfg.n, thetas[j], law, cfg.oracle_samples};
            const OracleEstimate oe = threshold_probability(spec, oracle_rng);
            ResultRow& orow = rows.add("oracle_mean" + tag, oe.value);
            orow.t = ts[g];
            orow.se = oe.se;
            orow.samples = oe.samples;
            ResultRow& zrow = rows.add(
                "z" + tag, detail::zscore(curve[g][j].value, curve[g][j].se, oe.value, oe.se));
            zrow.t = ts[g];
        }
    }
}

inline void contraction(const ExperimentConfig& cfg, detail::RowBuilder& rows) {
    const RedistributionLaw law = parse_law(cfg.law);
    const ModelKind model = parse_model(cfg.model);
    std::vector<std::uint64_t> ts = cfg.times;
    if (ts.empty()) fail(errc::config_error, "contraction needs --t checkpoints");
    if (!std::is_sorted(ts.begin(), ts.end()))
        fail(errc::config_error, "checkpoints must be nondecreasing");
    detail::check_event_budget(cfg, 2 * ts.back());  // two coupled chains
    const std::size_t grid = ts.size();
    std::vector<std::vector<double>> vals(grid, std::vector<double>(cfg.replicas, 0.0));
    Seeder seeder{cfg.seed, stream_ns::replica};
    const int n = cfg.n;

    for_each_replica(cfg.replicas, cfg.threads, [&](std::uint64_t rep) {
        RandomStream rng = seeder.make(rep);
        Configuration a = dirac(model, n, 0);
        Configuration b = flat_configuration(model, n);
        for (std::size_t g = 0; g < grid; ++g) {
            while (a.step < ts[g]) {
                const ExchangeEvent ev = draw_event(n, law, rng);
                step(a, ev);
                if (model == ModelKind::SRM) {
                    ExchangeEvent evb = ev;
                    step(b, evb);
                }
            }
            CompensatedSum sq;
            if (model == ModelKind::SEM) {
                const double avg = average(a);
                for (double v : a.energy) sq.add((v - avg) * (v - avg));
            } else if (model == ModelKind::SRM) {
                for (std::size_t i = 0; i < a.energy.size(); ++i) {
                    const double d = a.energy[i] - b.energy[i];
                    sq.add(d * d);
                }
            } else {
                const double u = 1.0 / double(n);
                for (double v : a.energy) sq.add((v - u) * (v - u));
            }
            vals[g][rep] = sq.value();
        }
    });

    const ContractionRates cr = rates(n, law);
    const double lambda = cr.of(model);
    const double start_sq = 1.0 - 1.0 / double(n);
    for (std::size_t g = 0; g < grid; ++g) {
        RunningMoments acc;
        for (std::uint64_t r = 0; r < cfg.replicas; ++r) acc.add(vals[g][r]);
        ResultRow& row = rows.add("mean_square_gap", acc.mean());
        row.t = ts[g];
        row.se = acc.stderr_mean();
        row.samples = cfg.replicas;
        const double closed = std::pow(1.0 - lambda, double(ts[g])) * start_sq;
        ResultRow& crow = rows.add("closed_form_gap", closed);
        crow.t = ts[g];
        ResultRow& zrow = rows.add("z", detail::zscore(acc.mean(), acc.stderr_mean(), closed, 0.0));
        zrow.t = ts[g];
    }
}

inline void stationary(const ExperimentConfig& cfg, detail::RowBuilder& rows) {
    const RedistributionLaw law = parse_law(cfg.law);
    const ModelKind model = parse_model(cfg.model);
    const int n = cfg.n;
    const std::uint64_t burn = cfg.burn.value_or(default_burn(n));
    detail::check_event_budget(cfg, burn);
    Seeder seeder{cfg.seed, stream_ns::replica};

    if (model == ModelKind::SEM) {
        // Flat-height moments from the long-run chain (Dirac start).
        std::vector<double> heights(cfg.replicas, 0.0);
        for_each_replica(cfg.replicas, cfg.threads, [&](std::uint64_t rep) {
            RandomStream rng = seeder.make(rep);
            const Configuration c = sample_stationary_longrun(model, n, law, rng, burn);
            heights[rep] = average(c);
        });
        RunningMoments acc;
        for (double h : heights) acc.add(h);
        ResultRow& m = rows.add("height_mean", acc.mean());
        m.se = acc.stderr_mean();
        m.samples = cfg.replicas;
        ResultRow& v = rows.add("height_var", acc.variance());
        v.se = acc.stderr_variance();
        v.samples = cfg.replicas;
        if (law.kind() == LawKind::BetaSymmetric) {
            const double a = law.beta_alpha(), b = law.beta_alpha() * double(n - 1);
            rows.add("height_mean_closed_form", a / (a + b));
            rows.add("height_var_closed_form", a * b / ((a + b) * (a + b) * (a + b + 1.0)));
        }
        return;
    }

    // SRM / GAM: n ||eta||_2^2 against the closed form.
    std::vector<double> nl2(cfg.replicas, 0.0);
    for_each_replica(cfg.replicas, cfg.threads, [&](std::uint64_t rep) {
        RandomStream rng = seeder.make(rep);
        const Configuration c = sample_stationary_longrun(model, n, law, rng, burn);
        CompensatedSum sq;
        for (double e : c.energy) sq.add(e * e);
        nl2[rep] = double(n) * sq.value();
    });
    RunningMoments acc;
    for (double v : nl2) acc.add(v);
    ResultRow& row = rows.add("stationary_n_l2", acc.mean());
    row.se = acc.stderr_mean();
    row.samples = cfg.replicas;
    if (model == ModelKind::SRM) {
        const StationaryMoment sm = stationary_second_moment(n, law);
        rows.add("stationary_n_l2_closed_form", sm.value);
        ResultRow& zrow =
            rows.add("z", detail::zscore(acc.mean(), acc.stderr_mean(), sm.value, 0.0));
        zrow.samples = cfg.replicas;
    } else {
        rows.add("stationary_n_l2_closed_form", 1.0);
    }
}

inline void profile(const ExperimentConfig& cfg, detail::RowBuilder& rows) {
    const RedistributionLaw law = parse_law(cfg.law);
    const ModelKind model = parse_model(cfg.model);
    const EntropicConstants k = law.entropic_constants();
    const CutoffSchedule sched = schedule(cfg.n, k);
    if (cfg.betas.empty()) fail(errc::config_error, "profile needs a beta grid");
    std::vector<double> betas = cfg.betas;
    std::sort(betas.begin(), betas.end());
    std::vector<std::uint64_t> ts;
    for (double b : betas) ts.push_back(profile_time(sched, b));
    // Duplicate rounded times are legal for distance_curve (nondecreasing).
    const bool want_distance = cfg.profile_kind == "distance" || cfg.profile_kind == "both";
    const bool want_piles = cfg.profile_kind == "piles" || cfg.profile_kind == "both";
    if (!want_distance && !want_piles)
        fail(errc::config_error, "profile kind must be distance, piles, or both");

    if (want_distance) {
        Seeder seeder{cfg.seed, stream_ns::replica};
        const std::uint64_t horizon =
            cfg.horizon.value_or(default_horizon(model, cfg.n, law));
        detail::check_event_budget(cfg, ts.back() + horizon);
        const auto curve = distance_curve(model, law, cfg.n, ts, horizon, cfg.replicas, seeder,
                                          detail::parse_metric(cfg.metric), cfg.threads);
        for (std::size_t i = 0; i < betas.size(); ++i) {
            ResultRow& row = rows.add_stat(curve[i]);
            row.t = ts[i];
            row.beta = betas[i];
            const double target = theorem_profile(betas[i], k);
            ResultRow& trow = rows.add("theorem_profile", target);
            trow.t = ts[i];
            trow.beta = betas[i];
        }
    }
    if (want_piles) {
        Seeder seeder{cfg.seed, stream_ns::sampler};
        detail::check_event_budget(cfg, ts.back());
        const ThresholdSpec spec = make_threshold(cfg.gamma, cfg.n, k);
        const auto curve = pile_mass_curve(model, law, cfg.n, ts, {spec.theta},
                                           std::log(spec.theta), cfg.replicas, seeder,
                                           cfg.threads);
        const double nl2 = stationary_second_moment(cfg.n, law).value;
        for (std::size_t i = 0; i < betas.size(); ++i) {
            ResultRow& row = rows.add_stat(curve[i][0], "large_pile_mass");
            row.t = ts[i];
            row.beta = betas[i];
            row.gamma = cfg.gamma;
            const double target = clt_profile(betas[i], cfg.gamma, k);
            ResultRow& trow = rows.add("clt_profile", target);
            trow.t = ts[i];
            trow.beta = betas[i];
            trow.gamma = cfg.gamma;
            ResultRow& lrow = rows.add(
                "w1_lower_bound",
                w1_lower_bound_diagnostic(curve[i][0].value, spec.psi, nl2));
            lrow.t = ts[i];
            lrow.beta = betas[i];
            lrow.gamma = cfg.gamma;
        }
    }
}

inline void monotonicity(const ExperimentConfig& cfg, detail::RowBuilder& rows) {
    const RedistributionLaw law = parse_law(cfg.law);
    const ModelKind model = parse_model(cfg.model);
    const EntropicConstants k = law.entropic_constants();
    std::vector<std::uint64_t> ts = cfg.times;
    if (ts.empty()) {
        const CutoffSchedule sched = schedule(cfg.n, k);
        for (int i = 0; i < 8; ++i)
            ts.push_back(std::uint64_t(std::llround(2.0 * sched.t_ent * double(i) / 7.0)));
    }
    if (!std::is_sorted(ts.begin(), ts.end()))
        fail(errc::config_error, "time grid must be nondecreasing");
    detail::check_event_budget(cfg, ts.back() + default_horizon(model, cfg.n, law));
    Seeder seeder{cfg.seed, stream_ns::replica};
    const auto curve =
        monotonicity_curve(model, law, cfg.n, ts, cfg.replicas, seeder,
                           detail::parse_metric(cfg.metric), cfg.threads);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        ResultRow& row = rows.add_stat(curve[i]);
        row.t = ts[i];
    }
}

}  // namespace commands

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    if (cfg.replicas < 1) fail(errc::config_error, "replicas must be >= 1");
    if (cfg.n < 2) fail(errc::config_error, "n must be >= 2");
    ExperimentResult result;
    result.config = cfg;
    detail::RowBuilder rows(result);
    if (cfg.command == "constants")
        commands::constants(cfg, rows);
    else if (cfg.command == "simulate")
        commands::simulate(cfg, rows);
    else if (cfg.command == "piles")
        commands::piles(cfg, rows);
    else if (cfg.command == "identity")
        commands::identity(cfg, rows);
    else if (cfg.command == "contraction")
        commands::contraction(cfg, rows);
    else if (cfg.command == "stationary")
        commands::stationary(cfg, rows);
    else if (cfg.command == "profile")
        commands::profile(cfg, rows);
    else if (cfg.command == "monotonicity")
        commands::monotonicity(cfg, rows);
    else
        fail(errc::config_error, "unknown command: " + cfg.command);
    return result;
}

inline constexpr const char* kCsvHeader =
    "command,model,law,n,t,beta,gamma,statistic,value,stderr,bias_bound,samples,seed,"
    "wallclock_ms";

inline void write_csv(std::ostream& os, const ExperimentResult& result) {
    os << kCsvHeader << "\n";
    const auto& cfg = result.config;
    for (const auto& row : result.rows) {
        os << cfg.command << ',' << cfg.model << ',' << detail::csv_escape(cfg.law) << ','
           << cfg.n << ',';
        if (row.t) os << *row.t;
        os << ',';
        if (row.beta) os << detail::format_double(*row.beta);
        os << ',';
        if (row.gamma) os << detail::format_double(*row.gamma);
        os << ',' << detail::csv_escape(row.statistic) << ',' << detail::format_double(row.value)
           << ',';
        if (row.se) os << detail::format_double(*row.se);
        os << ',';
        if (row.bias_bound) os << detail::format_double(*row.bias_bound);
        os << ',';
        if (row.samples) os << *row.samples;
        os << ',' << cfg.seed << ',' << row.wallclock_ms << "\n";
    }
}

inline void write_json(std::ostream& os, const ExperimentResult& result) {
    nlohmann::ordered_json j;
    const auto& cfg = result.config;
    nlohmann::ordered_json jc;
    jc["command"] = cfg.command;
    jc["model"] = cfg.model;
    jc["law"] = cfg.law;
    jc["n"] = cfg.n;
    jc["t"] = cfg.times;
    jc["beta"] = cfg.betas;
    jc["gamma"] = cfg.gamma;
    jc["thetas"] = cfg.thetas;
    jc["replicas"] = cfg.replicas;
    jc["seed"] = cfg.seed;
    jc["format"] = cfg.format;
    jc["threads"] = cfg.threads;
    jc["oracle_samples"] = cfg.oracle_samples;
    jc["floor_log"] = cfg.floor_log;
    jc["s_max"] = cfg.s_max;
    if (cfg.burn) jc["burn"] = *cfg.burn;
    if (cfg.horizon) jc["horizon"] = *cfg.horizon;
    jc["profile_kind"] = cfg.profile_kind;
    jc["metric"] = cfg.metric;
    jc["event_budget"] = cfg.event_budget;
    j["config"] = jc;
    j["rng"] = kRngAlgorithm;
    nlohmann::ordered_json jrows = nlohmann::ordered_json::array();
    for (const auto& row : result.rows) {
        nlohmann::ordered_json jr;
        jr["statistic"] = row.statistic;
        jr["value"] = row.value;
        if (row.t) jr["t"] = *row.t;
        if (row.beta) jr["beta"] = *row.beta;
        if (row.gamma) jr["gamma"] = *row.gamma;
        if (row.se) jr["stderr"] = *row.se;
        if (row.bias_bound) jr["bias_bound"] = *row.bias_bound;
        if (row.samples) jr["samples"] = *row.samples;
        jr["wallclock_ms"] = row.wallclock_ms;
        jrows.push_back(std::move(jr));
    }
    j["rows"] = std::move(jrows);
    os << j.dump(2) << "\n";
}

/// Plain `key = value` config text; '#' starts a comment.
inline std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(errc::io_error, "cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(errc::config_error,
                 "config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            fail(errc::config_error, "config line " + std::to_string(lineno) + ": empty key");
        kv[key] = value;
    }
    return kv;
}

}  // namespace excut
