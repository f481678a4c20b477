#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "excut/harness.hpp"
#include "helpers.hpp"

using namespace excut;

namespace {

const ResultRow* find_row(const ExperimentResult& r, const std::string& stat) {
    for (const auto& row : r.rows)
        if (row.statistic == stat) return &row;
    return nullptr;
}

std::string csv_without_wallclock(const ExperimentResult& r) {
    std::ostringstream os;
    write_csv(os, r);
    std::string out;
    std::istringstream is(os.str());
    std::string line;
    while (std::getline(is, line)) {
        const auto pos = line.rfind(',');
        out += line.substr(0, pos);
        out += '\n';
    }
    return out;
}

}  // namespace

TEST_CASE("constants command emits the closed-form values") {
    ExperimentConfig cfg;
    cfg.command = "constants";
    cfg.law = "beta:1";
    cfg.n = 1024;
    const auto result = run_experiment(cfg);
    REQUIRE(find_row(result, "h")->value == Catch::Approx(0.5).margin(1e-10));
    REQUIRE(find_row(result, "s2")->value == Catch::Approx(0.25).margin(1e-10));
    REQUIRE(find_row(result, "r")->value == Catch::Approx(1.0).margin(1e-9));
    const double t_ent = find_row(result, "t_ent")->value;
    REQUIRE(t_ent == Catch::Approx(1024.0 * std::log(1024.0)).margin(1e-6));
    REQUIRE(std::abs(t_ent - 7097.0) < 1.0);
    REQUIRE(find_row(result, "lambda_srm") != nullptr);
    REQUIRE(find_row(result, "stationary_n_l2") != nullptr);
}

TEST_CASE("profile command carries the closed-form targets") {
    ExperimentConfig cfg;
    cfg.command = "profile";
    cfg.model = "gam";
    cfg.law = "point-half";
    cfg.n = 4096;
    cfg.replicas = 4;  // smoke scale; the real run lives in the acceptance suite
    cfg.threads = 2;
    const auto result = run_experiment(cfg);
    REQUIRE(result.rows.size() == 10);  // 5 betas x (estimate + target)
    bool saw_center = false;
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        const auto& row = result.rows[i];
        if (row.statistic == "theorem_profile" && row.beta && *row.beta == 0.0) {
            saw_center = true;
            REQUIRE(row.value == Catch::Approx(1.0).margin(1e-14));
            REQUIRE(*row.t == 24576);
        }
    }
    REQUIRE(saw_center);
}

TEST_CASE("experiments are reproducible bit for bit") {
    ExperimentConfig cfg;
    cfg.command = "identity";
    cfg.model = "gam";
    cfg.law = "two-point:0.25";
    cfg.n = 12;
    cfg.times = {30};
    cfg.thetas = {0.25, 0.05};
    cfg.replicas = 400;
    cfg.oracle_samples = 20000;
    cfg.seed = 99;

    cfg.threads = 1;
    const auto a = run_experiment(cfg);
    cfg.threads = 2;
    const auto b = run_experiment(cfg);
    const auto c = run_experiment(cfg);

    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        REQUIRE(a.rows[i].statistic == b.rows[i].statistic);
        REQUIRE(a.rows[i].value == b.rows[i].value);  // thread count must not matter
        REQUIRE(b.rows[i].value == c.rows[i].value);
        if (a.rows[i].se) REQUIRE(*a.rows[i].se == *b.rows[i].se);
    }
    REQUIRE(csv_without_wallclock(a) == csv_without_wallclock(b));

    // Agreement z-scores between pile simulation and oracle stay small.
    for (const auto& row : a.rows)
        if (row.statistic.rfind("z@", 0) == 0) REQUIRE(row.value < 4.5);
}

TEST_CASE("csv schema is stable") {
    ExperimentConfig cfg;
    cfg.command = "constants";
    cfg.law = "discrete:0.25,0.5;0.75,0.5";
    cfg.n = 16;
    const auto result = run_experiment(cfg);
    std::ostringstream os;
    write_csv(os, result);
    std::istringstream is(os.str());
    std::string header;
    std::getline(is, header);
    REQUIRE(header ==
            "command,model,law,n,t,beta,gamma,statistic,value,stderr,bias_bound,samples,seed,"
            "wallclock_ms");
    std::string line;
    while (std::getline(is, line)) {
        // The law field is quoted (it contains commas); strip it first.
        const auto q2 = line.find('"', line.find('"') + 1);
        const std::string rest = line.substr(q2 + 1);
        REQUIRE(std::count(rest.begin(), rest.end(), ',') == 11);
    }
}

TEST_CASE("json output carries config echo and rng name") {
    ExperimentConfig cfg;
    cfg.command = "constants";
    cfg.law = "beta:2";
    cfg.n = 32;
    cfg.format = "json";
    const auto result = run_experiment(cfg);
    std::ostringstream os;
    write_json(os, result);
    const auto j = nlohmann::json::parse(os.str());
    REQUIRE(j["rng"] == "philox4x64-10");
    REQUIRE(j["config"]["law"] == "beta:2");
    REQUIRE(j["rows"].size() == result.rows.size());
}

TEST_CASE("simulate command reports conserved mass") {
    ExperimentConfig cfg;
    cfg.command = "simulate";
    cfg.model = "srm";
    cfg.law = "beta:1";
    cfg.n = 32;
    cfg.times = {10, 200};
    cfg.replicas = 200;
    cfg.threads = 2;
    const auto result = run_experiment(cfg);
    for (const auto& row : result.rows) {
        if (row.statistic == "total_mass")
            REQUIRE(row.value == Catch::Approx(1.0).margin(1e-9));
        if (row.statistic == "average")
            REQUIRE(row.value == Catch::Approx(1.0 / 32.0).margin(1e-12));
    }
}

TEST_CASE("contraction command matches the closed forms at smoke scale") {
    for (const char* model : {"srm", "sem", "gam"}) {
        ExperimentConfig cfg;
        cfg.command = "contraction";
        cfg.model = model;
        cfg.law = "beta:1";
        cfg.n = 10;
        cfg.times = {1, 10};
        cfg.replicas = 20000;
        cfg.threads = 2;
        const auto result = run_experiment(cfg);
        for (const auto& row : result.rows)
            if (row.statistic == "z") {
                INFO(model);
                REQUIRE(row.value < 4.5);
            }
    }
}

TEST_CASE("stationary command: chain versus closed forms at smoke scale") {
    ExperimentConfig cfg;
    cfg.command = "stationary";
    cfg.model = "srm";
    cfg.law = "beta:1";
    cfg.n = 10;
    cfg.replicas = 5000;
    cfg.threads = 2;
    const auto result = run_experiment(cfg);
    REQUIRE(find_row(result, "stationary_n_l2_closed_form")->value ==
            Catch::Approx(20.0 / 11.0).margin(1e-12));
    REQUIRE(find_row(result, "z")->value < 4.5);

    ExperimentConfig sem = cfg;
    sem.model = "sem";
    const auto semr = run_experiment(sem);
    const auto* mean = find_row(semr, "height_mean");
    const auto* mean_cf = find_row(semr, "height_mean_closed_form");
    REQUIRE(testutil::zscore(mean->value, *mean->se, mean_cf->value, 0.0) < 4.5);
    const auto* var = find_row(semr, "height_var");
    const auto* var_cf = find_row(semr, "height_var_closed_form");
    REQUIRE(testutil::zscore(var->value, *var->se, var_cf->value, 0.0) < 4.5);
}

TEST_CASE("piles command reports masses, oracle values, and the census") {
    ExperimentConfig cfg;
    cfg.command = "piles";
    cfg.model = "srm";
    cfg.law = "beta:1";
    cfg.n = 12;
    cfg.times = {20, 40};
    cfg.thetas = {0.3, 0.05};
    cfg.replicas = 500;
    cfg.oracle_samples = 20000;
    cfg.s_max = 4;
    cfg.threads = 2;
    const auto result = run_experiment(cfg);
    int masses = 0, oracles = 0, counts = 0;
    for (const auto& row : result.rows) {
        if (row.statistic.rfind("threshold_mass@", 0) == 0) ++masses;
        if (row.statistic.rfind("oracle_threshold_probability@", 0) == 0) ++oracles;
        if (row.statistic.rfind("pile_count@", 0) == 0) ++counts;
    }
    REQUIRE(masses == 4);
    REQUIRE(oracles == 4);
    REQUIRE(counts == 5);
    REQUIRE(find_row(*&result, "expected_pile_count_total")->value ==
            Catch::Approx(std::pow(1.0 + 2.0 / 12.0, 40.0)).margin(1e-9));
    // theta below the floor is rejected up front.
    cfg.thetas = {1e-40};
    REQUIRE_THROWS_AS(run_experiment(cfg), Error);
}

TEST_CASE("monotonicity command produces a nonincreasing curve") {
    ExperimentConfig cfg;
    cfg.command = "monotonicity";
    cfg.model = "gam";
    cfg.law = "point-half";
    cfg.n = 32;
    cfg.replicas = 200;
    cfg.threads = 2;
    const auto result = run_experiment(cfg);
    REQUIRE(result.rows.size() == 8);  // default 8-point grid
    for (std::size_t i = 1; i < result.rows.size(); ++i)
        REQUIRE(result.rows[i].value <=
                result.rows[i - 1].value +
                    4.0 * (*result.rows[i].se + *result.rows[i - 1].se) + 1e-12);
}

TEST_CASE("config file parsing") {
    const std::string path = "test_config_tmp.txt";
    {
        std::ofstream out(path);
        out << "# comment line\n";
        out << "model = gam\n";
        out << "law = beta:2   # inline comment\n";
        out << "n = 128\n";
    }
    const auto kv = parse_config_file(path);
    REQUIRE(kv.at("model") == "gam");
    REQUIRE(kv.at("law") == "beta:2");
    REQUIRE(kv.at("n") == "128");
    {
        std::ofstream out(path);
        out << "just a broken line\n";
    }
    try {
        parse_config_file(path);
        FAIL("syntax error must be reported");
    } catch (const Error& e) {
        REQUIRE(e.code() == errc::config_error);
        REQUIRE(std::string(e.what()).find("line 1") != std::string::npos);
    }
    std::remove(path.c_str());
    REQUIRE_THROWS_AS(parse_config_file("definitely_missing_file.cfg"), Error);
}

TEST_CASE("event budget rejects runaway configurations") {
    ExperimentConfig cfg;
    cfg.command = "simulate";
    cfg.model = "gam";
    cfg.law = "point-half";
    cfg.n = 16;
    cfg.times = {1000};
    cfg.replicas = 100;
    cfg.event_budget = 50000;  // 100 x 1000 exceeds it
    try {
        run_experiment(cfg);
        FAIL("expected BudgetExceeded");
    } catch (const Error& e) {
        REQUIRE(e.code() == errc::budget_exceeded);
    }
    cfg.event_budget = 200000;
    REQUIRE_NOTHROW(run_experiment(cfg));
}

TEST_CASE("config validation errors") {
    ExperimentConfig cfg;
    cfg.command = "nonsense";
    REQUIRE_THROWS_AS(run_experiment(cfg), Error);
    cfg.command = "constants";
    cfg.replicas = 0;
    REQUIRE_THROWS_AS(run_experiment(cfg), Error);
    cfg.replicas = 1;
    cfg.n = 1;
    REQUIRE_THROWS_AS(run_experiment(cfg), Error);
    cfg.n = 8;
    cfg.command = "simulate";
    cfg.times = {};
    try {
        run_experiment(cfg);
        FAIL("missing checkpoints must be a config error");
    } catch (const Error& e) {
        REQUIRE(e.code() == errc::config_error);
    }
    cfg.command = "identity";
    cfg.times = {50, 10};  // out of order
    cfg.thetas = {0.5};
    try {
        run_experiment(cfg);
        FAIL("unsorted checkpoints must be a config error");
    } catch (const Error& e) {
        REQUIRE(e.code() == errc::config_error);
    }
}
