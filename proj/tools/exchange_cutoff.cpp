// Command-line front end: runs one experiment command and emits CSV or JSON.
//
//   exchange-cutoff <command> --model srm|sem|gam --law <spec> --n <int>
//                   --t <list> | --beta <list> --gamma <real>
//                   --replicas <int> --seed <u64> --out <path>
//                   --format csv|json [--config <path>]
//
// Exit codes: 0 success, 2 config error, 3 budget exceeded, 4 I/O error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "excut/excut.hpp"

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t end = std::min(s.find(sep, start), s.size());
        out.push_back(s.substr(start, end - start));
        if (end == s.size()) break;
        start = end + 1;
    }
    return out;
}

std::vector<std::uint64_t> parse_u64_list(const std::string& s) {
    std::vector<std::uint64_t> out;
    for (const auto& tok : split(s, ',')) {
        try {
            out.push_back(std::stoull(tok));
        } catch (...) {
            excut::fail(excut::errc::config_error, "bad integer in list: " + tok);
        }
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    for (const auto& tok : split(s, ',')) {
        try {
            out.push_back(std::stod(tok));
        } catch (...) {
            excut::fail(excut::errc::config_error, "bad number in list: " + tok);
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mean-field exchange models: cutoff and exact-identity experiments"};
    app.get_formatter()->column_width(30);

    std::string command, config_path;
    std::string model, law, out, format, profile_kind, metric, times_s, betas_s, thetas_s;
    int n = 0, threads = 0;
    double gamma = 0.0, floor_log = 0.0;
    std::uint64_t replicas = 0, seed = 0, oracle_samples = 0, burn = 0, horizon = 0,
                  event_budget = 0;
    unsigned s_max = 0;

    app.add_option("command", command,
                   "constants|simulate|piles|identity|contraction|stationary|profile|"
                   "monotonicity")
        ->required();
    app.add_option("--config", config_path, "key = value config file (flags override it)");
    app.add_option("--model", model, "srm|sem|gam");
    app.add_option("--law", law, "point-half | beta:A | two-point:A | discrete:x,w;...");
    app.add_option("--n", n, "particle count");
    app.add_option("--t", times_s, "comma-separated checkpoint times");
    app.add_option("--beta", betas_s, "comma-separated beta grid");
    app.add_option("--gamma", gamma, "threshold parameter gamma");
    app.add_option("--thetas", thetas_s, "comma-separated threshold grid");
    app.add_option("--replicas", replicas, "independent replicas");
    app.add_option("--seed", seed, "master seed (philox4x64-10 streams)");
    app.add_option("--out", out, "output path (default stdout)");
    app.add_option("--format", format, "csv|json");
    app.add_option("--threads", threads, "worker threads (default: hardware)");
    app.add_option("--oracle-samples", oracle_samples, "oracle Monte Carlo budget");
    app.add_option("--floor-log", floor_log, "pile discard floor (log scale)");
    app.add_option("--s-max", s_max, "largest update count in the pile census");
    app.add_option("--burn", burn, "burn-in steps for long-run equilibrium sampling");
    app.add_option("--horizon", horizon, "coupling horizon steps");
    app.add_option("--profile-kind", profile_kind, "distance|piles|both");
    app.add_option("--event-budget", event_budget, "ceiling on replicas x steps");
    app.add_option("--metric", metric, "plain|sorted distance for profile/monotonicity");

    CLI11_PARSE(app, argc, argv);

    try {
        excut::ExperimentConfig cfg;
        cfg.command = command;
        if (!config_path.empty()) {
            for (const auto& [key, value] : excut::parse_config_file(config_path)) {
                if (key == "model") cfg.model = value;
                else if (key == "law") cfg.law = value;
                else if (key == "n") cfg.n = std::stoi(value);
                else if (key == "t") cfg.times = parse_u64_list(value);
                else if (key == "beta") cfg.betas = parse_double_list(value);
                else if (key == "gamma") cfg.gamma = std::stod(value);
                else if (key == "thetas") cfg.thetas = parse_double_list(value);
                else if (key == "replicas") cfg.replicas = std::stoull(value);
                else if (key == "seed") cfg.seed = std::stoull(value);
                else if (key == "out") cfg.out = value;
                else if (key == "format") cfg.format = value;
                else if (key == "threads") cfg.threads = std::stoi(value);
                else if (key == "oracle-samples") cfg.oracle_samples = std::stoull(value);
                else if (key == "floor-log") cfg.floor_log = std::stod(value);
                else if (key == "s-max") cfg.s_max = std::uint32_t(std::stoul(value));
                else if (key == "burn") cfg.burn = std::stoull(value);
                else if (key == "horizon") cfg.horizon = std::stoull(value);
                else if (key == "profile-kind") cfg.profile_kind = value;
                else if (key == "event-budget") cfg.event_budget = std::stoull(value);
                else if (key == "metric") cfg.metric = value;
                else
                    excut::fail(excut::errc::config_error, "unknown config key: " + key);
            }
        }
        if (app.count("--model")) cfg.model = model;
        if (app.count("--law")) cfg.law = law;
        if (app.count("--n")) cfg.n = n;
        if (app.count("--t")) cfg.times = parse_u64_list(times_s);
        if (app.count("--beta")) cfg.betas = parse_double_list(betas_s);
        if (app.count("--gamma")) cfg.gamma = gamma;
        if (app.count("--thetas")) cfg.thetas = parse_double_list(thetas_s);
        if (app.count("--replicas")) cfg.replicas = replicas;
        if (app.count("--seed")) cfg.seed = seed;
        if (app.count("--out")) cfg.out = out;
        if (app.count("--format")) cfg.format = format;
        if (app.count("--threads")) cfg.threads = threads;
        if (app.count("--oracle-samples")) cfg.oracle_samples = oracle_samples;
        if (app.count("--floor-log")) cfg.floor_log = floor_log;
        if (app.count("--s-max")) cfg.s_max = s_max;
        if (app.count("--burn")) cfg.burn = burn;
        if (app.count("--horizon")) cfg.horizon = horizon;
        if (app.count("--profile-kind")) cfg.profile_kind = profile_kind;
        if (app.count("--event-budget")) cfg.event_budget = event_budget;
        if (app.count("--metric")) cfg.metric = metric;
        if (cfg.format != "csv" && cfg.format != "json")
            excut::fail(excut::errc::config_error, "format must be csv or json");

        const excut::ExperimentResult result = excut::run_experiment(cfg);

        std::ofstream file;
        std::ostream* os = &std::cout;
        if (!cfg.out.empty()) {
            file.open(cfg.out, std::ios::binary);
            if (!file) excut::fail(excut::errc::io_error, "cannot open output: " + cfg.out);
            os = &file;
        }
        if (cfg.format == "json")
            excut::write_json(*os, result);
        else
            excut::write_csv(*os, result);
        os->flush();
        if (!*os) excut::fail(excut::errc::io_error, "write failed");
        return 0;
    } catch (const excut::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.code()) {
            case excut::errc::budget_exceeded:
            case excut::errc::cap_exceeded: return 3;
            case excut::errc::io_error: return 4;
            default: return 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
