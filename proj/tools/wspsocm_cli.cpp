// SPDX-License-Identifier: Apache-2.0
//
// Operator CLI. Links the C API only; every optimizer call goes through
// the shared library exactly as an external embedder's would.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wspsocm.h"

namespace {

using ScenarioPtr = std::unique_ptr<wspsocm_scenario, decltype(&wspsocm_scenario_free)>;
using MapPtr = std::unique_ptr<wspsocm_radio_map, decltype(&wspsocm_radio_map_free)>;
using ResultPtr = std::unique_ptr<wspsocm_result, decltype(&wspsocm_result_free)>;

std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

int fail(wspsocm_status status) {
    std::cerr << "error: " << wspsocm_last_error() << "\n";
    return static_cast<int>(status);
}

int fail_usage(const std::string& message) {
    std::cerr << "error: " << message << "\n";
    return 1;
}

int fail_io(const std::string& message) {
    std::cerr << "error: " << message << "\n";
    return 2;
}

bool write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << text;
    return static_cast<bool>(out);
}

std::string take_string(char* owned) {
    std::string out = owned ? owned : "";
    wspsocm_string_free(owned);
    return out;
}

struct Inputs {
    ScenarioPtr scenario{nullptr, wspsocm_scenario_free};
    MapPtr map{nullptr, wspsocm_radio_map_free};
};

/// Loads the scenario and either loads a map snapshot or synthesizes one.
int load_inputs(const std::string& scenario_path, const std::string& map_path,
                std::uint64_t map_seed, Inputs& in) {
    wspsocm_scenario* s = nullptr;
    if (const auto st = wspsocm_scenario_load(scenario_path.c_str(), &s)) return fail(st);
    in.scenario.reset(s);
    wspsocm_radio_map* m = nullptr;
    const auto st = map_path.empty()
                        ? wspsocm_radio_map_synthesize(s, map_seed, &m)
                        : wspsocm_radio_map_load(map_path.c_str(), &m);
    if (st) return fail(st);
    in.map.reset(m);
    return 0;
}

struct HyperFlags {
    std::string preset = "baseline1";
    std::vector<std::pair<std::string, double>> overrides;
};

/// "baseline1", "baseline2", or eight comma-separated values
/// p_num,omega,c1,c2,k1,k2,k3,k4.
bool parse_hyper_spec(const std::string& spec, wspsocm_hyper& out) {
    if (spec == "baseline1") {
        out = wspsocm_hyper_baseline1();
        return true;
    }
    if (spec == "baseline2") {
        out = wspsocm_hyper_baseline2();
        return true;
    }
    std::vector<double> v;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (used != item.size()) return false;
        } catch (const std::exception&) {
            return false;
        }
    }
    if (v.size() != 8) return false;
    out = {static_cast<int32_t>(std::llround(v[0])), v[1], v[2], v[3],
           v[4],                                     v[5], v[6], v[7]};
    return true;
}

bool parse_seed_list(const std::string& text, std::vector<std::uint64_t>& out) {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoull(item, &used));
            if (used != item.size()) return false;
        } catch (const std::exception&) {
            return false;
        }
    }
    return !out.empty();
}

// ---- run ----------------------------------------------------------------

struct RunArgs {
    std::string scenario_path;
    std::string map_path;
    std::uint64_t map_seed = 1;
    std::string preset = "baseline1";
    int p_iter = 50;
    std::uint64_t seed = 0;
    std::string out_path;
    std::string trajectory_path;
    // inline overrides; NaN marks "not set"
    double p_num = NAN, omega = NAN, c1 = NAN, c2 = NAN;
    double k1 = NAN, k2 = NAN, k3 = NAN, k4 = NAN;
};

int cmd_run(const RunArgs& a) {
    wspsocm_hyper hyper;
    if (!parse_hyper_spec(a.preset, hyper))
        return fail_usage("unknown preset '" + a.preset + "'");
    if (!std::isnan(a.p_num)) hyper.p_num = static_cast<int32_t>(std::llround(a.p_num));
    if (!std::isnan(a.omega)) hyper.omega = a.omega;
    if (!std::isnan(a.c1)) hyper.c1 = a.c1;
    if (!std::isnan(a.c2)) hyper.c2 = a.c2;
    if (!std::isnan(a.k1)) hyper.k1 = a.k1;
    if (!std::isnan(a.k2)) hyper.k2 = a.k2;
    if (!std::isnan(a.k3)) hyper.k3 = a.k3;
    if (!std::isnan(a.k4)) hyper.k4 = a.k4;

    Inputs in;
    if (const int rc = load_inputs(a.scenario_path, a.map_path, a.map_seed, in)) return rc;

    wspsocm_result* r = nullptr;
    if (const auto st = wspsocm_optimize(in.scenario.get(), in.map.get(), &hyper,
                                         a.p_iter, a.seed, &r))
        return fail(st);
    ResultPtr result(r, wspsocm_result_free);

    char* json = nullptr;
    if (const auto st = wspsocm_result_record_json(r, &json)) return fail(st);
    const std::string record = take_string(json);
    if (!a.out_path.empty()) {
        if (!write_text_file(a.out_path, record + "\n"))
            return fail_io("cannot write '" + a.out_path + "'");
    } else {
        std::cout << record << "\n";
    }
    if (!a.trajectory_path.empty()) {
        char* table = nullptr;
        if (const auto st = wspsocm_result_trajectory_table(r, &table)) return fail(st);
        if (!write_text_file(a.trajectory_path, take_string(table)))
            return fail_io("cannot write '" + a.trajectory_path + "'");
    }
    std::cout << "min_sum_rate " << fmt(wspsocm_result_min_sum_rate(r)) << "\n";
    return 0;
}

// ---- compare --------------------------------------------------------------

struct CompareArgs {
    std::string scenario_path;
    std::string map_path;
    std::uint64_t map_seed = 1;
    std::string seeds = "1,2,3,4,5";
    int p_iter = 50;
    std::string out_path;
    std::vector<std::string> configs;
};

int cmd_compare(const CompareArgs& a) {
    if (a.configs.size() < 2) return fail_usage("need >= 2 configs");
    struct Entry {
        std::string label;
        wspsocm_hyper hyper;
        std::vector<double> rates;
    };
    std::vector<Entry> entries;
    for (const std::string& spec : a.configs) {
        Entry e;
        const auto eq = spec.find('=');
        const std::string body = eq == std::string::npos ? spec : spec.substr(eq + 1);
        e.label = eq == std::string::npos ? spec : spec.substr(0, eq);
        if (e.label.empty() || !parse_hyper_spec(body, e.hyper))
            return fail_usage("bad config '" + spec +
                              "' (want [label=]baseline1|baseline2|p_num,omega,c1,c2,"
                              "k1,k2,k3,k4)");
        entries.push_back(std::move(e));
    }
    std::vector<std::uint64_t> seeds;
    if (!parse_seed_list(a.seeds, seeds)) return fail_usage("bad seed list '" + a.seeds + "'");

    Inputs in;
    if (const int rc = load_inputs(a.scenario_path, a.map_path, a.map_seed, in)) return rc;

    for (Entry& e : entries) {
        for (const std::uint64_t seed : seeds) {
            wspsocm_result* r = nullptr;
            if (const auto st = wspsocm_optimize(in.scenario.get(), in.map.get(), &e.hyper,
                                                 a.p_iter, seed, &r))
                return fail(st);
            ResultPtr result(r, wspsocm_result_free);
            e.rates.push_back(wspsocm_result_min_sum_rate(r));
        }
    }

    std::ostringstream report;
    report << "# config mean min max\n";
    std::vector<double> means;
    for (const Entry& e : entries) {
        double sum = 0.0, lo = e.rates.front(), hi = e.rates.front();
        for (const double v : e.rates) {
            sum += v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const double mean = sum / static_cast<double>(e.rates.size());
        means.push_back(mean);
        report << e.label << " " << fmt(mean) << " " << fmt(lo) << " " << fmt(hi) << "\n";
    }
    report << "# relative gains, percent of the baseline mean\n";
    for (std::size_t i = 0; i < entries.size(); ++i) {
        for (std::size_t j = 0; j < entries.size(); ++j) {
            const double gain =
                i == j ? 0.0 : (means[i] - means[j]) / means[j] * 100.0;
            char pct[32];
            std::snprintf(pct, sizeof pct, "%.2f", gain);
            report << "gain(" << entries[i].label << " over " << entries[j].label
                   << ") = " << pct << "%\n";
        }
    }

    if (!a.out_path.empty()) {
        if (!write_text_file(a.out_path, report.str()))
            return fail_io("cannot write '" + a.out_path + "'");
    } else {
        std::cout << report.str();
    }
    return 0;
}

// ---- serve ----------------------------------------------------------------

struct ServeArgs {
    std::string scenario_path;
    std::string map_path;
    std::uint64_t map_seed = 1;
    std::string transport = "stdio";
    std::string host = "127.0.0.1";
    int port = 8750;
    std::string log_path;
    int rate_limit = 10;
};

int cmd_serve(const ServeArgs& a) {
    Inputs in;
    if (const int rc = load_inputs(a.scenario_path, a.map_path, a.map_seed, in)) return rc;
    std::string log = a.log_path;
    if (log.empty()) {
        if (const char* env = std::getenv("SWARM_TUNER_LOG")) log = env;
    }
    const wspsocm_server_config cfg{log.empty() ? nullptr : log.c_str(), a.rate_limit};
    wspsocm_status st;
    if (a.transport == "stdio") {
        st = wspsocm_serve_stdio(in.scenario.get(), in.map.get(), &cfg);
    } else if (a.transport == "tcp") {
        st = wspsocm_serve_tcp(in.scenario.get(), in.map.get(), &cfg, a.host.c_str(),
                               a.port);
    } else {
        return fail_usage("unknown transport '" + a.transport + "'");
    }
    return st ? fail(st) : 0;
}

// ---- tune -----------------------------------------------------------------

struct TuneArgs {
    std::string scenario_path;
    std::string map_path;
    std::uint64_t map_seed = 1;
    std::string advisor;
    std::string replay_dir;
    std::string base_url;
    std::string model;
    std::string api_key_env = "LLM_API_KEY";
    int max_iters = 12;
    int patience = 3;
    int p_iter = 50;
    std::uint64_t seed = 0;
    std::uint64_t advisor_seed = 0;
    std::string out_path;
};

int cmd_tune(const TuneArgs& a) {
    Inputs in;
    if (const int rc = load_inputs(a.scenario_path, a.map_path, a.map_seed, in)) return rc;
    const wspsocm_tune_config cfg{
        a.advisor.c_str(),
        a.replay_dir.empty() ? nullptr : a.replay_dir.c_str(),
        a.base_url.empty() ? nullptr : a.base_url.c_str(),
        a.model.empty() ? nullptr : a.model.c_str(),
        a.api_key_env.c_str(),
        a.max_iters,
        a.patience,
        a.p_iter,
        a.seed,
        a.advisor_seed,
    };
    char* report = nullptr;
    if (const auto st = wspsocm_tune(in.scenario.get(), in.map.get(), &cfg, &report))
        return fail(st);
    const std::string text = take_string(report);
    if (a.out_path.empty()) {
        std::cout << text;
        return 0;
    }
    if (!write_text_file(a.out_path, text))
        return fail_io("cannot write '" + a.out_path + "'");
    // The last report line is the session summary with the best setting.
    const auto tail = text.find_last_of('\n', text.size() - 2);
    std::cout << text.substr(tail == std::string::npos ? 0 : tail + 1);
    return 0;
}

// ---- map ------------------------------------------------------------------

struct MapArgs {
    std::string scenario_path;
    std::uint64_t map_seed = 1;
    std::string out_path;
};

int cmd_map(const MapArgs& a) {
    Inputs in;
    if (const int rc = load_inputs(a.scenario_path, "", a.map_seed, in)) return rc;
    if (const auto st = wspsocm_radio_map_save(in.map.get(), a.out_path.c_str()))
        return fail(st);
    std::cout << "wrote " << a.out_path << "\n";
    return 0;
}

void add_input_flags(CLI::App* cmd, std::string& scenario, std::string& map_path,
                     std::uint64_t& map_seed) {
    cmd->add_option("--scenario", scenario, "scenario definition file")->required();
    cmd->add_option("--map", map_path, "radio map snapshot (default: synthesize)");
    cmd->add_option("--map-seed", map_seed, "seed for map synthesis");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"radio-map trajectory optimizer driver"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(wspsocm_version()));

    RunArgs run;
    CLI::App* c_run = app.add_subcommand("run", "run one optimization");
    add_input_flags(c_run, run.scenario_path, run.map_path, run.map_seed);
    c_run->add_option("--preset", run.preset, "baseline1 | baseline2 | 8 csv values");
    c_run->add_option("--p-num", run.p_num, "particle count override");
    c_run->add_option("--omega", run.omega, "inertia override");
    c_run->add_option("--c1", run.c1, "own-best pull override");
    c_run->add_option("--c2", run.c2, "swarm-best pull override");
    c_run->add_option("--k1", run.k1, "rate weight override");
    c_run->add_option("--k2", run.k2, "speed weight override");
    c_run->add_option("--k3", run.k3, "turn weight override");
    c_run->add_option("--k4", run.k4, "altitude weight override");
    c_run->add_option("--p-iter", run.p_iter, "optimizer iterations");
    c_run->add_option("--seed", run.seed, "run seed");
    c_run->add_option("--out", run.out_path, "write the run record here");
    c_run->add_option("--trajectory-out", run.trajectory_path,
                      "write the best trajectory table here");

    CompareArgs cmp;
    CLI::App* c_cmp = app.add_subcommand("compare", "run configs over a common seed list");
    add_input_flags(c_cmp, cmp.scenario_path, cmp.map_path, cmp.map_seed);
    c_cmp->add_option("--seeds", cmp.seeds, "comma-separated run seeds");
    c_cmp->add_option("--p-iter", cmp.p_iter, "optimizer iterations");
    c_cmp->add_option("--out", cmp.out_path, "write the report here");
    c_cmp->add_option("configs", cmp.configs,
                      "[label=]baseline1|baseline2|p_num,omega,c1,c2,k1,k2,k3,k4");

    ServeArgs srv;
    CLI::App* c_srv = app.add_subcommand("serve", "serve the JSON-RPC tools");
    add_input_flags(c_srv, srv.scenario_path, srv.map_path, srv.map_seed);
    c_srv->add_option("--transport", srv.transport, "stdio | tcp");
    c_srv->add_option("--host", srv.host, "tcp bind address");
    c_srv->add_option("--port", srv.port, "tcp port");
    c_srv->add_option("--log", srv.log_path, "append-only run log (or SWARM_TUNER_LOG)");
    c_srv->add_option("--rate-limit", srv.rate_limit, "tool calls per minute, 0 = off");

    TuneArgs tune;
    CLI::App* c_tune = app.add_subcommand("tune", "run a tuning session");
    add_input_flags(c_tune, tune.scenario_path, tune.map_path, tune.map_seed);
    c_tune->add_option("--advisor", tune.advisor, "llm | random | hillclimb | heuristic")
        ->required();
    c_tune->add_option("--replay", tune.replay_dir, "canned llm replies directory");
    c_tune->add_option("--base-url", tune.base_url, "llm chat endpoint");
    c_tune->add_option("--model", tune.model, "llm model name");
    c_tune->add_option("--api-key-env", tune.api_key_env,
                       "env var holding the llm key (never a key value)");
    c_tune->add_option("--max-iters", tune.max_iters, "tuning iterations");
    c_tune->add_option("--patience", tune.patience, "stop after this many stale runs");
    c_tune->add_option("--p-iter", tune.p_iter, "optimizer iterations per run");
    c_tune->add_option("--seed", tune.seed, "run seed shared by every iteration");
    c_tune->add_option("--advisor-seed", tune.advisor_seed, "random/hillclimb draws");
    c_tune->add_option("--out", tune.out_path, "write the session report here");

    MapArgs map;
    CLI::App* c_map = app.add_subcommand("map", "synthesize and export a radio map");
    c_map->add_option("--scenario", map.scenario_path, "scenario definition file")
        ->required();
    c_map->add_option("--map-seed", map.map_seed, "seed for map synthesis");
    c_map->add_option("--out", map.out_path, "snapshot output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (c_run->parsed()) return cmd_run(run);
    if (c_cmp->parsed()) return cmd_compare(cmp);
    if (c_srv->parsed()) return cmd_serve(srv);
    if (c_tune->parsed()) return cmd_tune(tune);
    if (c_map->parsed()) return cmd_map(map);
    return 1;
}
