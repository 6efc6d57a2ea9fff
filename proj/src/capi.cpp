// SPDX-License-Identifier: Apache-2.0
#include "wspsocm.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "wspso/errors.hpp"
#include "wspso/json_io.hpp"
#include "wspso/radio_map.hpp"
#include "wspso/scenario.hpp"
#include "wspso/swarm.hpp"
#include "wspso/tool_client.hpp"
#include "wspso/tool_server.hpp"
#include "wspso/transport.hpp"
#include "wspso/tuning_agent.hpp"

struct wspsocm_scenario {
    wspso::Scenario value;
};

struct wspsocm_radio_map {
    wspso::RadioMap value;
};

struct wspsocm_result {
    double min_sum_rate = 0.0;
    double fitness = 0.0;
    long long evaluations = 0;
    std::vector<double> history;
    std::string record_json;
    std::string table;
};

namespace {

thread_local std::string t_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename Fn>
wspsocm_status guarded(Fn&& fn) {
    try {
        t_last_error.clear();
        fn();
        return WSPSOCM_OK;
    } catch (const wspso::ValidationError& e) {
        t_last_error = e.what();
        return WSPSOCM_ERR_VALIDATION;
    } catch (const wspso::ParseError& e) {
        t_last_error = e.what();
        return WSPSOCM_ERR_VALIDATION;
    } catch (const wspso::RpcError& e) {
        t_last_error = e.what();
        return WSPSOCM_ERR_PROTOCOL;
    } catch (const wspso::TransportError& e) {
        t_last_error = e.what();
        return WSPSOCM_ERR_PROTOCOL;
    } catch (const std::exception& e) {
        t_last_error = e.what();
        return WSPSOCM_ERR_RUNTIME;
    }
}

wspsocm_status null_arg(const char* what) {
    t_last_error = std::string(what) + ": null argument";
    return WSPSOCM_ERR_VALIDATION;
}

wspso::HyperParams to_hyper(const wspsocm_hyper& h) {
    wspso::HyperParams out;
    out.p_num = h.p_num;
    out.omega = h.omega;
    out.c1 = h.c1;
    out.c2 = h.c2;
    out.k1 = h.k1;
    out.k2 = h.k2;
    out.k3 = h.k3;
    out.k4 = h.k4;
    return out;
}

wspsocm_hyper from_hyper(const wspso::HyperParams& h) {
    return {h.p_num, h.omega, h.c1, h.c2, h.k1, h.k2, h.k3, h.k4};
}

wspso::ServerOptions to_server_options(const wspsocm_server_config* config) {
    wspso::ServerOptions opt;
    if (config) {
        if (config->log_path && *config->log_path) opt.log_path = config->log_path;
        opt.rate_limit_per_min = config->rate_limit_per_min;
    }
    return opt;
}

} // namespace

extern "C" {

const char* wspsocm_version(void) { return "1.0.0"; }

const char* wspsocm_last_error(void) { return t_last_error.c_str(); }

void wspsocm_string_free(char* text) { std::free(text); }

wspsocm_status wspsocm_scenario_load(const char* path, wspsocm_scenario** out) {
    if (!path || !out) return null_arg("wspsocm_scenario_load");
    return guarded([&] {
        auto holder = std::make_unique<wspsocm_scenario>();
        holder->value = wspso::load_scenario(path);
        *out = holder.release();
    });
}

wspsocm_status wspsocm_scenario_parse(const char* text, wspsocm_scenario** out) {
    if (!text || !out) return null_arg("wspsocm_scenario_parse");
    return guarded([&] {
        auto holder = std::make_unique<wspsocm_scenario>();
        holder->value = wspso::scenario_from_string(text);
        *out = holder.release();
    });
}

wspsocm_status wspsocm_scenario_to_text(const wspsocm_scenario* scenario, char** out_text) {
    if (!scenario || !out_text) return null_arg("wspsocm_scenario_to_text");
    return guarded([&] { *out_text = dup_string(wspso::scenario_to_string(scenario->value)); });
}

wspsocm_status wspsocm_scenario_summary_json(const wspsocm_scenario* scenario,
                                             char** out_json) {
    if (!scenario || !out_json) return null_arg("wspsocm_scenario_summary_json");
    return guarded(
        [&] { *out_json = dup_string(wspso::scenario_summary_json(scenario->value).dump()); });
}

void wspsocm_scenario_free(wspsocm_scenario* scenario) { delete scenario; }

wspsocm_status wspsocm_radio_map_synthesize(const wspsocm_scenario* scenario,
                                            uint64_t seed, wspsocm_radio_map** out) {
    if (!scenario || !out) return null_arg("wspsocm_radio_map_synthesize");
    return guarded([&] {
        auto holder = std::make_unique<wspsocm_radio_map>(
            wspsocm_radio_map{wspso::RadioMap::synthesize(scenario->value, seed)});
        *out = holder.release();
    });
}

wspsocm_status wspsocm_radio_map_load(const char* path, wspsocm_radio_map** out) {
    if (!path || !out) return null_arg("wspsocm_radio_map_load");
    return guarded([&] {
        auto holder = std::make_unique<wspsocm_radio_map>(
            wspsocm_radio_map{wspso::RadioMap::load(path)});
        *out = holder.release();
    });
}

wspsocm_status wspsocm_radio_map_save(const wspsocm_radio_map* map, const char* path) {
    if (!map || !path) return null_arg("wspsocm_radio_map_save");
    return guarded([&] { map->value.save(path); });
}

void wspsocm_radio_map_free(wspsocm_radio_map* map) { delete map; }

wspsocm_hyper wspsocm_hyper_baseline1(void) { return from_hyper(wspso::baseline1()); }

wspsocm_hyper wspsocm_hyper_baseline2(void) { return from_hyper(wspso::baseline2()); }

wspsocm_status wspsocm_optimize(const wspsocm_scenario* scenario,
                                const wspsocm_radio_map* map, const wspsocm_hyper* hyper,
                                int32_t p_iter, uint64_t seed, wspsocm_result** out) {
    if (!scenario || !map || !hyper || !out) return null_arg("wspsocm_optimize");
    return guarded([&] {
        const wspso::HyperParams h = to_hyper(*hyper);
        const wspso::OptimizationResult res =
            wspso::run_ws_pso_cm(scenario->value, map->value, h, p_iter, seed);
        auto holder = std::make_unique<wspsocm_result>();
        holder->min_sum_rate = res.best.t_value;
        holder->fitness = res.best.f_value;
        holder->evaluations = res.evaluations;
        holder->history = res.history;
        holder->record_json = wspso::result_record_json(h, p_iter, seed, res).dump();
        holder->table = wspso::trajectory_table(res.g_best, scenario->value, map->value);
        *out = holder.release();
    });
}

double wspsocm_result_min_sum_rate(const wspsocm_result* result) {
    return result ? result->min_sum_rate : 0.0;
}

double wspsocm_result_fitness(const wspsocm_result* result) {
    return result ? result->fitness : 0.0;
}

int64_t wspsocm_result_evaluations(const wspsocm_result* result) {
    return result ? result->evaluations : 0;
}

size_t wspsocm_result_history_len(const wspsocm_result* result) {
    return result ? result->history.size() : 0;
}

double wspsocm_result_history_at(const wspsocm_result* result, size_t index) {
    if (!result || index >= result->history.size()) return 0.0;
    return result->history[index];
}

wspsocm_status wspsocm_result_record_json(const wspsocm_result* result, char** out_json) {
    if (!result || !out_json) return null_arg("wspsocm_result_record_json");
    return guarded([&] { *out_json = dup_string(result->record_json); });
}

wspsocm_status wspsocm_result_trajectory_table(const wspsocm_result* result,
                                               char** out_text) {
    if (!result || !out_text) return null_arg("wspsocm_result_trajectory_table");
    return guarded([&] { *out_text = dup_string(result->table); });
}

void wspsocm_result_free(wspsocm_result* result) { delete result; }

wspsocm_status wspsocm_serve_stdio(const wspsocm_scenario* scenario,
                                   const wspsocm_radio_map* map,
                                   const wspsocm_server_config* config) {
    if (!scenario || !map) return null_arg("wspsocm_serve_stdio");
    return guarded([&] {
        wspso::ToolServer server(scenario->value, map->value.clone(),
                                 to_server_options(config));
        wspso::StdioTransport transport;
        server.serve(transport);
    });
}

wspsocm_status wspsocm_serve_tcp(const wspsocm_scenario* scenario,
                                 const wspsocm_radio_map* map,
                                 const wspsocm_server_config* config, const char* host,
                                 int32_t port) {
    if (!scenario || !map || !host) return null_arg("wspsocm_serve_tcp");
    return guarded([&] {
        wspso::TcpListener listener(host, port);
        wspso::ToolServer server(scenario->value, map->value.clone(),
                                 to_server_options(config));
        for (;;) {
            auto transport = listener.accept();
            if (!transport) break;
            server.serve(*transport);
            transport->close();
        }
    });
}

wspsocm_status wspsocm_tune(const wspsocm_scenario* scenario,
                            const wspsocm_radio_map* map,
                            const wspsocm_tune_config* config, char** out_report_jsonl) {
    if (!scenario || !map || !config || !out_report_jsonl) return null_arg("wspsocm_tune");
    return guarded([&] {
        const std::string advisor_name = config->advisor ? config->advisor : "";
        const wspso::AgentProfile profile = wspso::AgentProfile::standard();
        std::unique_ptr<wspso::Advisor> advisor;
        if (advisor_name == "heuristic") {
            advisor = wspso::make_heuristic_advisor();
        } else if (advisor_name == "random") {
            advisor = wspso::make_random_advisor(config->advisor_seed);
        } else if (advisor_name == "hillclimb") {
            advisor = wspso::make_hillclimb_advisor(config->advisor_seed);
        } else if (advisor_name == "llm") {
            std::shared_ptr<wspso::ChatBackend> backend;
            if (config->replay_dir && *config->replay_dir) {
                backend = wspso::make_replay_backend(config->replay_dir);
            } else {
                if (!config->base_url || !*config->base_url)
                    throw wspso::ValidationError(
                        "base_url",
                        "base_url: required for the llm advisor without a replay "
                        "directory");
                wspso::HttpChatConfig http;
                http.base_url = config->base_url;
                if (config->model) http.model = config->model;
                if (config->api_key_env && *config->api_key_env)
                    http.api_key_env = config->api_key_env;
                backend = wspso::make_http_backend(std::move(http));
            }
            advisor = wspso::make_llm_advisor(std::move(backend));
        } else {
            throw wspso::ValidationError(
                "advisor", "advisor: must be one of heuristic, random, hillclimb, llm");
        }

        if (config->p_iter < 0)
            throw wspso::ValidationError("p_iter", "p_iter: must be >= 0");
        wspso::TuneOptions opt;
        opt.max_iters = config->max_iters;
        opt.patience = config->patience;
        opt.p_iter = config->p_iter;
        opt.seed = config->seed;

        wspso::ServerOptions sopt;
        sopt.rate_limit_per_min = 0; // private in-process server, no limiter
        wspso::InProcessClient client(scenario->value, map->value.clone(), sopt);
        const wspso::TuneOutcome outcome = wspso::tune(client, profile, *advisor, opt);
        *out_report_jsonl = dup_string(wspso::tune_report_jsonl(outcome));
    });
}

} // extern "C"
