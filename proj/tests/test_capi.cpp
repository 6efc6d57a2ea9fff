// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstring>
#include <string>

#include "json.hpp"
#include "wspsocm.h"

namespace {

const char* kScenarioText = R"(uav_count = 1
ugv_count = 2
slot_count = 3
slot_seconds = 1.0
uav_v_max_kmh = 72.0
uav_theta_max_deg = 60.0
uav_d_min_m = 5.0
qos_r_min = 0.5
uav_p_max_dbm = 20.0
noise_dbm = -100.0

[grid]
x_min = 0.0
y_min = 0.0
h_min = 60.0
delta = 5.0
nx = 8
ny = 8
nz = 4

[[ugv]]
speed_kmh = 3.6
waypoints = [[5.0, 2.0], [5.0, 38.0]]

[[ugv]]
speed_kmh = 3.6
waypoints = [[10.0, 2.0], [10.0, 38.0]]
)";

struct Owned {
    wspsocm_scenario* scenario = nullptr;
    wspsocm_radio_map* map = nullptr;

    Owned() {
        REQUIRE(wspsocm_scenario_parse(kScenarioText, &scenario) == WSPSOCM_OK);
        REQUIRE(wspsocm_radio_map_synthesize(scenario, 7, &map) == WSPSOCM_OK);
    }
    ~Owned() {
        wspsocm_radio_map_free(map);
        wspsocm_scenario_free(scenario);
    }
};

std::string take(char* text) {
    REQUIRE(text != nullptr);
    std::string copy(text);
    wspsocm_string_free(text);
    return copy;
}

} // namespace

TEST_CASE("version and presets are readable without any handle") {
    CHECK(std::strlen(wspsocm_version()) > 0);
    const wspsocm_hyper b1 = wspsocm_hyper_baseline1();
    CHECK(b1.p_num == 100);
    CHECK(b1.omega == 0.5);
    CHECK(b1.k3 == 5.0);
    const wspsocm_hyper b2 = wspsocm_hyper_baseline2();
    CHECK(b2.p_num == 58);
    CHECK(b2.c2 == 9.8765);
}

TEST_CASE("null arguments fail with a validation status and a message") {
    CHECK(wspsocm_scenario_parse(nullptr, nullptr) == WSPSOCM_ERR_VALIDATION);
    CHECK(std::strlen(wspsocm_last_error()) > 0);

    wspsocm_scenario* s = nullptr;
    CHECK(wspsocm_scenario_parse(nullptr, &s) == WSPSOCM_ERR_VALIDATION);
    CHECK(s == nullptr);

    CHECK(wspsocm_optimize(nullptr, nullptr, nullptr, 0, 0, nullptr) ==
          WSPSOCM_ERR_VALIDATION);
}

TEST_CASE("malformed scenario text reports the offending field") {
    wspsocm_scenario* s = nullptr;
    CHECK(wspsocm_scenario_parse("uav_count = 1\n", &s) == WSPSOCM_ERR_VALIDATION);
    CHECK(s == nullptr);
    CHECK(std::string(wspsocm_last_error()).find("ugv_count") != std::string::npos);
}

TEST_CASE("scenario handles round-trip and summarize") {
    Owned h;
    char* text = nullptr;
    REQUIRE(wspsocm_scenario_to_text(h.scenario, &text) == WSPSOCM_OK);
    const std::string serialized = take(text);
    wspsocm_scenario* again = nullptr;
    REQUIRE(wspsocm_scenario_parse(serialized.c_str(), &again) == WSPSOCM_OK);
    char* text2 = nullptr;
    REQUIRE(wspsocm_scenario_to_text(again, &text2) == WSPSOCM_OK);
    CHECK(take(text2) == serialized);
    wspsocm_scenario_free(again);

    char* summary = nullptr;
    REQUIRE(wspsocm_scenario_summary_json(h.scenario, &summary) == WSPSOCM_OK);
    const auto j = nlohmann::json::parse(take(summary));
    CHECK(j.at("uav_count") == 1);
    CHECK(j.at("ugv_count") == 2);
    CHECK(j.at("grid").at("nz") == 4);
}

TEST_CASE("optimize produces a stable result with accessors") {
    Owned h;
    wspsocm_hyper hyper = wspsocm_hyper_baseline1();
    hyper.p_num = 6;
    wspsocm_result* result = nullptr;
    REQUIRE(wspsocm_optimize(h.scenario, h.map, &hyper, 3, 42, &result) == WSPSOCM_OK);

    CHECK(wspsocm_result_history_len(result) == 4);
    CHECK(wspsocm_result_evaluations(result) == 6 + 2 * 6 * 3 + 1);
    CHECK(wspsocm_result_fitness(result) ==
          wspsocm_result_history_at(result, 3));
    CHECK(wspsocm_result_min_sum_rate(result) >= 0.0);
    for (size_t i = 1; i < 4; ++i)
        CHECK(wspsocm_result_history_at(result, i) >=
              wspsocm_result_history_at(result, i - 1));

    char* record = nullptr;
    REQUIRE(wspsocm_result_record_json(result, &record) == WSPSOCM_OK);
    const std::string record_text = take(record);
    const auto j = nlohmann::json::parse(record_text);
    CHECK(j.at("v") == 1);
    CHECK(j.at("seed") == 42);
    CHECK_FALSE(j.at("metrics").contains("wall_ms"));

    char* table = nullptr;
    REQUIRE(wspsocm_result_trajectory_table(result, &table) == WSPSOCM_OK);
    CHECK(take(table).substr(0, 2) == "# ");

    // Re-running with the same inputs reproduces the record byte for byte.
    wspsocm_result* rerun = nullptr;
    REQUIRE(wspsocm_optimize(h.scenario, h.map, &hyper, 3, 42, &rerun) == WSPSOCM_OK);
    char* record2 = nullptr;
    REQUIRE(wspsocm_result_record_json(rerun, &record2) == WSPSOCM_OK);
    CHECK(take(record2) == record_text);
    wspsocm_result_free(rerun);
    wspsocm_result_free(result);

    wspsocm_hyper bad = wspsocm_hyper_baseline1();
    bad.p_num = 0;
    wspsocm_result* none = nullptr;
    CHECK(wspsocm_optimize(h.scenario, h.map, &bad, 1, 0, &none) ==
          WSPSOCM_ERR_VALIDATION);
    CHECK(none == nullptr);
}

TEST_CASE("map snapshots round-trip through the C surface") {
    Owned h;
    const std::string path = "/tmp/wspso_capi_map.rmap";
    REQUIRE(wspsocm_radio_map_save(h.map, path.c_str()) == WSPSOCM_OK);
    wspsocm_radio_map* loaded = nullptr;
    REQUIRE(wspsocm_radio_map_load(path.c_str(), &loaded) == WSPSOCM_OK);

    wspsocm_hyper hyper = wspsocm_hyper_baseline1();
    hyper.p_num = 5;
    wspsocm_result* a = nullptr;
    wspsocm_result* b = nullptr;
    REQUIRE(wspsocm_optimize(h.scenario, h.map, &hyper, 2, 1, &a) == WSPSOCM_OK);
    REQUIRE(wspsocm_optimize(h.scenario, loaded, &hyper, 2, 1, &b) == WSPSOCM_OK);
    char* ja = nullptr;
    char* jb = nullptr;
    REQUIRE(wspsocm_result_record_json(a, &ja) == WSPSOCM_OK);
    REQUIRE(wspsocm_result_record_json(b, &jb) == WSPSOCM_OK);
    CHECK(take(ja) == take(jb));
    wspsocm_result_free(a);
    wspsocm_result_free(b);
    wspsocm_radio_map_free(loaded);
    std::remove(path.c_str());

    wspsocm_radio_map* missing = nullptr;
    CHECK(wspsocm_radio_map_load(path.c_str(), &missing) == WSPSOCM_ERR_RUNTIME);
    CHECK(missing == nullptr);
}

TEST_CASE("tuning through the C surface yields a parseable report") {
    Owned h;
    wspsocm_tune_config config{};
    config.advisor = "heuristic";
    config.max_iters = 2;
    config.patience = 5;
    config.p_iter = 1;
    config.seed = 3;
    char* report = nullptr;
    REQUIRE(wspsocm_tune(h.scenario, h.map, &config, &report) == WSPSOCM_OK);
    const std::string text = take(report);

    int lines = 0;
    for (char c : text)
        if (c == '\n') ++lines;
    CHECK(lines == 3); // two runs plus the summary

    const auto tail = text.rfind('\n', text.size() - 2);
    const auto summary = nlohmann::json::parse(text.substr(tail + 1));
    CHECK(summary.at("stop_reason") == "max_iters");
    CHECK(summary.at("iterations") == 2);
    CHECK(summary.at("best_hyper").at("p_num") == 100);

    wspsocm_tune_config bad{};
    bad.advisor = "oracle";
    bad.max_iters = 1;
    bad.patience = 1;
    char* none = nullptr;
    CHECK(wspsocm_tune(h.scenario, h.map, &bad, &none) == WSPSOCM_ERR_VALIDATION);
    CHECK(std::string(wspsocm_last_error()).find("advisor") != std::string::npos);
}
