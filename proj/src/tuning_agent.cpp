// SPDX-License-Identifier: Apache-2.0
#include "wspso/tuning_agent.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "httplib.h"
#include "wspso/errors.hpp"
#include "wspso/rng.hpp"

namespace wspso {

namespace {

std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void check_bound(const char* name, const ParamBounds& b) {
    if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || !(b.lo < b.hi))
        throw ValidationError(name, std::string(name) + ": bounds must satisfy lo < hi");
}

int clamp_int(double v, const ParamBounds& b) {
    const double lo = std::ceil(b.lo);
    const double hi = std::floor(b.hi);
    return static_cast<int>(std::llround(std::clamp(v, lo, hi)));
}

std::string bounds_text(const Bounds& b) {
    std::ostringstream out;
    auto row = [&](const char* name, const ParamBounds& p) {
        out << "- " << name << ": [" << fmt(p.lo) << ", " << fmt(p.hi) << "]\n";
    };
    row("p_num (integer)", b.p_num);
    row("omega", b.omega);
    row("c1", b.c1);
    row("c2", b.c2);
    row("k1", b.k1);
    row("k2", b.k2);
    row("k3", b.k3);
    row("k4", b.k4);
    return out.str();
}

std::string history_table(const std::vector<TuningRecord>& memory) {
    if (memory.empty()) return "(none yet)\n";
    std::ostringstream out;
    out << "iter | p_num | omega | c1 | c2 | k1 | k2 | k3 | k4 | min_sum_rate | f_value\n";
    for (const TuningRecord& r : memory) {
        const HyperParams& h = r.proposal;
        out << r.iteration << " | " << h.p_num << " | " << fmt(h.omega) << " | " << fmt(h.c1)
            << " | " << fmt(h.c2) << " | " << fmt(h.k1) << " | " << fmt(h.k2) << " | "
            << fmt(h.k3) << " | " << fmt(h.k4) << " | " << fmt(r.record.best.t_value)
            << " | " << fmt(r.record.best.f_value) << "\n";
    }
    return out.str();
}

std::string replace_all(std::string text, const std::string& tag, const std::string& value) {
    std::size_t at = 0;
    while ((at = text.find(tag, at)) != std::string::npos) {
        text.replace(at, tag.size(), value);
        at += value.size();
    }
    return text;
}

} // namespace

void Bounds::validate() const {
    check_bound("p_num", p_num);
    check_bound("omega", omega);
    check_bound("c1", c1);
    check_bound("c2", c2);
    check_bound("k1", k1);
    check_bound("k2", k2);
    check_bound("k3", k3);
    check_bound("k4", k4);
}

HyperParams Bounds::clamp(const HyperParams& h) const {
    HyperParams out = h;
    out.p_num = clamp_int(static_cast<double>(h.p_num), p_num);
    out.omega = std::clamp(h.omega, omega.lo, omega.hi);
    out.c1 = std::clamp(h.c1, c1.lo, c1.hi);
    out.c2 = std::clamp(h.c2, c2.lo, c2.hi);
    out.k1 = std::clamp(h.k1, k1.lo, k1.hi);
    out.k2 = std::clamp(h.k2, k2.lo, k2.hi);
    out.k3 = std::clamp(h.k3, k3.lo, k3.hi);
    out.k4 = std::clamp(h.k4, k4.lo, k4.hi);
    return out;
}

AgentProfile AgentProfile::standard() {
    AgentProfile p;
    p.mission =
        "Tune the eight optimizer hyper-parameters (p_num, omega, c1, c2, k1, k2, "
        "k3, k4) to maximize min_sum_rate on the loaded scenario. Iterate: propose "
        "a setting, observe the run metrics, refine, and stop when converged.";
    p.background =
        "The optimizer is a particle swarm over candidate relay trajectories, "
        "warm-started from a geometric initializer, with crossover and mutation "
        "every iteration. omega scales momentum, c1 pulls each particle toward its "
        "own best, c2 toward the swarm best. Fitness rewards min_sum_rate with "
        "weight k1 and subtracts penalties for speed violations (k2), sharp turns "
        "(k3), and flying below building tops (k4). The reported objective is "
        "min_sum_rate alone; penalties only shape the search.";
    p.output_format =
        "Reply with one fenced JSON block containing numeric fields p_num, omega, "
        "c1, c2, k1, k2, k3, k4; optional boolean field terminate; optional string "
        "field rationale.";
    return p;
}

namespace {

class HeuristicAdvisor final : public Advisor {
public:
    Proposal propose(const AgentProfile&, const std::vector<TuningRecord>&) override {
        return {false, baseline1(), "conventional preset"};
    }
};

class RandomAdvisor final : public Advisor {
public:
    explicit RandomAdvisor(std::uint64_t seed) : rng_(seed) {}

    Proposal propose(const AgentProfile& profile, const std::vector<TuningRecord>&) override {
        const Bounds& b = profile.bounds;
        HyperParams h;
        h.p_num = clamp_int(uniform_range(rng_, b.p_num.lo, b.p_num.hi), b.p_num);
        h.omega = uniform_range(rng_, b.omega.lo, b.omega.hi);
        h.c1 = uniform_range(rng_, b.c1.lo, b.c1.hi);
        h.c2 = uniform_range(rng_, b.c2.lo, b.c2.hi);
        h.k1 = uniform_range(rng_, b.k1.lo, b.k1.hi);
        h.k2 = uniform_range(rng_, b.k2.lo, b.k2.hi);
        h.k3 = uniform_range(rng_, b.k3.lo, b.k3.hi);
        h.k4 = uniform_range(rng_, b.k4.lo, b.k4.hi);
        return {false, h, "uniform draw"};
    }

private:
    std::mt19937_64 rng_;
};

class HillClimbAdvisor final : public Advisor {
public:
    HillClimbAdvisor(std::uint64_t seed, HillClimbParams params)
        : rng_(seed), params_(params) {}

    Proposal propose(const AgentProfile& profile, const std::vector<TuningRecord>& memory) override {
        if (memory.empty()) return {false, baseline1(), "start from the conventional preset"};
        std::size_t best = 0;
        for (std::size_t i = 1; i < memory.size(); ++i)
            if (memory[i].record.best.t_value > memory[best].record.best.t_value) best = i;
        const std::size_t stagnant = memory.size() - 1 - best;
        if (stagnant >= static_cast<std::size_t>(params_.patience))
            return {true, {}, "no improvement in " + std::to_string(stagnant) + " runs"};

        const Bounds& b = profile.bounds;
        const HyperParams& base = memory[best].proposal;
        auto jig = [&](double v, const ParamBounds& p) {
            const double delta =
                (uniform01(rng_) * 2.0 - 1.0) * params_.step_fraction * (p.hi - p.lo);
            return std::clamp(v + delta, p.lo, p.hi);
        };
        HyperParams h;
        h.p_num = clamp_int(jig(static_cast<double>(base.p_num), b.p_num), b.p_num);
        h.omega = jig(base.omega, b.omega);
        h.c1 = jig(base.c1, b.c1);
        h.c2 = jig(base.c2, b.c2);
        h.k1 = jig(base.k1, b.k1);
        h.k2 = jig(base.k2, b.k2);
        h.k3 = jig(base.k3, b.k3);
        h.k4 = jig(base.k4, b.k4);
        return {false, h,
                "perturb the best run (iteration " +
                    std::to_string(memory[best].iteration) + ")"};
    }

private:
    std::mt19937_64 rng_;
    HillClimbParams params_;
};

class ReplayBackend final : public ChatBackend {
public:
    explicit ReplayBackend(const std::string& dir) {
        namespace fs = std::filesystem;
        if (!fs::is_directory(dir)) throw IoError("replay directory '" + dir + "' not found");
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.is_regular_file()) files_.push_back(entry.path().string());
        std::sort(files_.begin(), files_.end());
        if (files_.empty()) throw IoError("replay directory '" + dir + "' is empty");
    }

    std::string complete(const std::string&, const std::string&) override {
        if (next_ >= files_.size())
            throw AdvisorError("replay fixtures exhausted after " +
                               std::to_string(files_.size()) + " replies");
        std::ifstream in(files_[next_], std::ios::binary);
        if (!in) throw IoError("cannot open replay file '" + files_[next_] + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        ++next_;
        return buf.str();
    }

private:
    std::vector<std::string> files_;
    std::size_t next_ = 0;
};

class HttpBackend final : public ChatBackend {
public:
    explicit HttpBackend(HttpChatConfig config) : config_(std::move(config)) {}

    std::string complete(const std::string& system_prompt,
                         const std::string& user_prompt) override {
        const char* key = std::getenv(config_.api_key_env.c_str());
        if (!key || !*key)
            throw AdvisorError("environment variable '" + config_.api_key_env +
                               "' is not set; it is the only accepted key source");
        httplib::Client cli(config_.base_url);
        cli.set_connection_timeout(std::chrono::duration<double>(config_.timeout_s));
        cli.set_read_timeout(std::chrono::duration<double>(config_.timeout_s));
        const Json body{
            {"model", config_.model},
            {"messages",
             {{{"role", "system"}, {"content", system_prompt}},
              {{"role", "user"}, {"content", user_prompt}}}}};
        const httplib::Headers headers{{"Authorization", std::string("Bearer ") + key}};
        auto res = cli.Post(config_.path, headers, body.dump(), "application/json");
        if (!res)
            throw TransportError("chat endpoint unreachable: " +
                                 httplib::to_string(res.error()));
        if (res->status != 200)
            throw AdvisorError("chat endpoint returned HTTP " + std::to_string(res->status) +
                               ": " + res->body);
        const Json reply = Json::parse(res->body, nullptr, false);
        if (reply.is_discarded() || !reply.contains("choices") ||
            !reply.at("choices").is_array() || reply.at("choices").empty())
            throw AdvisorError("chat endpoint reply lacks choices");
        const Json& msg = reply.at("choices").at(0).value("message", Json::object());
        if (!msg.contains("content") || !msg.at("content").is_string())
            throw AdvisorError("chat endpoint reply lacks message content");
        return msg.at("content").get<std::string>();
    }

private:
    HttpChatConfig config_;
};

/// Extract the body of the first fenced code block.
bool fenced_block(const std::string& text, std::string& body) {
    const std::size_t open = text.find("```");
    if (open == std::string::npos) return false;
    std::size_t start = text.find('\n', open);
    if (start == std::string::npos) return false;
    ++start;
    const std::size_t close = text.find("```", start);
    if (close == std::string::npos) return false;
    body = text.substr(start, close - start);
    return true;
}

class LlmAdvisor final : public Advisor {
public:
    explicit LlmAdvisor(std::shared_ptr<ChatBackend> backend) : backend_(std::move(backend)) {}

    Proposal propose(const AgentProfile& profile,
                     const std::vector<TuningRecord>& memory) override {
        const std::string system_prompt =
            profile.mission + "\n\n" + profile.background + "\n\n" + profile.output_format;
        std::string user_prompt = render_user_prompt(profile, memory);
        std::string reply = backend_->complete(system_prompt, user_prompt);
        std::string why;
        Proposal p;
        if (parse_reply(reply, p, why)) return p;
        const std::string retry_prompt =
            user_prompt +
            "\n\nYour previous reply could not be used (" + why +
            "). Answer again with exactly one fenced JSON block in the documented "
            "format.";
        reply = backend_->complete(system_prompt, retry_prompt);
        if (parse_reply(reply, p, why)) return p;
        throw AdvisorError("advisor reply unusable after retry (" + why +
                           "); raw reply follows:\n" + reply);
    }

private:
    static std::string render_user_prompt(const AgentProfile& profile,
                                          const std::vector<TuningRecord>& memory) {
        std::string text = default_prompt_template();
        text = replace_all(text, "{{bounds}}", bounds_text(profile.bounds));
        text = replace_all(text, "{{history}}", history_table(memory));
        text = replace_all(text, "{{last_metrics}}",
                           memory.empty()
                               ? std::string("(no runs yet)")
                               : breakdown_to_json(memory.back().record.best).dump());
        return text;
    }

    static bool parse_reply(const std::string& reply, Proposal& out, std::string& why) {
        std::string body;
        if (!fenced_block(reply, body)) {
            why = "no fenced block";
            return false;
        }
        const Json j = Json::parse(body, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            why = "fenced block is not a JSON object";
            return false;
        }
        out.rationale = j.contains("rationale") && j.at("rationale").is_string()
                            ? j.at("rationale").get<std::string>()
                            : "";
        if (j.contains("terminate") && j.at("terminate").is_boolean() &&
            j.at("terminate").get<bool>()) {
            out.terminate = true;
            return true;
        }
        out.terminate = false;
        try {
            out.hyper = hyper_from_json(j);
        } catch (const std::exception& e) {
            why = e.what();
            return false;
        }
        return true;
    }

    std::shared_ptr<ChatBackend> backend_;
};

} // namespace

std::unique_ptr<Advisor> make_heuristic_advisor() { return std::make_unique<HeuristicAdvisor>(); }

std::unique_ptr<Advisor> make_random_advisor(std::uint64_t seed) {
    return std::make_unique<RandomAdvisor>(seed);
}

std::unique_ptr<Advisor> make_hillclimb_advisor(std::uint64_t seed, HillClimbParams params) {
    return std::make_unique<HillClimbAdvisor>(seed, params);
}

std::unique_ptr<ChatBackend> make_replay_backend(const std::string& dir) {
    return std::make_unique<ReplayBackend>(dir);
}

std::unique_ptr<ChatBackend> make_http_backend(HttpChatConfig config) {
    return std::make_unique<HttpBackend>(std::move(config));
}

std::unique_ptr<Advisor> make_llm_advisor(std::shared_ptr<ChatBackend> backend) {
    return std::make_unique<LlmAdvisor>(std::move(backend));
}

std::string default_prompt_template() {
    return R"(Propose the next hyper-parameter setting for the trajectory optimizer.
The goal is the highest min_sum_rate. Stay within the bounds.

Search bounds:
{{bounds}}

Completed iterations (oldest first):
{{history}}

Latest run breakdown:
{{last_metrics}}

Reply with exactly one fenced JSON block, for example:

```json
{"p_num": 100, "omega": 0.5, "c1": 2.0, "c2": 2.0,
 "k1": 2.0, "k2": 0.5, "k3": 5.0, "k4": 5.0,
 "terminate": false, "rationale": "why this setting"}
```

Set "terminate": true (the other fields may then be omitted) once you judge
the search converged.
)";
}

TuneOutcome tune(ToolClient& client, const AgentProfile& profile, Advisor& advisor,
                 const TuneOptions& options) {
    if (options.max_iters < 1)
        throw ValidationError("max_iters", "max_iters: must be >= 1");
    if (options.patience < 1) throw ValidationError("patience", "patience: must be >= 1");
    profile.bounds.validate();

    TuneOutcome out;
    double best_value = -std::numeric_limits<double>::infinity();
    int stagnant = 0;
    for (int iter = 1; iter <= options.max_iters; ++iter) {
        Proposal prop = advisor.propose(profile, out.memory);
        if (prop.terminate) {
            out.stop_reason = "terminate";
            return out;
        }
        const HyperParams hyper = profile.bounds.clamp(prop.hyper);
        Json args = hyper_to_json(hyper);
        args["p_iter"] = options.p_iter;
        args["seed"] = options.seed;
        const Json result = client.call_tool("run_ws_pso_cm", args);
        TuningRecord rec;
        rec.iteration = iter;
        rec.proposal = hyper;
        rec.record = record_from_json(result);
        rec.rationale = prop.rationale;
        out.memory.push_back(std::move(rec));

        const double value = out.memory.back().record.best.t_value;
        if (value > best_value) {
            best_value = value;
            out.best_index = iter - 1;
            stagnant = 0;
        } else {
            ++stagnant;
        }
        if (stagnant >= options.patience) {
            out.stop_reason = "patience";
            return out;
        }
    }
    out.stop_reason = "max_iters";
    return out;
}

std::string tune_report_jsonl(const TuneOutcome& outcome) {
    std::ostringstream out;
    for (const TuningRecord& r : outcome.memory) {
        Json line = record_to_json(r.record, false);
        line["iteration"] = r.iteration;
        line["rationale"] = r.rationale;
        out << line.dump() << '\n';
    }
    Json summary{{"stop_reason", outcome.stop_reason},
                 {"iterations", outcome.memory.size()}};
    if (outcome.best_index >= 0) {
        const TuningRecord& b = outcome.memory[static_cast<std::size_t>(outcome.best_index)];
        summary["best_iteration"] = b.iteration;
        summary["best_hyper"] = hyper_to_json(b.proposal);
        summary["best_min_sum_rate"] = b.record.best.t_value;
    }
    out << summary.dump() << '\n';
    return out.str();
}

} // namespace wspso
