// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "wspso/json_io.hpp"
#include "wspso/swarm.hpp"
#include "wspso/tool_client.hpp"

namespace wspso {

struct ParamBounds {
    double lo = 0.0;
    double hi = 1.0;
};

/// Search ranges for the eight tuned values. Defaults span both presets'
/// conventional roles; widen them when a search should reach extreme points.
struct Bounds {
    ParamBounds p_num{10, 200};
    ParamBounds omega{0.0, 1.5};
    ParamBounds c1{0.0, 4.0};
    ParamBounds c2{0.0, 4.0};
    ParamBounds k1{0.0, 10.0};
    ParamBounds k2{0.0, 10.0};
    ParamBounds k3{0.0, 10.0};
    ParamBounds k4{0.0, 10.0};

    void validate() const; ///< lo < hi per parameter, all finite
    HyperParams clamp(const HyperParams& h) const;
};

/// What the advisor sees: who it is, what it knows, what it must emit, and
/// where it may search.
struct AgentProfile {
    std::string mission;
    std::string background;
    std::string output_format;
    Bounds bounds;

    static AgentProfile standard();
};

/// One executed tuning iteration.
struct TuningRecord {
    int iteration = 0; ///< 1-based, contiguous
    HyperParams proposal; ///< as executed (post-clamp)
    RunRecord record;
    std::string rationale;
};

/// Advisor output: either the next eight values or a stop signal.
struct Proposal {
    bool terminate = false;
    HyperParams hyper;
    std::string rationale;
};

class Advisor {
public:
    virtual ~Advisor() = default;
    virtual Proposal propose(const AgentProfile& profile,
                             const std::vector<TuningRecord>& memory) = 0;
};

/// Always proposes the conventional preset; never stops on its own.
std::unique_ptr<Advisor> make_heuristic_advisor();

/// Uniform draws within bounds each call; never stops on its own.
std::unique_ptr<Advisor> make_random_advisor(std::uint64_t seed);

struct HillClimbParams {
    double step_fraction = 0.15; ///< perturbation half-width as a range fraction
    int patience = 3;            ///< consecutive non-improving runs before stopping
};

/// Starts from the conventional preset, then perturbs the best-so-far
/// record coordinate-wise; self-terminates after `patience` non-improving
/// executed proposals.
std::unique_ptr<Advisor> make_hillclimb_advisor(std::uint64_t seed,
                                                HillClimbParams params = {});

/// Chat-completion text in, assistant text out.
class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual std::string complete(const std::string& system_prompt,
                                 const std::string& user_prompt) = 0;
};

/// Replays canned assistant replies from numbered files in a directory,
/// in filename order. Deterministic; the only backend used by tests.
std::unique_ptr<ChatBackend> make_replay_backend(const std::string& dir);

struct HttpChatConfig {
    std::string base_url;  ///< scheme://host[:port]
    std::string path = "/v1/chat/completions";
    std::string model;
    std::string api_key_env = "LLM_API_KEY"; ///< key read from this env var only
    double timeout_s = 120.0;
};

/// Live chat-completions endpoint. The API key never appears in any file;
/// an unset env var fails at first use.
std::unique_ptr<ChatBackend> make_http_backend(HttpChatConfig config);

/// Renders the profile and session memory into the prompt template, asks
/// the backend, and parses the fenced JSON block of the reply. One
/// corrective retry on a malformed reply, then a diagnostic abort.
std::unique_ptr<Advisor> make_llm_advisor(std::shared_ptr<ChatBackend> backend);

/// The prompt template, as shipped in prompts/tuning_prompt.md.
std::string default_prompt_template();

struct TuneOptions {
    int max_iters = 12;
    int patience = 3;   ///< loop-level stop on stagnant min_sum_rate
    int p_iter = 50;    ///< optimizer iterations per run
    std::uint64_t seed = 0; ///< run seed, shared by every iteration
};

struct TuneOutcome {
    std::vector<TuningRecord> memory;
    int best_index = -1; ///< 0-based into memory; highest min_sum_rate, earliest tie
    std::string stop_reason; ///< "terminate" | "max_iters" | "patience"
};

/// The tuning loop: propose, clamp, invoke the run tool, observe, repeat.
TuneOutcome tune(ToolClient& client, const AgentProfile& profile, Advisor& advisor,
                 const TuneOptions& options = {});

/// Deterministic session report: one JSON line per iteration (run-record
/// schema minus timing, plus iteration and rationale) and a summary line.
std::string tune_report_jsonl(const TuneOutcome& outcome);

} // namespace wspso
