#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "agentgraph/agent.hpp"
#include "agentgraph/graph.hpp"
#include "agentgraph/result.hpp"

namespace agentgraph {

// The model behind an agent. Implementations must not keep per-agent memory
// between calls; everything they may use arrives in the arguments.
class Backend {
public:
    virtual ~Backend() = default;

    virtual Result<BackendDecision> decide(const TurnSnapshot& snapshot, const BackendProfile& profile) = 0;

    // Stateless single-shot call used for oracle agents.
    virtual Result<std::string> oracle(const AgentId& oracle, const RoleSpec& role, std::string_view input,
                                       const BackendProfile& profile) = 0;

    // Drafts a system spec document for an objective.
    virtual Result<std::string> design(const std::string& objective, const std::optional<GovernorConfig>& constraints,
                                       const BackendProfile& profile) = 0;
};

// Table-driven test double. Script document:
//
//   {
//     "prompt":  "optional default user prompt",
//     "agents":  { "<id>": { "turns": { "<turn_count>": <decision> }, "default": <decision> } },
//     "default": <decision>,                      // applies to agents without a rule
//     "oracles": { "<id>": { "responses": { "<input>": "<output>" }, "default": "<output>" } },
//     "designer": { "drafts": { "<objective>": <text or spec object> }, "default": <text or spec object> }
//   }
//
// A <decision> is a decision object or the string "yield". Lookup is pure:
// the same (agent, turn_count) always yields the same decision. With no
// matching entry and no default the result is a yield carrying the warning
// E_SCRIPT_EXHAUSTED. Temperature is ignored.
class ScriptedBackend final : public Backend {
public:
    static Result<ScriptedBackend> from_json(const Json& script);
    static Result<ScriptedBackend> from_text(std::string_view text);
    static Result<ScriptedBackend> from_file(const std::filesystem::path& path);

    Result<BackendDecision> decide(const TurnSnapshot& snapshot, const BackendProfile& profile) override;
    Result<std::string> oracle(const AgentId& oracle, const RoleSpec& role, std::string_view input,
                               const BackendProfile& profile) override;
    Result<std::string> design(const std::string& objective, const std::optional<GovernorConfig>& constraints,
                               const BackendProfile& profile) override;

    // Pure lookup shared by decide().
    Result<BackendDecision> lookup(const AgentId& agent, std::int64_t turn_count) const;

    const std::optional<std::string>& prompt() const { return prompt_; }
    const Json& script() const { return script_; }

private:
    Json script_;
    std::optional<std::string> prompt_;
};

// One POST per turn to a configured endpoint. Request body (JSON):
//   decide: {mode:"decide", agent_id, role, knowledge, thoughts, inbox, functions, neighbors, turn,
//            model, temperature, max_output_items}  ->  BackendDecision JSON
//   oracle: {mode:"oracle", agent_id, role, input, model, temperature}  ->  {"output": text}
//   design: {mode:"design", objective, constraints, model, temperature}  ->  {"draft": text}
// Any transport failure, non-2xx status or malformed body is E_BACKEND.
class HttpBackend final : public Backend {
public:
    HttpBackend(std::string url, std::string token = {}, int timeout_seconds = 60);

    // Reads AGENTGRAPH_BACKEND_URL and AGENTGRAPH_BACKEND_TOKEN.
    static Result<HttpBackend> from_env();

    Result<BackendDecision> decide(const TurnSnapshot& snapshot, const BackendProfile& profile) override;
    Result<std::string> oracle(const AgentId& oracle, const RoleSpec& role, std::string_view input,
                               const BackendProfile& profile) override;
    Result<std::string> design(const std::string& objective, const std::optional<GovernorConfig>& constraints,
                               const BackendProfile& profile) override;

    const std::string& url() const { return url_; }

private:
    Result<Json> post(const Json& body) const;

    std::string url_;
    std::string token_;
    int timeout_seconds_;
};

// Routes each call to the scripted or HTTP backend according to the agent's
// profile. Either side may be absent; routing to an absent side is E_BACKEND.
class RoutedBackend final : public Backend {
public:
    enum class Mode { by_profile, scripted, http };

    RoutedBackend(Backend* scripted, Backend* http, Mode mode = Mode::by_profile)
        : scripted_(scripted), http_(http), mode_(mode) {}

    Result<BackendDecision> decide(const TurnSnapshot& snapshot, const BackendProfile& profile) override;
    Result<std::string> oracle(const AgentId& oracle, const RoleSpec& role, std::string_view input,
                               const BackendProfile& profile) override;
    Result<std::string> design(const std::string& objective, const std::optional<GovernorConfig>& constraints,
                               const BackendProfile& profile) override;

private:
    Result<Backend*> pick(const BackendProfile& profile) const;

    Backend* scripted_;
    Backend* http_;
    Mode mode_;
};

}  // namespace agentgraph
