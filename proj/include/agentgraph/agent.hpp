#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "agentgraph/graph.hpp"
#include "agentgraph/message.hpp"
#include "agentgraph/plugin.hpp"
#include "agentgraph/result.hpp"

namespace agentgraph {

struct KnowledgeItem {
    std::string tag;  // "seed", "backend", "plugin:<id>.<fn>"
    std::string text;

    bool operator==(const KnowledgeItem&) const = default;
};

enum class AgentStatus { idle, active, halted };
const char* to_string(AgentStatus s);

// Evolving state of an agent. Knowledge is append-only; thoughts are capped
// with oldest-first eviction.
struct AgentState {
    std::vector<KnowledgeItem> knowledge;
    std::vector<std::string> thoughts;
    AgentStatus status = AgentStatus::idle;
    std::int64_t turn_count = 0;

    bool operator==(const AgentState&) const = default;
};

Json to_json(const AgentState& s);

struct OutgoingMessage {
    NodeId to;
    std::string content;
    ActionKind action = ActionKind::report;

    bool operator==(const OutgoingMessage&) const = default;
};

struct SpawnRequest {
    AgentId creator;
    AgentSpec child_spec;
    std::set<NodeId> requested_edges;
    std::string initial_goal;

    bool operator==(const SpawnRequest&) const = default;
};

// What a backend wants the agent to do this turn.
struct BackendDecision {
    std::vector<std::string> new_thoughts;
    std::vector<std::string> knowledge_updates;
    std::vector<OutgoingMessage> outgoing;
    std::vector<PluginCall> plugin_calls;
    std::vector<SpawnRequest> spawn_requests;
    std::vector<AgentId> halt_requests;
    bool yield = false;

    // Set by a backend that fell back to a default (e.g. exhausted script).
    std::optional<std::string> warning;

    // True when applying the decision would change nothing.
    bool is_idle() const;
    std::size_t largest_list() const;

    bool operator==(const BackendDecision&) const = default;
};

BackendDecision yield_decision();

// Strict decoding; unknown keys or actions give E_BACKEND. `self` becomes the
// caller of plugin calls and the creator of spawn requests.
Result<BackendDecision> decision_from_json(const Json& j, const AgentId& self);
Json to_json(const BackendDecision& d);

// Everything the backend may see for one turn: the agent's own state and
// whatever sits on its own edges.
struct TurnSnapshot {
    AgentId agent_id;
    RoleSpec role;
    std::vector<KnowledgeItem> knowledge;
    std::vector<std::string> thoughts;
    std::vector<Message> inbox;
    std::vector<std::pair<PluginId, std::vector<FunctionSignature>>> visible_plugins;
    std::vector<AgentId> neighbors;
    int turn = 0;                 // round
    std::int64_t agent_turn = 0;  // agent's own turn_count

    bool operator==(const TurnSnapshot&) const = default;
};

Json to_json(const TurnSnapshot& s);

struct TurnRecord {
    AgentId agent;
    int round = 0;
    std::int64_t agent_turn = 0;
    TurnSnapshot snapshot;
    BackendDecision decision;
    std::vector<Json> effects;  // events logged during the turn
    std::uint64_t signature = 0;
    bool idle = true;
};

}  // namespace agentgraph
