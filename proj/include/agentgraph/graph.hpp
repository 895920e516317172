#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "agentgraph/ids.hpp"

namespace agentgraph {

using Json = nlohmann::json;

enum class BackendKind { scripted, http };

// Model instance driving an agent: model name plus generation parameters.
struct BackendProfile {
    BackendKind backend_kind = BackendKind::scripted;
    std::string model_name = "scripted";
    double temperature = 0.0;  // [0, 2]
    int max_output_items = 16;

    bool operator==(const BackendProfile&) const = default;
};

struct RoleSpec {
    std::string name;
    std::vector<std::string> responsibilities;
    std::set<std::string> keywords;  // lowercase, non-empty

    bool operator==(const RoleSpec&) const = default;
};

struct AgentSpec {
    AgentId id;
    BackendProfile backend_profile;
    RoleSpec role;
    bool can_spawn = false;
    std::set<AgentId> halt_authority;
    bool is_oracle = false;
    std::vector<std::string> initial_knowledge;

    bool operator==(const AgentSpec&) const = default;
};

// Field name -> type name ("string", "int", "bool", "list", "object", "any").
using Schema = std::map<std::string, std::string>;

struct FunctionSignature {
    std::string name;
    Schema input;
    Schema output;

    bool operator==(const FunctionSignature&) const = default;
};

struct UsageConstraints {
    std::optional<std::int64_t> max_calls_per_run;  // nullopt = unlimited
    std::optional<std::int64_t> max_payload_bytes;  // nullopt = unlimited
    std::optional<std::set<AgentId>> allowed_callers;  // nullopt = any

    bool operator==(const UsageConstraints&) const = default;
};

struct PluginSpec {
    PluginId id;
    std::map<std::string, FunctionSignature> functionalities;  // keyed by name
    std::map<std::string, Json> config;  // scalar values only
    UsageConstraints constraints;

    // Built-in implementation named by config["builtin"], empty if absent.
    std::string builtin() const;

    bool operator==(const PluginSpec&) const = default;
};

enum class EdgeKind { agent_agent, agent_plugin };

// Undirected channel. Stored canonically with from < to.
struct Edge {
    NodeId from;
    NodeId to;
    EdgeKind kind = EdgeKind::agent_agent;

    auto operator<=>(const Edge&) const = default;
    bool operator==(const Edge&) const = default;
};

Edge make_edge(const NodeId& a, const NodeId& b, EdgeKind kind);

struct GovernorConfig {
    std::int64_t max_agents = 32;
    std::int64_t max_total_turns = 1000;
    std::int64_t max_messages = 10000;
    std::int64_t max_plugin_calls = 5000;
    double overlap_threshold = 0.8;
    double spawn_freeze_at = 0.9;
    std::int64_t channel_queue_cap = 256;

    bool operator==(const GovernorConfig&) const = default;
};

struct SupervisorConfig {
    AgentId agent;  // the supervising agent
    int window = 12;
    int repeat_threshold = 3;
    int period_max = 1;
    std::set<AgentId> watch_list;
    std::optional<AgentId> offtask_oracle;

    bool operator==(const SupervisorConfig&) const = default;
};

struct ScenarioSettings {
    std::string name;
    std::string description;
    int quiescence_rounds = 2;
    std::uint64_t seed = 0;
    std::optional<SupervisorConfig> supervisor;

    bool operator==(const ScenarioSettings&) const = default;
};

// The whole environment: agents and plugins as vertices, channels as edges.
struct SystemGraph {
    std::map<AgentId, AgentSpec> agents;
    std::map<PluginId, PluginSpec> plugins;
    std::set<Edge> edges;
    std::optional<NodeId> entry;
    std::optional<NodeId> exit;
    GovernorConfig governor;
    ScenarioSettings scenario;

    bool is_agent(const NodeId& id) const { return agents.count(id) > 0; }
    bool is_plugin(const NodeId& id) const { return plugins.count(id) > 0; }
    bool has_node(const NodeId& id) const { return is_agent(id) || is_plugin(id); }
    bool has_edge(const NodeId& a, const NodeId& b) const;
    std::set<NodeId> neighbors(const NodeId& id) const;

    // Adds the edge with its kind derived from endpoint categories.
    void connect(const NodeId& a, const NodeId& b);

    bool operator==(const SystemGraph&) const = default;
};

const char* to_string(BackendKind kind);
const char* to_string(EdgeKind kind);

}  // namespace agentgraph
