#pragma once

#include <optional>
#include <set>
#include <vector>

#include "agentgraph/graph.hpp"
#include "agentgraph/result.hpp"

namespace agentgraph {

struct ChangeSet {
    std::vector<AgentSpec> added_agents;
    std::set<AgentId> removed_agents;
    std::vector<AgentSpec> changed_agents;  // same id, new spec
    std::vector<PluginSpec> added_plugins;
    std::set<PluginId> removed_plugins;
    std::vector<PluginSpec> changed_plugins;
    std::set<Edge> added_edges;
    std::set<Edge> removed_edges;
    // Outer optional: whether the designation changed at all.
    std::optional<std::optional<NodeId>> entry;
    std::optional<std::optional<NodeId>> exit;
    std::optional<GovernorConfig> governor;
    std::optional<ScenarioSettings> scenario;

    bool empty() const;
    Json to_json() const;
};

// Both graphs must validate without errors (E_INVALID_GRAPH otherwise).
Result<ChangeSet> diff_graphs(const SystemGraph& old_graph, const SystemGraph& new_graph);

SystemGraph apply_changes(SystemGraph g, const ChangeSet& cs);

}  // namespace agentgraph
