#include "agentgraph/diff.hpp"

#include <algorithm>
#include <iterator>

#include "agentgraph/spec_io.hpp"
#include "agentgraph/validate.hpp"

namespace agentgraph {

namespace {

template <typename Spec>
void diff_maps(const std::map<NodeId, Spec>& before, const std::map<NodeId, Spec>& after,
               std::vector<Spec>& added, std::set<NodeId>& removed, std::vector<Spec>& changed) {
    for (const auto& [id, spec] : after) {
        auto it = before.find(id);
        if (it == before.end()) added.push_back(spec);
        else if (!(it->second == spec)) changed.push_back(spec);
    }
    for (const auto& [id, spec] : before)
        if (!after.count(id)) removed.insert(id);
}

Json optional_node(const std::optional<NodeId>& n) { return n ? Json(*n) : Json(nullptr); }

}  // namespace

bool ChangeSet::empty() const {
    return added_agents.empty() && removed_agents.empty() && changed_agents.empty() && added_plugins.empty() &&
           removed_plugins.empty() && changed_plugins.empty() && added_edges.empty() && removed_edges.empty() &&
           !entry && !exit && !governor && !scenario;
}

Json ChangeSet::to_json() const {
    auto ids = [](const auto& specs) {
        Json arr = Json::array();
        for (const auto& s : specs) arr.push_back(s.id);
        return arr;
    };
    auto edges = [](const std::set<Edge>& es) {
        Json arr = Json::array();
        for (const auto& e : es) arr.push_back(e.from + "--" + e.to);
        return arr;
    };
    Json j{{"added_agents", ids(added_agents)},     {"removed_agents", removed_agents},
           {"changed_agents", ids(changed_agents)}, {"added_plugins", ids(added_plugins)},
           {"removed_plugins", removed_plugins},    {"changed_plugins", ids(changed_plugins)},
           {"added_edges", edges(added_edges)},     {"removed_edges", edges(removed_edges)}};
    if (entry) j["entry"] = optional_node(*entry);
    if (exit) j["exit"] = optional_node(*exit);
    j["governor_changed"] = governor.has_value();
    j["scenario_changed"] = scenario.has_value();
    return j;
}

Result<ChangeSet> diff_graphs(const SystemGraph& old_graph, const SystemGraph& new_graph) {
    if (validate_graph(old_graph).has_errors()) return make_error("E_INVALID_GRAPH", "old graph does not validate");
    if (validate_graph(new_graph).has_errors()) return make_error("E_INVALID_GRAPH", "new graph does not validate");
    ChangeSet cs;
    diff_maps(old_graph.agents, new_graph.agents, cs.added_agents, cs.removed_agents, cs.changed_agents);
    diff_maps(old_graph.plugins, new_graph.plugins, cs.added_plugins, cs.removed_plugins, cs.changed_plugins);
    std::set_difference(new_graph.edges.begin(), new_graph.edges.end(), old_graph.edges.begin(),
                        old_graph.edges.end(), std::inserter(cs.added_edges, cs.added_edges.end()));
    std::set_difference(old_graph.edges.begin(), old_graph.edges.end(), new_graph.edges.begin(),
                        new_graph.edges.end(), std::inserter(cs.removed_edges, cs.removed_edges.end()));
    if (old_graph.entry != new_graph.entry) cs.entry = new_graph.entry;
    if (old_graph.exit != new_graph.exit) cs.exit = new_graph.exit;
    if (!(old_graph.governor == new_graph.governor)) cs.governor = new_graph.governor;
    if (!(old_graph.scenario == new_graph.scenario)) cs.scenario = new_graph.scenario;
    return cs;
}

SystemGraph apply_changes(SystemGraph g, const ChangeSet& cs) {
    for (const auto& id : cs.removed_agents) g.agents.erase(id);
    for (const auto& id : cs.removed_plugins) g.plugins.erase(id);
    for (const auto& a : cs.added_agents) g.agents[a.id] = a;
    for (const auto& a : cs.changed_agents) g.agents[a.id] = a;
    for (const auto& p : cs.added_plugins) g.plugins[p.id] = p;
    for (const auto& p : cs.changed_plugins) g.plugins[p.id] = p;
    for (const auto& e : cs.removed_edges) g.edges.erase(e);
    for (const auto& e : cs.added_edges) g.edges.insert(e);
    if (cs.entry) g.entry = *cs.entry;
    if (cs.exit) g.exit = *cs.exit;
    if (cs.governor) g.governor = *cs.governor;
    if (cs.scenario) g.scenario = *cs.scenario;
    return g;
}

}  // namespace agentgraph
