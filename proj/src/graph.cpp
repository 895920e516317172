#include "agentgraph/graph.hpp"

namespace agentgraph {

std::string PluginSpec::builtin() const {
    auto it = config.find("builtin");
    if (it == config.end() || !it->second.is_string()) return {};
    return it->second.get<std::string>();
}

Edge make_edge(const NodeId& a, const NodeId& b, EdgeKind kind) {
    if (b < a) return Edge{b, a, kind};
    return Edge{a, b, kind};
}

bool SystemGraph::has_edge(const NodeId& a, const NodeId& b) const {
    const auto& lo = a < b ? a : b;
    const auto& hi = a < b ? b : a;
    auto it = edges.lower_bound(Edge{lo, hi, EdgeKind::agent_agent});
    return it != edges.end() && it->from == lo && it->to == hi;
}

std::set<NodeId> SystemGraph::neighbors(const NodeId& id) const {
    std::set<NodeId> out;
    for (const auto& e : edges) {
        if (e.from == id) out.insert(e.to);
        else if (e.to == id) out.insert(e.from);
    }
    return out;
}

void SystemGraph::connect(const NodeId& a, const NodeId& b) {
    bool plugin_side = is_plugin(a) || is_plugin(b);
    edges.insert(make_edge(a, b, plugin_side ? EdgeKind::agent_plugin : EdgeKind::agent_agent));
}

const char* to_string(BackendKind kind) {
    return kind == BackendKind::http ? "http" : "scripted";
}

const char* to_string(EdgeKind kind) {
    return kind == EdgeKind::agent_plugin ? "agent_plugin" : "agent_agent";
}

}  // namespace agentgraph
