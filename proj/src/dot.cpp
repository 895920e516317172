#include "agentgraph/dot.hpp"

#include <sstream>

#include "agentgraph/validate.hpp"

namespace agentgraph {

Result<std::string> export_dot(const SystemGraph& g) {
    if (auto report = validate_graph(g); report.has_errors())
        return make_error("E_INVALID_GRAPH", std::to_string(report.error_count()) + " validation error(s)");
    std::ostringstream out;
    out << "graph agentgraph {\n";
    for (const auto& [id, a] : g.agents) {
        out << "  \"" << id << "\" [shape=ellipse";
        if (a.is_oracle) out << ", style=dashed";
        out << "];\n";
    }
    for (const auto& [id, p] : g.plugins) out << "  \"" << id << "\" [shape=box];\n";
    for (const auto& e : g.edges) out << "  \"" << e.from << "\" -- \"" << e.to << "\";\n";
    out << "}\n";
    return out.str();
}

}  // namespace agentgraph
