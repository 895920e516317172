#pragma once

#include <string>

#include "agentgraph/graph.hpp"
#include "agentgraph/result.hpp"

namespace agentgraph {

// GraphViz DOT text: agents as ellipses (oracles dashed), plugins as boxes,
// one line per node and per edge, sorted by id. Fails with E_INVALID_GRAPH if
// the graph does not validate.
Result<std::string> export_dot(const SystemGraph& g);

}  // namespace agentgraph
