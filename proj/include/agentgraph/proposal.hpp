#pragma once

#include <optional>
#include <string>

#include "agentgraph/backend.hpp"
#include "agentgraph/graph.hpp"
#include "agentgraph/result.hpp"
#include "agentgraph/validate.hpp"

namespace agentgraph {

struct ProposalRequest {
    std::string objective;
    std::optional<GovernorConfig> constraints;  // caps the draft must stay within
    BackendProfile designer;
};

struct Proposal {
    std::string draft;  // raw designer output
    SystemGraph graph;
    ValidationReport report;
    std::string summary;

    bool accepted() const { return !report.has_errors(); }
};

// Asks the designer backend for a system spec and validates it. A draft that
// does not parse is E_UNPARSEABLE_DRAFT; one that parses but breaks an
// invariant or exceeds the constraints comes back with errors in `report`.
Result<Proposal> propose_system(const ProposalRequest& req, Backend& designer);

// Plain-text, deterministic description of a system: roles, plugins, edges.
std::string describe_system(const SystemGraph& g);

}  // namespace agentgraph
