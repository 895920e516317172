#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "agentgraph/backend.hpp"
#include "agentgraph/engine.hpp"
#include "agentgraph/graph.hpp"
#include "agentgraph/result.hpp"

namespace agentgraph {

struct ReplayReport {
    bool identical = false;
    std::optional<std::uint64_t> first_divergence_seq;
    std::string expected_line;  // empty when the recorded log ended first
    std::string actual_line;    // empty when the re-run ended first
    std::size_t expected_events = 0;
    std::size_t actual_events = 0;

    Json to_json() const;
};

// Re-executes a recorded run (prompt, seed, quiescence and run id taken from
// its run_start event) against `graph` and `backend`, and compares the logs
// line by line. E_LOG_CORRUPT if the log cannot be parsed or has no run_start.
Result<ReplayReport> replay(std::string_view recorded_log, const SystemGraph& graph, Backend& backend,
                            RunConfig base = {});

}  // namespace agentgraph
