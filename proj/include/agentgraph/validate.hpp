#pragma once

#include <string>
#include <vector>

#include "agentgraph/graph.hpp"

namespace agentgraph {

enum class Severity { error, warning };

struct Diagnostic {
    Severity severity = Severity::error;
    std::string code;     // E_* or W_*
    std::string locus;    // e.g. "agent:execution", "edge:a--b"
    std::string message;

    bool operator==(const Diagnostic&) const = default;
};

struct ValidationReport {
    std::vector<Diagnostic> diagnostics;  // sorted by (code, locus, message)

    bool has_errors() const;
    std::size_t error_count() const;
    std::size_t warning_count() const;
    bool contains(const std::string& code) const;

    // One diagnostic per line, then a summary line. Deterministic.
    std::string to_text() const;
    Json to_json() const;
};

// Checks every structural invariant of a system graph. Pure and deterministic.
ValidationReport validate_graph(const SystemGraph& g);

const char* to_string(Severity s);

}  // namespace agentgraph
