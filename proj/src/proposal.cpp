#include "agentgraph/proposal.hpp"

#include <algorithm>
#include <cctype>
#include <tuple>

#include "agentgraph/spec_io.hpp"

namespace agentgraph {

namespace {

std::string join(const auto& items, const char* sep) {
    std::string out;
    for (const auto& x : items) {
        if (!out.empty()) out += sep;
        out += x;
    }
    return out;
}

void check_caps(const GovernorConfig& got, const GovernorConfig& cap, ValidationReport& report) {
    auto over = [&](const char* field, std::int64_t v, std::int64_t c) {
        if (v > c)
            report.diagnostics.push_back({Severity::error, "E_EXCEEDS_CONSTRAINTS", "governor",
                                          std::string(field) + " " + std::to_string(v) + " exceeds " +
                                              std::to_string(c)});
    };
    over("max_agents", got.max_agents, cap.max_agents);
    over("max_total_turns", got.max_total_turns, cap.max_total_turns);
    over("max_messages", got.max_messages, cap.max_messages);
    over("max_plugin_calls", got.max_plugin_calls, cap.max_plugin_calls);
    std::sort(report.diagnostics.begin(), report.diagnostics.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return std::tie(a.code, a.locus, a.message) < std::tie(b.code, b.locus, b.message);
    });
}

}  // namespace

std::string describe_system(const SystemGraph& g) {
    std::string out;
    out += "system " + (g.scenario.name.empty() ? std::string("(unnamed)") : g.scenario.name) + ": " +
           std::to_string(g.agents.size()) + " agents, " + std::to_string(g.plugins.size()) + " plugins, " +
           std::to_string(g.edges.size()) + " edges\n";
    out += "entry: " + g.entry.value_or("-") + "\n";
    out += "exit: " + g.exit.value_or("-") + "\n";
    for (const auto& [id, a] : g.agents) {
        out += "agent " + id + " (" + a.role.name + ")";
        if (!a.role.responsibilities.empty()) out += ": " + join(a.role.responsibilities, "; ");
        if (a.is_oracle) out += " [oracle]";
        if (a.can_spawn) out += " [spawns]";
        if (!a.halt_authority.empty()) out += " [halts " + join(a.halt_authority, ",") + "]";
        out += "\n";
    }
    for (const auto& [id, p] : g.plugins) {
        std::vector<std::string> fns;
        for (const auto& [name, sig] : p.functionalities) fns.push_back(name);
        out += "plugin " + id + " [" + p.builtin() + "]: " + join(fns, ", ") + "\n";
    }
    for (const auto& e : g.edges) out += "edge " + e.from + " -- " + e.to + "\n";
    return out;
}

Result<Proposal> propose_system(const ProposalRequest& req, Backend& designer) {
    if (std::all_of(req.objective.begin(), req.objective.end(), [](unsigned char c) { return std::isspace(c); }))
        return make_error("E_INVALID_REQUEST", "objective is empty");
    auto draft = designer.design(req.objective, req.constraints, req.designer);
    if (!draft) return make_error("E_BACKEND", draft.error().message);
    auto graph = parse_system_spec(draft.value());
    if (!graph) return make_error("E_UNPARSEABLE_DRAFT", graph.error().code + ": " + graph.error().message);

    Proposal p;
    p.draft = std::move(draft.value());
    p.graph = std::move(graph.value());
    p.report = validate_graph(p.graph);
    if (req.constraints) check_caps(p.graph.governor, *req.constraints, p.report);
    p.summary = describe_system(p.graph);
    return p;
}

}  // namespace agentgraph
