#include "agentgraph/validate.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <sstream>
#include <tuple>

#include "agentgraph/builtin_plugins.hpp"

namespace agentgraph {

namespace {

class Collector {
public:
    void error(std::string code, std::string locus, std::string message) {
        out_.push_back({Severity::error, std::move(code), std::move(locus), std::move(message)});
    }
    void warning(std::string code, std::string locus, std::string message) {
        out_.push_back({Severity::warning, std::move(code), std::move(locus), std::move(message)});
    }
    std::vector<Diagnostic> take() {
        std::sort(out_.begin(), out_.end(), [](const Diagnostic& a, const Diagnostic& b) {
            return std::tie(a.code, a.locus, a.message) < std::tie(b.code, b.locus, b.message);
        });
        out_.erase(std::unique(out_.begin(), out_.end()), out_.end());
        return std::move(out_);
    }

private:
    std::vector<Diagnostic> out_;
};

std::string agent_locus(const std::string& id) { return "agent:" + id; }
std::string plugin_locus(const std::string& id) { return "plugin:" + id; }
std::string edge_locus(const Edge& e) { return "edge:" + e.from + "--" + e.to; }

bool is_lowercase(const std::string& s) {
    return std::none_of(s.begin(), s.end(), [](unsigned char c) { return std::isupper(c); });
}

// Nodes reachable from `start` over undirected edges.
std::set<NodeId> reachable_from(const SystemGraph& g, const NodeId& start) {
    std::map<NodeId, std::vector<NodeId>> adj;
    for (const auto& e : g.edges) {
        adj[e.from].push_back(e.to);
        adj[e.to].push_back(e.from);
    }
    std::set<NodeId> seen{start};
    std::deque<NodeId> frontier{start};
    while (!frontier.empty()) {
        auto n = frontier.front();
        frontier.pop_front();
        for (const auto& m : adj[n])
            if (seen.insert(m).second) frontier.push_back(m);
    }
    return seen;
}

void check_agents(const SystemGraph& g, Collector& c) {
    for (const auto& [key, a] : g.agents) {
        const auto locus = agent_locus(key);
        if (key != a.id) c.error("E_BAD_ID", locus, "map key does not match agent id '" + a.id + "'");
        if (!is_valid_node_id(key)) c.error("E_BAD_ID", locus, "id must match [a-z0-9_]{1,64}");
        if (g.is_plugin(key)) c.error("E_DUP_ID", locus, "id is used by both an agent and a plugin");
        if (a.halt_authority.count(key)) c.error("E_SELF_HALT", locus, "agent holds halt authority over itself");
        for (const auto& h : a.halt_authority)
            if (h != key && !g.is_agent(h))
                c.error("E_DANGLING_REF", locus, "halt_authority names unknown agent '" + h + "'");
        if (a.is_oracle && (a.can_spawn || !a.halt_authority.empty()))
            c.error("E_ORACLE_PRIVILEGE", locus, "oracle agents may not spawn or halt");
        if (a.is_oracle && !a.initial_knowledge.empty())
            c.error("E_ORACLE_STATE", locus, "oracle agents carry no knowledge");
        if (a.role.keywords.empty()) c.error("E_ROLE_KEYWORDS", locus, "role keyword set is empty");
        for (const auto& k : a.role.keywords)
            if (k.empty() || !is_lowercase(k))
                c.error("E_ROLE_KEYWORDS", locus, "keyword '" + k + "' is not lowercase-normalized");
        const auto& p = a.backend_profile;
        if (!(p.temperature >= 0.0 && p.temperature <= 2.0))
            c.error("E_BAD_TEMPERATURE", locus, "temperature must lie in [0, 2]");
        if (p.max_output_items < 1) c.error("E_BACKEND_PROFILE", locus, "max_output_items must be positive");
    }
}

void check_plugins(const SystemGraph& g, Collector& c) {
    for (const auto& [key, p] : g.plugins) {
        const auto locus = plugin_locus(key);
        if (key != p.id) c.error("E_BAD_ID", locus, "map key does not match plugin id '" + p.id + "'");
        if (!is_valid_node_id(key)) c.error("E_BAD_ID", locus, "id must match [a-z0-9_]{1,64}");
        for (const auto& [name, f] : p.functionalities)
            if (name != f.name) c.error("E_DUP_FUNCTION", locus, "function key mismatch for '" + f.name + "'");
        const auto& u = p.constraints;
        if (u.max_calls_per_run && *u.max_calls_per_run < 0)
            c.error("E_NEGATIVE_BOUND", locus, "max_calls_per_run is negative");
        if (u.max_payload_bytes && *u.max_payload_bytes < 0)
            c.error("E_NEGATIVE_BOUND", locus, "max_payload_bytes is negative");
        if (u.allowed_callers)
            for (const auto& a : *u.allowed_callers)
                if (!g.is_agent(a))
                    c.warning("W_UNKNOWN_CALLER", locus, "allowed_callers names unknown agent '" + a + "'");
        for (const auto& [k, v] : p.config)
            if (v.is_object() || v.is_array() || v.is_null())
                c.error("E_PLUGIN_CONFIG", locus, "config value '" + k + "' is not a scalar");
        const auto builtin = p.builtin();
        if (!is_known_builtin(builtin)) {
            c.error("E_PLUGIN_CONFIG", locus, "unknown builtin '" + builtin + "'");
            continue;
        }
        if (builtin == "stub") {
            for (const auto& [name, f] : p.functionalities)
                if (f.output != Schema{{"output", "string"}})
                    c.error("E_PLUGIN_CONFIG", locus, "stub function '" + name + "' must output {output: string}");
            continue;
        }
        const auto* known = builtin_functions(builtin);
        for (const auto& [name, f] : p.functionalities) {
            auto it = known->find(name);
            if (it == known->end())
                c.error("E_PLUGIN_CONFIG", locus, builtin + " does not implement '" + name + "'");
            else if (it->second.input != f.input || it->second.output != f.output)
                c.error("E_PLUGIN_CONFIG", locus, "signature of '" + name + "' differs from the builtin");
        }
    }
}

void check_edges(const SystemGraph& g, Collector& c) {
    for (const auto& e : g.edges) {
        const auto locus = edge_locus(e);
        bool dangling = false;
        for (const auto* end : {&e.from, &e.to}) {
            if (!g.has_node(*end)) {
                c.error("E_DANGLING_REF", locus, "edge endpoint '" + *end + "' does not exist");
                dangling = true;
            }
        }
        if (e.from == e.to) {
            c.error("E_SELF_EDGE", locus, "edge joins a node to itself");
            continue;
        }
        if (dangling) continue;
        if (g.is_plugin(e.from) && g.is_plugin(e.to)) {
            c.error("E_PLUGIN_PLUGIN_EDGE", locus, "edges may not join two plugins");
            continue;
        }
        auto expected = (g.is_plugin(e.from) || g.is_plugin(e.to)) ? EdgeKind::agent_plugin : EdgeKind::agent_agent;
        if (e.kind != expected)
            c.error("E_EDGE_KIND", locus, std::string("edge kind should be ") + to_string(expected));
    }
}

void check_designations(const SystemGraph& g, Collector& c) {
    if (g.entry && !g.has_node(*g.entry))
        c.error("E_DANGLING_REF", "entry", "entry node '" + *g.entry + "' does not exist");
    if (g.entry && g.is_plugin(*g.entry) && g.plugins.at(*g.entry).builtin() != "board")
        c.error("E_ENTRY_KIND", "entry", "a plugin entry node must be a board");
    if (g.exit && !g.has_node(*g.exit))
        c.error("E_DANGLING_REF", "exit", "exit node '" + *g.exit + "' does not exist");
}

void check_connectivity(const SystemGraph& g, Collector& c) {
    std::set<NodeId> touched;
    for (const auto& e : g.edges) {
        touched.insert(e.from);
        touched.insert(e.to);
    }
    for (const auto& [id, a] : g.agents) {
        bool designated = (g.entry && *g.entry == id) || (g.exit && *g.exit == id);
        if (!touched.count(id) && !designated)
            c.warning("W_ISOLATED", agent_locus(id), "agent has no edges and is neither entry nor exit");
        for (const auto& h : a.halt_authority) {
            if (h == id || !g.is_agent(h)) continue;
            if (!reachable_from(g, id).count(h))
                c.warning("W_HALT_UNREACHABLE", agent_locus(id), "no edge path to halt target '" + h + "'");
        }
    }
    std::set<NodeId> all;
    for (const auto& [id, a] : g.agents) all.insert(id);
    for (const auto& [id, p] : g.plugins) all.insert(id);
    if (all.size() > 1 && reachable_from(g, *all.begin()).size() < all.size())
        c.warning("W_DISCONNECTED", "graph", "graph has more than one connected component");
}

void check_governor(const GovernorConfig& gov, Collector& c) {
    auto bad = [&](const std::string& what) { c.error("E_GOVERNOR_CONFIG", "governor", what); };
    if (gov.max_agents <= 0) bad("max_agents must be positive");
    if (gov.max_total_turns <= 0) bad("max_total_turns must be positive");
    if (gov.max_messages <= 0) bad("max_messages must be positive");
    if (gov.max_plugin_calls <= 0) bad("max_plugin_calls must be positive");
    if (gov.channel_queue_cap <= 0) bad("channel_queue_cap must be positive");
    if (!(gov.overlap_threshold >= 0.0 && gov.overlap_threshold <= 1.0)) bad("overlap_threshold must lie in [0, 1]");
    if (!(gov.spawn_freeze_at > 0.0 && gov.spawn_freeze_at <= 1.0)) bad("spawn_freeze_at must lie in (0, 1]");
}

void check_scenario(const SystemGraph& g, Collector& c) {
    if (g.scenario.quiescence_rounds < 1)
        c.error("E_SCENARIO_CONFIG", "scenario", "quiescence_rounds must be at least 1");
    if (!g.scenario.supervisor) return;
    const auto& s = *g.scenario.supervisor;
    const std::string locus = "scenario.supervisor";
    if (!(s.window >= s.repeat_threshold && s.repeat_threshold >= 2))
        c.error("E_SUPERVISOR_CONFIG", locus, "require window >= repeat_threshold >= 2");
    if (s.period_max < 1) c.error("E_SUPERVISOR_CONFIG", locus, "period_max must be at least 1");
    if (!g.is_agent(s.agent)) {
        c.error("E_DANGLING_REF", locus, "supervisor agent '" + s.agent + "' does not exist");
        return;
    }
    const auto& authority = g.agents.at(s.agent).halt_authority;
    for (const auto& w : s.watch_list) {
        if (!g.is_agent(w)) c.error("E_DANGLING_REF", locus, "watch_list names unknown agent '" + w + "'");
        else if (!authority.count(w))
            c.error("E_NO_AUTHORITY", locus, "supervisor lacks halt authority over '" + w + "'");
    }
    if (s.offtask_oracle) {
        auto it = g.agents.find(*s.offtask_oracle);
        if (it == g.agents.end())
            c.error("E_DANGLING_REF", locus, "offtask_oracle '" + *s.offtask_oracle + "' does not exist");
        else if (!it->second.is_oracle)
            c.error("E_SUPERVISOR_CONFIG", locus, "offtask_oracle must be an oracle agent");
    }
}

}  // namespace

const char* to_string(Severity s) { return s == Severity::error ? "error" : "warning"; }

bool ValidationReport::has_errors() const { return error_count() > 0; }

std::size_t ValidationReport::error_count() const {
    return static_cast<std::size_t>(std::count_if(diagnostics.begin(), diagnostics.end(),
                                                  [](const auto& d) { return d.severity == Severity::error; }));
}

std::size_t ValidationReport::warning_count() const { return diagnostics.size() - error_count(); }

bool ValidationReport::contains(const std::string& code) const {
    return std::any_of(diagnostics.begin(), diagnostics.end(), [&](const auto& d) { return d.code == code; });
}

std::string ValidationReport::to_text() const {
    std::ostringstream out;
    for (const auto& d : diagnostics)
        out << to_string(d.severity) << ' ' << d.code << ' ' << d.locus << ": " << d.message << '\n';
    out << error_count() << " error(s), " << warning_count() << " warning(s)\n";
    return out.str();
}

Json ValidationReport::to_json() const {
    Json arr = Json::array();
    for (const auto& d : diagnostics)
        arr.push_back(Json{{"severity", to_string(d.severity)}, {"code", d.code}, {"locus", d.locus},
                           {"message", d.message}});
    return Json{{"diagnostics", arr}, {"errors", error_count()}, {"warnings", warning_count()}};
}

ValidationReport validate_graph(const SystemGraph& g) {
    Collector c;
    check_agents(g, c);
    check_plugins(g, c);
    check_edges(g, c);
    check_designations(g, c);
    check_connectivity(g, c);
    check_governor(g.governor, c);
    check_scenario(g, c);
    return ValidationReport{c.take()};
}

}  // namespace agentgraph
