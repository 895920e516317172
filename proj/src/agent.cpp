#include "agentgraph/agent.hpp"

#include <algorithm>
#include <initializer_list>

#include "agentgraph/spec_io.hpp"

namespace agentgraph {

namespace {

Error bad(const std::string& what) { return make_error("E_BACKEND", "malformed decision: " + what); }

bool only_keys(const Json& j, std::initializer_list<const char*> allowed, std::string& offending) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            offending = key;
            return false;
        }
    }
    return true;
}

Result<std::vector<std::string>> strings(const Json& j, const char* key) {
    std::vector<std::string> out;
    auto it = j.find(key);
    if (it == j.end()) return out;
    if (!it->is_array()) return bad(std::string(key) + " must be a list");
    for (const auto& v : *it) {
        if (!v.is_string()) return bad(std::string(key) + " must hold strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

Json knowledge_json(const std::vector<KnowledgeItem>& items) {
    Json arr = Json::array();
    for (const auto& k : items) arr.push_back(Json{{"tag", k.tag}, {"text", k.text}});
    return arr;
}

}  // namespace

const char* to_string(AgentStatus s) {
    switch (s) {
        case AgentStatus::idle: return "idle";
        case AgentStatus::active: return "active";
        case AgentStatus::halted: return "halted";
    }
    return "idle";
}

Json to_json(const AgentState& s) {
    return Json{{"knowledge", knowledge_json(s.knowledge)},
                {"thoughts", s.thoughts},
                {"status", to_string(s.status)},
                {"turn_count", s.turn_count}};
}

bool BackendDecision::is_idle() const {
    return new_thoughts.empty() && knowledge_updates.empty() && outgoing.empty() && plugin_calls.empty() &&
           spawn_requests.empty() && halt_requests.empty();
}

std::size_t BackendDecision::largest_list() const {
    return std::max({new_thoughts.size(), knowledge_updates.size(), outgoing.size(), plugin_calls.size(),
                     spawn_requests.size(), halt_requests.size()});
}

BackendDecision yield_decision() {
    BackendDecision d;
    d.yield = true;
    return d;
}

Result<BackendDecision> decision_from_json(const Json& j, const AgentId& self) {
    if (j.is_string() && j.get<std::string>() == "yield") return yield_decision();
    if (!j.is_object()) return bad("decision must be an object or \"yield\"");
    std::string offending;
    if (!only_keys(j, {"new_thoughts", "knowledge_updates", "outgoing", "plugin_calls", "spawn_requests",
                       "halt_requests", "yield"},
                   offending))
        return bad("unknown key '" + offending + "'");

    BackendDecision d;
    auto thoughts = strings(j, "new_thoughts");
    if (!thoughts) return thoughts.error();
    d.new_thoughts = std::move(thoughts.value());
    auto knowledge = strings(j, "knowledge_updates");
    if (!knowledge) return knowledge.error();
    d.knowledge_updates = std::move(knowledge.value());
    auto halts = strings(j, "halt_requests");
    if (!halts) return halts.error();
    d.halt_requests = std::move(halts.value());

    if (auto it = j.find("yield"); it != j.end()) {
        if (!it->is_boolean()) return bad("yield must be a boolean");
        d.yield = it->get<bool>();
    }
    if (auto it = j.find("outgoing"); it != j.end()) {
        if (!it->is_array()) return bad("outgoing must be a list");
        for (const auto& o : *it) {
            if (!o.is_object() || !only_keys(o, {"to", "content", "action"}, offending))
                return bad("outgoing entries are {to, content, action}");
            if (!o.contains("to") || !o["to"].is_string() || !o.contains("content") || !o["content"].is_string() ||
                !o.contains("action") || !o["action"].is_string())
                return bad("outgoing entries need string to/content/action");
            auto action = parse_action(o["action"].get<std::string>());
            if (!action) return bad("unknown action '" + o["action"].get<std::string>() + "'");
            d.outgoing.push_back({o["to"].get<std::string>(), o["content"].get<std::string>(), *action});
        }
    }
    if (auto it = j.find("plugin_calls"); it != j.end()) {
        if (!it->is_array()) return bad("plugin_calls must be a list");
        for (const auto& c : *it) {
            if (!c.is_object() || !only_keys(c, {"plugin", "function", "args"}, offending))
                return bad("plugin_calls entries are {plugin, function, args}");
            if (!c.contains("plugin") || !c["plugin"].is_string() || !c.contains("function") ||
                !c["function"].is_string())
                return bad("plugin_calls entries need string plugin/function");
            Json args = c.contains("args") ? c["args"] : Json::object();
            if (!args.is_object()) return bad("plugin call args must be an object");
            d.plugin_calls.push_back({self, c["plugin"].get<std::string>(), c["function"].get<std::string>(), args});
        }
    }
    if (auto it = j.find("spawn_requests"); it != j.end()) {
        if (!it->is_array()) return bad("spawn_requests must be a list");
        for (const auto& s : *it) {
            if (!s.is_object() || !only_keys(s, {"child", "edges", "goal"}, offending))
                return bad("spawn_requests entries are {child, edges, goal}");
            if (!s.contains("child")) return bad("spawn request needs a child spec");
            auto child = agent_spec_from_json(s["child"], "spawn_requests.child");
            if (!child) return bad(child.error().message);
            SpawnRequest req;
            req.creator = self;
            req.child_spec = std::move(child.value());
            auto edges = strings(s, "edges");
            if (!edges) return edges.error();
            req.requested_edges.insert(edges->begin(), edges->end());
            if (s.contains("goal")) {
                if (!s["goal"].is_string()) return bad("goal must be a string");
                req.initial_goal = s["goal"].get<std::string>();
            }
            d.spawn_requests.push_back(std::move(req));
        }
    }
    return d;
}

Json to_json(const BackendDecision& d) {
    Json outgoing = Json::array();
    for (const auto& o : d.outgoing)
        outgoing.push_back(Json{{"to", o.to}, {"content", o.content}, {"action", to_string(o.action)}});
    Json calls = Json::array();
    for (const auto& c : d.plugin_calls)
        calls.push_back(Json{{"plugin", c.plugin}, {"function", c.function}, {"args", c.args}});
    Json spawns = Json::array();
    for (const auto& s : d.spawn_requests)
        spawns.push_back(Json{{"child", to_json(s.child_spec)}, {"edges", s.requested_edges}, {"goal", s.initial_goal}});
    return Json{{"new_thoughts", d.new_thoughts},   {"knowledge_updates", d.knowledge_updates},
                {"outgoing", outgoing},             {"plugin_calls", calls},
                {"spawn_requests", spawns},         {"halt_requests", d.halt_requests},
                {"yield", d.yield}};
}

Json to_json(const TurnSnapshot& s) {
    Json inbox = Json::array();
    for (const auto& m : s.inbox) inbox.push_back(to_json(m));
    Json functions = Json::array();
    for (const auto& [plugin, sigs] : s.visible_plugins) {
        for (const auto& f : sigs) {
            Json in = Json::object(), out = Json::object();
            for (const auto& [k, v] : f.input) in[k] = v;
            for (const auto& [k, v] : f.output) out[k] = v;
            functions.push_back(Json{{"plugin", plugin}, {"name", f.name}, {"input", in}, {"output", out}});
        }
    }
    return Json{{"agent_id", s.agent_id},
                {"role", {{"name", s.role.name}, {"responsibilities", s.role.responsibilities}, {"keywords", s.role.keywords}}},
                {"knowledge", knowledge_json(s.knowledge)},
                {"thoughts", s.thoughts},
                {"inbox", inbox},
                {"functions", functions},
                {"neighbors", s.neighbors},
                {"turn", s.turn},
                {"agent_turn", s.agent_turn}};
}

}  // namespace agentgraph
