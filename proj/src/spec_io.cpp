#include "agentgraph/spec_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "agentgraph/builtin_plugins.hpp"

namespace agentgraph {

namespace {

// Thrown only inside this translation unit and converted to an Error at the
// parse boundary; keeps the field-by-field reader linear.
struct ParseFailure {
    Error error;
};

[[noreturn]] void fail(std::string code, std::string message) {
    throw ParseFailure{make_error(std::move(code), std::move(message))};
}

void expect_object(const Json& j, const std::string& path) {
    if (!j.is_object()) fail("E_TYPE", path + " must be an object");
}

void check_keys(const Json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    expect_object(j, path);
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
        if (!known) fail("E_UNKNOWN_KEY", "unknown key '" + key + "' in " + path);
    }
}

const Json* field(const Json& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

const Json& required(const Json& j, const char* key, const std::string& path) {
    const Json* f = field(j, key);
    if (!f) fail("E_TYPE", path + " is missing required key '" + key + "'");
    return *f;
}

std::string as_string(const Json& j, const std::string& path) {
    if (!j.is_string()) fail("E_TYPE", path + " must be a string");
    return j.get<std::string>();
}

bool as_bool(const Json& j, const std::string& path) {
    if (!j.is_boolean()) fail("E_TYPE", path + " must be a boolean");
    return j.get<bool>();
}

std::int64_t as_int(const Json& j, const std::string& path) {
    if (!j.is_number_integer()) fail("E_TYPE", path + " must be an integer");
    return j.get<std::int64_t>();
}

double as_real(const Json& j, const std::string& path) {
    if (!j.is_number()) fail("E_TYPE", path + " must be a number");
    return j.get<double>();
}

std::vector<std::string> as_strings(const Json& j, const std::string& path) {
    if (!j.is_array()) fail("E_TYPE", path + " must be a list of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_string(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::optional<std::string> optional_id(const Json& j, const char* key, const std::string& path) {
    const Json* f = field(j, key);
    if (!f || f->is_null()) return std::nullopt;
    return as_string(*f, path + "." + key);
}

std::optional<std::int64_t> optional_bound(const Json& j, const char* key, const std::string& path) {
    const Json* f = field(j, key);
    if (!f || f->is_null() || (f->is_string() && f->get<std::string>() == "unlimited")) return std::nullopt;
    return as_int(*f, path + "." + key);
}

BackendProfile parse_profile(const Json& j, const std::string& path) {
    check_keys(j, path, {"backend_kind", "model_name", "temperature", "max_output_items"});
    BackendProfile p;
    if (auto* f = field(j, "backend_kind")) {
        auto kind = as_string(*f, path + ".backend_kind");
        if (kind == "scripted") p.backend_kind = BackendKind::scripted;
        else if (kind == "http") p.backend_kind = BackendKind::http;
        else fail("E_TYPE", path + ".backend_kind must be 'scripted' or 'http'");
    }
    if (auto* f = field(j, "model_name")) p.model_name = as_string(*f, path + ".model_name");
    if (auto* f = field(j, "temperature")) p.temperature = as_real(*f, path + ".temperature");
    if (auto* f = field(j, "max_output_items"))
        p.max_output_items = static_cast<int>(as_int(*f, path + ".max_output_items"));
    return p;
}

RoleSpec parse_role(const Json& j, const std::string& path) {
    check_keys(j, path, {"name", "responsibilities", "keywords"});
    RoleSpec r;
    r.name = as_string(required(j, "name", path), path + ".name");
    if (auto* f = field(j, "responsibilities")) r.responsibilities = as_strings(*f, path + ".responsibilities");
    for (auto& k : as_strings(required(j, "keywords", path), path + ".keywords")) r.keywords.insert(lowercase(k));
    return r;
}

AgentSpec parse_agent(const Json& j, const std::string& path) {
    check_keys(j, path, {"id", "backend_profile", "role", "can_spawn", "halt_authority", "is_oracle",
                         "initial_knowledge"});
    AgentSpec a;
    a.id = as_string(required(j, "id", path), path + ".id");
    if (auto* f = field(j, "backend_profile")) a.backend_profile = parse_profile(*f, path + ".backend_profile");
    a.role = parse_role(required(j, "role", path), path + ".role");
    if (auto* f = field(j, "can_spawn")) a.can_spawn = as_bool(*f, path + ".can_spawn");
    if (auto* f = field(j, "halt_authority"))
        for (auto& h : as_strings(*f, path + ".halt_authority")) a.halt_authority.insert(h);
    if (auto* f = field(j, "is_oracle")) a.is_oracle = as_bool(*f, path + ".is_oracle");
    if (auto* f = field(j, "initial_knowledge")) a.initial_knowledge = as_strings(*f, path + ".initial_knowledge");
    return a;
}

Schema parse_schema(const Json& j, const std::string& path) {
    expect_object(j, path);
    Schema s;
    for (const auto& [k, v] : j.items()) {
        auto type = as_string(v, path + "." + k);
        static const char* kTypes[] = {"string", "int", "bool", "list", "object", "any"};
        if (std::none_of(std::begin(kTypes), std::end(kTypes), [&](const char* t) { return type == t; }))
            fail("E_TYPE", path + "." + k + " has unknown type '" + type + "'");
        s[k] = type;
    }
    return s;
}

FunctionSignature parse_function(const Json& j, const std::string& builtin, const std::string& path) {
    if (j.is_string()) {
        auto name = j.get<std::string>();
        if (builtin == "stub") return stub_default_signature(name);
        const auto* table = builtin_functions(builtin);
        if (!table) fail("E_PLUGIN_CONFIG", path + ": bare function names need a known builtin");
        auto it = table->find(name);
        if (it == table->end()) fail("E_PLUGIN_CONFIG", path + ": builtin " + builtin + " has no function '" + name + "'");
        return it->second;
    }
    check_keys(j, path, {"name", "input", "output"});
    FunctionSignature f;
    f.name = as_string(required(j, "name", path), path + ".name");
    if (auto* in = field(j, "input")) f.input = parse_schema(*in, path + ".input");
    if (auto* out = field(j, "output")) f.output = parse_schema(*out, path + ".output");
    return f;
}

PluginSpec parse_plugin(const Json& j, const std::string& path) {
    check_keys(j, path, {"id", "functionalities", "config", "constraints"});
    PluginSpec p;
    p.id = as_string(required(j, "id", path), path + ".id");
    if (auto* f = field(j, "config")) {
        expect_object(*f, path + ".config");
        for (const auto& [k, v] : f->items()) {
            if (!v.is_primitive() || v.is_null()) fail("E_TYPE", path + ".config." + k + " must be a scalar");
            p.config[k] = v;
        }
    }
    if (auto* f = field(j, "functionalities")) {
        if (!f->is_array()) fail("E_TYPE", path + ".functionalities must be a list");
        for (std::size_t i = 0; i < f->size(); ++i) {
            auto sig = parse_function((*f)[i], p.builtin(), path + ".functionalities[" + std::to_string(i) + "]");
            if (p.functionalities.count(sig.name))
                fail("E_DUP_FUNCTION", path + " declares function '" + sig.name + "' twice");
            p.functionalities.emplace(sig.name, std::move(sig));
        }
    }
    if (auto* f = field(j, "constraints")) {
        const auto cpath = path + ".constraints";
        check_keys(*f, cpath, {"max_calls_per_run", "max_payload_bytes", "allowed_callers"});
        p.constraints.max_calls_per_run = optional_bound(*f, "max_calls_per_run", cpath);
        p.constraints.max_payload_bytes = optional_bound(*f, "max_payload_bytes", cpath);
        if (auto* ac = field(*f, "allowed_callers")) {
            if (ac->is_string() && ac->get<std::string>() == "any") {
                p.constraints.allowed_callers.reset();
            } else {
                std::set<AgentId> callers;
                for (auto& a : as_strings(*ac, cpath + ".allowed_callers")) callers.insert(a);
                p.constraints.allowed_callers = std::move(callers);
            }
        }
    }
    return p;
}

GovernorConfig parse_governor(const Json& j) {
    const std::string path = "governor";
    check_keys(j, path, {"max_agents", "max_total_turns", "max_messages", "max_plugin_calls",
                         "overlap_threshold", "spawn_freeze_at", "channel_queue_cap"});
    GovernorConfig g;
    if (auto* f = field(j, "max_agents")) g.max_agents = as_int(*f, path + ".max_agents");
    if (auto* f = field(j, "max_total_turns")) g.max_total_turns = as_int(*f, path + ".max_total_turns");
    if (auto* f = field(j, "max_messages")) g.max_messages = as_int(*f, path + ".max_messages");
    if (auto* f = field(j, "max_plugin_calls")) g.max_plugin_calls = as_int(*f, path + ".max_plugin_calls");
    if (auto* f = field(j, "overlap_threshold")) g.overlap_threshold = as_real(*f, path + ".overlap_threshold");
    if (auto* f = field(j, "spawn_freeze_at")) g.spawn_freeze_at = as_real(*f, path + ".spawn_freeze_at");
    if (auto* f = field(j, "channel_queue_cap")) g.channel_queue_cap = as_int(*f, path + ".channel_queue_cap");
    return g;
}

SupervisorConfig parse_supervisor(const Json& j) {
    const std::string path = "scenario.supervisor";
    check_keys(j, path, {"agent", "window", "repeat_threshold", "period_max", "watch_list", "offtask_oracle"});
    SupervisorConfig s;
    s.agent = as_string(required(j, "agent", path), path + ".agent");
    if (auto* f = field(j, "window")) s.window = static_cast<int>(as_int(*f, path + ".window"));
    if (auto* f = field(j, "repeat_threshold"))
        s.repeat_threshold = static_cast<int>(as_int(*f, path + ".repeat_threshold"));
    if (auto* f = field(j, "period_max")) s.period_max = static_cast<int>(as_int(*f, path + ".period_max"));
    if (auto* f = field(j, "watch_list"))
        for (auto& w : as_strings(*f, path + ".watch_list")) s.watch_list.insert(w);
    s.offtask_oracle = optional_id(j, "offtask_oracle", path);
    return s;
}

ScenarioSettings parse_scenario(const Json& j) {
    const std::string path = "scenario";
    check_keys(j, path, {"name", "description", "quiescence_rounds", "seed", "supervisor"});
    ScenarioSettings s;
    if (auto* f = field(j, "name")) s.name = as_string(*f, path + ".name");
    if (auto* f = field(j, "description")) s.description = as_string(*f, path + ".description");
    if (auto* f = field(j, "quiescence_rounds"))
        s.quiescence_rounds = static_cast<int>(as_int(*f, path + ".quiescence_rounds"));
    if (auto* f = field(j, "seed")) {
        if (!f->is_number_unsigned() && !f->is_number_integer()) fail("E_TYPE", "scenario.seed must be an integer");
        s.seed = f->get<std::uint64_t>();
    }
    if (auto* f = field(j, "supervisor"); f && !f->is_null()) s.supervisor = parse_supervisor(*f);
    return s;
}

SystemGraph parse_graph(const Json& doc) {
    check_keys(doc, "spec", {"agents", "plugins", "edges", "entry", "exit", "governor", "scenario"});
    SystemGraph g;
    const Json& agents = required(doc, "agents", "spec");
    if (!agents.is_array()) fail("E_TYPE", "agents must be a list");
    for (std::size_t i = 0; i < agents.size(); ++i) {
        auto a = parse_agent(agents[i], "agents[" + std::to_string(i) + "]");
        if (g.agents.count(a.id)) fail("E_DUP_ID", "agent id '" + a.id + "' appears twice");
        g.agents.emplace(a.id, std::move(a));
    }
    if (auto* plugins = field(doc, "plugins")) {
        if (!plugins->is_array()) fail("E_TYPE", "plugins must be a list");
        for (std::size_t i = 0; i < plugins->size(); ++i) {
            auto p = parse_plugin((*plugins)[i], "plugins[" + std::to_string(i) + "]");
            if (g.plugins.count(p.id)) fail("E_DUP_ID", "plugin id '" + p.id + "' appears twice");
            g.plugins.emplace(p.id, std::move(p));
        }
    }
    if (auto* edges = field(doc, "edges")) {
        if (!edges->is_array()) fail("E_TYPE", "edges must be a list");
        for (std::size_t i = 0; i < edges->size(); ++i) {
            const auto path = "edges[" + std::to_string(i) + "]";
            const Json& e = (*edges)[i];
            check_keys(e, path, {"from", "to", "kind"});
            auto from = as_string(required(e, "from", path), path + ".from");
            auto to = as_string(required(e, "to", path), path + ".to");
            EdgeKind kind = (g.is_plugin(from) || g.is_plugin(to)) ? EdgeKind::agent_plugin : EdgeKind::agent_agent;
            if (auto* k = field(e, "kind")) {
                auto ks = as_string(*k, path + ".kind");
                if (ks == "agent_agent") kind = EdgeKind::agent_agent;
                else if (ks == "agent_plugin") kind = EdgeKind::agent_plugin;
                else fail("E_TYPE", path + ".kind must be agent_agent or agent_plugin");
            }
            g.edges.insert(make_edge(from, to, kind));
        }
    }
    g.entry = optional_id(doc, "entry", "spec");
    g.exit = optional_id(doc, "exit", "spec");
    if (auto* f = field(doc, "governor")) g.governor = parse_governor(*f);
    if (auto* f = field(doc, "scenario")) g.scenario = parse_scenario(*f);
    return g;
}

Json schema_json(const Schema& s) {
    Json j = Json::object();
    for (const auto& [k, v] : s) j[k] = v;
    return j;
}

Json optional_json(const std::optional<std::string>& v) { return v ? Json(*v) : Json(nullptr); }

Json bound_json(const std::optional<std::int64_t>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json to_json(const AgentSpec& a) {
    const auto& p = a.backend_profile;
    return Json{
        {"id", a.id},
        {"backend_profile", {{"backend_kind", to_string(p.backend_kind)},
                             {"model_name", p.model_name},
                             {"temperature", p.temperature},
                             {"max_output_items", p.max_output_items}}},
        {"role", {{"name", a.role.name}, {"responsibilities", a.role.responsibilities}, {"keywords", a.role.keywords}}},
        {"can_spawn", a.can_spawn},
        {"halt_authority", a.halt_authority},
        {"is_oracle", a.is_oracle},
        {"initial_knowledge", a.initial_knowledge},
    };
}

Json to_json(const PluginSpec& p) {
    Json fns = Json::array();
    for (const auto& [name, f] : p.functionalities)
        fns.push_back(Json{{"name", f.name}, {"input", schema_json(f.input)}, {"output", schema_json(f.output)}});
    Json config = Json::object();
    for (const auto& [k, v] : p.config) config[k] = v;
    const auto& u = p.constraints;
    Json callers = u.allowed_callers ? Json(*u.allowed_callers) : Json("any");
    return Json{{"id", p.id},
                {"functionalities", fns},
                {"config", config},
                {"constraints",
                 {{"max_calls_per_run", bound_json(u.max_calls_per_run)},
                  {"max_payload_bytes", bound_json(u.max_payload_bytes)},
                  {"allowed_callers", callers}}}};
}

Json to_json(const SystemGraph& g) {
    Json agents = Json::array();
    for (const auto& [id, a] : g.agents) agents.push_back(to_json(a));
    Json plugins = Json::array();
    for (const auto& [id, p] : g.plugins) plugins.push_back(to_json(p));
    Json edges = Json::array();
    for (const auto& e : g.edges) edges.push_back(Json{{"from", e.from}, {"to", e.to}, {"kind", to_string(e.kind)}});
    const auto& gov = g.governor;
    Json governor{{"max_agents", gov.max_agents},
                  {"max_total_turns", gov.max_total_turns},
                  {"max_messages", gov.max_messages},
                  {"max_plugin_calls", gov.max_plugin_calls},
                  {"overlap_threshold", gov.overlap_threshold},
                  {"spawn_freeze_at", gov.spawn_freeze_at},
                  {"channel_queue_cap", gov.channel_queue_cap}};
    const auto& sc = g.scenario;
    Json supervisor = nullptr;
    if (sc.supervisor) {
        const auto& s = *sc.supervisor;
        supervisor = Json{{"agent", s.agent},
                          {"window", s.window},
                          {"repeat_threshold", s.repeat_threshold},
                          {"period_max", s.period_max},
                          {"watch_list", s.watch_list},
                          {"offtask_oracle", optional_json(s.offtask_oracle)}};
    }
    Json scenario{{"name", sc.name},
                  {"description", sc.description},
                  {"quiescence_rounds", sc.quiescence_rounds},
                  {"seed", sc.seed},
                  {"supervisor", supervisor}};
    return Json{{"agents", agents},   {"plugins", plugins},       {"edges", edges},      {"entry", optional_json(g.entry)},
                {"exit", optional_json(g.exit)}, {"governor", governor}, {"scenario", scenario}};
}

std::string serialize_system_spec(const SystemGraph& g) { return to_json(g).dump(2) + "\n"; }

Result<AgentSpec> agent_spec_from_json(const Json& j, const std::string& path) {
    try {
        return parse_agent(j, path);
    } catch (const ParseFailure& f) {
        return f.error;
    }
}

Result<SystemGraph> parse_system_spec(std::string_view text) {
    Json doc = Json::parse(text.begin(), text.end(), nullptr, false);
    if (doc.is_discarded()) return make_error("E_PARSE", "spec is not valid JSON");
    try {
        return parse_graph(doc);
    } catch (const ParseFailure& f) {
        return f.error;
    } catch (const Json::exception& e) {
        return make_error("E_TYPE", e.what());
    }
}

Result<std::string> read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return make_error("E_IO", "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Result<SystemGraph> load_system_spec(const std::filesystem::path& path) {
    auto text = read_text_file(path);
    if (!text) return text.error();
    return parse_system_spec(text.value());
}

}  // namespace agentgraph
