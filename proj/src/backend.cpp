#include "agentgraph/backend.hpp"

#include <algorithm>
#include <charconv>

#include "agentgraph/spec_io.hpp"

namespace agentgraph {

namespace {

Error script_error(const std::string& what) { return make_error("E_SCRIPT", what); }

Status only_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& path) {
    if (!j.is_object()) return script_error(path + " must be an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            return script_error("unknown key '" + key + "' in " + path);
    }
    return ok_status();
}

Status check_decision(const Json& d, const std::string& agent, const std::string& path) {
    auto parsed = decision_from_json(d, agent.empty() ? "_" : agent);
    if (!parsed) return script_error(path + ": " + parsed.error().message);
    return ok_status();
}

Status check_script(const Json& s) {
    if (auto st = only_keys(s, {"prompt", "agents", "default", "oracles", "designer"}, "script"); !st) return st;
    if (s.contains("prompt") && !s["prompt"].is_string()) return script_error("prompt must be a string");
    if (s.contains("default"))
        if (auto st = check_decision(s["default"], "", "default"); !st) return st;
    if (s.contains("agents")) {
        if (!s["agents"].is_object()) return script_error("agents must be an object");
        for (const auto& [id, rules] : s["agents"].items()) {
            const auto path = "agents." + id;
            if (auto st = only_keys(rules, {"turns", "default"}, path); !st) return st;
            if (rules.contains("default"))
                if (auto st = check_decision(rules["default"], id, path + ".default"); !st) return st;
            if (rules.contains("turns")) {
                if (!rules["turns"].is_object()) return script_error(path + ".turns must be an object");
                for (const auto& [turn, d] : rules["turns"].items()) {
                    std::int64_t n = -1;
                    auto [ptr, ec] = std::from_chars(turn.data(), turn.data() + turn.size(), n);
                    if (ec != std::errc{} || ptr != turn.data() + turn.size() || n < 0)
                        return script_error(path + ".turns key '" + turn + "' is not a turn number");
                    if (auto st = check_decision(d, id, path + ".turns." + turn); !st) return st;
                }
            }
        }
    }
    if (s.contains("oracles")) {
        if (!s["oracles"].is_object()) return script_error("oracles must be an object");
        for (const auto& [id, rules] : s["oracles"].items()) {
            const auto path = "oracles." + id;
            if (auto st = only_keys(rules, {"responses", "default"}, path); !st) return st;
            if (rules.contains("default") && !rules["default"].is_string())
                return script_error(path + ".default must be a string");
            if (rules.contains("responses")) {
                if (!rules["responses"].is_object()) return script_error(path + ".responses must be an object");
                for (const auto& [in, out] : rules["responses"].items())
                    if (!out.is_string()) return script_error(path + ".responses values must be strings");
            }
        }
    }
    if (s.contains("designer"))
        if (auto st = only_keys(s["designer"], {"drafts", "default"}, "designer"); !st) return st;
    return ok_status();
}

std::string draft_text(const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(2); }

}  // namespace

Result<ScriptedBackend> ScriptedBackend::from_json(const Json& script) {
    if (auto st = check_script(script); !st) return st.error();
    ScriptedBackend b;
    b.script_ = script;
    if (script.contains("prompt")) b.prompt_ = script["prompt"].get<std::string>();
    return b;
}

Result<ScriptedBackend> ScriptedBackend::from_text(std::string_view text) {
    Json j = Json::parse(text.begin(), text.end(), nullptr, false);
    if (j.is_discarded()) return script_error("script is not valid JSON");
    return from_json(j);
}

Result<ScriptedBackend> ScriptedBackend::from_file(const std::filesystem::path& path) {
    auto text = read_text_file(path);
    if (!text) return text.error();
    return from_text(text.value());
}

Result<BackendDecision> ScriptedBackend::lookup(const AgentId& agent, std::int64_t turn_count) const {
    const Json* rules = nullptr;
    if (auto a = script_.find("agents"); a != script_.end())
        if (auto r = a->find(agent); r != a->end()) rules = &*r;
    if (rules) {
        if (auto turns = rules->find("turns"); turns != rules->end())
            if (auto d = turns->find(std::to_string(turn_count)); d != turns->end())
                return decision_from_json(*d, agent);
        if (auto d = rules->find("default"); d != rules->end()) return decision_from_json(*d, agent);
    }
    if (auto d = script_.find("default"); d != script_.end()) return decision_from_json(*d, agent);
    auto out = yield_decision();
    out.warning = "E_SCRIPT_EXHAUSTED";
    return out;
}

Result<BackendDecision> ScriptedBackend::decide(const TurnSnapshot& snapshot, const BackendProfile&) {
    return lookup(snapshot.agent_id, snapshot.agent_turn);
}

Result<std::string> ScriptedBackend::oracle(const AgentId& oracle, const RoleSpec&, std::string_view input,
                                            const BackendProfile&) {
    auto o = script_.find("oracles");
    if (o != script_.end()) {
        if (auto rules = o->find(oracle); rules != o->end()) {
            if (auto resp = rules->find("responses"); resp != rules->end())
                if (auto hit = resp->find(std::string(input)); hit != resp->end()) return hit->get<std::string>();
            if (auto d = rules->find("default"); d != rules->end()) return d->get<std::string>();
        }
    }
    return make_error("E_BACKEND", "E_SCRIPT_EXHAUSTED: no scripted output for oracle " + oracle);
}

Result<std::string> ScriptedBackend::design(const std::string& objective, const std::optional<GovernorConfig>&,
                                            const BackendProfile&) {
    auto d = script_.find("designer");
    if (d != script_.end()) {
        if (auto drafts = d->find("drafts"); drafts != d->end() && drafts->is_object())
            if (auto hit = drafts->find(objective); hit != drafts->end()) return draft_text(*hit);
        if (auto def = d->find("default"); def != d->end()) return draft_text(*def);
    }
    return make_error("E_BACKEND", "E_SCRIPT_EXHAUSTED: no scripted draft");
}

Result<Backend*> RoutedBackend::pick(const BackendProfile& profile) const {
    Backend* target = nullptr;
    switch (mode_) {
        case Mode::scripted: target = scripted_; break;
        case Mode::http: target = http_; break;
        case Mode::by_profile: target = profile.backend_kind == BackendKind::http ? http_ : scripted_; break;
    }
    if (!target) return make_error("E_BACKEND", "no backend configured for this profile");
    return target;
}

Result<BackendDecision> RoutedBackend::decide(const TurnSnapshot& snapshot, const BackendProfile& profile) {
    auto b = pick(profile);
    if (!b) return b.error();
    return b.value()->decide(snapshot, profile);
}

Result<std::string> RoutedBackend::oracle(const AgentId& oracle, const RoleSpec& role, std::string_view input,
                                          const BackendProfile& profile) {
    auto b = pick(profile);
    if (!b) return b.error();
    return b.value()->oracle(oracle, role, input, profile);
}

Result<std::string> RoutedBackend::design(const std::string& objective, const std::optional<GovernorConfig>& constraints,
                                          const BackendProfile& profile) {
    auto b = pick(profile);
    if (!b) return b.error();
    return b.value()->design(objective, constraints, profile);
}

}  // namespace agentgraph
