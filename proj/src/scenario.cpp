#include "agentgraph/scenario.hpp"

#include "agentgraph/builtin_plugins.hpp"
#include "agentgraph/spec_io.hpp"

namespace agentgraph {

namespace {

bool matches(const Json& event, const Json& pattern) {
    for (auto it = pattern.begin(); it != pattern.end(); ++it) {
        auto f = event.find(it.key());
        if (f == event.end() || *f != it.value()) return false;
    }
    return true;
}

std::optional<std::size_t> first_match(const std::vector<Json>& events, const Json& pattern) {
    for (std::size_t i = 0; i < events.size(); ++i)
        if (matches(events[i], pattern)) return i;
    return std::nullopt;
}

}  // namespace

const std::vector<std::string>& shipped_scenarios() {
    static const std::vector<std::string> names{"autogpt_single", "babyagi_chain", "courtroom",
                                                "critic_refiner", "gorilla_router", "softdev_team"};
    return names;
}

Result<ScenarioBundle> load_bundle(const std::filesystem::path& dir) {
    ScenarioBundle b;
    b.dir = dir;
    b.name = dir.filename().string();
    if (b.name.empty()) b.name = dir.parent_path().filename().string();
    auto graph = load_system_spec(dir / "spec.json");
    if (!graph) return graph.error();
    b.graph = std::move(graph.value());

    auto script = read_text_file(dir / "script.json");
    if (!script) return script.error();
    b.script = Json::parse(script.value(), nullptr, false);
    if (b.script.is_discarded() || !b.script.is_object())
        return make_error("E_PARSE", (dir / "script.json").string() + " is not a JSON object");
    if (auto p = b.script.find("prompt"); p != b.script.end() && p->is_string()) b.prompt = p->get<std::string>();

    b.expected = Json::object();
    if (std::filesystem::exists(dir / "expected.json")) {
        auto text = read_text_file(dir / "expected.json");
        if (!text) return text.error();
        b.expected = Json::parse(text.value(), nullptr, false);
        if (b.expected.is_discarded() || !b.expected.is_object())
            return make_error("E_PARSE", (dir / "expected.json").string() + " is not a JSON object");
    }
    return b;
}

std::vector<std::string> check_expectations(const Json& expected, const Engine& engine, const RunOutcome& outcome) {
    std::vector<std::string> fails;
    const auto& events = engine.log().events();

    if (auto e = expected.find("outcome"); e != expected.end() && *e != outcome.outcome)
        fails.push_back("outcome " + outcome.outcome + ", expected " + e->get<std::string>());

    if (auto e = expected.find("final_response"); e != expected.end()) {
        Json got = outcome.final_response ? Json(*outcome.final_response) : Json(nullptr);
        if (got != *e) fails.push_back("final_response " + got.dump() + ", expected " + e->dump());
    }

    if (auto e = expected.find("event_counts"); e != expected.end()) {
        for (auto it = e->begin(); it != e->end(); ++it) {
            auto n = engine.log().count(it.key());
            if (n != it.value().get<std::size_t>())
                fails.push_back("event " + it.key() + " count " + std::to_string(n) + ", expected " +
                                it.value().dump());
        }
    }

    if (auto e = expected.find("task_results"); e != expected.end()) {
        const auto id = e->value("plugin", std::string{});
        const auto* inst = engine.plugin(id);
        const auto* store = inst ? dynamic_cast<const TaskStorePlugin*>(&inst->impl()) : nullptr;
        if (!store) {
            fails.push_back("task_results: " + id + " is not a task store");
        } else {
            Json got = Json::array();
            for (const auto& r : store->results()) got.push_back(r.task_id);
            if (got != (*e)["order"]) fails.push_back("task results " + got.dump() + ", expected " + (*e)["order"].dump());
        }
    }

    if (auto e = expected.find("action_sequence"); e != expected.end()) {
        std::size_t next = 0;
        for (const auto& ev : events) {
            if (next >= e->size()) break;
            if (ev["kind"] != "send") continue;
            auto tag = ev["sender"].get<std::string>() + ">" + ev["receiver"].get<std::string>() + ":" +
                       ev["action"].get<std::string>();
            if (tag == (*e)[next].get<std::string>()) ++next;
        }
        if (next < e->size()) fails.push_back("action sequence stops before " + (*e)[next].dump());
    }

    if (auto e = expected.find("precedes"); e != expected.end()) {
        for (const auto& p : *e) {
            auto a = first_match(events, p["first"]);
            auto b = first_match(events, p["then"]);
            if (!a || !b || *a >= *b)
                fails.push_back("expected " + p["first"].dump() + " before " + p["then"].dump());
        }
    }
    return fails;
}

Result<BundleRun> self_test(const ScenarioBundle& bundle, RunConfig cfg) {
    auto backend = ScriptedBackend::from_json(bundle.script);
    if (!backend) return backend.error();
    auto engine = Engine::create(bundle.graph, backend.value(), std::move(cfg));
    if (!engine) return engine.error();
    auto outcome = engine->run(bundle.prompt);
    if (!outcome) return outcome.error();
    BundleRun run;
    run.outcome = std::move(outcome.value());
    run.log_text = engine->log().text();
    run.failures = check_expectations(bundle.expected, engine.value(), run.outcome);
    return run;
}

}  // namespace agentgraph
