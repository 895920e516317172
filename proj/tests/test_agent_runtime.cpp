#include <gtest/gtest.h>

#include <thread>

#include "httplib.h"

#include "agentgraph/agent.hpp"
#include "agentgraph/backend.hpp"
#include "agentgraph/engine.hpp"
#include "support.hpp"

using namespace agentgraph;
using namespace testsupport;

namespace {

SystemGraph duo(bool oracle_b = false) {
    SystemGraph g;
    g.agents["a"] = make_agent("a");
    g.agents["b"] = make_agent("b");
    g.agents["b"].is_oracle = oracle_b;
    g.connect("a", "b");
    g.entry = "a";
    g.exit = "a";
    return g;
}

// Backend that fails every decide call.
class FailingBackend final : public Backend {
public:
    Result<BackendDecision> decide(const TurnSnapshot&, const BackendProfile&) override {
        return make_error("E_BACKEND", "model unavailable");
    }
    Result<std::string> oracle(const AgentId&, const RoleSpec&, std::string_view, const BackendProfile&) override {
        return make_error("E_BACKEND", "model unavailable");
    }
    Result<std::string> design(const std::string&, const std::optional<GovernorConfig>&,
                               const BackendProfile&) override {
        return make_error("E_BACKEND", "model unavailable");
    }
};

}  // namespace

TEST(StepAgent, YieldWithEmptyInbox) {
    auto backend = script(Json{{"default", "yield"}});
    auto e = must(Engine::create(duo(), backend));
    auto before = *e.agent_state("a");
    auto rec = must(e.step_agent("a"));
    EXPECT_TRUE(rec.idle);
    const auto& after = *e.agent_state("a");
    EXPECT_EQ(after.turn_count, before.turn_count + 1);
    EXPECT_EQ(after.knowledge, before.knowledge);
    EXPECT_EQ(after.thoughts, before.thoughts);
    EXPECT_EQ(e.log().count("send"), 0u);
}

TEST(StepAgent, SingleSendFixture) {
    auto g = load_spec(fixture("single_send_spec.json"));
    auto backend = script_file(fixture("single_send_script.json"));
    auto e = must(Engine::create(g, backend));
    auto before = e.log().size();
    must(e.step_agent("alice"));
    std::vector<Json> sends;
    for (std::size_t i = before; i < e.log().size(); ++i)
        if (e.log().events()[i]["kind"] == "send") sends.push_back(e.log().events()[i]);
    ASSERT_EQ(sends.size(), 1u);
    EXPECT_EQ(sends[0]["content_hash"], content_hash("hello bob"));
    EXPECT_EQ(sends[0]["receiver"], "bob");
}

TEST(StepAgent, HaltedAgentLogsNothing) {
    auto g = duo();
    g.agents["a"].halt_authority.insert("b");
    auto backend = script(Json{{"default", "yield"}});
    auto e = must(Engine::create(g, backend));
    must(e.halt_agent(HaltOrder{"a", "b", HaltReason::creator_discretion, 0}));
    auto before = e.log().size();
    auto r = e.step_agent("b");
    ASSERT_FALSE(r);
    EXPECT_EQ(r.error().code, "E_HALTED");
    EXPECT_EQ(e.log().size(), before);
}

TEST(StepAgent, EffectOrder) {
    Json decision = {{"knowledge_updates", {"fact"}},
                     {"new_thoughts", {"idea"}},
                     {"outgoing", {{{"to", "b"}, {"content", "hi"}, {"action", "report"}}}},
                     {"plugin_calls", {{{"plugin", "mem"}, {"function", "put"}, {"args", {{"key", "k"}, {"value", "v"}}}}}}};
    auto g = duo();
    g.plugins["mem"] = make_plugin("mem", "kv");
    g.connect("a", "mem");
    auto backend = script(Json{{"agents", {{"a", {{"turns", {{"0", decision}}}}}}}, {"default", "yield"}});
    auto e = must(Engine::create(g, backend));
    auto mark = e.log().size();
    must(e.step_agent("a"));
    std::vector<std::string> kinds;
    for (std::size_t i = mark; i < e.log().size(); ++i) kinds.push_back(e.log().events()[i]["kind"]);
    std::vector<std::string> expected{"turn", "knowledge", "thought", "plugin_call", "knowledge", "send"};
    EXPECT_EQ(kinds, expected);
    EXPECT_EQ(e.agent_state("a")->knowledge.back().tag, "plugin:mem.put");
}

TEST(StepAgent, BackendFailureRequeuesInbox) {
    FailingBackend backend;
    auto e = must(Engine::create(duo(), backend));
    must(e.send("b", "a", "keep me", ActionKind::report));
    auto before = *e.agent_state("a");
    auto r = e.step_agent("a");
    ASSERT_FALSE(r);
    EXPECT_EQ(r.error().code, "E_BACKEND");
    EXPECT_EQ(*e.agent_state("a"), before);
    EXPECT_EQ(e.router().pending_for("a"), 1u);
    EXPECT_EQ(e.log().count("backend_error"), 1u);
    EXPECT_EQ(e.log().count("deliver"), 0u);
}

TEST(StepAgent, TooManyItemsIsBackendError) {
    auto g = duo();
    g.agents["a"].backend_profile.max_output_items = 1;
    Json decision = {{"new_thoughts", {"x", "y"}}};
    auto backend = script(Json{{"agents", {{"a", {{"default", decision}}}}}});
    auto e = must(Engine::create(g, backend));
    auto r = e.step_agent("a");
    ASSERT_FALSE(r);
    EXPECT_EQ(r.error().code, "E_BACKEND");
}

TEST(StepAgent, ThoughtsAreCapped) {
    Json decision = {{"new_thoughts", {"t"}}};
    auto backend = script(Json{{"agents", {{"a", {{"default", decision}}}}}});
    RunConfig cfg;
    cfg.thoughts_cap = 3;
    auto e = must(Engine::create(duo(), backend, cfg));
    for (int i = 0; i < 5; ++i) must(e.step_agent("a"));
    EXPECT_EQ(e.agent_state("a")->thoughts.size(), 3u);
}

TEST(OracleInvoke, IdenticalInputsIdenticalOutputs) {
    auto backend = script(Json::parse(R"({"oracles": {"b": {"responses": {"q1": "answer one"}, "default": "fallback"}}})"));
    auto e = must(Engine::create(duo(true), backend));
    auto before = *e.agent_state("b");
    EXPECT_EQ(must(e.oracle_invoke("b", "q1", "a")), "answer one");
    EXPECT_EQ(must(e.oracle_invoke("b", "q1", "a")), "answer one");
    EXPECT_EQ(must(e.oracle_invoke("b", "other", "a")), "fallback");
    EXPECT_EQ(*e.agent_state("b"), before);
    auto r = e.oracle_invoke("a", "q1", "b");
    ASSERT_FALSE(r);
    EXPECT_EQ(r.error().code, "E_NOT_ORACLE");
}

TEST(OracleInvoke, OracleTurnAnswersWithCorrelation) {
    auto backend = script(Json{{"default", "yield"}, {"oracles", {{"b", {{"default", "looks fine"}}}}}});
    auto e = must(Engine::create(duo(true), backend));
    auto asked = must(e.send("a", "b", "review this", ActionKind::request));
    must(e.step_agent("b"));
    auto inbox = e.drain_inbox("a");
    ASSERT_EQ(inbox.size(), 1u);
    EXPECT_EQ(inbox[0].content, "looks fine");
    EXPECT_EQ(inbox[0].action, ActionKind::response);
    EXPECT_EQ(inbox[0].meta.correlation, asked);
    EXPECT_EQ(e.agent_state("b")->turn_count, 0);
}

TEST(ScriptedBackend, TableLookup) {
    Json d0 = {{"knowledge_updates", {"zero"}}};
    auto s = script(Json{{"agents", {{"a", {{"turns", {{"0", d0}}}}}}}, {"default", "yield"}});
    auto hit = must(s.lookup("a", 0));
    EXPECT_EQ(hit.knowledge_updates, std::vector<std::string>{"zero"});
    EXPECT_EQ(to_json(hit), to_json(must(decision_from_json(d0, "a"))));
    auto fallback = must(s.lookup("a", 1));
    EXPECT_TRUE(fallback.yield);
    EXPECT_FALSE(fallback.warning);
}

TEST(ScriptedBackend, ExhaustedYieldsWithWarning) {
    auto s = script(Json::parse(R"({"agents": {"a": {"turns": {"0": "yield"}}}})"));
    auto d = must(s.lookup("a", 5));
    EXPECT_TRUE(d.yield);
    ASSERT_TRUE(d.warning);
    EXPECT_EQ(*d.warning, "E_SCRIPT_EXHAUSTED");

    auto e = must(Engine::create(duo(), s));
    must(e.step_agent("a"));
    EXPECT_EQ(e.log().count("warning"), 0u);
    must(e.step_agent("a"));
    EXPECT_EQ(e.log().events().back()["code"], "E_SCRIPT_EXHAUSTED");
}

TEST(ScriptedBackend, MalformedScriptRejected) {
    auto r = ScriptedBackend::from_json(Json::parse(R"({"agents": {"a": {"turns": {"0": {"bogus": 1}}}}})"));
    ASSERT_FALSE(r);
}

TEST(Decision, StrictDecoding) {
    EXPECT_FALSE(decision_from_json(Json{{"outgoing", {{{"to", "b"}, {"content", "x"}, {"action", "shout"}}}}}, "a"));
    EXPECT_FALSE(decision_from_json(Json{{"surprise", true}}, "a"));
    EXPECT_TRUE(must(decision_from_json(Json("yield"), "a")).yield);
}

TEST(HttpBackend, DecideRoundTrip) {
    httplib::Server server;
    std::string seen_auth;
    Json seen_body;
    server.Post("/turn", [&](const httplib::Request& req, httplib::Response& res) {
        seen_auth = req.get_header_value("Authorization");
        seen_body = Json::parse(req.body);
        Json reply;
        if (seen_body["mode"] == "decide")
            reply = {{"outgoing", {{{"to", "b"}, {"content", "from http"}, {"action", "report"}}}}};
        else if (seen_body["mode"] == "oracle")
            reply = {{"output", "oracle says " + seen_body["input"].get<std::string>()}};
        else
            reply = {{"draft", "{}"}};
        res.set_content(reply.dump(), "application/json");
    });
    server.Post("/broken", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
    int port = server.bind_to_any_port("127.0.0.1");
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    const std::string base = "http://127.0.0.1:" + std::to_string(port);
    HttpBackend http(base + "/turn", "secret", 5);
    auto e = must(Engine::create(duo(), http));
    must(e.step_agent("a"));
    EXPECT_EQ(seen_auth, "Bearer secret");
    EXPECT_EQ(seen_body["agent_id"], "a");
    for (const char* key : {"role", "knowledge", "thoughts", "inbox", "functions"}) EXPECT_TRUE(seen_body.contains(key));
    EXPECT_EQ(e.router().pending_for("b"), 1u);

    EXPECT_EQ(must(http.oracle("b", RoleSpec{}, "ping", BackendProfile{})), "oracle says ping");

    HttpBackend broken(base + "/broken", "", 5);
    auto r = broken.decide(TurnSnapshot{}, BackendProfile{});
    ASSERT_FALSE(r);
    EXPECT_EQ(r.error().code, "E_BACKEND");

    HttpBackend nowhere("http://127.0.0.1:1/x", "", 1);
    EXPECT_FALSE(nowhere.decide(TurnSnapshot{}, BackendProfile{}));

    server.stop();
    th.join();
}

TEST(RoutedBackend, PicksByProfile) {
    auto s = script(Json{{"default", "yield"}});
    RoutedBackend routed(&s, nullptr);
    BackendProfile scripted;
    EXPECT_TRUE(routed.decide(TurnSnapshot{}, scripted));
    BackendProfile http;
    http.backend_kind = BackendKind::http;
    auto r = routed.decide(TurnSnapshot{}, http);
    ASSERT_FALSE(r);
    EXPECT_EQ(r.error().code, "E_BACKEND");
}
