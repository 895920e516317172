#include <gtest/gtest.h>

#include <sstream>

#include "agentgraph/replay.hpp"
#include "agentgraph/scenario.hpp"
#include "support.hpp"

using namespace agentgraph;
using namespace testsupport;

namespace {

struct Recorded {
    ScenarioBundle bundle;
    std::string log_text;
};

Recorded record(const std::string& name) {
    auto b = must(load_bundle(scenario(name)));
    auto run = must(self_test(b));
    return {std::move(b), run.log_text};
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) out.push_back(line);
    return out;
}

std::string join(const std::vector<std::string>& lines) {
    std::string out;
    for (const auto& l : lines) out += l + "\n";
    return out;
}

}  // namespace

TEST(Run, SingleAgentRespondsToUser) {
    SystemGraph g;
    g.agents["solo"] = make_agent("solo");
    g.entry = "solo";
    g.exit = "solo";
    Json answer = {{"outgoing", {{{"to", "solo"}, {"content", "done: 42"}, {"action", "response"}}}}};
    auto backend = script(Json{{"agents", {{"solo", {{"turns", {{"0", answer}}}}}}}, {"default", "yield"}});
    auto e = must(Engine::create(g, backend));
    auto out = must(e.run("what is the answer"));
    EXPECT_EQ(out.outcome, "completed");
    ASSERT_TRUE(out.final_response);
    EXPECT_EQ(*out.final_response, "done: 42");
    EXPECT_EQ(out.rounds, 1);
    EXPECT_EQ(out.pending, 0u);
}

TEST(Run, AllYieldGoesQuiescent) {
    SystemGraph g;
    for (const char* id : {"a", "b", "c"}) g.agents[id] = make_agent(id);
    g.connect("a", "b");
    g.connect("b", "c");
    g.entry = "a";
    g.exit = "c";
    g.scenario.quiescence_rounds = 4;
    auto backend = script(Json{{"default", "yield"}});
    auto e = must(Engine::create(g, backend));
    auto out = must(e.run("anyone there"));
    EXPECT_EQ(out.outcome, "quiescent");
    EXPECT_EQ(out.rounds, 4);
    EXPECT_EQ(e.log().count("turn"), 3u * 4u);
    EXPECT_FALSE(out.final_response);
}

TEST(Run, BabyAgiCompletesWithOrderedResults) {
    auto b = must(load_bundle(scenario("babyagi_chain")));
    auto run = must(self_test(b));
    EXPECT_TRUE(run.passed()) << (run.failures.empty() ? "" : run.failures.front());
    EXPECT_EQ(run.outcome.outcome, "completed");
}

TEST(Run, BudgetFixtureExhausts) {
    auto g = load_spec(fixture("budget_spec.json"));
    auto backend = script_file(fixture("budget_script.json"));
    auto e = must(Engine::create(g, backend));
    auto out = must(e.run("go"));
    EXPECT_EQ(out.outcome, "budget_exhausted");
    ASSERT_FALSE(out.breaches.empty());
    EXPECT_EQ(out.breaches[0].resource, "turns");
    EXPECT_EQ(e.log().count("turn"), 10u);
    EXPECT_EQ(e.log().count("breach"), 1u);
}

TEST(Run, NoEntryIsRejected) {
    SystemGraph g;
    g.agents["a"] = make_agent("a");
    auto backend = script(Json{{"default", "yield"}});
    auto r = Engine::create(g, backend);
    if (!r) {
        EXPECT_EQ(r.error().code, "E_INVALID_GRAPH");
        return;
    }
    auto out = r.value().run("hello");
    ASSERT_FALSE(out);
    EXPECT_EQ(out.error().code, "E_NO_ENTRY");
}

TEST(Run, RoundsRunAgentsInIdOrder) {
    auto g = load_spec(fixture("looping_spec.json"));
    auto backend = script_file(fixture("looping_script.json"));
    auto e = must(Engine::create(g, backend));
    must(e.run("loop"));
    std::vector<std::string> first_round;
    for (const auto& ev : e.log().events())
        if (ev["kind"] == "turn" && ev["turn"] == 1) first_round.push_back(ev["agent"]);
    EXPECT_EQ(first_round, (std::vector<std::string>{"looper", "sink", "supervisor"}));
}

TEST(Run, DeterministicAcrossRuns) {
    auto a = record("courtroom");
    auto b = record("courtroom");
    EXPECT_EQ(a.log_text, b.log_text);
}

TEST(Replay, RecordedRunReplaysIdentically) {
    for (const auto& name : shipped_scenarios()) {
        auto rec = record(name);
        auto backend = script(rec.bundle.script);
        auto report = must(replay(rec.log_text, rec.bundle.graph, backend));
        EXPECT_TRUE(report.identical) << name;
        EXPECT_FALSE(report.first_divergence_seq) << name;
        EXPECT_EQ(report.expected_events, report.actual_events) << name;
    }
}

TEST(Replay, TamperedContentHashDivergesAtThatEvent) {
    auto rec = record("babyagi_chain");
    auto lines = lines_of(rec.log_text);
    std::uint64_t tampered_seq = 0;
    for (auto& line : lines) {
        auto ev = Json::parse(line);
        if (ev["kind"] == "send" && ev["sender"] == "task_creation") {
            ev["content_hash"] = "0000000000000000";
            tampered_seq = ev["seq"];
            line = ev.dump();
            break;
        }
    }
    ASSERT_NE(tampered_seq, 0u);
    auto backend = script(rec.bundle.script);
    auto report = must(replay(join(lines), rec.bundle.graph, backend));
    EXPECT_FALSE(report.identical);
    ASSERT_TRUE(report.first_divergence_seq);
    EXPECT_EQ(*report.first_divergence_seq, tampered_seq);
}

TEST(Replay, ModifiedScriptDivergesAtAffectedTurn) {
    auto rec = record("babyagi_chain");
    Json changed = rec.bundle.script;
    auto& turns = changed["agents"]["execution"]["turns"];
    ASSERT_FALSE(turns.empty());
    const std::string first_turn = turns.begin().key();
    turns[first_turn] = "yield";
    std::int64_t agent_turn = std::stoll(first_turn);

    // The run should diverge at the first effect of that turn, after its deliveries.
    std::uint64_t turn_seq = 0, expected_seq = 0;
    for (const auto& line : lines_of(rec.log_text)) {
        auto ev = Json::parse(line);
        if (turn_seq == 0) {
            if (ev["kind"] == "turn" && ev["agent"] == "execution" && ev["agent_turn"] == agent_turn) turn_seq = ev["seq"];
            continue;
        }
        if (ev["kind"] == "deliver") continue;
        expected_seq = ev["seq"];
        break;
    }
    ASSERT_NE(turn_seq, 0u);
    auto backend = script(changed);
    auto report = must(replay(rec.log_text, rec.bundle.graph, backend));
    EXPECT_FALSE(report.identical);
    ASSERT_TRUE(report.first_divergence_seq);
    EXPECT_EQ(*report.first_divergence_seq, expected_seq);
}

TEST(Replay, CorruptLog) {
    auto b = must(load_bundle(scenario("babyagi_chain")));
    auto backend = script(b.script);
    auto r = replay("not json\n", b.graph, backend);
    ASSERT_FALSE(r);
    EXPECT_EQ(r.error().code, "E_LOG_CORRUPT");
}
