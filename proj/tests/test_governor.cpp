#include <gtest/gtest.h>

#include "agentgraph/engine.hpp"
#include "agentgraph/governor.hpp"
#include "support.hpp"

using namespace agentgraph;
using namespace testsupport;

namespace {

SpawnRequest child_with(std::set<std::string> keywords) {
    SpawnRequest r;
    r.creator = "boss";
    r.child_spec = make_agent("kid", std::move(keywords));
    return r;
}

Json event(const std::string& kind, Json fields = Json::object()) {
    fields["kind"] = kind;
    return fields;
}

}  // namespace

TEST(AdmitSpawn, ResourceCap) {
    GovernorConfig cfg;
    cfg.max_agents = 5;
    cfg.spawn_freeze_at = 1.0;
    UsageLedger ledger;
    ledger.live_agents = 5;
    auto a = admit_spawn(ledger, cfg, child_with({"new"}), {});
    EXPECT_FALSE(a.admitted);
    EXPECT_EQ(a.reason, "resource");

    ledger.live_agents = 4;
    EXPECT_TRUE(admit_spawn(ledger, cfg, child_with({"new"}), {}).admitted);
}

TEST(AdmitSpawn, FreezeBelowCap) {
    GovernorConfig cfg;
    cfg.max_agents = 10;
    cfg.spawn_freeze_at = 0.9;
    UsageLedger ledger;
    ledger.live_agents = 9;
    EXPECT_EQ(spawn_freeze_limit(cfg), 9);
    EXPECT_EQ(admit_spawn(ledger, cfg, child_with({"new"}), {}).reason, "resource");
}

TEST(AdmitSpawn, JaccardThreeQuartersAdmits) {
    GovernorConfig cfg;
    UsageLedger ledger;
    ledger.live_agents = 1;
    std::vector<LiveRole> live{{"lawyer", RoleSpec{"lawyer", {}, {"review", "legal", "brief", "cite"}}}};
    auto req = child_with({"review", "legal", "brief"});
    EXPECT_DOUBLE_EQ(jaccard(req.child_spec.role.keywords, live[0].role.keywords), 0.75);
    auto a = admit_spawn(ledger, cfg, req, live);
    EXPECT_TRUE(a.admitted);
    EXPECT_DOUBLE_EQ(a.overlap, 0.75);
}

TEST(AdmitSpawn, IdenticalKeywordsDeny) {
    GovernorConfig cfg;
    UsageLedger ledger;
    ledger.live_agents = 1;
    std::vector<LiveRole> live{{"lawyer", RoleSpec{"lawyer", {}, {"review", "legal"}}}};
    auto a = admit_spawn(ledger, cfg, child_with({"review", "legal"}), live);
    EXPECT_FALSE(a.admitted);
    EXPECT_EQ(a.reason, "overlap");
    EXPECT_DOUBLE_EQ(a.overlap, 1.0);
    EXPECT_EQ(a.conflict, "lawyer");
}

TEST(Ledger, FreshHasNoBreaches) {
    UsageLedger ledger;
    EXPECT_EQ(ledger.turns + ledger.messages + ledger.plugin_calls + ledger.live_agents, 0);
    EXPECT_TRUE(check_budgets(ledger, GovernorConfig{}).empty());
}

TEST(Ledger, TurnCapBreach) {
    GovernorConfig cfg;
    cfg.max_total_turns = 10;
    UsageLedger ledger;
    for (int i = 0; i < 9; ++i) ledger = record_usage(ledger, event("turn", {{"agent", "a"}}));
    EXPECT_TRUE(check_budgets(ledger, cfg).empty());
    ledger = record_usage(ledger, event("turn", {{"agent", "a"}}));
    auto breaches = check_budgets(ledger, cfg);
    ASSERT_EQ(breaches.size(), 1u);
    EXPECT_EQ(breaches[0].resource, "turns");
    EXPECT_TRUE(breaches[0].ends_run());
}

TEST(Ledger, CountsPerAuthor) {
    UsageLedger l;
    l = record_usage(l, event("init", {{"agents", 3}}));
    l = record_usage(l, event("send", {{"sender", "@user"}}));
    l = record_usage(l, event("send", {{"sender", "a"}}));
    l = record_usage(l, event("plugin_call", {{"caller", "a"}}));
    l = record_usage(l, event("spawn", {{"creator", "a"}}));
    l = record_usage(l, event("deliver", {{"receiver", "a"}}));
    EXPECT_EQ(l.live_agents, 4);
    EXPECT_EQ(l.messages, 2);
    EXPECT_EQ(l.system.messages, 1);
    EXPECT_EQ(l.per_agent.at("a").messages, 1);
    EXPECT_EQ(l.per_agent.at("a").plugin_calls, 1);
}

TEST(Ledger, ReconcilesWithLog) {
    auto bundle_spec = load_spec(scenario("softdev_team") / "spec.json");
    auto backend = script_file(scenario("softdev_team") / "script.json");
    auto e = must(Engine::create(bundle_spec, backend));
    must(e.run("Build a command-line todo list"));
    UsageLedger replayed;
    for (const auto& ev : e.log().events()) replayed = record_usage(replayed, ev);
    EXPECT_EQ(replayed, e.ledger());
    EXPECT_EQ(static_cast<std::size_t>(e.ledger().turns), e.log().count("turn"));
    std::int64_t per_agent_turns = e.ledger().system.turns;
    for (const auto& [id, u] : e.ledger().per_agent) per_agent_turns += u.turns;
    EXPECT_EQ(per_agent_turns, e.ledger().turns);
}

TEST(Governor, SpawnerFixture) {
    auto g = load_spec(fixture("spawner_spec.json"));
    auto backend = script_file(fixture("spawner_script.json"));
    auto e = must(Engine::create(g, backend));
    must(e.run("grow the team"));
    EXPECT_EQ(e.graph().agents.size(), 5u);
    std::size_t resource = 0, overlap = 0;
    for (const auto& ev : e.log().events()) {
        if (ev["kind"] != "spawn_denied") continue;
        if (ev["reason"] == "resource") ++resource;
        if (ev["reason"] == "overlap") ++overlap;
    }
    EXPECT_EQ(resource, 5u);
    EXPECT_EQ(overlap, 1u);
}
