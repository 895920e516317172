#include <algorithm>

#include <gtest/gtest.h>

#include "agentgraph/diff.hpp"
#include "agentgraph/dot.hpp"
#include "agentgraph/scenario.hpp"
#include "agentgraph/spec_io.hpp"
#include "agentgraph/validate.hpp"
#include "support.hpp"

using namespace agentgraph;
using namespace testsupport;

namespace {

std::size_t count_substr(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + needle.size())) ++n;
    return n;
}

SystemGraph pair_graph() {
    SystemGraph g;
    g.agents["a"] = make_agent("a");
    g.agents["b"] = make_agent("b");
    g.connect("a", "b");
    g.entry = "a";
    g.exit = "b";
    return g;
}

}  // namespace

TEST(ValidateGraph, BabyagiIsClean) {
    auto report = validate_graph(load_spec(scenario("babyagi_chain") / "spec.json"));
    EXPECT_EQ(report.error_count(), 0u) << report.to_text();
}

TEST(ValidateGraph, LoneAgentIsValid) {
    SystemGraph g;
    g.agents["solo"] = make_agent("solo");
    auto unset = validate_graph(g);
    EXPECT_FALSE(unset.has_errors());
    EXPECT_TRUE(unset.contains("W_ISOLATED"));

    g.entry = "solo";
    g.exit = "solo";
    auto set = validate_graph(g);
    EXPECT_FALSE(set.has_errors());
    EXPECT_FALSE(set.contains("W_ISOLATED"));
}

TEST(ValidateGraph, DanglingHaltAuthority) {
    auto g = pair_graph();
    g.agents["a"].halt_authority.insert("ghost");
    auto report = validate_graph(g);
    EXPECT_TRUE(report.contains("E_DANGLING_REF"));
}

TEST(ValidateGraph, StructuralErrors) {
    auto g = pair_graph();
    g.agents["a"].halt_authority.insert("a");
    EXPECT_TRUE(validate_graph(g).contains("E_SELF_HALT"));

    g = pair_graph();
    g.agents["b"].is_oracle = true;
    g.agents["b"].can_spawn = true;
    EXPECT_TRUE(validate_graph(g).contains("E_ORACLE_PRIVILEGE"));

    g = pair_graph();
    g.agents["b"].is_oracle = true;
    g.agents["b"].initial_knowledge = {"remember me"};
    EXPECT_TRUE(validate_graph(g).contains("E_ORACLE_STATE"));

    g = pair_graph();
    g.agents["a"].role.keywords.clear();
    EXPECT_TRUE(validate_graph(g).contains("E_ROLE_KEYWORDS"));

    g = pair_graph();
    g.agents["a"].backend_profile.temperature = 2.5;
    EXPECT_TRUE(validate_graph(g).contains("E_BAD_TEMPERATURE"));

    g = pair_graph();
    g.edges.insert(Edge{"a", "a", EdgeKind::agent_agent});
    EXPECT_TRUE(validate_graph(g).contains("E_SELF_EDGE"));

    g = pair_graph();
    g.plugins["p"] = make_plugin("p", "kv");
    g.plugins["q"] = make_plugin("q", "kv");
    g.edges.insert(make_edge("p", "q", EdgeKind::agent_plugin));
    EXPECT_TRUE(validate_graph(g).contains("E_PLUGIN_PLUGIN_EDGE"));

    g = pair_graph();
    g.agents["Bad-Id"] = make_agent("Bad-Id");
    EXPECT_TRUE(validate_graph(g).contains("E_BAD_ID"));
}

TEST(ValidateGraph, ReportIsSortedAndDeterministic) {
    auto g = pair_graph();
    g.agents["a"].halt_authority = {"ghost", "phantom"};
    g.agents["b"].role.keywords.clear();
    auto r1 = validate_graph(g);
    auto r2 = validate_graph(g);
    EXPECT_EQ(r1.to_text(), r2.to_text());
    for (std::size_t i = 1; i < r1.diagnostics.size(); ++i)
        EXPECT_LE(r1.diagnostics[i - 1].code, r1.diagnostics[i].code);
}

TEST(ExportDot, EmptyGraph) {
    auto dot = must(export_dot(SystemGraph{}));
    EXPECT_EQ(dot, "graph agentgraph {\n}\n");
}

TEST(ExportDot, TwoAgentsOneEdge) {
    auto dot = must(export_dot(pair_graph()));
    EXPECT_EQ(count_substr(dot, "[shape="), 2u);
    EXPECT_EQ(count_substr(dot, " -- "), 1u);
    EXPECT_EQ(std::count(dot.begin(), dot.end(), '\n'), 5);
}

TEST(ExportDot, BabyagiCounts) {
    // Hand count from scenarios/babyagi_chain/spec.json: 4 agents + tasks, 8 edges.
    auto dot = must(export_dot(load_spec(scenario("babyagi_chain") / "spec.json")));
    EXPECT_EQ(count_substr(dot, "[shape="), 5u);
    EXPECT_EQ(count_substr(dot, " -- "), 8u);
}

TEST(ExportDot, InvalidGraphRejected) {
    auto g = pair_graph();
    g.agents["a"].halt_authority.insert("ghost");
    auto dot = export_dot(g);
    ASSERT_FALSE(dot);
    EXPECT_EQ(dot.error().code, "E_INVALID_GRAPH");
}

TEST(DiffGraphs, Identity) {
    auto g = load_spec(scenario("babyagi_chain") / "spec.json");
    EXPECT_TRUE(must(diff_graphs(g, g)).empty());
}

TEST(DiffGraphs, OneAddedAgent) {
    auto g = pair_graph();
    auto h = g;
    h.agents["c"] = make_agent("c");
    h.connect("b", "c");
    auto cs = must(diff_graphs(g, h));
    ASSERT_EQ(cs.added_agents.size(), 1u);
    EXPECT_EQ(cs.added_agents[0].id, "c");
    EXPECT_TRUE(cs.removed_agents.empty());
    EXPECT_EQ(apply_changes(g, cs), h);
}

TEST(DiffGraphs, BabyagiVersusSupervised) {
    auto plain = load_spec(scenario("babyagi_chain") / "spec.json");
    auto supervised = load_spec(scenario("babyagi_chain") / "spec_supervised.json");
    auto cs = must(diff_graphs(plain, supervised));
    ASSERT_EQ(cs.added_agents.size(), 1u);
    EXPECT_EQ(cs.added_agents[0].id, "supervisor");
    EXPECT_EQ(cs.added_edges.size(), 3u);
    EXPECT_TRUE(cs.removed_agents.empty());
    EXPECT_TRUE(cs.removed_edges.empty());
    EXPECT_TRUE(cs.changed_agents.empty());
    EXPECT_EQ(apply_changes(plain, cs), supervised);
}

TEST(SpecIo, ShippedSpecsRoundTrip) {
    std::vector<fs::path> specs;
    for (const auto& name : shipped_scenarios()) specs.push_back(scenario(name) / "spec.json");
    specs.push_back(scenario("babyagi_chain") / "spec_supervised.json");
    for (const auto& path : specs) {
        auto g1 = load_spec(path);
        auto text1 = serialize_system_spec(g1);
        auto g2 = must(parse_system_spec(text1));
        EXPECT_EQ(g1, g2) << path;
        EXPECT_EQ(text1, serialize_system_spec(g2)) << path;
    }
}

TEST(SpecIo, RejectsUnknownKeysAndBadTypes) {
    auto r = parse_system_spec(R"({"agents": [], "extras": 1})");
    ASSERT_FALSE(r);
    EXPECT_EQ(r.error().code, "E_UNKNOWN_KEY");

    r = parse_system_spec(R"({"agents": [{"id": "a", "role": {"name": "a", "keywords": ["x"]}, "colour": "red"}]})");
    ASSERT_FALSE(r);
    EXPECT_EQ(r.error().code, "E_UNKNOWN_KEY");

    r = parse_system_spec(R"({"agents": "many"})");
    ASSERT_FALSE(r);
    EXPECT_EQ(r.error().code, "E_TYPE");

    r = parse_system_spec("{not json");
    ASSERT_FALSE(r);
    EXPECT_EQ(r.error().code, "E_PARSE");
}

TEST(SpecIo, KeywordsAreLowercased) {
    auto g = must(parse_system_spec(R"({"agents": [{"id": "a", "role": {"name": "A", "keywords": ["Plan", "BUILD"]}}]})"));
    EXPECT_EQ(g.agents.at("a").role.keywords, (std::set<std::string>{"build", "plan"}));
}
