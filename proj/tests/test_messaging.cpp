#include <gtest/gtest.h>

#include "agentgraph/engine.hpp"
#include "agentgraph/router.hpp"
#include "support.hpp"

using namespace agentgraph;
using namespace testsupport;

namespace {

SystemGraph trio() {
    SystemGraph g;
    for (const char* id : {"a", "b", "c"}) g.agents[id] = make_agent(id);
    g.connect("a", "b");
    g.connect("c", "b");
    g.plugins["board"] = make_plugin("board", "board");
    g.connect("a", "board");
    g.connect("b", "board");
    auto vault = make_plugin("vault", "kv");
    vault.constraints.allowed_callers = std::set<AgentId>{"a"};
    g.plugins["vault"] = vault;
    g.connect("a", "vault");
    g.connect("b", "vault");
    g.entry = "a";
    return g;
}

struct Fixture {
    ScriptedBackend backend = script(Json{{"default", "yield"}});
    Engine engine = must(Engine::create(trio(), backend));
};

}  // namespace

TEST(Send, NoEdge) {
    Fixture f;
    auto r = f.engine.send("a", "c", "hi", ActionKind::report);
    ASSERT_FALSE(r);
    EXPECT_EQ(r.error().code, "E_NO_EDGE");
}

TEST(Send, HaltWithoutAuthority) {
    Fixture f;
    auto r = f.engine.send("a", "b", "stop", ActionKind::halt);
    ASSERT_FALSE(r);
    EXPECT_EQ(r.error().code, "E_HALT_UNAUTHORIZED");
}

TEST(Send, SelfSendAndPluginReceiverRejected) {
    Fixture f;
    auto self = f.engine.send("a", "a", "me", ActionKind::report);
    ASSERT_FALSE(self);
    EXPECT_EQ(self.error().code, "E_SELF_SEND");
    auto plugin = f.engine.send("a", "board", "x", ActionKind::report);
    ASSERT_FALSE(plugin);
    EXPECT_EQ(plugin.error().code, "E_NOT_AGENT");
}

TEST(Send, FifoOnOneEdge) {
    Fixture f;
    auto m1 = must(f.engine.send("a", "b", "first", ActionKind::report));
    auto m2 = must(f.engine.send("a", "b", "second", ActionKind::report));
    auto inbox = f.engine.drain_inbox("b");
    ASSERT_EQ(inbox.size(), 2u);
    EXPECT_EQ(inbox[0].meta.seq, m1);
    EXPECT_EQ(inbox[1].meta.seq, m2);
    EXPECT_EQ(inbox[0].content, "first");
}

TEST(Send, SeqsAreGapless) {
    Fixture f;
    EXPECT_EQ(must(f.engine.send("a", "b", "1", ActionKind::report)), 1u);
    EXPECT_EQ(must(f.engine.board_post("a", "board", "2", ActionKind::report)), 2u);
    EXPECT_EQ(must(f.engine.send("c", "b", "3", ActionKind::report)), 3u);
}

TEST(Send, QueueCap) {
    auto g = trio();
    g.governor.channel_queue_cap = 2;
    auto backend = script(Json{{"default", "yield"}});
    auto e = must(Engine::create(g, backend));
    ASSERT_TRUE(e.send("a", "b", "1", ActionKind::report));
    ASSERT_TRUE(e.send("a", "b", "2", ActionKind::report));
    auto r = e.send("a", "b", "3", ActionKind::report);
    ASSERT_FALSE(r);
    EXPECT_EQ(r.error().code, "E_QUEUE_FULL");
    EXPECT_TRUE(e.send("c", "b", "other channel", ActionKind::report));
}

TEST(Send, LogCarriesContentHash) {
    Fixture f;
    must(f.engine.send("a", "b", "payload", ActionKind::request));
    const auto& ev = f.engine.log().events().back();
    EXPECT_EQ(ev["kind"], "send");
    EXPECT_EQ(ev["content_hash"], content_hash("payload"));
    EXPECT_EQ(ev["action"], "request");
}

TEST(DrainInbox, EmptyWhenNothingPending) {
    Fixture f;
    EXPECT_TRUE(f.engine.drain_inbox("b").empty());
}

TEST(DrainInbox, MergesSendersBySeq) {
    Fixture f;
    for (int i = 0; i < 3; ++i) must(f.engine.send("a", "b", "pad", ActionKind::report));
    f.engine.drain_inbox("b");
    // seqs 4 and 7 from different senders, with unrelated traffic between
    auto s4 = must(f.engine.send("c", "b", "from c", ActionKind::report));
    must(f.engine.send("b", "a", "x", ActionKind::report));
    must(f.engine.send("b", "c", "y", ActionKind::report));
    auto s7 = must(f.engine.send("a", "b", "from a", ActionKind::report));
    ASSERT_EQ(s4, 4u);
    ASSERT_EQ(s7, 7u);
    auto inbox = f.engine.drain_inbox("b");
    ASSERT_EQ(inbox.size(), 2u);
    EXPECT_EQ(inbox[0].meta.seq, 4u);
    EXPECT_EQ(inbox[1].meta.seq, 7u);
}

TEST(DrainInbox, SecondDrainIsEmpty) {
    Fixture f;
    must(f.engine.send("a", "b", "once", ActionKind::report));
    EXPECT_EQ(f.engine.drain_inbox("b").size(), 1u);
    EXPECT_TRUE(f.engine.drain_inbox("b").empty());
}

TEST(Board, ReadEmpty) {
    Fixture f;
    EXPECT_TRUE(must(f.engine.board_read("a", "board", 0)).empty());
}

TEST(Board, ReadSinceFirstPost) {
    Fixture f;
    auto first = must(f.engine.board_post("a", "board", "one", ActionKind::report));
    must(f.engine.board_post("b", "board", "two", ActionKind::report));
    must(f.engine.board_post("a", "board", "three", ActionKind::feedback));
    auto posts = must(f.engine.board_read("b", "board", first));
    ASSERT_EQ(posts.size(), 2u);
    EXPECT_EQ(posts[0]["content"], "two");
    EXPECT_EQ(posts[1]["content"], "three");
    EXPECT_EQ(f.engine.log().count("post"), 3u);
}

TEST(Board, NoEdgeNoPost) {
    Fixture f;
    auto r = f.engine.board_post("c", "board", "sneak", ActionKind::report);
    ASSERT_FALSE(r);
    EXPECT_EQ(r.error().code, "E_NO_EDGE");
}

TEST(Board, CallerForbidden) {
    Fixture f;
    auto r = f.engine.invoke_plugin(PluginCall{"b", "vault", "get", Json{{"key", "k"}}});
    ASSERT_FALSE(r);
    EXPECT_EQ(r.error().code, "E_CALLER_FORBIDDEN");
}

TEST(Router, RequeueRestoresHeadOrder) {
    MessageRouter router;
    auto make = [&](const char* from, const char* content) {
        Message m;
        m.content = content;
        m.meta.seq = router.next_seq();
        m.meta.sender = from;
        m.meta.receiver = "z";
        return m;
    };
    router.enqueue(make("x", "1"));
    router.enqueue(make("y", "2"));
    auto drained = router.drain("z");
    router.enqueue(make("x", "3"));
    router.requeue(drained);
    auto again = router.drain("z");
    ASSERT_EQ(again.size(), 3u);
    EXPECT_EQ(again[0].content, "1");
    EXPECT_EQ(again[1].content, "2");
    EXPECT_EQ(again[2].content, "3");
}
