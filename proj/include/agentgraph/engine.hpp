#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agentgraph/agent.hpp"
#include "agentgraph/backend.hpp"
#include "agentgraph/event_log.hpp"
#include "agentgraph/governor.hpp"
#include "agentgraph/graph.hpp"
#include "agentgraph/lifecycle.hpp"
#include "agentgraph/plugin.hpp"
#include "agentgraph/result.hpp"
#include "agentgraph/router.hpp"

namespace agentgraph {

struct RunConfig {
    std::optional<std::uint64_t> seed;       // defaults to scenario.seed
    std::optional<int> quiescence_rounds;    // defaults to scenario.quiescence_rounds
    std::size_t thoughts_cap = 64;
    std::string run_id = "run-0001";
    std::optional<std::filesystem::path> sandbox_dir;  // file_store mirror root
};

struct RunOutcome {
    std::string outcome;  // completed | quiescent | halted_all | budget_exhausted
    std::optional<std::string> final_response;
    int rounds = 0;
    std::size_t pending = 0;
    std::vector<Breach> breaches;
    UsageLedger ledger;

    Json to_json() const;
};

// One run of a system graph. Owns the live graph, agent states, plugin
// instances, queues, pending halt orders and the event log. Every observable
// effect goes through the log.
class Engine {
public:
    static Result<Engine> create(SystemGraph graph, Backend& backend, RunConfig cfg = {});

    // Messaging. `from` may be kUserNode for the entry agent.
    Result<MessageId> send(const NodeId& from, const NodeId& to, const std::string& content, ActionKind action,
                           std::optional<MessageId> correlation = std::nullopt);
    // Removes and returns the agent's pending inbox, logging a deliver per message.
    std::vector<Message> drain_inbox(const AgentId& agent);
    Result<MessageId> board_post(const NodeId& author, const PluginId& board, const std::string& content,
                                 ActionKind action);
    // Posts with seq > since_seq, as message JSON objects.
    Result<Json> board_read(const AgentId& reader, const PluginId& board, std::uint64_t since_seq);

    PluginResult invoke_plugin(const PluginCall& call);

    Result<TurnRecord> step_agent(const AgentId& agent);
    Result<std::string> oracle_invoke(const AgentId& oracle, std::string_view input, const NodeId& caller);

    Result<AgentId> spawn_agent(const SpawnRequest& req);
    // Direct halt. Authority is required unless the reason is governor.
    Result<HaltReceipt> halt_agent(const HaltOrder& order);
    Status resume_agent(const AgentId& issuer, const AgentId& target);
    void apply_pending_halts();

    Result<RunOutcome> run(const std::string& prompt);

    const SystemGraph& graph() const { return graph_; }
    const EventLog& log() const { return log_; }
    const UsageLedger& ledger() const { return ledger_; }
    const MessageRouter& router() const { return router_; }
    const AgentState* agent_state(const AgentId& id) const;
    const PluginInstance* plugin(const PluginId& id) const;
    const std::vector<TurnRecord>& history() const { return history_; }
    std::vector<HaltOrder> pending_halts() const;
    // Sends still in flight: queued messages plus unapplied halt messages.
    std::size_t pending_messages() const;
    const std::optional<std::string>& final_response() const { return final_response_; }
    int round() const { return round_; }
    const RunConfig& config() const { return cfg_; }

    // Hash over agent states, plugin states, queues, graph and ledger; with
    // include_log the event log text as well.
    std::string state_hash(bool include_log = false) const;

private:
    struct PendingHalt {
        HaltOrder order;
        std::optional<MessageId> msg;  // set when the order arrived as a halt message
    };

    Engine(SystemGraph graph, Backend& backend, RunConfig cfg);

    const Json& emit(const std::string& kind, Json fields);
    bool has_authority(const AgentId& issuer, const AgentId& target) const;
    bool halt_pending_for(const AgentId& target) const;
    void issue_halt(HaltOrder order, std::optional<MessageId> msg = std::nullopt);
    HaltReceipt do_halt(const HaltOrder& order);
    void deliver(const Message& m);
    TurnSnapshot snapshot_for(const AgentId& agent, std::vector<Message> inbox) const;
    Result<TurnRecord> step_oracle(const AgentId& agent, std::size_t log_mark);
    void run_supervisor(const SupervisorConfig& sup);
    Result<Json> resolve_refs(const Json& args, const std::vector<Json>& results) const;
    void apply_decision(const AgentId& agent, const BackendDecision& d);

    SystemGraph graph_;
    Backend* backend_;
    RunConfig cfg_;
    std::map<AgentId, AgentState> states_;
    std::map<PluginId, PluginInstance> plugins_;
    MessageRouter router_;
    EventLog log_;
    UsageLedger ledger_;
    std::vector<PendingHalt> pending_halts_;
    std::vector<TurnRecord> history_;
    std::map<AgentId, std::size_t> resume_mark_;     // history index at last resume
    std::map<AgentId, std::size_t> offtask_checked_;  // history index already judged
    std::optional<std::string> final_response_;
    bool exit_reached_ = false;
    int round_ = 0;
};

}  // namespace agentgraph
