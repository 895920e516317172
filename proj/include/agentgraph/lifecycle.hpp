#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "agentgraph/agent.hpp"
#include "agentgraph/graph.hpp"
#include "agentgraph/result.hpp"

namespace agentgraph {

enum class HaltReason { supervisor_loop, supervisor_offtask, creator_discretion, governor };
const char* to_string(HaltReason r);

struct HaltOrder {
    AgentId issuer;
    AgentId target;
    HaltReason reason = HaltReason::creator_discretion;
    std::uint64_t issued_seq = 0;

    bool operator==(const HaltOrder&) const = default;
};

struct HaltReceipt {
    HaltOrder order;
    std::size_t discarded = 0;  // pending inbox messages dropped
    bool already_halted = false;
    std::uint64_t seq = 0;      // event seq of the receipt
};

// Subset rule for a spawn: child halt authority within the creator's, requested
// edges within the creator's neighbours, spawn right only if the creator has it.
// E_NO_SPAWN_RIGHT if the creator may not spawn at all, E_PRIVILEGE_ESCALATION
// for any subset violation.
Status check_spawn_privileges(const AgentSpec& creator, const std::set<NodeId>& creator_neighbors,
                              const SpawnRequest& req);

// Standalone invariants of an agent spec that do not need the surrounding
// graph (id shape, oracle privileges, self halt, keywords, profile).
Status check_agent_spec(const AgentSpec& spec);

// Hash of what a turn did: action kinds, receivers and content hashes of
// outgoing messages plus the plugin functions called.
std::uint64_t action_signature(const BackendDecision& d);

// Loop detector. For each watched agent, looks at its non-idle records in the
// view (the last `window` of them) and emits one supervisor_loop order when the
// trailing records repeat a block of length k <= period_max at least
// repeat_threshold times. Pure.
std::vector<HaltOrder> supervise(const SupervisorConfig& cfg, std::span<const TurnRecord> log_view);

}  // namespace agentgraph
