#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "agentgraph/agent.hpp"
#include "agentgraph/graph.hpp"

namespace agentgraph {

struct AgentUsage {
    std::int64_t turns = 0;
    std::int64_t messages = 0;
    std::int64_t plugin_calls = 0;

    bool operator==(const AgentUsage&) const = default;
};

// Resource accounting for one run. Totals equal the per-agent sums plus the
// `system` entry (user prompt and other non-agent events).
struct UsageLedger {
    std::int64_t live_agents = 0;
    std::int64_t turns = 0;
    std::int64_t messages = 0;
    std::int64_t plugin_calls = 0;
    std::map<AgentId, AgentUsage> per_agent;
    AgentUsage system;

    bool operator==(const UsageLedger&) const = default;
};

Json to_json(const UsageLedger& l);

struct LiveRole {
    AgentId id;
    RoleSpec role;
};

struct SpawnAdmission {
    bool admitted = true;
    std::string reason;               // "resource" or "overlap" when denied
    std::optional<AgentId> conflict;  // agent whose role overlaps
    double overlap = 0.0;             // max Jaccard seen
};

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

// Floor of spawn_freeze_at * max_agents: live count at which spawning stops.
std::int64_t spawn_freeze_limit(const GovernorConfig& cfg);

// Pure admission check: resource freeze first, then role overlap against
// every live role.
SpawnAdmission admit_spawn(const UsageLedger& ledger, const GovernorConfig& cfg, const SpawnRequest& req,
                           const std::vector<LiveRole>& live_roles);

// Counts one logged event. Kinds: init (sets live_agents), turn, send,
// plugin_call, spawn. Anything else leaves the ledger unchanged.
UsageLedger record_usage(UsageLedger ledger, const Json& event);

struct Breach {
    std::string resource;  // agents | turns | messages | plugin_calls
    std::int64_t value = 0;
    std::int64_t cap = 0;

    // Agent-cap breaches only freeze spawning; the rest end the run.
    bool ends_run() const { return resource != "agents"; }
    bool operator==(const Breach&) const = default;
};

// One breach per counter that has reached its cap.
std::vector<Breach> check_budgets(const UsageLedger& ledger, const GovernorConfig& cfg);

}  // namespace agentgraph
