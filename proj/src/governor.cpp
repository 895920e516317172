#include "agentgraph/governor.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "agentgraph/ids.hpp"

namespace agentgraph {

namespace {

Json usage_json(const AgentUsage& u) {
    return Json{{"turns", u.turns}, {"messages", u.messages}, {"plugin_calls", u.plugin_calls}};
}

AgentUsage& slot(UsageLedger& l, const Json& event, const char* field) {
    auto it = event.find(field);
    if (it == event.end() || !it->is_string() || it->get<std::string>() == kUserNode) return l.system;
    return l.per_agent[it->get<std::string>()];
}

}  // namespace

Json to_json(const UsageLedger& l) {
    Json per = Json::object();
    for (const auto& [id, u] : l.per_agent) per[id] = usage_json(u);
    return Json{{"live_agents", l.live_agents}, {"turns", l.turns},    {"messages", l.messages},
                {"plugin_calls", l.plugin_calls}, {"per_agent", per}, {"system", usage_json(l.system)}};
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    std::vector<std::string> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    auto uni = a.size() + b.size() - common.size();
    return static_cast<double>(common.size()) / static_cast<double>(uni);
}

std::int64_t spawn_freeze_limit(const GovernorConfig& cfg) {
    return static_cast<std::int64_t>(std::floor(cfg.spawn_freeze_at * static_cast<double>(cfg.max_agents)));
}

SpawnAdmission admit_spawn(const UsageLedger& ledger, const GovernorConfig& cfg, const SpawnRequest& req,
                           const std::vector<LiveRole>& live_roles) {
    SpawnAdmission out;
    if (ledger.live_agents >= spawn_freeze_limit(cfg) || ledger.live_agents >= cfg.max_agents) {
        out.admitted = false;
        out.reason = "resource";
        return out;
    }
    for (const auto& live : live_roles) {
        double j = jaccard(req.child_spec.role.keywords, live.role.keywords);
        if (j > out.overlap || (j == out.overlap && !out.conflict)) {
            out.overlap = j;
            out.conflict = live.id;
        }
    }
    if (out.conflict && out.overlap >= cfg.overlap_threshold) {
        out.admitted = false;
        out.reason = "overlap";
        return out;
    }
    out.conflict.reset();
    return out;
}

UsageLedger record_usage(UsageLedger ledger, const Json& event) {
    const auto& kind = event["kind"].get_ref<const std::string&>();
    if (kind == "init") {
        ledger.live_agents = event.value("agents", std::int64_t{0});
    } else if (kind == "turn") {
        ledger.turns += 1;
        slot(ledger, event, "agent").turns += 1;
    } else if (kind == "send") {
        ledger.messages += 1;
        slot(ledger, event, "sender").messages += 1;
    } else if (kind == "plugin_call") {
        ledger.plugin_calls += 1;
        slot(ledger, event, "caller").plugin_calls += 1;
    } else if (kind == "spawn") {
        ledger.live_agents += 1;
    }
    return ledger;
}

std::vector<Breach> check_budgets(const UsageLedger& ledger, const GovernorConfig& cfg) {
    std::vector<Breach> out;
    if (ledger.live_agents >= cfg.max_agents) out.push_back({"agents", ledger.live_agents, cfg.max_agents});
    if (ledger.turns >= cfg.max_total_turns) out.push_back({"turns", ledger.turns, cfg.max_total_turns});
    if (ledger.messages >= cfg.max_messages) out.push_back({"messages", ledger.messages, cfg.max_messages});
    if (ledger.plugin_calls >= cfg.max_plugin_calls)
        out.push_back({"plugin_calls", ledger.plugin_calls, cfg.max_plugin_calls});
    return out;
}

}  // namespace agentgraph
