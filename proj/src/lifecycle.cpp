#include "agentgraph/lifecycle.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "agentgraph/hash.hpp"

namespace agentgraph {

const char* to_string(HaltReason r) {
    switch (r) {
        case HaltReason::supervisor_loop: return "supervisor_loop";
        case HaltReason::supervisor_offtask: return "supervisor_offtask";
        case HaltReason::creator_discretion: return "creator_discretion";
        case HaltReason::governor: return "governor";
    }
    return "creator_discretion";
}

Status check_spawn_privileges(const AgentSpec& creator, const std::set<NodeId>& creator_neighbors,
                              const SpawnRequest& req) {
    if (!creator.can_spawn) return make_error("E_NO_SPAWN_RIGHT", creator.id + " may not create agents");
    const auto& child = req.child_spec;
    if (!std::includes(creator.halt_authority.begin(), creator.halt_authority.end(), child.halt_authority.begin(),
                       child.halt_authority.end()))
        return make_error("E_PRIVILEGE_ESCALATION", "child halt authority exceeds the creator's");
    if (!std::includes(creator_neighbors.begin(), creator_neighbors.end(), req.requested_edges.begin(),
                       req.requested_edges.end()))
        return make_error("E_PRIVILEGE_ESCALATION", "child requests an edge the creator does not have");
    if (child.can_spawn && !creator.can_spawn)
        return make_error("E_PRIVILEGE_ESCALATION", "child may spawn but the creator may not");
    return ok_status();
}

Status check_agent_spec(const AgentSpec& spec) {
    if (!is_valid_node_id(spec.id)) return make_error("E_BAD_ID", "invalid agent id '" + spec.id + "'");
    if (spec.halt_authority.count(spec.id)) return make_error("E_SELF_HALT", spec.id + " may not halt itself");
    if (spec.is_oracle && (spec.can_spawn || !spec.halt_authority.empty()))
        return make_error("E_ORACLE_PRIVILEGE", "oracle agents may not spawn or halt");
    if (spec.is_oracle && !spec.initial_knowledge.empty())
        return make_error("E_ORACLE_STATE", "oracle agents carry no knowledge");
    if (spec.role.keywords.empty()) return make_error("E_ROLE_KEYWORDS", "role keyword set is empty");
    for (const auto& k : spec.role.keywords)
        if (k.empty() || std::any_of(k.begin(), k.end(), [](unsigned char c) { return std::isupper(c); }))
            return make_error("E_ROLE_KEYWORDS", "keyword '" + k + "' is not lowercase-normalized");
    const auto& p = spec.backend_profile;
    if (!(p.temperature >= 0.0 && p.temperature <= 2.0))
        return make_error("E_BAD_TEMPERATURE", "temperature must lie in [0, 2]");
    if (p.max_output_items < 1) return make_error("E_BACKEND_PROFILE", "max_output_items must be positive");
    return ok_status();
}

std::uint64_t action_signature(const BackendDecision& d) {
    std::string canon;
    for (const auto& o : d.outgoing) {
        canon += "send|";
        canon += to_string(o.action);
        canon += '|';
        canon += o.to;
        canon += '|';
        canon += content_hash(o.content);
        canon += '\n';
    }
    for (const auto& c : d.plugin_calls) {
        canon += "call|";
        canon += c.plugin;
        canon += '.';
        canon += c.function;
        canon += '\n';
    }
    return fnv1a64(canon);
}

namespace {

bool is_loop_evidence(const TurnRecord& r) { return !r.decision.outgoing.empty() || !r.decision.plugin_calls.empty(); }

// Trailing `threshold` repetitions of a period-k block.
bool repeats_tail(const std::vector<std::uint64_t>& sigs, std::size_t k, std::size_t threshold) {
    const std::size_t need = k * threshold;
    if (sigs.size() < need) return false;
    const std::size_t start = sigs.size() - need;
    for (std::size_t i = start; i + k < sigs.size(); ++i)
        if (sigs[i] != sigs[i + k]) return false;
    return true;
}

}  // namespace

std::vector<HaltOrder> supervise(const SupervisorConfig& cfg, std::span<const TurnRecord> log_view) {
    std::map<AgentId, std::vector<std::uint64_t>> sigs;
    for (const auto& r : log_view)
        if (cfg.watch_list.count(r.agent) && is_loop_evidence(r)) sigs[r.agent].push_back(r.signature);

    std::vector<HaltOrder> out;
    const auto window = static_cast<std::size_t>(std::max(cfg.window, 0));
    const auto threshold = static_cast<std::size_t>(std::max(cfg.repeat_threshold, 1));
    for (auto& [agent, s] : sigs) {
        if (s.size() > window) s.erase(s.begin(), s.end() - static_cast<std::ptrdiff_t>(window));
        for (std::size_t k = 1; k <= static_cast<std::size_t>(std::max(cfg.period_max, 1)); ++k) {
            if (k * threshold > window) break;
            if (repeats_tail(s, k, threshold)) {
                out.push_back(HaltOrder{cfg.agent, agent, HaltReason::supervisor_loop, 0});
                break;
            }
        }
    }
    return out;
}

}  // namespace agentgraph
