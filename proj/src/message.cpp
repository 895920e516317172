#include "agentgraph/message.hpp"

#include <array>
#include <utility>

#include "agentgraph/hash.hpp"

namespace agentgraph {

namespace {

constexpr std::array<std::pair<ActionKind, const char*>, 7> kActions{{
    {ActionKind::task_assignment, "task_assignment"},
    {ActionKind::report, "report"},
    {ActionKind::request, "request"},
    {ActionKind::command, "command"},
    {ActionKind::halt, "halt"},
    {ActionKind::feedback, "feedback"},
    {ActionKind::response, "response"},
}};

}  // namespace

const char* to_string(ActionKind a) {
    for (const auto& [kind, name] : kActions)
        if (kind == a) return name;
    return "report";
}

std::optional<ActionKind> parse_action(std::string_view s) {
    for (const auto& [kind, name] : kActions)
        if (s == name) return kind;
    return std::nullopt;
}

Json to_json(const Message& m) {
    Json j{{"seq", m.meta.seq},
           {"turn", m.meta.turn},
           {"sender", m.meta.sender},
           {"receiver", m.meta.receiver},
           {"action", to_string(m.action)},
           {"content", m.content}};
    if (m.meta.correlation) j["correlation"] = *m.meta.correlation;
    return j;
}

}  // namespace agentgraph
