#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "agentgraph/graph.hpp"
#include "agentgraph/ids.hpp"

namespace agentgraph {

// Closed set of message actions. Config files naming anything else are rejected.
enum class ActionKind { task_assignment, report, request, command, halt, feedback, response };

const char* to_string(ActionKind a);
std::optional<ActionKind> parse_action(std::string_view s);

using MessageId = std::uint64_t;

struct MessageMeta {
    MessageId seq = 0;        // global, 1..N over messages and board posts
    int turn = 0;             // round in which it was sent
    NodeId sender;
    NodeId receiver;
    std::optional<MessageId> correlation;
    std::uint64_t timestamp = 0;  // logical clock (event seq at send)

    bool operator==(const MessageMeta&) const = default;
};

struct Message {
    std::string content;
    ActionKind action = ActionKind::report;
    MessageMeta meta;

    bool operator==(const Message&) const = default;
};

Json to_json(const Message& m);

}  // namespace agentgraph
