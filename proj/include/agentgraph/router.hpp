#pragma once

#include <deque>
#include <map>
#include <utility>
#include <vector>

#include "agentgraph/message.hpp"
#include "agentgraph/result.hpp"

namespace agentgraph {

// Point-to-point FIFO queues, one per direction of every channel, plus the
// global message sequence counter shared with board posts.
class MessageRouter {
public:
    explicit MessageRouter(std::size_t queue_cap = 256) : queue_cap_(queue_cap) {}

    MessageId next_seq() { return ++last_seq_; }
    MessageId last_seq() const { return last_seq_; }

    Status can_enqueue(const NodeId& from, const NodeId& to) const;
    void enqueue(Message m);

    // Removes every pending message addressed to `agent`, merged in seq order.
    std::vector<Message> drain(const AgentId& agent);
    // Puts drained messages back at the head of their queues.
    void requeue(std::vector<Message> messages);
    // Drops the agent's pending inbox and returns what was dropped.
    std::vector<Message> discard_inbox(const AgentId& agent) { return drain(agent); }

    std::size_t pending() const;
    std::size_t pending_for(const AgentId& agent) const;
    std::size_t queue_length(const NodeId& from, const NodeId& to) const;
    std::size_t queue_cap() const { return queue_cap_; }

    Json snapshot() const;

private:
    // Keyed (receiver, sender) so one receiver's queues are contiguous.
    using Key = std::pair<NodeId, NodeId>;
    std::map<Key, std::deque<Message>> queues_;
    std::size_t queue_cap_;
    MessageId last_seq_ = 0;
};

}  // namespace agentgraph
