#include "agentgraph/router.hpp"

#include <algorithm>

namespace agentgraph {

Status MessageRouter::can_enqueue(const NodeId& from, const NodeId& to) const {
    if (queue_length(from, to) >= queue_cap_)
        return make_error("E_QUEUE_FULL", "channel " + from + "->" + to + " is at capacity");
    return ok_status();
}

void MessageRouter::enqueue(Message m) {
    Key key{m.meta.receiver, m.meta.sender};
    queues_[key].push_back(std::move(m));
}

std::vector<Message> MessageRouter::drain(const AgentId& agent) {
    std::vector<Message> out;
    auto it = queues_.lower_bound(Key{agent, NodeId{}});
    while (it != queues_.end() && it->first.first == agent) {
        for (auto& m : it->second) out.push_back(std::move(m));
        it = queues_.erase(it);
    }
    std::sort(out.begin(), out.end(),
              [](const Message& a, const Message& b) { return a.meta.seq < b.meta.seq; });
    return out;
}

void MessageRouter::requeue(std::vector<Message> messages) {
    std::sort(messages.begin(), messages.end(),
              [](const Message& a, const Message& b) { return a.meta.seq > b.meta.seq; });
    for (auto& m : messages) {
        Key key{m.meta.receiver, m.meta.sender};
        queues_[key].push_front(std::move(m));
    }
}

std::size_t MessageRouter::pending() const {
    std::size_t n = 0;
    for (const auto& [key, q] : queues_) n += q.size();
    return n;
}

std::size_t MessageRouter::pending_for(const AgentId& agent) const {
    std::size_t n = 0;
    for (auto it = queues_.lower_bound(Key{agent, NodeId{}});
         it != queues_.end() && it->first.first == agent; ++it)
        n += it->second.size();
    return n;
}

std::size_t MessageRouter::queue_length(const NodeId& from, const NodeId& to) const {
    auto it = queues_.find(Key{to, from});
    return it == queues_.end() ? 0 : it->second.size();
}

Json MessageRouter::snapshot() const {
    Json out = Json::object();
    for (const auto& [key, q] : queues_) {
        if (q.empty()) continue;
        Json arr = Json::array();
        for (const auto& m : q) arr.push_back(to_json(m));
        out[key.second + "->" + key.first] = std::move(arr);
    }
    return Json{{"last_seq", last_seq_}, {"queues", std::move(out)}};
}

}  // namespace agentgraph
