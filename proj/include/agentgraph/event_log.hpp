#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "agentgraph/graph.hpp"
#include "agentgraph/result.hpp"

namespace agentgraph {

// Append-only, totally ordered record of engine events. Each event is a flat
// JSON object carrying at least {seq, turn, kind}; one line per event.
class EventLog {
public:
    // Stamps seq (previous + 1), turn and kind onto `fields` and appends it.
    const Json& append(const std::string& kind, int turn, Json fields);

    const std::vector<Json>& events() const { return events_; }
    std::size_t size() const { return events_.size(); }
    bool empty() const { return events_.empty(); }
    std::uint64_t last_seq() const { return events_.empty() ? 0 : events_.back()["seq"].get<std::uint64_t>(); }
    std::size_t count(std::string_view kind) const;

    std::string line(std::size_t index) const { return events_[index].dump(); }
    std::vector<std::string> lines() const;
    std::string text() const;  // JSONL, newline-terminated
    Status write(const std::filesystem::path& path) const;

    // Fails with E_LOG_CORRUPT on malformed lines or non-increasing seqs.
    static Result<EventLog> parse(std::string_view text);

private:
    std::vector<Json> events_;
};

// Node that authored an event, or "" for system events.
std::string event_author(const Json& event);

}  // namespace agentgraph
