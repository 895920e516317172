#include "agentgraph/event_log.hpp"

#include <fstream>
#include <sstream>

namespace agentgraph {

const Json& EventLog::append(const std::string& kind, int turn, Json fields) {
    if (!fields.is_object()) fields = Json::object();
    fields["seq"] = last_seq() + 1;
    fields["turn"] = turn;
    fields["kind"] = kind;
    events_.push_back(std::move(fields));
    return events_.back();
}

std::size_t EventLog::count(std::string_view kind) const {
    std::size_t n = 0;
    for (const auto& e : events_)
        if (e["kind"].get_ref<const std::string&>() == kind) ++n;
    return n;
}

std::vector<std::string> EventLog::lines() const {
    std::vector<std::string> out;
    out.reserve(events_.size());
    for (const auto& e : events_) out.push_back(e.dump());
    return out;
}

std::string EventLog::text() const {
    std::string out;
    for (const auto& e : events_) {
        out += e.dump();
        out += '\n';
    }
    return out;
}

Status EventLog::write(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) return make_error("E_IO", "cannot write " + path.string());
    out << text();
    if (!out) return make_error("E_IO", "cannot write " + path.string());
    return ok_status();
}

Result<EventLog> EventLog::parse(std::string_view text) {
    EventLog log;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    std::uint64_t prev = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        Json e = Json::parse(line, nullptr, false);
        if (e.is_discarded() || !e.is_object())
            return make_error("E_LOG_CORRUPT", "line " + std::to_string(lineno) + " is not a JSON object");
        if (!e.contains("seq") || !e["seq"].is_number_unsigned() || !e.contains("kind") || !e["kind"].is_string() ||
            !e.contains("turn") || !e["turn"].is_number_integer())
            return make_error("E_LOG_CORRUPT", "line " + std::to_string(lineno) + " lacks seq/turn/kind");
        auto seq = e["seq"].get<std::uint64_t>();
        if (seq <= prev) return make_error("E_LOG_CORRUPT", "seq not increasing at line " + std::to_string(lineno));
        prev = seq;
        log.events_.push_back(std::move(e));
    }
    return log;
}

std::string event_author(const Json& event) {
    static const char* kAuthorField[][2] = {
        {"turn", "agent"},        {"knowledge", "agent"},    {"thought", "agent"},       {"backend_error", "agent"},
        {"warning", "agent"},     {"effect_error", "agent"}, {"oracle_invoke", "agent"}, {"send", "sender"},
        {"post", "sender"},       {"deliver", "receiver"},   {"plugin_call", "caller"},  {"spawn", "creator"},
        {"spawn_denied", "creator"}, {"halt_issued", "issuer"}, {"halt", "issuer"},      {"resume", "issuer"},
    };
    const auto& kind = event["kind"].get_ref<const std::string&>();
    for (const auto& [k, f] : kAuthorField) {
        if (kind == k) {
            auto it = event.find(f);
            if (it != event.end() && it->is_string()) return it->get<std::string>();
            return {};
        }
    }
    return {};
}

}  // namespace agentgraph
