#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <functional>
#include <map>
#include <memory>
#include <string>

#include "agentgraph/graph.hpp"
#include "agentgraph/result.hpp"

namespace agentgraph {

struct PluginCall {
    AgentId caller;
    PluginId plugin;
    std::string function;
    Json args = Json::object();

    bool operator==(const PluginCall&) const = default;
};

// {ok: payload} or {err: code}.
using PluginResult = Result<Json>;

// Services the host lends to a plugin for the duration of one call.
struct CallContext {
    AgentId caller;
    int turn = 0;
    std::function<std::uint64_t()> next_message_seq;
};

// A built-in plugin implementation. `call` must leave state untouched when it
// returns an error.
class PluginImpl {
public:
    virtual ~PluginImpl() = default;
    virtual PluginResult call(const std::string& function, const Json& args, CallContext& ctx) = 0;
    virtual Json snapshot() const = 0;
    virtual std::unique_ptr<PluginImpl> clone() const = 0;
};

struct PluginCounters {
    std::int64_t calls_total = 0;
    std::map<AgentId, std::int64_t> calls_by_agent;
    std::int64_t bytes_in = 0;
    std::int64_t bytes_out = 0;

    bool operator==(const PluginCounters&) const = default;
};

// Live plugin: spec, private state and per-run counters. Enforces the usage
// constraints before the implementation ever sees a call.
class PluginInstance {
public:
    PluginInstance(PluginSpec spec, std::unique_ptr<PluginImpl> impl);
    PluginInstance(const PluginInstance& other);
    PluginInstance& operator=(const PluginInstance& other);
    PluginInstance(PluginInstance&&) noexcept = default;
    PluginInstance& operator=(PluginInstance&&) noexcept = default;

    // Edge presence is decided by the caller (the engine owns the live graph).
    PluginResult invoke(const PluginCall& call, bool caller_has_edge, CallContext& ctx);

    const PluginSpec& spec() const { return spec_; }
    const PluginCounters& counters() const { return counters_; }
    PluginImpl& impl() { return *impl_; }
    const PluginImpl& impl() const { return *impl_; }

    Json state_snapshot() const { return impl_->snapshot(); }
    std::string state_hash() const;

private:
    PluginSpec spec_;
    std::unique_ptr<PluginImpl> impl_;
    PluginCounters counters_;
};

// Instantiates the implementation named by spec.builtin().
Result<PluginInstance> make_plugin_instance(
    const PluginSpec& spec, const std::optional<std::filesystem::path>& sandbox_root = std::nullopt);

// True when `value` conforms to `schema`: every declared field present with the
// declared type, no undeclared fields.
Status check_schema(const Schema& schema, const Json& value);

}  // namespace agentgraph
