#include "agentgraph/plugin.hpp"

#include "agentgraph/builtin_plugins.hpp"
#include "agentgraph/hash.hpp"

namespace agentgraph {

namespace {

bool type_matches(const std::string& type, const Json& v) {
    if (type == "any") return true;
    if (type == "string") return v.is_string();
    if (type == "int") return v.is_number_integer();
    if (type == "bool") return v.is_boolean();
    if (type == "list") return v.is_array();
    if (type == "object") return v.is_object();
    return false;
}

}  // namespace

Status check_schema(const Schema& schema, const Json& value) {
    if (!value.is_object()) return make_error("E_SCHEMA", "payload must be an object");
    for (const auto& [field, type] : schema) {
        auto it = value.find(field);
        if (it == value.end()) return make_error("E_SCHEMA", "missing field '" + field + "'");
        if (!type_matches(type, *it))
            return make_error("E_SCHEMA", "field '" + field + "' is not of type " + type);
    }
    for (const auto& [field, v] : value.items()) {
        (void)v;
        if (!schema.count(field)) return make_error("E_SCHEMA", "undeclared field '" + field + "'");
    }
    return ok_status();
}

PluginInstance::PluginInstance(PluginSpec spec, std::unique_ptr<PluginImpl> impl)
    : spec_(std::move(spec)), impl_(std::move(impl)) {}

PluginInstance::PluginInstance(const PluginInstance& other)
    : spec_(other.spec_), impl_(other.impl_->clone()), counters_(other.counters_) {}

PluginInstance& PluginInstance::operator=(const PluginInstance& other) {
    if (this != &other) {
        spec_ = other.spec_;
        impl_ = other.impl_->clone();
        counters_ = other.counters_;
    }
    return *this;
}

PluginResult PluginInstance::invoke(const PluginCall& call, bool caller_has_edge, CallContext& ctx) {
    if (!caller_has_edge)
        return make_error("E_NO_EDGE", call.caller + " has no edge to plugin " + spec_.id);
    auto fn = spec_.functionalities.find(call.function);
    if (fn == spec_.functionalities.end())
        return make_error("E_UNKNOWN_FUNCTION", spec_.id + " has no function " + call.function);
    const auto& u = spec_.constraints;
    if (u.allowed_callers && !u.allowed_callers->count(call.caller))
        return make_error("E_CALLER_FORBIDDEN", call.caller + " may not call " + spec_.id);
    if (u.max_calls_per_run && counters_.calls_total >= *u.max_calls_per_run)
        return make_error("E_CONSTRAINT", spec_.id + " reached max_calls_per_run");
    if (auto s = check_schema(fn->second.input, call.args); !s) return s.error();
    auto bytes_in = static_cast<std::int64_t>(call.args.dump().size());
    if (u.max_payload_bytes && bytes_in > *u.max_payload_bytes)
        return make_error("E_CONSTRAINT", spec_.id + " payload exceeds max_payload_bytes");

    // Output is checked against a scratch copy so a malformed result cannot
    // leave the live state mutated.
    auto scratch = impl_->clone();
    auto result = scratch->call(call.function, call.args, ctx);
    if (!result) return result;
    if (auto s = check_schema(fn->second.output, result.value()); !s)
        return make_error("E_SCHEMA", "result of " + call.function + ": " + s.error().message);

    impl_ = std::move(scratch);
    counters_.calls_total += 1;
    counters_.calls_by_agent[call.caller] += 1;
    counters_.bytes_in += bytes_in;
    counters_.bytes_out += static_cast<std::int64_t>(result.value().dump().size());
    return result;
}

std::string PluginInstance::state_hash() const {
    return content_hash(impl_->snapshot().dump());
}

Result<PluginInstance> make_plugin_instance(const PluginSpec& spec,
                                            const std::optional<std::filesystem::path>& sandbox_root) {
    const auto kind = spec.builtin();
    std::unique_ptr<PluginImpl> impl;
    if (kind == "kv") impl = std::make_unique<KvStorePlugin>();
    else if (kind == "board") impl = std::make_unique<BoardPlugin>(spec.id);
    else if (kind == "task_store") impl = std::make_unique<TaskStorePlugin>();
    else if (kind == "stub") impl = std::make_unique<StubPlugin>(spec.config);
    else if (kind == "file_store") {
        std::optional<std::filesystem::path> root;
        if (sandbox_root) root = *sandbox_root / spec.id;
        impl = std::make_unique<FileStorePlugin>(root);
    } else {
        return make_error("E_PLUGIN_CONFIG", "plugin " + spec.id + " has unknown builtin '" + kind + "'");
    }
    return PluginInstance(spec, std::move(impl));
}

}  // namespace agentgraph
