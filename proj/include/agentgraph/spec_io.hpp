#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "agentgraph/graph.hpp"
#include "agentgraph/result.hpp"

namespace agentgraph {

// Parses a system spec document. Unknown keys anywhere are rejected with
// E_UNKNOWN_KEY; other failures are E_PARSE, E_TYPE, E_DUP_ID,
// E_DUP_FUNCTION or E_PLUGIN_CONFIG. Keywords are lowercased.
Result<SystemGraph> parse_system_spec(std::string_view text);
Result<SystemGraph> load_system_spec(const std::filesystem::path& path);

// Canonical form: sorted keys, sorted ids, two-space indent, trailing newline.
std::string serialize_system_spec(const SystemGraph& g);

Json to_json(const SystemGraph& g);
Json to_json(const AgentSpec& a);
Json to_json(const PluginSpec& p);

Result<AgentSpec> agent_spec_from_json(const Json& j, const std::string& path = "agent");

Result<std::string> read_text_file(const std::filesystem::path& path);

}  // namespace agentgraph
