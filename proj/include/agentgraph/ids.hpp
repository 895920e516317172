#pragma once

#include <string>
#include <string_view>

namespace agentgraph {

// Agent and plugin ids share one namespace of node ids: [a-z0-9_]{1,64}.
using NodeId = std::string;
using AgentId = NodeId;
using PluginId = NodeId;

// Pseudo-node standing for the human user. Not a valid NodeId, so it can never
// collide with a graph node.
inline constexpr std::string_view kUserNode = "@user";

bool is_valid_node_id(std::string_view id);

}  // namespace agentgraph
