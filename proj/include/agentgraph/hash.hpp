#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace agentgraph {

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

// Lowercase, zero-padded, 16 hex digits.
std::string hex16(std::uint64_t value);

inline std::string content_hash(std::string_view content) { return hex16(fnv1a64(content)); }

}  // namespace agentgraph
