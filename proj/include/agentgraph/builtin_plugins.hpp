#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agentgraph/graph.hpp"
#include "agentgraph/message.hpp"
#include "agentgraph/plugin.hpp"

namespace agentgraph {

// Default signatures of a builtin's functions; nullptr for unknown builtins.
// The stub builtin accepts any function name and has no fixed table.
const std::map<std::string, FunctionSignature>* builtin_functions(std::string_view builtin);
bool is_known_builtin(std::string_view builtin);
FunctionSignature stub_default_signature(const std::string& name);

class KvStorePlugin final : public PluginImpl {
public:
    PluginResult call(const std::string& function, const Json& args, CallContext& ctx) override;
    Json snapshot() const override;
    std::unique_ptr<PluginImpl> clone() const override;

private:
    std::map<std::string, std::string> data_;
};

// Many-to-many communication: an append-only sequence of posts. Post seqs come
// from the global message counter.
class BoardPlugin final : public PluginImpl {
public:
    explicit BoardPlugin(PluginId id) : id_(std::move(id)) {}

    PluginResult call(const std::string& function, const Json& args, CallContext& ctx) override;
    Json snapshot() const override;
    std::unique_ptr<PluginImpl> clone() const override;

    const Message& append(std::string sender, std::string content, ActionKind action,
                          std::uint64_t seq, int turn);
    std::vector<Message> read_since(std::uint64_t since_seq) const;
    const std::vector<Message>& posts() const { return posts_; }

private:
    PluginId id_;
    std::vector<Message> posts_;
};

// Relative-path text store. Paths are validated before anything is touched;
// when a sandbox root is set, writes are mirrored below it.
class FileStorePlugin final : public PluginImpl {
public:
    explicit FileStorePlugin(std::optional<std::filesystem::path> sandbox_root = std::nullopt)
        : root_(std::move(sandbox_root)) {}

    PluginResult call(const std::string& function, const Json& args, CallContext& ctx) override;
    Json snapshot() const override;
    std::unique_ptr<PluginImpl> clone() const override;

    static Status check_path(std::string_view path);

private:
    std::optional<std::filesystem::path> root_;
    std::map<std::string, std::string> files_;
};

struct Task {
    std::string id;
    std::string description;
    std::int64_t priority = 0;

    bool operator==(const Task&) const = default;
};

struct TaskResult {
    std::string task_id;
    std::string text;

    bool operator==(const TaskResult&) const = default;
};

// Exact-match task queue with append-only result storage. Highest priority pops
// first; ties go to the lexicographically lower id.
class TaskStorePlugin final : public PluginImpl {
public:
    PluginResult call(const std::string& function, const Json& args, CallContext& ctx) override;
    Json snapshot() const override;
    std::unique_ptr<PluginImpl> clone() const override;

    const std::map<std::string, Task>& pending() const { return pending_; }
    const std::vector<TaskResult>& results() const { return results_; }

private:
    std::map<std::string, Task> pending_;
    std::map<std::string, Task> known_;  // every task ever pushed
    std::vector<TaskResult> results_;
};

// Stand-in for browsing, code execution and external APIs: returns the fixture
// configured under "fixture.<function>" and never touches the outside world.
class StubPlugin final : public PluginImpl {
public:
    explicit StubPlugin(std::map<std::string, Json> config) : config_(std::move(config)) {}

    PluginResult call(const std::string& function, const Json& args, CallContext& ctx) override;
    Json snapshot() const override;
    std::unique_ptr<PluginImpl> clone() const override;

private:
    std::map<std::string, Json> config_;
    std::int64_t calls_ = 0;
};

}  // namespace agentgraph
