#include "agentgraph/builtin_plugins.hpp"

#include <algorithm>
#include <fstream>

namespace agentgraph {

namespace {

FunctionSignature sig(std::string name, Schema in, Schema out) {
    return FunctionSignature{std::move(name), std::move(in), std::move(out)};
}

std::map<std::string, FunctionSignature> table(std::initializer_list<FunctionSignature> sigs) {
    std::map<std::string, FunctionSignature> out;
    for (const auto& s : sigs) out.emplace(s.name, s);
    return out;
}

const std::map<std::string, FunctionSignature>& kv_table() {
    static const auto t = table({
        sig("put", {{"key", "string"}, {"value", "string"}}, {}),
        sig("get", {{"key", "string"}}, {{"found", "bool"}, {"value", "string"}}),
        sig("keys", {{"prefix", "string"}}, {{"keys", "list"}}),
    });
    return t;
}

const std::map<std::string, FunctionSignature>& board_table() {
    static const auto t = table({
        sig("post", {{"content", "string"}, {"action", "string"}}, {{"seq", "int"}}),
        sig("read", {{"since_seq", "int"}}, {{"posts", "list"}}),
    });
    return t;
}

const std::map<std::string, FunctionSignature>& file_table() {
    static const auto t = table({
        sig("write", {{"path", "string"}, {"text", "string"}}, {{"bytes", "int"}}),
        sig("read", {{"path", "string"}}, {{"text", "string"}}),
        sig("list", {{"prefix", "string"}}, {{"paths", "list"}}),
    });
    return t;
}

const std::map<std::string, FunctionSignature>& task_table() {
    static const auto t = table({
        sig("push", {{"id", "string"}, {"description", "string"}, {"priority", "int"}}, {}),
        sig("pop_highest", {}, {{"task", "any"}}),
        sig("reprioritize", {{"updates", "list"}}, {}),
        sig("list_results", {}, {{"results", "list"}}),
        sig("store_result", {{"task_id", "string"}, {"text", "string"}}, {}),
        sig("list_tasks", {}, {{"tasks", "list"}}),
    });
    return t;
}

Json task_json(const Task& t) {
    return Json{{"id", t.id}, {"description", t.description}, {"priority", t.priority}};
}

// Pop order: priority descending, then id ascending.
bool pops_before(const Task& a, const Task& b) {
    if (a.priority != b.priority) return a.priority > b.priority;
    return a.id < b.id;
}

}  // namespace

const std::map<std::string, FunctionSignature>* builtin_functions(std::string_view builtin) {
    if (builtin == "kv") return &kv_table();
    if (builtin == "board") return &board_table();
    if (builtin == "file_store") return &file_table();
    if (builtin == "task_store") return &task_table();
    return nullptr;
}

bool is_known_builtin(std::string_view builtin) {
    return builtin_functions(builtin) != nullptr || builtin == "stub";
}

FunctionSignature stub_default_signature(const std::string& name) {
    return sig(name, {{"query", "string"}}, {{"output", "string"}});
}

// ---- kv ----

PluginResult KvStorePlugin::call(const std::string& function, const Json& args, CallContext&) {
    if (function == "put") {
        data_[args["key"].get<std::string>()] = args["value"].get<std::string>();
        return Json::object();
    }
    if (function == "get") {
        auto it = data_.find(args["key"].get<std::string>());
        if (it == data_.end()) return Json{{"found", false}, {"value", ""}};
        return Json{{"found", true}, {"value", it->second}};
    }
    if (function == "keys") {
        const auto prefix = args["prefix"].get<std::string>();
        Json keys = Json::array();
        for (const auto& [k, v] : data_)
            if (k.rfind(prefix, 0) == 0) keys.push_back(k);
        return Json{{"keys", keys}};
    }
    return make_error("E_UNKNOWN_FUNCTION", "kv has no function " + function);
}

Json KvStorePlugin::snapshot() const { return Json(data_); }

std::unique_ptr<PluginImpl> KvStorePlugin::clone() const { return std::make_unique<KvStorePlugin>(*this); }

// ---- board ----

const Message& BoardPlugin::append(std::string sender, std::string content, ActionKind action,
                                   std::uint64_t seq, int turn) {
    Message m;
    m.content = std::move(content);
    m.action = action;
    m.meta.seq = seq;
    m.meta.turn = turn;
    m.meta.sender = std::move(sender);
    m.meta.receiver = id_;
    posts_.push_back(std::move(m));
    return posts_.back();
}

std::vector<Message> BoardPlugin::read_since(std::uint64_t since_seq) const {
    std::vector<Message> out;
    for (const auto& p : posts_)
        if (p.meta.seq > since_seq) out.push_back(p);
    return out;
}

PluginResult BoardPlugin::call(const std::string& function, const Json& args, CallContext& ctx) {
    if (function == "post") {
        auto action = parse_action(args["action"].get<std::string>());
        if (!action) return make_error("E_SCHEMA", "unknown action " + args["action"].get<std::string>());
        if (!ctx.next_message_seq) return make_error("E_PLUGIN_CONFIG", "board requires a sequence source");
        auto seq = ctx.next_message_seq();
        append(ctx.caller, args["content"].get<std::string>(), *action, seq, ctx.turn);
        return Json{{"seq", seq}};
    }
    if (function == "read") {
        auto since = args["since_seq"].get<std::int64_t>();
        Json posts = Json::array();
        for (const auto& p : read_since(since < 0 ? 0 : static_cast<std::uint64_t>(since)))
            posts.push_back(to_json(p));
        return Json{{"posts", posts}};
    }
    return make_error("E_UNKNOWN_FUNCTION", "board has no function " + function);
}

Json BoardPlugin::snapshot() const {
    Json posts = Json::array();
    for (const auto& p : posts_) posts.push_back(to_json(p));
    return posts;
}

std::unique_ptr<PluginImpl> BoardPlugin::clone() const { return std::make_unique<BoardPlugin>(*this); }

// ---- file store ----

Status FileStorePlugin::check_path(std::string_view path) {
    if (path.empty() || path.size() > 255) return make_error("E_PATH", "path length must be 1..255");
    if (path.front() == '/' || path.find('\\') != std::string_view::npos || path.find(':') != std::string_view::npos)
        return make_error("E_PATH", "absolute or non-portable path");
    std::size_t start = 0;
    while (start <= path.size()) {
        auto end = path.find('/', start);
        if (end == std::string_view::npos) end = path.size();
        auto seg = path.substr(start, end - start);
        if (seg.empty() || seg == "." || seg == "..")
            return make_error("E_PATH", "path segment '" + std::string(seg) + "' not allowed");
        start = end + 1;
    }
    return ok_status();
}

PluginResult FileStorePlugin::call(const std::string& function, const Json& args, CallContext&) {
    if (function == "write") {
        const auto path = args["path"].get<std::string>();
        if (auto s = check_path(path); !s) return s.error();
        const auto text = args["text"].get<std::string>();
        if (root_) {
            std::error_code ec;
            auto target = *root_ / path;
            std::filesystem::create_directories(target.parent_path(), ec);
            std::ofstream out(target, std::ios::binary | std::ios::trunc);
            if (ec || !out) return make_error("E_IO", "cannot write " + path);
            out << text;
            if (!out) return make_error("E_IO", "cannot write " + path);
        }
        files_[path] = text;
        return Json{{"bytes", static_cast<std::int64_t>(text.size())}};
    }
    if (function == "read") {
        const auto path = args["path"].get<std::string>();
        if (auto s = check_path(path); !s) return s.error();
        auto it = files_.find(path);
        if (it == files_.end()) return make_error("E_NOT_FOUND", path);
        return Json{{"text", it->second}};
    }
    if (function == "list") {
        const auto prefix = args["prefix"].get<std::string>();
        Json paths = Json::array();
        for (const auto& [p, t] : files_)
            if (p.rfind(prefix, 0) == 0) paths.push_back(p);
        return Json{{"paths", paths}};
    }
    return make_error("E_UNKNOWN_FUNCTION", "file_store has no function " + function);
}

Json FileStorePlugin::snapshot() const { return Json(files_); }

std::unique_ptr<PluginImpl> FileStorePlugin::clone() const { return std::make_unique<FileStorePlugin>(*this); }

// ---- task store ----

PluginResult TaskStorePlugin::call(const std::string& function, const Json& args, CallContext&) {
    if (function == "push") {
        Task t{args["id"].get<std::string>(), args["description"].get<std::string>(),
               args["priority"].get<std::int64_t>()};
        if (t.id.empty()) return make_error("E_SCHEMA", "task id must be non-empty");
        if (known_.count(t.id)) return make_error("E_DUP_TASK", "task " + t.id + " already pushed");
        known_[t.id] = t;
        pending_[t.id] = t;
        return Json::object();
    }
    if (function == "pop_highest") {
        if (pending_.empty()) return Json{{"task", nullptr}};
        auto best = pending_.begin();
        for (auto it = pending_.begin(); it != pending_.end(); ++it)
            if (pops_before(it->second, best->second)) best = it;
        Json out{{"task", task_json(best->second)}};
        pending_.erase(best);
        return out;
    }
    if (function == "reprioritize") {
        std::vector<std::pair<std::string, std::int64_t>> updates;
        for (const auto& u : args["updates"]) {
            if (!u.is_object() || !u.contains("id") || !u["id"].is_string() || !u.contains("priority") ||
                !u["priority"].is_number_integer() || u.size() != 2)
                return make_error("E_SCHEMA", "updates must be a list of {id, priority}");
            auto id = u["id"].get<std::string>();
            if (!pending_.count(id)) return make_error("E_UNKNOWN_TASK", "no pending task " + id);
            updates.emplace_back(id, u["priority"].get<std::int64_t>());
        }
        for (const auto& [id, p] : updates) {
            pending_[id].priority = p;
            known_[id].priority = p;
        }
        return Json::object();
    }
    if (function == "store_result") {
        auto id = args["task_id"].get<std::string>();
        if (!known_.count(id)) return make_error("E_UNKNOWN_TASK", "no task " + id);
        results_.push_back(TaskResult{id, args["text"].get<std::string>()});
        return Json::object();
    }
    if (function == "list_results") {
        Json out = Json::array();
        for (const auto& r : results_) out.push_back(Json{{"task_id", r.task_id}, {"text", r.text}});
        return Json{{"results", out}};
    }
    if (function == "list_tasks") {
        std::vector<Task> tasks;
        for (const auto& [id, t] : pending_) tasks.push_back(t);
        std::sort(tasks.begin(), tasks.end(), pops_before);
        Json out = Json::array();
        for (const auto& t : tasks) out.push_back(task_json(t));
        return Json{{"tasks", out}};
    }
    return make_error("E_UNKNOWN_FUNCTION", "task_store has no function " + function);
}

Json TaskStorePlugin::snapshot() const {
    Json pending = Json::array();
    for (const auto& [id, t] : pending_) pending.push_back(task_json(t));
    Json known = Json::array();
    for (const auto& [id, t] : known_) known.push_back(task_json(t));
    Json results = Json::array();
    for (const auto& r : results_) results.push_back(Json{{"task_id", r.task_id}, {"text", r.text}});
    return Json{{"pending", pending}, {"known", known}, {"results", results}};
}

std::unique_ptr<PluginImpl> TaskStorePlugin::clone() const { return std::make_unique<TaskStorePlugin>(*this); }

// ---- stub ----

PluginResult StubPlugin::call(const std::string& function, const Json&, CallContext&) {
    ++calls_;
    auto it = config_.find("fixture." + function);
    if (it == config_.end()) return Json{{"output", ""}};
    return Json{{"output", it->second.is_string() ? it->second.get<std::string>() : it->second.dump()}};
}

Json StubPlugin::snapshot() const { return Json{{"calls", calls_}}; }

std::unique_ptr<PluginImpl> StubPlugin::clone() const { return std::make_unique<StubPlugin>(*this); }

}  // namespace agentgraph
