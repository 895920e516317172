#pragma once

#include <array>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>

#include <sys/wait.h>

#include "agentgraph/backend.hpp"
#include "agentgraph/builtin_plugins.hpp"
#include "agentgraph/engine.hpp"
#include "agentgraph/graph.hpp"
#include "agentgraph/hash.hpp"
#include "agentgraph/spec_io.hpp"

namespace testsupport {

namespace fs = std::filesystem;
using namespace agentgraph;

inline fs::path source_dir() { return fs::path(AGENTGRAPH_SOURCE_DIR); }
inline fs::path scenario(const std::string& name) { return source_dir() / "scenarios" / name; }
inline fs::path fixture(const std::string& name) { return source_dir() / "tests" / "fixtures" / name; }

template <typename T>
T must(Result<T> r) {
    if (!r) throw std::runtime_error(r.error().code + ": " + r.error().message);
    return std::move(r.value());
}

inline SystemGraph load_spec(const fs::path& p) { return must(load_system_spec(p)); }
inline Json load_json(const fs::path& p) { return Json::parse(must(read_text_file(p))); }
inline ScriptedBackend script(const Json& j) { return must(ScriptedBackend::from_json(j)); }
inline ScriptedBackend script_file(const fs::path& p) { return must(ScriptedBackend::from_file(p)); }

inline AgentSpec make_agent(const std::string& id, std::set<std::string> keywords = {}) {
    AgentSpec a;
    a.id = id;
    a.role.name = id;
    a.role.keywords = keywords.empty() ? std::set<std::string>{id} : std::move(keywords);
    return a;
}

inline PluginSpec make_plugin(const std::string& id, const std::string& builtin) {
    PluginSpec p;
    p.id = id;
    p.config["builtin"] = builtin;
    if (const auto* fns = builtin_functions(builtin)) p.functionalities = *fns;
    return p;
}

// Output and exit status of a shell command.
struct Shell {
    int status = -1;
    std::string out;
};

inline Shell run_shell(const std::string& cmd) {
    Shell s;
    std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen((cmd + " 2>&1").c_str(), "r"), pclose);
    if (!pipe) return s;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe.get())) > 0) s.out.append(buf.data(), n);
    int raw = pclose(pipe.release());
    s.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return s;
}

inline std::string cli() { return AGENTGRAPH_CLI; }

}  // namespace testsupport
