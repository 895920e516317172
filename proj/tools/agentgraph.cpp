// agentgraph command line: validate, run, replay, export-dot, trace, propose.
//
// Exit codes: 0 ok, 1 invalid spec or draft, 2 runtime failure, 3 budget
// exhausted, 4 usage.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <regex>
#include <string>

#include "CLI11.hpp"

#include "agentgraph/backend.hpp"
#include "agentgraph/dot.hpp"
#include "agentgraph/engine.hpp"
#include "agentgraph/event_log.hpp"
#include "agentgraph/proposal.hpp"
#include "agentgraph/replay.hpp"
#include "agentgraph/scenario.hpp"
#include "agentgraph/spec_io.hpp"
#include "agentgraph/validate.hpp"

namespace fs = std::filesystem;
using namespace agentgraph;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kRuntime = 2;
constexpr int kBudget = 3;
constexpr int kUsage = 4;

int fail(int code, const Error& e) {
    std::cerr << e.code << ": " << e.message << "\n";
    return code;
}

// A spec path or a bundle directory holding spec.json and script.json.
struct Target {
    SystemGraph graph;
    std::optional<Json> script;
};

Result<Target> load_target(const fs::path& path, const std::string& script_path) {
    Target t;
    if (fs::is_directory(path)) {
        auto b = load_bundle(path);
        if (!b) return b.error();
        t.graph = std::move(b->graph);
        t.script = std::move(b->script);
    } else {
        auto g = load_system_spec(path);
        if (!g) return g.error();
        t.graph = std::move(g.value());
    }
    if (!script_path.empty()) {
        auto text = read_text_file(script_path);
        if (!text) return text.error();
        Json j = Json::parse(text.value(), nullptr, false);
        if (j.is_discarded()) return make_error("E_SCRIPT", script_path + " is not JSON");
        t.script = std::move(j);
    }
    return t;
}

// Owns whichever backends the chosen mode needs.
struct BackendSet {
    std::optional<ScriptedBackend> scripted;
    std::optional<HttpBackend> http;
    std::unique_ptr<RoutedBackend> routed;

    Backend& get() { return *routed; }
};

Result<std::unique_ptr<BackendSet>> make_backends(const std::string& mode, const std::optional<Json>& script) {
    auto set = std::make_unique<BackendSet>();
    if (script && mode != "http") {
        auto s = ScriptedBackend::from_json(*script);
        if (!s) return s.error();
        set->scripted.emplace(std::move(s.value()));
    }
    if (mode != "scripted") {
        auto h = HttpBackend::from_env();
        if (h) set->http.emplace(std::move(h.value()));
        else if (mode == "http") return h.error();
    }
    if (mode == "scripted" && !set->scripted) return make_error("E_SCRIPT", "scripted backend needs a script");
    Backend* s = set->scripted ? &*set->scripted : nullptr;
    Backend* h = set->http ? &*set->http : nullptr;
    auto m = mode == "scripted" ? RoutedBackend::Mode::scripted
             : mode == "http"   ? RoutedBackend::Mode::http
                                : RoutedBackend::Mode::by_profile;
    set->routed = std::make_unique<RoutedBackend>(s, h, m);
    return set;
}

std::string next_run_id(const fs::path& out_dir) {
    static const std::regex pat(R"(run-(\d{4,})\.events\.jsonl)");
    long highest = 0;
    std::error_code ec;
    if (fs::is_directory(out_dir, ec)) {
        for (const auto& entry : fs::directory_iterator(out_dir, ec)) {
            std::smatch m;
            auto name = entry.path().filename().string();
            if (std::regex_match(name, m, pat)) highest = std::max(highest, std::stol(m[1].str()));
        }
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "run-%04ld", highest + 1);
    return buf;
}

Status write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) return make_error("E_IO", "cannot write " + path.string());
    out << text;
    return ok_status();
}

std::string summarize(const Json& e) {
    static const char* kSkip[] = {"seq", "turn", "kind"};
    std::string out;
    for (auto it = e.begin(); it != e.end(); ++it) {
        if (std::find(std::begin(kSkip), std::end(kSkip), it.key()) != std::end(kSkip)) continue;
        if (!out.empty()) out += ' ';
        out += it.key() + "=" + (it->is_string() ? it->get<std::string>() : it->dump());
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"agentgraph: run and inspect multi-agent systems"};
    app.require_subcommand(1);

    std::string spec_path, script_path, prompt, out_dir = "runs", backend_mode = "scripted", run_id, log_path,
                                                 output_path, agent_filter, kind_filter, objective;
    bool as_json = false, check = false;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> max_agents, max_turns, max_messages, max_calls;

    auto* validate = app.add_subcommand("validate", "check a system spec");
    validate->add_option("spec", spec_path, "spec file or bundle directory")->required();
    validate->add_flag("--json", as_json, "print the report as JSON");

    auto* run = app.add_subcommand("run", "run a system and write its event log");
    run->add_option("spec", spec_path, "spec file or bundle directory")->required();
    run->add_option("--script", script_path, "scripted backend file");
    run->add_option("--prompt", prompt, "user prompt (defaults to the script's)");
    run->add_option("--out", out_dir, "output directory")->capture_default_str();
    run->add_option("--backend", backend_mode, "scripted, http or auto")
        ->check(CLI::IsMember({"scripted", "http", "auto"}))
        ->capture_default_str();
    run->add_option("--run-id", run_id, "run id (default: next run-NNNN)");
    run->add_option("--seed", seed, "seed recorded in the log");
    run->add_flag("--check", check, "check the bundle's expected.json");

    auto* rep = app.add_subcommand("replay", "re-run a recorded log and compare");
    rep->add_option("log", log_path, "recorded events.jsonl")->required();
    rep->add_option("spec", spec_path, "spec file or bundle directory")->required();
    rep->add_option("--script", script_path, "scripted backend file");
    rep->add_option("--backend", backend_mode, "scripted, http or auto")
        ->check(CLI::IsMember({"scripted", "http", "auto"}));

    auto* dot = app.add_subcommand("export-dot", "write the graph in DOT");
    dot->add_option("spec", spec_path, "spec file or bundle directory")->required();
    dot->add_option("-o,--output", output_path, "output file (default stdout)");

    auto* trace = app.add_subcommand("trace", "print a log one event per line");
    trace->add_option("log", log_path, "events.jsonl")->required();
    trace->add_option("--agent", agent_filter, "only events authored by this node");
    trace->add_option("--kind", kind_filter, "only events of this kind");

    auto* propose = app.add_subcommand("propose", "ask a designer backend for a system");
    propose->add_option("objective", objective, "what the system should do")->required();
    propose->add_option("--script", script_path, "scripted designer file");
    propose->add_option("--backend", backend_mode, "scripted or http")
        ->check(CLI::IsMember({"scripted", "http", "auto"}));
    propose->add_option("-o,--output", output_path, "write the accepted spec here");
    propose->add_option("--max-agents", max_agents);
    propose->add_option("--max-turns", max_turns);
    propose->add_option("--max-messages", max_messages);
    propose->add_option("--max-plugin-calls", max_calls);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    if (*validate) {
        auto t = load_target(spec_path, "");
        if (!t) return fail(kInvalid, t.error());
        auto report = validate_graph(t->graph);
        std::cout << (as_json ? report.to_json().dump(2) + "\n" : report.to_text());
        return report.has_errors() ? kInvalid : kOk;
    }

    if (*dot) {
        auto t = load_target(spec_path, "");
        if (!t) return fail(kInvalid, t.error());
        auto text = export_dot(t->graph);
        if (!text) return fail(kInvalid, text.error());
        if (output_path.empty()) {
            std::cout << text.value();
        } else if (auto s = write_text(output_path, text.value()); !s) {
            return fail(kRuntime, s.error());
        }
        return kOk;
    }

    if (*trace) {
        auto text = read_text_file(log_path);
        if (!text) return fail(kRuntime, text.error());
        auto log = EventLog::parse(text.value());
        if (!log) return fail(kRuntime, log.error());
        for (const auto& e : log->events()) {
            const auto& kind = e["kind"].get_ref<const std::string&>();
            auto author = event_author(e);
            if (!kind_filter.empty() && kind != kind_filter) continue;
            if (!agent_filter.empty() && author != agent_filter) continue;
            std::cout << e["seq"] << " r" << e["turn"] << " " << kind << " " << (author.empty() ? "-" : author)
                      << " " << summarize(e) << "\n";
        }
        return kOk;
    }

    if (*run) {
        auto t = load_target(spec_path, script_path);
        if (!t) return fail(kInvalid, t.error());
        auto report = validate_graph(t->graph);
        if (report.has_errors()) {
            std::cerr << report.to_text();
            return kInvalid;
        }
        if (prompt.empty() && t->script && t->script->contains("prompt")) prompt = (*t->script)["prompt"];
        auto backends = make_backends(backend_mode, t->script);
        if (!backends) return fail(kRuntime, backends.error());

        std::error_code ec;
        fs::create_directories(out_dir, ec);
        RunConfig cfg;
        cfg.run_id = run_id.empty() ? next_run_id(out_dir) : run_id;
        cfg.seed = seed;
        cfg.sandbox_dir = fs::path(out_dir) / (cfg.run_id + ".files");
        auto engine = Engine::create(t->graph, backends.value()->get(), cfg);
        if (!engine) return fail(kInvalid, engine.error());
        auto outcome = engine->run(prompt);
        auto base = fs::path(out_dir) / cfg.run_id;
        if (auto s = engine->log().write(base.string() + ".events.jsonl"); !s) return fail(kRuntime, s.error());
        if (!outcome) return fail(kRuntime, outcome.error());
        Json summary = outcome->to_json();
        summary["run_id"] = cfg.run_id;
        if (auto s = write_text(base.string() + ".outcome.json", summary.dump(2) + "\n"); !s)
            return fail(kRuntime, s.error());

        std::cout << cfg.run_id << " " << outcome->outcome << " rounds=" << outcome->rounds
                  << " events=" << engine->log().size() << "\n";
        if (outcome->final_response) std::cout << *outcome->final_response << "\n";

        if (check && fs::is_directory(spec_path)) {
            auto bundle = load_bundle(spec_path);
            if (!bundle) return fail(kRuntime, bundle.error());
            auto fails = check_expectations(bundle->expected, engine.value(), outcome.value());
            for (const auto& f : fails) std::cerr << "expectation failed: " << f << "\n";
            if (!fails.empty()) return kRuntime;
        }
        return outcome->outcome == "budget_exhausted" ? kBudget : kOk;
    }

    if (*rep) {
        auto t = load_target(spec_path, script_path);
        if (!t) return fail(kInvalid, t.error());
        auto text = read_text_file(log_path);
        if (!text) return fail(kRuntime, text.error());
        auto backends = make_backends(backend_mode, t->script);
        if (!backends) return fail(kRuntime, backends.error());
        RunConfig cfg;
        cfg.sandbox_dir = fs::temp_directory_path() / "agentgraph-replay";
        auto report = agentgraph::replay(text.value(), t->graph, backends.value()->get(), cfg);
        if (!report) return fail(kRuntime, report.error());
        if (report->identical) {
            std::cout << "identical " << report->expected_events << " events\n";
            return kOk;
        }
        std::cout << "diverged at seq " << *report->first_divergence_seq << "\n"
                  << "expected: " << report->expected_line << "\n"
                  << "actual:   " << report->actual_line << "\n";
        return kRuntime;
    }

    if (*propose) {
        std::optional<Json> script;
        if (!script_path.empty()) {
            auto text = read_text_file(script_path);
            if (!text) return fail(kRuntime, text.error());
            script = Json::parse(text.value(), nullptr, false);
            if (script->is_discarded()) return fail(kRuntime, make_error("E_SCRIPT", script_path + " is not JSON"));
        }
        auto backends = make_backends(backend_mode, script);
        if (!backends) return fail(kRuntime, backends.error());
        ProposalRequest req;
        req.objective = objective;
        if (backend_mode != "scripted") req.designer.backend_kind = BackendKind::http;
        if (max_agents || max_turns || max_messages || max_calls) {
            GovernorConfig caps;
            if (max_agents) caps.max_agents = *max_agents;
            if (max_turns) caps.max_total_turns = *max_turns;
            if (max_messages) caps.max_messages = *max_messages;
            if (max_calls) caps.max_plugin_calls = *max_calls;
            req.constraints = caps;
        }
        auto p = propose_system(req, backends.value()->get());
        if (!p) return fail(kRuntime, p.error());
        std::cout << p->summary << p->report.to_text();
        if (!p->accepted()) return kInvalid;
        if (!output_path.empty())
            if (auto s = write_text(output_path, serialize_system_spec(p->graph)); !s) return fail(kRuntime, s.error());
        return kOk;
    }
    return kUsage;
}
