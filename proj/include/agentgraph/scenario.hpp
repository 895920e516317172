#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "agentgraph/backend.hpp"
#include "agentgraph/engine.hpp"
#include "agentgraph/graph.hpp"
#include "agentgraph/result.hpp"

namespace agentgraph {

// A runnable scenario directory:
//   spec.json      system graph
//   script.json    scripted backend (its "prompt" is the user prompt)
//   expected.json  assertions checked by self_test
//   README.md      what the scenario models
struct ScenarioBundle {
    std::string name;
    std::filesystem::path dir;
    SystemGraph graph;
    Json script;
    std::string prompt;
    Json expected;
};

Result<ScenarioBundle> load_bundle(const std::filesystem::path& dir);

struct BundleRun {
    RunOutcome outcome;
    std::string log_text;
    std::vector<std::string> failures;  // unmet expectations, empty when all hold

    bool passed() const { return failures.empty(); }
};

// Runs the bundle on its own script and checks expected.json.
Result<BundleRun> self_test(const ScenarioBundle& bundle, RunConfig cfg = {});

// Checks expected.json against a finished engine. Supported keys:
//   outcome, final_response, event_counts {kind: n},
//   task_results {plugin, order: [task ids]},
//   action_sequence ["sender>receiver:action", ...]  (subsequence of sends),
//   precedes [{first: {field: value}, then: {field: value}}]
std::vector<std::string> check_expectations(const Json& expected, const Engine& engine, const RunOutcome& outcome);

// Names of the bundles shipped under scenarios/.
const std::vector<std::string>& shipped_scenarios();

}  // namespace agentgraph
