#include "agentgraph/replay.hpp"

#include <algorithm>

#include "agentgraph/event_log.hpp"

namespace agentgraph {

Json ReplayReport::to_json() const {
    return Json{{"identical", identical},
                {"first_divergence_seq", first_divergence_seq ? Json(*first_divergence_seq) : Json(nullptr)},
                {"expected_line", expected_line},
                {"actual_line", actual_line},
                {"expected_events", expected_events},
                {"actual_events", actual_events}};
}

Result<ReplayReport> replay(std::string_view recorded_log, const SystemGraph& graph, Backend& backend,
                            RunConfig base) {
    auto recorded = EventLog::parse(recorded_log);
    if (!recorded) return recorded.error();
    const auto& events = recorded->events();
    auto start = std::find_if(events.begin(), events.end(), [](const Json& e) { return e["kind"] == "run_start"; });
    if (start == events.end()) return make_error("E_LOG_CORRUPT", "log has no run_start event");
    const Json& rs = *start;
    if (!rs.contains("prompt") || !rs["prompt"].is_string())
        return make_error("E_LOG_CORRUPT", "run_start carries no prompt");

    RunConfig cfg = std::move(base);
    if (rs.contains("run_id") && rs["run_id"].is_string()) cfg.run_id = rs["run_id"].get<std::string>();
    if (rs.contains("seed") && rs["seed"].is_number_unsigned()) cfg.seed = rs["seed"].get<std::uint64_t>();
    if (rs.contains("quiescence_rounds") && rs["quiescence_rounds"].is_number_integer())
        cfg.quiescence_rounds = rs["quiescence_rounds"].get<int>();

    auto engine = Engine::create(graph, backend, cfg);
    if (!engine) return engine.error();
    (void)engine->run(rs["prompt"].get<std::string>());

    ReplayReport report;
    const auto expected = recorded->lines();
    const auto actual = engine->log().lines();
    report.expected_events = expected.size();
    report.actual_events = actual.size();
    const auto n = std::min(expected.size(), actual.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (expected[i] != actual[i]) {
            report.first_divergence_seq = i + 1;
            report.expected_line = expected[i];
            report.actual_line = actual[i];
            return report;
        }
    }
    if (expected.size() != actual.size()) {
        report.first_divergence_seq = n + 1;
        if (n < expected.size()) report.expected_line = expected[n];
        if (n < actual.size()) report.actual_line = actual[n];
        return report;
    }
    report.identical = true;
    return report;
}

}  // namespace agentgraph
