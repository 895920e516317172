#include <cstdlib>

#include "httplib.h"

#include "agentgraph/backend.hpp"

namespace agentgraph {

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

Result<SplitUrl> split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) return make_error("E_BACKEND", "backend URL lacks a scheme: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return SplitUrl{url, "/"};
    return SplitUrl{url.substr(0, path_start), url.substr(path_start)};
}

Json role_json(const RoleSpec& r) {
    return Json{{"name", r.name}, {"responsibilities", r.responsibilities}, {"keywords", r.keywords}};
}

Json profile_fields(const BackendProfile& p) {
    return Json{{"model", p.model_name}, {"temperature", p.temperature}, {"max_output_items", p.max_output_items}};
}

}  // namespace

HttpBackend::HttpBackend(std::string url, std::string token, int timeout_seconds)
    : url_(std::move(url)), token_(std::move(token)), timeout_seconds_(timeout_seconds) {}

Result<HttpBackend> HttpBackend::from_env() {
    const char* url = std::getenv("AGENTGRAPH_BACKEND_URL");
    if (!url || !*url) return make_error("E_BACKEND", "AGENTGRAPH_BACKEND_URL is not set");
    const char* token = std::getenv("AGENTGRAPH_BACKEND_TOKEN");
    return HttpBackend(url, token ? token : "");
}

Result<Json> HttpBackend::post(const Json& body) const {
    auto parts = split_url(url_);
    if (!parts) return parts.error();
    httplib::Client client(parts->origin);
    client.set_connection_timeout(timeout_seconds_, 0);
    client.set_read_timeout(timeout_seconds_, 0);
    httplib::Headers headers;
    if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
    auto res = client.Post(parts->path, headers, body.dump(), "application/json");
    if (!res) return make_error("E_BACKEND", "request failed: " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300)
        return make_error("E_BACKEND", "backend answered HTTP " + std::to_string(res->status));
    Json reply = Json::parse(res->body, nullptr, false);
    if (reply.is_discarded()) return make_error("E_BACKEND", "backend reply is not JSON");
    return reply;
}

Result<BackendDecision> HttpBackend::decide(const TurnSnapshot& snapshot, const BackendProfile& profile) {
    Json body = to_json(snapshot);
    body.update(profile_fields(profile));
    body["mode"] = "decide";
    auto reply = post(body);
    if (!reply) return reply.error();
    return decision_from_json(reply.value(), snapshot.agent_id);
}

Result<std::string> HttpBackend::oracle(const AgentId& oracle, const RoleSpec& role, std::string_view input,
                                        const BackendProfile& profile) {
    Json body = profile_fields(profile);
    body["mode"] = "oracle";
    body["agent_id"] = oracle;
    body["role"] = role_json(role);
    body["input"] = std::string(input);
    auto reply = post(body);
    if (!reply) return reply.error();
    if (!reply->is_object() || !reply->contains("output") || !(*reply)["output"].is_string())
        return make_error("E_BACKEND", "oracle reply must be {\"output\": text}");
    return (*reply)["output"].get<std::string>();
}

Result<std::string> HttpBackend::design(const std::string& objective, const std::optional<GovernorConfig>& constraints,
                                        const BackendProfile& profile) {
    Json body = profile_fields(profile);
    body["mode"] = "design";
    body["objective"] = objective;
    if (constraints) {
        body["constraints"] = Json{{"max_agents", constraints->max_agents},
                                   {"max_total_turns", constraints->max_total_turns},
                                   {"max_messages", constraints->max_messages},
                                   {"max_plugin_calls", constraints->max_plugin_calls}};
    } else {
        body["constraints"] = nullptr;
    }
    auto reply = post(body);
    if (!reply) return reply.error();
    if (!reply->is_object() || !reply->contains("draft") || !(*reply)["draft"].is_string())
        return make_error("E_BACKEND", "design reply must be {\"draft\": text}");
    return (*reply)["draft"].get<std::string>();
}

}  // namespace agentgraph
