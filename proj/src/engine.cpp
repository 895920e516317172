#include "agentgraph/engine.hpp"

#include <algorithm>

#include "agentgraph/builtin_plugins.hpp"
#include "agentgraph/hash.hpp"
#include "agentgraph/spec_io.hpp"
#include "agentgraph/validate.hpp"

namespace agentgraph {

namespace {

Json breach_json(const Breach& b) { return Json{{"resource", b.resource}, {"value", b.value}, {"cap", b.cap}}; }

bool is_ref(const Json& j) {
    return j.is_object() && j.size() == 1 && j.contains("$ref") && j["$ref"].is_array() && j["$ref"].size() == 2 &&
           j["$ref"][0].is_number_unsigned() && j["$ref"][1].is_string();
}

// Dotted path into a JSON value; numeric segments index arrays.
const Json* walk(const Json& root, const std::string& path) {
    const Json* cur = &root;
    std::size_t start = 0;
    while (start < path.size()) {
        auto end = path.find('.', start);
        if (end == std::string::npos) end = path.size();
        auto seg = path.substr(start, end - start);
        if (cur->is_object()) {
            auto it = cur->find(seg);
            if (it == cur->end()) return nullptr;
            cur = &*it;
        } else if (cur->is_array() && !seg.empty() && std::all_of(seg.begin(), seg.end(), ::isdigit)) {
            auto idx = std::stoul(seg);
            if (idx >= cur->size()) return nullptr;
            cur = &(*cur)[idx];
        } else {
            return nullptr;
        }
        start = end + 1;
    }
    return cur;
}

}  // namespace

Json RunOutcome::to_json() const {
    Json b = Json::array();
    for (const auto& x : breaches) b.push_back(breach_json(x));
    return Json{{"outcome", outcome},
                {"final_response", final_response ? Json(*final_response) : Json(nullptr)},
                {"rounds", rounds},
                {"pending", pending},
                {"breaches", b},
                {"ledger", agentgraph::to_json(ledger)}};
}

Engine::Engine(SystemGraph graph, Backend& backend, RunConfig cfg)
    : graph_(std::move(graph)),
      backend_(&backend),
      cfg_(std::move(cfg)),
      router_(static_cast<std::size_t>(std::max<std::int64_t>(graph_.governor.channel_queue_cap, 0))) {
    if (!cfg_.seed) cfg_.seed = graph_.scenario.seed;
    if (!cfg_.quiescence_rounds) cfg_.quiescence_rounds = graph_.scenario.quiescence_rounds;
}

Result<Engine> Engine::create(SystemGraph graph, Backend& backend, RunConfig cfg) {
    auto report = validate_graph(graph);
    if (report.has_errors()) return make_error("E_INVALID_GRAPH", report.to_text());
    Engine e(std::move(graph), backend, std::move(cfg));
    for (const auto& [id, spec] : e.graph_.plugins) {
        auto inst = make_plugin_instance(spec, e.cfg_.sandbox_dir);
        if (!inst) return inst.error();
        e.plugins_.emplace(id, std::move(inst.value()));
    }
    for (const auto& [id, spec] : e.graph_.agents) {
        AgentState st;
        for (const auto& k : spec.initial_knowledge) st.knowledge.push_back({"seed", k});
        e.states_.emplace(id, std::move(st));
    }
    e.emit("init", Json{{"agents", e.graph_.agents.size()},
                        {"plugins", e.graph_.plugins.size()},
                        {"spec_hash", content_hash(serialize_system_spec(e.graph_))}});
    return e;
}

const Json& Engine::emit(const std::string& kind, Json fields) {
    const auto& e = log_.append(kind, round_, std::move(fields));
    ledger_ = record_usage(std::move(ledger_), e);
    return e;
}

bool Engine::has_authority(const AgentId& issuer, const AgentId& target) const {
    auto it = graph_.agents.find(issuer);
    return it != graph_.agents.end() && it->second.halt_authority.count(target) > 0;
}

bool Engine::halt_pending_for(const AgentId& target) const {
    return std::any_of(pending_halts_.begin(), pending_halts_.end(),
                       [&](const PendingHalt& p) { return p.order.target == target; });
}

const AgentState* Engine::agent_state(const AgentId& id) const {
    auto it = states_.find(id);
    return it == states_.end() ? nullptr : &it->second;
}

const PluginInstance* Engine::plugin(const PluginId& id) const {
    auto it = plugins_.find(id);
    return it == plugins_.end() ? nullptr : &it->second;
}

std::vector<HaltOrder> Engine::pending_halts() const {
    std::vector<HaltOrder> out;
    for (const auto& p : pending_halts_) out.push_back(p.order);
    return out;
}

std::size_t Engine::pending_messages() const {
    auto n = router_.pending();
    for (const auto& p : pending_halts_)
        if (p.msg) ++n;
    return n;
}

void Engine::deliver(const Message& m) {
    emit("deliver", Json{{"msg", m.meta.seq},
                         {"sender", m.meta.sender},
                         {"receiver", m.meta.receiver},
                         {"action", to_string(m.action)}});
}

// ---- messaging ----

Result<MessageId> Engine::send(const NodeId& from, const NodeId& to, const std::string& content, ActionKind action,
                               std::optional<MessageId> correlation) {
    const bool from_user = from == kUserNode;
    if (from_user) {
        if (!graph_.entry || *graph_.entry != to || !graph_.is_agent(to))
            return make_error("E_NO_EDGE", "the user may only address the entry agent");
    } else {
        if (!graph_.is_agent(from)) return make_error("E_UNKNOWN_AGENT", "unknown sender " + from);
        if (states_.at(from).status == AgentStatus::halted)
            return make_error("E_SENDER_HALTED", from + " is halted");
    }
    if (!graph_.has_node(to)) return make_error("E_UNKNOWN_AGENT", "unknown receiver " + to);
    if (ledger_.messages >= graph_.governor.max_messages) return make_error("E_BUDGET", "message budget exhausted");

    const bool to_exit = graph_.exit && *graph_.exit == to && action == ActionKind::response;
    bool immediate = false;
    if (from == to) {
        if (!to_exit) return make_error("E_SELF_SEND", from + " may not message itself");
        immediate = true;
    } else if (!from_user && !graph_.has_edge(from, to)) {
        return make_error("E_NO_EDGE", "no channel between " + from + " and " + to);
    }
    if (graph_.is_plugin(to)) {
        if (!to_exit) return make_error("E_NOT_AGENT", to + " is a plugin; use invoke_plugin");
        immediate = true;
    }
    if (action == ActionKind::halt) {
        if (!graph_.is_agent(to) || from_user || !has_authority(from, to))
            return make_error("E_HALT_UNAUTHORIZED", from + " holds no halt authority over " + to);
    } else if (!immediate) {
        if (auto s = router_.can_enqueue(from, to); !s) return s.error();
    }

    Message m;
    m.content = content;
    m.action = action;
    m.meta.seq = router_.next_seq();
    m.meta.turn = round_;
    m.meta.sender = from;
    m.meta.receiver = to;
    m.meta.correlation = correlation;
    m.meta.timestamp = log_.last_seq() + 1;

    Json ev{{"msg", m.meta.seq},
            {"sender", from},
            {"receiver", to},
            {"action", to_string(action)},
            {"content", content},
            {"content_hash", content_hash(content)}};
    if (correlation) ev["correlation"] = *correlation;
    emit("send", std::move(ev));

    if (action == ActionKind::halt) {
        issue_halt(HaltOrder{from, to, HaltReason::creator_discretion, m.meta.timestamp}, m.meta.seq);
        return m.meta.seq;
    }
    if (immediate) {
        deliver(m);
        exit_reached_ = true;
        final_response_ = content;
        return m.meta.seq;
    }
    if (states_.at(to).status == AgentStatus::halted) {
        if (action == ActionKind::command && content == "resume" && has_authority(from, to)) {
            if (auto s = resume_agent(from, to); !s) return s.error();
        } else {
            emit("discard", Json{{"msg", m.meta.seq}, {"sender", from}, {"receiver", to}, {"reason", "receiver_halted"}});
            return m.meta.seq;
        }
    }
    const auto seq = m.meta.seq;
    router_.enqueue(std::move(m));
    return seq;
}

std::vector<Message> Engine::drain_inbox(const AgentId& agent) {
    auto msgs = router_.drain(agent);
    for (const auto& m : msgs) deliver(m);
    return msgs;
}

Result<MessageId> Engine::board_post(const NodeId& author, const PluginId& board, const std::string& content,
                                     ActionKind action) {
    auto it = plugins_.find(board);
    if (it == plugins_.end() || it->second.spec().builtin() != "board")
        return make_error("E_UNKNOWN_PLUGIN", board + " is not a board");
    if (author == kUserNode) {
        // The user reaches the entry board without an edge or a call budget.
        if (!graph_.entry || *graph_.entry != board) return make_error("E_NO_EDGE", "the user may only post to the entry board");
        auto* impl = dynamic_cast<BoardPlugin*>(&it->second.impl());
        if (!impl) return make_error("E_PLUGIN_CONFIG", board + " is not a board");
        auto seq = router_.next_seq();
        impl->append(author, content, action, seq, round_);
        emit("post", Json{{"msg", seq}, {"sender", author}, {"board", board}, {"action", to_string(action)},
                          {"content", content}});
        return seq;
    }
    auto r = invoke_plugin(PluginCall{author, board, "post", Json{{"content", content}, {"action", to_string(action)}}});
    if (!r) return r.error();
    return r.value()["seq"].get<MessageId>();
}

Result<Json> Engine::board_read(const AgentId& reader, const PluginId& board, std::uint64_t since_seq) {
    auto it = plugins_.find(board);
    if (it == plugins_.end() || it->second.spec().builtin() != "board")
        return make_error("E_UNKNOWN_PLUGIN", board + " is not a board");
    auto r = invoke_plugin(PluginCall{reader, board, "read", Json{{"since_seq", since_seq}}});
    if (!r) return r.error();
    return r.value()["posts"];
}

// ---- plugins ----

PluginResult Engine::invoke_plugin(const PluginCall& call) {
    if (!graph_.is_agent(call.caller)) return make_error("E_UNKNOWN_AGENT", "unknown caller " + call.caller);
    if (states_.at(call.caller).status == AgentStatus::halted) return make_error("E_HALTED", call.caller + " is halted");
    auto it = plugins_.find(call.plugin);
    if (it == plugins_.end()) return make_error("E_UNKNOWN_PLUGIN", "unknown plugin " + call.plugin);
    if (ledger_.plugin_calls >= graph_.governor.max_plugin_calls)
        return make_error("E_BUDGET", "plugin call budget exhausted");

    CallContext ctx{call.caller, round_, [this] { return router_.next_seq(); }};
    auto r = it->second.invoke(call, graph_.has_edge(call.caller, call.plugin), ctx);

    Json ev{{"caller", call.caller},
            {"plugin", call.plugin},
            {"function", call.function},
            {"args_hash", content_hash(call.args.dump())},
            {"ok", r.ok()}};
    if (r) ev["result_hash"] = content_hash(r.value().dump());
    else ev["code"] = r.error().code;
    emit("plugin_call", std::move(ev));

    if (r && call.function == "post" && it->second.spec().builtin() == "board") {
        emit("post", Json{{"msg", r.value()["seq"]},
                          {"sender", call.caller},
                          {"board", call.plugin},
                          {"action", call.args["action"]},
                          {"content", call.args["content"]}});
    }
    return r;
}

// ---- oracles ----

Result<std::string> Engine::oracle_invoke(const AgentId& oracle, std::string_view input, const NodeId& caller) {
    auto it = graph_.agents.find(oracle);
    if (it == graph_.agents.end()) return make_error("E_UNKNOWN_AGENT", "unknown oracle " + oracle);
    if (!it->second.is_oracle) return make_error("E_NOT_ORACLE", oracle + " is not an oracle");
    if (states_.at(oracle).status == AgentStatus::halted) return make_error("E_HALTED", oracle + " is halted");
    if (caller != kUserNode) {
        if (!graph_.is_agent(caller)) return make_error("E_UNKNOWN_AGENT", "unknown caller " + caller);
        if (!graph_.has_edge(caller, oracle)) return make_error("E_NO_EDGE", caller + " has no edge to " + oracle);
    }
    auto out = backend_->oracle(oracle, it->second.role, input, it->second.backend_profile);
    if (!out) {
        emit("backend_error", Json{{"agent", oracle}, {"code", out.error().code}, {"message", out.error().message},
                                   {"requeued", 0}});
        return out.error();
    }
    emit("oracle_invoke", Json{{"agent", oracle},
                               {"caller", caller},
                               {"input_hash", content_hash(input)},
                               {"output_hash", content_hash(out.value())}});
    return out;
}

// ---- lifecycle ----

Result<AgentId> Engine::spawn_agent(const SpawnRequest& req) {
    auto cit = graph_.agents.find(req.creator);
    if (cit == graph_.agents.end()) return make_error("E_UNKNOWN_AGENT", "unknown creator " + req.creator);
    const auto& child = req.child_spec;
    auto deny = [&](const Error& err, const std::string& reason, const SpawnAdmission* adm = nullptr) -> Error {
        Json ev{{"creator", req.creator}, {"child", child.id}, {"reason", reason}, {"code", err.code}};
        if (adm) {
            ev["overlap"] = adm->overlap;
            if (adm->conflict) ev["conflict"] = *adm->conflict;
        }
        emit("spawn_denied", std::move(ev));
        return err;
    };

    if (states_.at(req.creator).status == AgentStatus::halted)
        return deny(make_error("E_HALTED", req.creator + " is halted"), "halted");
    if (auto s = check_spawn_privileges(cit->second, graph_.neighbors(req.creator), req); !s)
        return deny(s.error(), "privilege");
    if (auto s = check_agent_spec(child); !s) return deny(s.error(), "invalid");
    if (graph_.has_node(child.id)) return deny(make_error("E_DUP_ID", child.id + " already exists"), "invalid");

    std::vector<LiveRole> live;
    for (const auto& [id, spec] : graph_.agents) live.push_back({id, spec.role});
    auto adm = admit_spawn(ledger_, graph_.governor, req, live);
    if (!adm.admitted) {
        std::string msg = adm.reason == "resource" ? "agent budget frozen"
                                                   : "role overlaps " + adm.conflict.value_or("") + " too closely";
        return deny(make_error("E_GOVERNOR_DENIED", msg), adm.reason, &adm);
    }

    graph_.agents.emplace(child.id, child);
    for (const auto& n : req.requested_edges) graph_.connect(child.id, n);
    graph_.connect(req.creator, child.id);
    graph_.agents.at(req.creator).halt_authority.insert(child.id);
    AgentState st;
    for (const auto& k : child.initial_knowledge) st.knowledge.push_back({"seed", k});
    states_.emplace(child.id, std::move(st));

    emit("spawn", Json{{"creator", req.creator}, {"child", child.id}, {"edges", graph_.neighbors(child.id)}});
    if (!req.initial_goal.empty()) {
        auto s = send(req.creator, child.id, req.initial_goal, ActionKind::task_assignment);
        if (!s)
            emit("effect_error", Json{{"agent", req.creator}, {"effect", "send"}, {"to", child.id},
                                      {"code", s.error().code}, {"message", s.error().message}});
    }
    return child.id;
}

void Engine::issue_halt(HaltOrder order, std::optional<MessageId> msg) {
    if (!msg) {
        const auto& e = emit("halt_issued", Json{{"issuer", order.issuer}, {"target", order.target},
                                                  {"reason", to_string(order.reason)}});
        order.issued_seq = e["seq"].get<std::uint64_t>();
    }
    pending_halts_.push_back(PendingHalt{std::move(order), msg});
}

HaltReceipt Engine::do_halt(const HaltOrder& order) {
    HaltReceipt receipt;
    receipt.order = order;
    auto& st = states_.at(order.target);
    if (st.status == AgentStatus::halted) {
        receipt.already_halted = true;
        receipt.seq = emit("warning", Json{{"agent", order.target}, {"code", "W_ALREADY_HALTED"},
                                           {"issuer", order.issuer}})["seq"]
                          .get<std::uint64_t>();
        return receipt;
    }
    for (const auto& m : router_.discard_inbox(order.target)) {
        emit("discard", Json{{"msg", m.meta.seq}, {"sender", m.meta.sender}, {"receiver", m.meta.receiver},
                             {"reason", "halted"}});
        ++receipt.discarded;
    }
    st.status = AgentStatus::halted;
    receipt.seq = emit("halt", Json{{"issuer", order.issuer}, {"target", order.target},
                                    {"reason", to_string(order.reason)}, {"discarded", receipt.discarded}})["seq"]
                      .get<std::uint64_t>();
    return receipt;
}

Result<HaltReceipt> Engine::halt_agent(const HaltOrder& order) {
    if (!graph_.is_agent(order.target)) return make_error("E_UNKNOWN_AGENT", "unknown target " + order.target);
    if (order.reason != HaltReason::governor && !has_authority(order.issuer, order.target))
        return make_error("E_HALT_UNAUTHORIZED", order.issuer + " holds no halt authority over " + order.target);
    auto o = order;
    o.issued_seq = emit("halt_issued", Json{{"issuer", o.issuer}, {"target", o.target},
                                            {"reason", to_string(o.reason)}})["seq"]
                       .get<std::uint64_t>();
    return do_halt(o);
}

Status Engine::resume_agent(const AgentId& issuer, const AgentId& target) {
    if (!graph_.is_agent(target)) return make_error("E_UNKNOWN_AGENT", "unknown target " + target);
    if (!has_authority(issuer, target))
        return make_error("E_HALT_UNAUTHORIZED", issuer + " holds no halt authority over " + target);
    auto& st = states_.at(target);
    if (st.status != AgentStatus::halted) return make_error("E_NOT_HALTED", target + " is not halted");
    st.status = AgentStatus::idle;
    resume_mark_[target] = history_.size();
    offtask_checked_[target] = history_.size();
    emit("resume", Json{{"issuer", issuer}, {"target", target}});
    return ok_status();
}

void Engine::apply_pending_halts() {
    auto pending = std::move(pending_halts_);
    pending_halts_.clear();
    for (const auto& p : pending) {
        const bool halted = states_.at(p.order.target).status == AgentStatus::halted;
        if (p.msg) {
            if (halted) {
                emit("discard", Json{{"msg", *p.msg}, {"sender", p.order.issuer}, {"receiver", p.order.target},
                                     {"reason", "already_halted"}});
                continue;
            }
            emit("deliver", Json{{"msg", *p.msg}, {"sender", p.order.issuer}, {"receiver", p.order.target},
                                 {"action", "halt"}});
        }
        do_halt(p.order);
    }
}

// ---- supervision ----

void Engine::run_supervisor(const SupervisorConfig& sup) {
    const auto window = static_cast<std::size_t>(std::max(sup.window, 0));
    std::vector<TurnRecord> view;
    for (const auto& target : sup.watch_list) {
        auto st = states_.find(target);
        if (st == states_.end() || st->second.status == AgentStatus::halted || halt_pending_for(target)) continue;
        const std::size_t mark = resume_mark_.count(target) ? resume_mark_.at(target) : 0;
        std::vector<TurnRecord> mine;
        for (std::size_t i = history_.size(); i > mark && mine.size() < window; --i) {
            const auto& r = history_[i - 1];
            if (r.agent != target || (r.decision.outgoing.empty() && r.decision.plugin_calls.empty())) continue;
            TurnRecord lite;
            lite.agent = r.agent;
            lite.round = r.round;
            lite.signature = r.signature;
            lite.idle = r.idle;
            lite.decision.outgoing = r.decision.outgoing;
            lite.decision.plugin_calls = r.decision.plugin_calls;
            mine.push_back(std::move(lite));
        }
        view.insert(view.end(), std::make_move_iterator(mine.rbegin()), std::make_move_iterator(mine.rend()));
    }

    for (auto& order : supervise(sup, view)) {
        if (!has_authority(sup.agent, order.target)) {
            emit("warning", Json{{"agent", sup.agent}, {"code", "E_HALT_UNAUTHORIZED"}, {"target", order.target}});
            continue;
        }
        issue_halt(order);
    }

    if (!sup.offtask_oracle) return;
    for (const auto& target : sup.watch_list) {
        auto st = states_.find(target);
        if (st == states_.end() || st->second.status == AgentStatus::halted || halt_pending_for(target)) continue;
        std::size_t from = offtask_checked_.count(target) ? offtask_checked_.at(target) : 0;
        std::optional<std::size_t> latest;
        for (std::size_t i = from; i < history_.size(); ++i) {
            const auto& r = history_[i];
            if (r.agent == target && (!r.decision.outgoing.empty() || !r.decision.plugin_calls.empty())) latest = i;
        }
        offtask_checked_[target] = history_.size();
        if (!latest) continue;
        const auto& d = history_[*latest].decision;
        Json out = Json::array();
        for (const auto& o : d.outgoing)
            out.push_back(Json{{"to", o.to}, {"action", to_string(o.action)}, {"content", o.content}});
        Json calls = Json::array();
        for (const auto& c : d.plugin_calls) calls.push_back(c.plugin + "." + c.function);
        Json input{{"agent", target}, {"outgoing", out}, {"plugin_calls", calls}};
        auto verdict = oracle_invoke(*sup.offtask_oracle, input.dump(), sup.agent);
        if (!verdict) {
            emit("warning", Json{{"agent", sup.agent}, {"code", verdict.error().code}, {"target", target}});
            continue;
        }
        if (verdict.value() == "halt" && has_authority(sup.agent, target))
            issue_halt(HaltOrder{sup.agent, target, HaltReason::supervisor_offtask, 0});
    }
}

// ---- turns ----

TurnSnapshot Engine::snapshot_for(const AgentId& agent, std::vector<Message> inbox) const {
    const auto& spec = graph_.agents.at(agent);
    const auto& st = states_.at(agent);
    TurnSnapshot s;
    s.agent_id = agent;
    s.role = spec.role;
    s.knowledge = st.knowledge;
    s.thoughts = st.thoughts;
    s.inbox = std::move(inbox);
    for (const auto& n : graph_.neighbors(agent)) {
        if (auto p = graph_.plugins.find(n); p != graph_.plugins.end()) {
            std::vector<FunctionSignature> fns;
            for (const auto& [name, sig] : p->second.functionalities) fns.push_back(sig);
            s.visible_plugins.emplace_back(n, std::move(fns));
        } else {
            s.neighbors.push_back(n);
        }
    }
    s.turn = round_;
    s.agent_turn = st.turn_count;
    return s;
}

Result<Json> Engine::resolve_refs(const Json& args, const std::vector<Json>& results) const {
    if (is_ref(args)) {
        auto idx = args["$ref"][0].get<std::size_t>();
        const auto& path = args["$ref"][1].get_ref<const std::string&>();
        if (idx >= results.size() || results[idx].is_null())
            return make_error("E_REF", "no result at index " + std::to_string(idx));
        const Json* v = walk(results[idx], path);
        if (!v || v->is_null()) return make_error("E_REF", "path '" + path + "' not found");
        return *v;
    }
    if (args.is_object()) {
        Json out = Json::object();
        for (auto it = args.begin(); it != args.end(); ++it) {
            auto r = resolve_refs(it.value(), results);
            if (!r) return r;
            out[it.key()] = std::move(r.value());
        }
        return out;
    }
    if (args.is_array()) {
        Json out = Json::array();
        for (const auto& x : args) {
            auto r = resolve_refs(x, results);
            if (!r) return r;
            out.push_back(std::move(r.value()));
        }
        return out;
    }
    return args;
}

void Engine::apply_decision(const AgentId& agent, const BackendDecision& d) {
    auto effect_error = [&](const char* effect, const Error& err, const std::string& target) {
        emit("effect_error", Json{{"agent", agent}, {"effect", effect}, {"target", target}, {"code", err.code},
                                  {"message", err.message}});
    };
    auto learn = [&](std::string tag, std::string text) {
        emit("knowledge", Json{{"agent", agent}, {"tag", tag}, {"text", text}});
        states_.at(agent).knowledge.push_back({std::move(tag), std::move(text)});
    };

    for (const auto& k : d.knowledge_updates) learn("backend", k);

    for (const auto& t : d.new_thoughts) {
        auto& th = states_.at(agent).thoughts;
        th.push_back(t);
        if (th.size() > cfg_.thoughts_cap) th.erase(th.begin(), th.end() - static_cast<std::ptrdiff_t>(cfg_.thoughts_cap));
        emit("thought", Json{{"agent", agent}, {"text", t}});
    }

    std::vector<Json> results;
    for (const auto& c : d.plugin_calls) {
        auto args = resolve_refs(c.args, results);
        if (!args) {
            effect_error("plugin_call", args.error(), c.plugin + "." + c.function);
            results.emplace_back(nullptr);
            continue;
        }
        auto r = invoke_plugin(PluginCall{agent, c.plugin, c.function, std::move(args.value())});
        if (!r) {
            results.emplace_back(nullptr);
            continue;
        }
        learn("plugin:" + c.plugin + "." + c.function, r.value().dump());
        results.push_back(std::move(r.value()));
    }

    for (const auto& o : d.outgoing)
        if (auto r = send(agent, o.to, o.content, o.action); !r) effect_error("send", r.error(), o.to);

    for (auto req : d.spawn_requests) {
        req.creator = agent;
        (void)spawn_agent(req);
    }

    for (const auto& t : d.halt_requests) {
        if (!graph_.is_agent(t)) effect_error("halt", make_error("E_UNKNOWN_AGENT", "unknown target " + t), t);
        else if (!has_authority(agent, t))
            effect_error("halt", make_error("E_HALT_UNAUTHORIZED", agent + " holds no halt authority over " + t), t);
        else issue_halt(HaltOrder{agent, t, HaltReason::creator_discretion, 0});
    }
}

Result<TurnRecord> Engine::step_oracle(const AgentId& agent, std::size_t log_mark) {
    const auto& spec = graph_.agents.at(agent);
    auto inbox = router_.drain(agent);
    std::vector<std::string> outputs;
    for (const auto& m : inbox) {
        auto out = backend_->oracle(agent, spec.role, m.content, spec.backend_profile);
        if (!out) {
            auto n = inbox.size();
            router_.requeue(std::move(inbox));
            emit("backend_error", Json{{"agent", agent}, {"code", out.error().code},
                                       {"message", out.error().message}, {"requeued", n}});
            return out.error();
        }
        outputs.push_back(std::move(out.value()));
    }
    TurnRecord rec;
    rec.agent = agent;
    rec.round = round_;
    rec.agent_turn = states_.at(agent).turn_count;
    rec.idle = inbox.empty();
    for (const auto& m : inbox) deliver(m);
    for (std::size_t i = 0; i < inbox.size(); ++i) {
        const auto& m = inbox[i];
        emit("oracle_invoke", Json{{"agent", agent},
                                   {"caller", m.meta.sender},
                                   {"input_hash", content_hash(m.content)},
                                   {"output_hash", content_hash(outputs[i])}});
        if (!graph_.is_agent(m.meta.sender)) continue;
        rec.decision.outgoing.push_back({m.meta.sender, outputs[i], ActionKind::response});
        if (auto r = send(agent, m.meta.sender, outputs[i], ActionKind::response, m.meta.seq); !r)
            emit("effect_error", Json{{"agent", agent}, {"effect", "send"}, {"target", m.meta.sender},
                                      {"code", r.error().code}, {"message", r.error().message}});
    }
    rec.signature = action_signature(rec.decision);
    for (std::size_t i = log_mark; i < log_.size(); ++i) rec.effects.push_back(log_.events()[i]);
    history_.push_back(rec);
    return rec;
}

Result<TurnRecord> Engine::step_agent(const AgentId& agent) {
    if (!graph_.is_agent(agent)) return make_error("E_UNKNOWN_AGENT", "unknown agent " + agent);
    apply_pending_halts();
    if (states_.at(agent).status == AgentStatus::halted) return make_error("E_HALTED", agent + " is halted");
    if (ledger_.turns >= graph_.governor.max_total_turns) return make_error("E_BUDGET", "turn budget exhausted");

    const auto mark = log_.size();
    emit("turn", Json{{"agent", agent},
                      {"agent_turn", states_.at(agent).turn_count},
                      {"inbox", router_.pending_for(agent)}});
    const auto& sup = graph_.scenario.supervisor;
    if (sup && sup->agent == agent) run_supervisor(*sup);

    const auto spec = graph_.agents.at(agent);
    if (spec.is_oracle) return step_oracle(agent, mark);

    auto inbox = router_.drain(agent);
    auto snap = snapshot_for(agent, inbox);
    states_.at(agent).status = AgentStatus::active;
    auto decision = backend_->decide(snap, spec.backend_profile);
    if (decision && decision->largest_list() > static_cast<std::size_t>(spec.backend_profile.max_output_items))
        decision = make_error("E_BACKEND", "decision exceeds max_output_items");
    if (!decision) {
        auto n = inbox.size();
        router_.requeue(std::move(inbox));
        states_.at(agent).status = AgentStatus::idle;
        emit("backend_error", Json{{"agent", agent}, {"code", decision.error().code},
                                   {"message", decision.error().message}, {"requeued", n}});
        return decision.error();
    }
    const auto& d = decision.value();
    if (d.warning) emit("warning", Json{{"agent", agent}, {"code", *d.warning}});
    for (const auto& m : inbox) deliver(m);
    apply_decision(agent, d);

    auto& st = states_.at(agent);
    if (st.status == AgentStatus::active) st.status = AgentStatus::idle;

    TurnRecord rec;
    rec.agent = agent;
    rec.round = round_;
    rec.agent_turn = st.turn_count;
    st.turn_count += 1;
    rec.snapshot = std::move(snap);
    rec.decision = d;
    rec.signature = action_signature(d);
    rec.idle = d.is_idle();
    for (std::size_t i = mark; i < log_.size(); ++i) rec.effects.push_back(log_.events()[i]);
    history_.push_back(rec);
    return rec;
}

// ---- run loop ----

Result<RunOutcome> Engine::run(const std::string& prompt) {
    if (!graph_.entry) return make_error("E_NO_ENTRY", "graph has no entry node");
    emit("run_start", Json{{"prompt", prompt},
                           {"run_id", cfg_.run_id},
                           {"seed", *cfg_.seed},
                           {"quiescence_rounds", *cfg_.quiescence_rounds}});
    if (graph_.is_agent(*graph_.entry)) {
        if (auto r = send(std::string(kUserNode), *graph_.entry, prompt, ActionKind::task_assignment); !r) return r.error();
    } else {
        if (auto r = board_post(std::string(kUserNode), *graph_.entry, prompt, ActionKind::task_assignment); !r) return r.error();
    }

    RunOutcome out;
    auto budget_hit = [&] {
        for (const auto& b : check_budgets(ledger_, graph_.governor)) {
            if (!b.ends_run()) continue;
            emit("breach", breach_json(b));
            out.breaches.push_back(b);
        }
        return !out.breaches.empty();
    };

    int idle_rounds = 0;
    const int quiescence = std::max(1, *cfg_.quiescence_rounds);
    while (out.outcome.empty()) {
        ++round_;
        std::vector<AgentId> order;
        for (const auto& [id, spec] : graph_.agents) order.push_back(id);

        bool active = false;
        for (const auto& id : order) {
            apply_pending_halts();
            if (states_.at(id).status == AgentStatus::halted) continue;
            auto r = step_agent(id);
            if (!r || !r->idle) active = true;
            if (budget_hit()) {
                out.outcome = "budget_exhausted";
                break;
            }
        }
        if (!out.outcome.empty()) break;

        const bool all_halted = std::all_of(states_.begin(), states_.end(), [](const auto& kv) {
            return kv.second.status == AgentStatus::halted;
        });
        if (all_halted) {
            out.outcome = "halted_all";
        } else if (exit_reached_ && pending_messages() == 0 && pending_halts_.empty()) {
            out.outcome = "completed";
        } else {
            idle_rounds = (!active && pending_messages() == 0) ? idle_rounds + 1 : 0;
            if (idle_rounds >= quiescence) out.outcome = "quiescent";
        }
    }

    out.final_response = final_response_;
    out.rounds = round_;
    out.pending = pending_messages();
    emit("run_end", Json{{"outcome", out.outcome},
                         {"pending", out.pending},
                         {"rounds", out.rounds},
                         {"final_response", final_response_ ? Json(*final_response_) : Json(nullptr)}});
    out.ledger = ledger_;
    return out;
}

std::string Engine::state_hash(bool include_log) const {
    Json agents = Json::object();
    for (const auto& [id, st] : states_) agents[id] = to_json(st);
    Json plugins = Json::object();
    for (const auto& [id, p] : plugins_) plugins[id] = p.state_snapshot();
    Json halts = Json::array();
    for (const auto& p : pending_halts_) halts.push_back(Json{{"issuer", p.order.issuer}, {"target", p.order.target}});
    Json all{{"graph", agentgraph::to_json(graph_)},
             {"agents", agents},
             {"plugins", plugins},
             {"queues", router_.snapshot()},
             {"halts", halts},
             {"ledger", agentgraph::to_json(ledger_)}};
    if (include_log) all["log"] = log_.text();
    return content_hash(all.dump());
}

}  // namespace agentgraph
