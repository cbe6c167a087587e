#include "crr/sim.hpp"

#include <algorithm>

namespace crr {

// ---------------------------------------------------------------- channels

void ScriptedChannel::blackout(ProcessId from, ProcessId to, Time from_t, Time to_t) {
    add_rule([=](const Envelope& env, Time now) -> std::optional<RouteDecision> {
        if (env.from == from && env.to == to && now >= from_t && now < to_t) {
            return RouteDecision{true, 0};
        }
        return std::nullopt;
    });
}

void ScriptedChannel::hold(ProcessId from, ProcessId to, std::string msg_kind, int nth,
                           Time deliver_at) {
    std::string key = std::to_string(from) + ">" + std::to_string(to) + ":" + msg_kind + "#" +
                      std::to_string(nth);
    add_rule([=, this](const Envelope& env, Time) -> std::optional<RouteDecision> {
        if (env.from != from || env.to != to) return std::nullopt;
        if (message_name(env.msg) != msg_kind) return std::nullopt;
        int& count = match_counts_[key];
        if (count != nth) {
            // Only one instance may claim the slot; others fall through.
            if (count < nth) count++;
            return std::nullopt;
        }
        count++;
        return RouteDecision{false, deliver_at};
    });
}

RouteDecision ScriptedChannel::route(const Envelope& env, Time now) {
    for (auto& r : rules_) {
        if (auto d = r(env, now)) return *d;
    }
    return RouteDecision{false, now + delay_};
}

RouteDecision RandomChannel::route(const Envelope&, Time now) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<int> delay(1, max_delay_);
    if (now < horizon_ && coin(rng_) < drop_prob_) return RouteDecision{true, 0};
    return RouteDecision{false, now + delay(rng_)};
}

// ---------------------------------------------------------------- accounting

ReplicaClass FaultAccounting::classify(ProcessId p) const {
    const auto& f = fates.at(p);
    if (f.rollbacks > 0) return ReplicaClass::RollbackFaulty;
    if (!f.up_at_end) return ReplicaClass::CrashFaulty;
    if (f.crashes > 0) return ReplicaClass::Benign;
    return ReplicaClass::Perfect;
}

bool FaultAccounting::within(int k, int r, int b) const {
    int faulty = 0, rolled = 0, benign = 0;
    for (const auto& [p, f] : fates) {
        bool rolled_after = f.rollbacks_after_t > 0;
        if (rolled_after || !f.up_at_end) {
            faulty++;
            if (rolled_after) rolled++;
        } else if (f.crashes_after_t > 0) {
            benign++;
        }
    }
    return faulty <= k && rolled <= r && benign <= b;
}

// ---------------------------------------------------------------- ctx

Time Ctx::now() const { return sim_.now_; }
int Ctx::n() const { return sim_.setup_.n; }
const QuorumPlan& Ctx::plan() const { return sim_.setup_.plan; }

void Ctx::send(ProcessId to, Message msg, int depth) {
    Envelope env;
    env.from = self_;
    env.to = to;
    env.msg = std::move(msg);
    env.depth = depth;
    env.sent_at = sim_.now_;
    env.msg_seq = sim_.next_msg_seq_++;
    sim_.outbox_.push_back(std::move(env));
}

void Ctx::broadcast(Message msg, int depth) {
    for (ProcessId z = 1; z <= sim_.setup_.n; ++z) send(z, msg, depth);
}

void Ctx::arm_timer() {
    if (sim_.timer_armed_[self_]) return;
    sim_.timer_armed_[self_] = true;
    Simulator::QueuedEvent ev;
    ev.t = sim_.now_ + 1;
    ev.kind = Simulator::QueuedEvent::Kind::Timer;
    ev.who = self_;
    sim_.push(std::move(ev));
}

void Ctx::trace(std::string kind, std::vector<std::pair<std::string, std::string>> detail) {
    sim_.trace_.add(sim_.now_, std::move(kind), self_, std::move(detail));
}

std::size_t Ctx::history_invoke(OpKind kind, const Value& value) {
    HistoryRecord rec;
    rec.client = self_;
    rec.kind = kind;
    rec.value = value;
    rec.invoke = sim_.now_;
    sim_.history_.records.push_back(rec);
    sim_.ops_invoked_++;
    trace("invoke", {{"op", kind == OpKind::Read ? "read" : "write"},
                     {"val", value.empty() ? "-" : value}});
    return sim_.history_.records.size() - 1;
}

void Ctx::history_tau(std::size_t op, const Timestamp& tau) {
    sim_.history_.records.at(op).tau = tau;
}

void Ctx::history_respond(std::size_t op, const Value& value, int delays) {
    auto& rec = sim_.history_.records.at(op);
    rec.respond = sim_.now_;
    rec.value = value;
    rec.delays = delays;
    sim_.ops_completed_++;
    trace("respond", {{"op", rec.kind == OpKind::Read ? "read" : "write"},
                      {"val", value},
                      {"delays", std::to_string(delays)},
                      {"tau", rec.tau ? to_string(*rec.tau) : "-"}});
}

void Ctx::schedule_invoke(Time delay) {
    Simulator::QueuedEvent ev;
    ev.t = sim_.now_ + delay;
    ev.kind = Simulator::QueuedEvent::Kind::Invoke;
    ev.who = self_;
    sim_.push(std::move(ev));
}

void Ctx::recovery_started() {
    sim_.recovery_flagged_ = true;
    sim_.recoveries_started_++;
    trace("rec_start");
}

void Ctx::recovery_done() {
    sim_.recoveries_done_++;
    sim_.active_[self_] = true;
    sim_.activity_log_.push_back({sim_.now_, self_, true});
    trace("rec_done");
    sim_.trace_.add(sim_.now_, "active", self_);
}

// ---------------------------------------------------------------- simulator

Simulator::Simulator(SimSetup setup)
    : setup_(std::move(setup)), fault_rng_(setup_.fault_seed) {
    for (const auto& fe : setup_.fault_events) {
        QueuedEvent ev;
        ev.t = fe.t;
        ev.kind = fe.kind == FaultEvent::Kind::Crash ? QueuedEvent::Kind::Crash
                                                     : QueuedEvent::Kind::Restart;
        ev.who = fe.replica;
        ev.rollback = fe.rollback;
        push(std::move(ev));
    }
    if (setup_.injector) {
        for (Time t = 0; t <= setup_.injector->end_time(); ++t) {
            QueuedEvent ev;
            ev.t = t;
            ev.kind = QueuedEvent::Kind::InjectTick;
            push(std::move(ev));
        }
    }
}

void Simulator::add_process(ProcessId pid, std::unique_ptr<Automaton> a) {
    up_[pid] = true;
    active_[pid] = true;
    timer_armed_[pid] = false;
    fates_[pid];  // replicas only get reported, but harmless for clients
    if (pid <= setup_.n && a->persists()) {
        versions_[pid] = {a->snapshot()};
        current_version_[pid] = 0;
    }
    procs_[pid] = std::move(a);
}

void Simulator::schedule_first_invoke(ProcessId pid, Time t, int op_count) {
    ops_expected_ += op_count;
    QueuedEvent ev;
    ev.t = t;
    ev.kind = QueuedEvent::Kind::Invoke;
    ev.who = pid;
    push(std::move(ev));
}

void Simulator::push(QueuedEvent ev) {
    ev.seq = next_seq_++;
    queue_.push(std::move(ev));
}

int Simulator::active_count() const {
    int c = 0;
    for (ProcessId p = 1; p <= setup_.n; ++p) {
        if (active_.at(p)) c++;
    }
    return c;
}

void Simulator::run_handler(ProcessId pid, const std::function<void(Ctx&)>& body) {
    Ctx ctx(*this, pid);
    in_handler_ = true;
    body(ctx);
    in_handler_ = false;
    // State mutation, persistence, and sends commit as one atomic action.
    commit_if_persistent(pid);
    flush_outbox(pid);
}

void Simulator::commit_if_persistent(ProcessId pid) {
    auto it = versions_.find(pid);
    if (it == versions_.end()) return;
    if (!up_.at(pid)) return;
    Snapshot snap = procs_.at(pid)->snapshot();
    auto& vs = it->second;
    int cur = current_version_.at(pid);
    if (!(snap == vs[cur])) {
        vs.push_back(std::move(snap));
        current_version_[pid] = static_cast<int>(vs.size()) - 1;
    }
}

void Simulator::flush_outbox(ProcessId pid) {
    std::vector<Envelope> pending;
    pending.swap(outbox_);
    for (auto& env : pending) {
        RouteDecision d = setup_.channel->route(env, now_);
        if (d.drop) {
            trace_.add(now_, "drop", env.to,
                       {{"from", std::to_string(env.from)},
                        {"msg", message_name(env.msg)},
                        {"why", "lost"}});
            continue;
        }
        QueuedEvent ev;
        ev.t = std::max<Time>(d.deliver_at, now_ + 1);
        ev.kind = QueuedEvent::Kind::Deliver;
        ev.env = std::move(env);
        push(std::move(ev));
    }
}

void Simulator::crash_replica(ProcessId p) {
    assert(p >= 1 && p <= setup_.n);
    if (!up_.at(p)) return;
    up_[p] = false;
    active_[p] = false;
    timer_armed_[p] = false;
    fates_[p].crashes++;
    if (now_ >= setup_.threshold_time) fates_[p].crashes_after_t++;
    activity_log_.push_back({now_, p, false});
    trace_.add(now_, "crash", p);
}

void Simulator::restart_replica(ProcessId p, const RollbackSpec& rb) {
    assert(p >= 1 && p <= setup_.n);
    if (up_.at(p)) return;
    up_[p] = true;

    Snapshot snap;  // default = initial image for volatile replicas
    std::string rb_detail = "none";
    auto vit = versions_.find(p);
    if (vit != versions_.end()) {
        int cur = current_version_.at(p);
        int target = cur;
        switch (rb.mode) {
            case RollbackSpec::Mode::None:
                break;
            case RollbackSpec::Mode::Index:
                target = rb.index;
                break;
            case RollbackSpec::Mode::Initial:
                target = 0;
                break;
            case RollbackSpec::Mode::RandomOlder:
                if (cur > 0) {
                    std::uniform_int_distribution<int> pick(0, cur - 1);
                    target = pick(fault_rng_);
                }
                break;
        }
        if (target != cur) {
            assert(target >= 0 && target < cur && "rollback must restore a strictly older version");
            fates_[p].rollbacks++;
            if (now_ >= setup_.threshold_time) fates_[p].rollbacks_after_t++;
            rb_detail = std::to_string(target);
        }
        current_version_[p] = target;
        snap = vit->second[static_cast<std::size_t>(target)];
    }
    trace_.add(now_, "restart", p, {{"rollback", rb_detail}});

    recovery_flagged_ = false;
    procs_.at(p)->restore(snap);
    run_handler(p, [&](Ctx& ctx) { procs_.at(p)->on_restart(ctx); });
    if (!recovery_flagged_) {
        active_[p] = true;
        activity_log_.push_back({now_, p, true});
        trace_.add(now_, "active", p);
    }
}

void Simulator::schedule_restart(ProcessId p, Time at, const RollbackSpec& rb) {
    QueuedEvent ev;
    ev.t = at;
    ev.kind = QueuedEvent::Kind::Restart;
    ev.who = p;
    ev.rollback = rb;
    push(std::move(ev));
}

void Simulator::exec(const QueuedEvent& ev) {
    switch (ev.kind) {
        case QueuedEvent::Kind::Deliver: {
            ProcessId to = ev.env.to;
            if (to <= setup_.n && !up_.at(to)) {
                trace_.add(now_, "drop", to,
                           {{"from", std::to_string(ev.env.from)},
                            {"msg", message_name(ev.env.msg)},
                            {"why", "down"}});
                return;
            }
            trace_.add(now_, "deliver", to,
                       {{"from", std::to_string(ev.env.from)},
                        {"msg", message_name(ev.env.msg)}});
            run_handler(to, [&](Ctx& ctx) { procs_.at(to)->on_message(ev.env, ctx); });
            return;
        }
        case QueuedEvent::Kind::Invoke:
            run_handler(ev.who, [&](Ctx& ctx) { procs_.at(ev.who)->on_invoke(ctx); });
            return;
        case QueuedEvent::Kind::Crash:
            crash_replica(ev.who);
            return;
        case QueuedEvent::Kind::Restart:
            restart_replica(ev.who, ev.rollback);
            return;
        case QueuedEvent::Kind::Timer: {
            if (!timer_armed_[ev.who]) return;
            timer_armed_[ev.who] = false;
            if (ev.who <= setup_.n && !up_.at(ev.who)) return;
            run_handler(ev.who, [&](Ctx& ctx) { procs_.at(ev.who)->on_timer(ctx); });
            return;
        }
        case QueuedEvent::Kind::InjectTick:
            if (setup_.injector) setup_.injector->tick(*this, now_);
            return;
    }
}

RunResult Simulator::run() {
    RunResult result;
    while (!queue_.empty()) {
        if (result.steps >= setup_.step_budget) {
            result.budget_exhausted = true;
            break;
        }
        QueuedEvent ev = queue_.top();
        queue_.pop();
        now_ = ev.t;
        exec(ev);
        result.steps++;
    }

    for (ProcessId p = 1; p <= setup_.n; ++p) {
        fates_[p].up_at_end = up_.at(p);
        result.accounting.fates[p] = fates_.at(p);
    }
    result.accounting_within_bounds = result.accounting.within(
        setup_.params.k, setup_.params.r_eff, setup_.params.b_eff);
    result.trace = std::move(trace_);
    result.history = std::move(history_);
    result.ops_expected = ops_expected_;
    result.ops_invoked = ops_invoked_;
    result.ops_completed = ops_completed_;
    compute_assumption1(result);
    return result;
}

void Simulator::compute_assumption1(RunResult& r) const {
    // Only replicas that are up at the end count as eventually up here.
    std::set<ProcessId> eventually_up;
    for (ProcessId p = 1; p <= setup_.n; ++p) {
        if (r.accounting.fates.at(p).up_at_end) eventually_up.insert(p);
    }
    std::map<ProcessId, bool> act;
    int count = 0;
    for (ProcessId p : eventually_up) {
        act[p] = true;
        count++;
    }
    int min_count = count;
    for (const auto& ch : activity_log_) {
        if (!eventually_up.count(ch.who)) continue;
        if (act[ch.who] != ch.becomes_active) {
            act[ch.who] = ch.becomes_active;
            count += ch.becomes_active ? 1 : -1;
            min_count = std::min(min_count, count);
        }
    }
    r.assumption1 = min_count >= setup_.params.k + 1;
}

bool assumption1_holds(const Trace& trace, int n, int k) {
    // Final up/down status decides which replicas are eventually up.
    std::map<ProcessId, bool> up;
    for (ProcessId p = 1; p <= n; ++p) up[p] = true;
    for (const auto& ev : trace.events) {
        if (ev.actor < 1 || ev.actor > n) continue;
        if (ev.kind == "crash") up[ev.actor] = false;
        if (ev.kind == "restart") up[ev.actor] = true;
    }
    std::map<ProcessId, bool> active;
    int count = 0;
    for (ProcessId p = 1; p <= n; ++p) {
        active[p] = up[p];
        if (up[p]) count++;
    }
    int min_count = count;
    for (const auto& ev : trace.events) {
        if (ev.actor < 1 || ev.actor > n || !up[ev.actor]) continue;
        bool becomes;
        if (ev.kind == "crash") {
            becomes = false;
        } else if (ev.kind == "active") {
            becomes = true;
        } else {
            continue;
        }
        if (active[ev.actor] != becomes) {
            active[ev.actor] = becomes;
            count += becomes ? 1 : -1;
            min_count = std::min(min_count, count);
        }
    }
    return min_count >= k + 1;
}

}  // namespace crr
