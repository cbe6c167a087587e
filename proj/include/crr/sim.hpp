#ifndef CRR_SIM_HPP
#define CRR_SIM_HPP

#include <cassert>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "crr/config.hpp"
#include "crr/core.hpp"
#include "crr/history.hpp"
#include "crr/trace.hpp"

namespace crr {

class Simulator;

// A message in flight. depth counts causal hops from the originating
// operation's invocation; completed ops report it as their latency.
struct Envelope {
    ProcessId from = 0;
    ProcessId to = 0;
    Message msg;
    int depth = 0;
    Time sent_at = 0;
    std::uint64_t msg_seq = 0;
};

struct OpSpec {
    OpKind kind = OpKind::Read;
    Value value;
    // Pre-assigned tag for baseline protocols whose writes carry one
    // explicitly (no read phase).
    std::optional<std::int64_t> fixed_tag;
};

// Per-replica persisted image. Protocols that keep only the timestamped
// value leave cv/pre_cv empty.
struct Snapshot {
    RegisterState state;
    bool stale = false;

    friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

// Handler-side view of the simulator. All sends and trace records funnel
// through here so the simulator can keep handler execution failure-atomic.
class Ctx {
public:
    Ctx(Simulator& sim, ProcessId self) : sim_(sim), self_(self) {}

    Time now() const;
    ProcessId self() const { return self_; }
    int n() const;
    const QuorumPlan& plan() const;

    void send(ProcessId to, Message msg, int depth);
    void broadcast(Message msg, int depth);  // to all replicas, including self if replica
    void arm_timer();

    void trace(std::string kind, std::vector<std::pair<std::string, std::string>> detail = {});

    // Client-side history bookkeeping.
    std::size_t history_invoke(OpKind kind, const Value& value);
    void history_tau(std::size_t op, const Timestamp& tau);
    void history_respond(std::size_t op, const Value& value, int delays);
    void schedule_invoke(Time delay);

    // Replica-side restart bookkeeping. A restart handler that starts an
    // asynchronous recovery calls recovery_started(); the replica stays
    // inactive until recovery_done().
    void recovery_started();
    void recovery_done();

private:
    Simulator& sim_;
    ProcessId self_;
};

class Automaton {
public:
    virtual ~Automaton() = default;
    virtual void on_message(const Envelope& env, Ctx& ctx) = 0;
    virtual void on_timer(Ctx&) {}
    virtual void on_invoke(Ctx&) {}

    // Replica persistence hooks. persists() == false means a crash erases
    // everything and restart starts from the initial snapshot.
    virtual bool persists() const { return false; }
    virtual Snapshot snapshot() const { return {}; }
    virtual void restore(const Snapshot&) {}
    virtual void on_restart(Ctx&) {}
};

struct RouteDecision {
    bool drop = false;
    Time deliver_at = 0;
};

class ChannelPolicy {
public:
    virtual ~ChannelPolicy() = default;
    virtual RouteDecision route(const Envelope& env, Time now) = 0;
};

// Fixed per-hop delay plus an ordered rule list; the first rule that claims
// a message decides its fate. Scenario scripts are built out of these.
class ScriptedChannel : public ChannelPolicy {
public:
    using Rule = std::function<std::optional<RouteDecision>(const Envelope&, Time)>;

    explicit ScriptedChannel(Time delay = 1) : delay_(delay) {}

    void add_rule(Rule r) { rules_.push_back(std::move(r)); }

    // Drop every message from -> to sent in [from_t, to_t).
    void blackout(ProcessId from, ProcessId to, Time from_t, Time to_t);
    // Deliver the nth matching (from, to, message-kind) instance at a fixed time.
    void hold(ProcessId from, ProcessId to, std::string msg_kind, int nth, Time deliver_at);

    RouteDecision route(const Envelope& env, Time now) override;

private:
    Time delay_;
    std::vector<Rule> rules_;
    std::map<std::string, int> match_counts_;
};

// Random delays and losses before the fairness horizon, loss-free after it.
class RandomChannel : public ChannelPolicy {
public:
    RandomChannel(std::uint64_t seed, double drop_prob, Time horizon, int max_delay = 3)
        : rng_(seed), drop_prob_(drop_prob), horizon_(horizon), max_delay_(max_delay) {}

    RouteDecision route(const Envelope& env, Time now) override;

private:
    std::mt19937_64 rng_;
    double drop_prob_;
    Time horizon_;
    int max_delay_;
};

struct RollbackSpec {
    enum class Mode { None, Index, Initial, RandomOlder };
    Mode mode = Mode::None;
    int index = 0;

    static RollbackSpec none() { return {}; }
    static RollbackSpec at(int idx) { return {Mode::Index, idx}; }
    static RollbackSpec initial() { return {Mode::Initial, 0}; }
    static RollbackSpec random_older() { return {Mode::RandomOlder, 0}; }
};

struct FaultEvent {
    Time t = 0;
    enum class Kind { Crash, Restart } kind = Kind::Crash;
    ProcessId replica = 0;
    RollbackSpec rollback;
};

// Online fault policy, consulted once per time unit until its end time.
class FaultInjector {
public:
    virtual ~FaultInjector() = default;
    virtual void tick(Simulator& sim, Time now) = 0;
    virtual Time end_time() const = 0;
};

struct ReplicaFate {
    int crashes = 0;
    int rollbacks = 0;
    int crashes_after_t = 0;
    int rollbacks_after_t = 0;
    bool up_at_end = true;
};

enum class ReplicaClass { Perfect, Benign, CrashFaulty, RollbackFaulty };

struct FaultAccounting {
    std::map<ProcessId, ReplicaFate> fates;

    ReplicaClass classify(ProcessId p) const;
    // Do the post-threshold faults fit the configured bounds?
    bool within(int k, int r, int b) const;
};

struct SimSetup {
    int n = 0;
    Params params;
    QuorumPlan plan;
    std::unique_ptr<ChannelPolicy> channel;
    std::vector<FaultEvent> fault_events;
    std::shared_ptr<FaultInjector> injector;
    std::uint64_t fault_seed = 0;  // drives RandomOlder rollback picks
    Time threshold_time = 0;       // faults after this must respect the bounds
    std::int64_t step_budget = 10'000;
};

struct RunResult {
    Trace trace;
    History history;
    std::int64_t steps = 0;
    bool budget_exhausted = false;
    int ops_expected = 0;
    int ops_invoked = 0;
    int ops_completed = 0;
    FaultAccounting accounting;
    bool accounting_within_bounds = true;
    bool assumption1 = true;

    bool stalled() const { return ops_completed < ops_expected; }
};

class Simulator {
public:
    Simulator(SimSetup setup);

    // pid slots 1..n are replicas; higher ids are clients. All slots up to
    // the largest added pid must be filled before run().
    void add_process(ProcessId pid, std::unique_ptr<Automaton> a);
    void schedule_first_invoke(ProcessId pid, Time t, int op_count);

    RunResult run();

    // Introspection for fault injectors and tests.
    Time now() const { return now_; }
    int n() const { return setup_.n; }
    const Params& params() const { return setup_.params; }
    const QuorumPlan& plan() const { return setup_.plan; }
    bool is_up(ProcessId p) const { return up_.at(p); }
    bool is_active(ProcessId p) const { return active_.at(p); }
    int active_count() const;
    int current_version_index(ProcessId p) const { return current_version_.at(p); }
    const std::vector<Snapshot>& versions(ProcessId p) const { return versions_.at(p); }

    void crash_replica(ProcessId p);
    void restart_replica(ProcessId p, const RollbackSpec& rb);
    void schedule_restart(ProcessId p, Time at, const RollbackSpec& rb);

private:
    friend class Ctx;

    struct QueuedEvent {
        Time t = 0;
        std::uint64_t seq = 0;
        enum class Kind { Deliver, Invoke, Crash, Restart, Timer, InjectTick } kind;
        Envelope env;          // Deliver
        ProcessId who = 0;     // others
        RollbackSpec rollback;

        bool operator>(const QueuedEvent& o) const {
            return t != o.t ? t > o.t : seq > o.seq;
        }
    };

    void push(QueuedEvent ev);
    void exec(const QueuedEvent& ev);
    void run_handler(ProcessId pid, const std::function<void(Ctx&)>& body);
    void flush_outbox(ProcessId pid);
    void commit_if_persistent(ProcessId pid);
    void compute_assumption1(RunResult& r) const;

    SimSetup setup_;
    std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, std::greater<>> queue_;
    std::uint64_t next_seq_ = 0;
    std::uint64_t next_msg_seq_ = 0;
    Time now_ = 0;

    std::map<ProcessId, std::unique_ptr<Automaton>> procs_;
    std::map<ProcessId, bool> up_;
    std::map<ProcessId, bool> active_;
    std::map<ProcessId, bool> timer_armed_;
    std::map<ProcessId, std::vector<Snapshot>> versions_;
    std::map<ProcessId, int> current_version_;
    std::map<ProcessId, ReplicaFate> fates_;

    std::vector<Envelope> outbox_;
    bool in_handler_ = false;
    bool recovery_flagged_ = false;  // recovery_started() seen in current restart handler

    Trace trace_;
    History history_;
    int ops_expected_ = 0;
    int ops_invoked_ = 0;
    int ops_completed_ = 0;
    int recoveries_started_ = 0;
    int recoveries_done_ = 0;

    std::mt19937_64 fault_rng_;

    // (time, eventually-up-active count changes) for the availability check
    struct ActivityChange {
        Time t;
        ProcessId who;
        bool becomes_active;
    };
    std::vector<ActivityChange> activity_log_;
};

// True iff at every instant of the recorded run at least k+1 replicas that
// are eventually up are active. Consumes the crash/active trace events.
bool assumption1_holds(const Trace& trace, int n, int k);

}  // namespace crr

#endif  // CRR_SIM_HPP
