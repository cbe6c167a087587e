#ifndef CRR_TRACE_HPP
#define CRR_TRACE_HPP

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crr/core.hpp"

namespace crr {

// One line per event: `t=<int> kind=<word> actor=<id> detail=<k=v,...>`.
// Set-valued details use `{a;b;c}` so the line stays comma-separable.
struct TraceEvent {
    Time t = 0;
    std::string kind;
    ProcessId actor = 0;
    std::vector<std::pair<std::string, std::string>> detail;

    std::string render() const;
    std::optional<std::string> get(const std::string& key) const;
};

struct Trace {
    std::vector<TraceEvent> events;

    void add(Time t, std::string kind, ProcessId actor,
             std::vector<std::pair<std::string, std::string>> detail = {}) {
        events.push_back(TraceEvent{t, std::move(kind), actor, std::move(detail)});
    }

    std::string render() const;
};

// Throws ConfigError-style std::runtime_error on malformed lines.
Trace parse_trace(const std::string& text);

// Detail-value helpers shared by the trace writers and the monitors.
std::string ts_field(const Timestamp& ts);
std::optional<Timestamp> parse_ts(const std::string& s);
std::string set_field(const std::vector<std::string>& items);
std::vector<std::string> parse_set(const std::string& s);

}  // namespace crr

#endif  // CRR_TRACE_HPP
