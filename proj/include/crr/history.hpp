#ifndef CRR_HISTORY_HPP
#define CRR_HISTORY_HPP

#include <optional>
#include <string>
#include <vector>

#include "crr/core.hpp"

namespace crr {

enum class OpKind { Read, Write };

// One register operation as the checkers see it. tau is the internal write
// tag the operation settled on; absent when the op never reached its
// tag-selection step (the checkers then treat it as above every finite tag).
struct HistoryRecord {
    ProcessId client = 0;
    OpKind kind = OpKind::Read;
    Value value;  // written value, or returned value once a read completes
    Time invoke = 0;
    std::optional<Time> respond;
    std::optional<Timestamp> tau;
    // Causal message-hop count for completed ops; in-memory only, not part
    // of the serialized record.
    int delays = -1;

    bool complete() const { return respond.has_value(); }
    std::string render() const;
};

struct History {
    std::vector<HistoryRecord> records;

    std::string render() const;
};

History parse_history(const std::string& text);

}  // namespace crr

#endif  // CRR_HISTORY_HPP
