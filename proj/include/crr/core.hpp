#ifndef CRR_CORE_HPP
#define CRR_CORE_HPP

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace crr {

// Replicas are numbered 1..n, clients n+1 and up. Id 0 is reserved for the
// initial timestamp.
using ProcessId = int;
using Time = std::int64_t;
using Incarnation = std::int64_t;

// Register values are opaque tokens; tests mint one unique token per write.
using Value = std::string;
inline const Value kInitialValue = "v0";

// Write tag: a counter paired with the issuing client id, ordered
// lexicographically. (0,0) tags the initial value and sorts below anything a
// client can produce.
struct Timestamp {
    std::int64_t cnt = 0;
    ProcessId pid = 0;

    friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

inline std::strong_ordering ts_compare(const Timestamp& a, const Timestamp& b) {
    return a <=> b;
}

inline std::string to_string(const Timestamp& ts) {
    return "(" + std::to_string(ts.cnt) + "," + std::to_string(ts.pid) + ")";
}

// Unique id for one quorum call; every ack echoes the id of the request it
// answers.
struct RequestId {
    ProcessId origin = 0;
    std::int64_t seq = 0;

    friend auto operator<=>(const RequestId&, const RequestId&) = default;
};

inline std::string to_string(const RequestId& id) {
    return std::to_string(id.origin) + "." + std::to_string(id.seq);
}

// Per-process id counter; (origin, seq) pairs never repeat within a run.
class RequestIdSource {
public:
    explicit RequestIdSource(ProcessId origin = 0) : origin_(origin) {}

    RequestId next() { return RequestId{origin_, seq_++}; }

    void reset(ProcessId origin) {
        origin_ = origin;
        seq_ = 0;
    }

private:
    ProcessId origin_ = 0;
    std::int64_t seq_ = 0;
};

// Crash vector: highest known incarnation number per replica, indexed by
// replica id (entry 0 unused).
using CrashVector = std::vector<Incarnation>;

inline CrashVector zero_crash_vector(int n) {
    return CrashVector(static_cast<std::size_t>(n) + 1, 0);
}

inline void merge_max(CrashVector& into, const CrashVector& from) {
    if (into.size() < from.size()) into.resize(from.size(), 0);
    for (std::size_t z = 0; z < from.size(); ++z) {
        if (from[z] > into[z]) into[z] = from[z];
    }
}

inline std::string to_string(const CrashVector& cv) {
    std::string s = "[";
    for (std::size_t z = 1; z < cv.size(); ++z) {
        if (z > 1) s += ";";
        s += std::to_string(cv[z]);
    }
    return s + "]";
}

// Register state stored at a replica. cv/pre_cv stay empty for protocols
// that track only the timestamped value.
struct RegisterState {
    Timestamp ts;
    Value val = kInitialValue;
    CrashVector cv;
    CrashVector pre_cv;

    friend bool operator==(const RegisterState&, const RegisterState&) = default;
};

// Query kinds carried by READ messages.
struct QueryTs {};
struct QueryTsVal {};
struct QueryPreCv {
    ProcessId j = 0;
};
struct QueryCv {};
struct QueryState {
    Incarnation inc = 0;
};
using ReadReq = std::variant<QueryTs, QueryTsVal, QueryPreCv, QueryCv, QueryState>;

// Update kinds carried by WRITE messages.
struct WriteTsVal {
    Timestamp ts;
    Value val;
};
struct WritePreCv {
    ProcessId j = 0;
    Incarnation v = 0;
};
struct WriteCv {
    ProcessId j = 0;
    Incarnation v = 0;
};
using WriteReq = std::variant<WriteTsVal, WritePreCv, WriteCv>;

// READ_ACK payloads, one alternative per query kind. PayloadFlagged is the
// state echo used by the suspicious-flag baseline.
struct PayloadTs {
    Timestamp ts;
};
struct PayloadTsVal {
    Timestamp ts;
    Value val;
};
struct PayloadInc {
    Incarnation inc = 0;
};
struct PayloadCv {
    CrashVector cv;
};
struct PayloadState {
    RegisterState state;
};
struct PayloadFlagged {
    Timestamp ts;
    Value val;
    bool flagged = false;
};
using AckPayload =
    std::variant<PayloadTs, PayloadTsVal, PayloadInc, PayloadCv, PayloadState, PayloadFlagged>;

struct ReadMsg {
    RequestId id;
    ReadReq req;
};
struct ReadAck {
    RequestId id;
    AckPayload payload;
    ProcessId sender = 0;
};
struct WriteMsg {
    RequestId id;
    WriteReq req;
    // Sender's current crash-vector entry for the destination; absent outside
    // the crash-vector protocol.
    std::optional<Incarnation> inc;
};
struct WriteAck {
    RequestId id;
    Incarnation inc_sender = 0;
    // Full crash vector rides only on acks for timestamped-value writes.
    std::optional<CrashVector> cv;
    ProcessId sender = 0;
};

using Message = std::variant<ReadMsg, ReadAck, WriteMsg, WriteAck>;

inline const char* read_req_name(const ReadReq& r) {
    switch (r.index()) {
        case 0: return "ts";
        case 1: return "tsval";
        case 2: return "precv";
        case 3: return "cv";
        default: return "state";
    }
}

inline const char* write_req_name(const WriteReq& r) {
    switch (r.index()) {
        case 0: return "tsval";
        case 1: return "precv";
        default: return "cv";
    }
}

inline const char* message_name(const Message& m) {
    switch (m.index()) {
        case 0: return "read";
        case 1: return "read_ack";
        case 2: return "write";
        default: return "write_ack";
    }
}

}  // namespace crr

#endif  // CRR_CORE_HPP
