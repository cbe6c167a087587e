#ifndef CRR_CONFIG_HPP
#define CRR_CONFIG_HPP

#include <optional>
#include <set>
#include <stdexcept>
#include <string>

#include "crr/core.hpp"

namespace crr {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Replica count plus the three failure thresholds. r and b may be left
// unknown; resolve() substitutes their conservative maxima (k and n).
struct Params {
    int n = 1;
    int k = 0;
    std::optional<int> r;  // rollback threshold, nullopt = unknown
    std::optional<int> b;  // benign threshold, nullopt = unknown
    int r_eff = 0;
    int b_eff = 0;
};

// Throws ConfigError on n < 1, negative thresholds, r > k or b > n.
Params resolve(Params p);

// 2k + r + 1 <= n < 2k + b + 1: the regime where quorums of size n-k
// intersect in enough never-rolled-back persistent replicas.
bool predicate_p(int n, int k, int r, int b);

// Smallest replica count admitting a wait-free atomic implementation for the
// given thresholds.
int resilience_bound(int k, int r, int b);

struct QuorumPlan {
    int q_w = 0;
    int q_r = 0;
    bool p_holds = false;
    std::set<ProcessId> nonvolatile;
    // Set when n is below resilience_bound; such configs run (for liveness
    // demos) but cannot promise wait freedom.
    bool below_resilience_bound = false;
};

QuorumPlan quorum_plan(const Params& p);

}  // namespace crr

#endif  // CRR_CONFIG_HPP
