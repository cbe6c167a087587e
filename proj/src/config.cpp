#include "crr/config.hpp"

#include <algorithm>

namespace crr {

Params resolve(Params p) {
    if (p.n < 1) throw ConfigError("n must be >= 1");
    if (p.k < 0) throw ConfigError("k must be >= 0");
    if (p.r && *p.r < 0) throw ConfigError("r must be >= 0");
    if (p.b && *p.b < 0) throw ConfigError("b must be >= 0");
    if (p.r && *p.r > p.k) throw ConfigError("r must be <= k");
    if (p.b && *p.b > p.n) throw ConfigError("b must be <= n");
    p.r_eff = p.r.value_or(p.k);
    p.b_eff = p.b.value_or(p.n);
    return p;
}

bool predicate_p(int n, int k, int r, int b) {
    return 2 * k + r + 1 <= n && n < 2 * k + b + 1;
}

int resilience_bound(int k, int r, int b) {
    return 2 * k + std::min(b, r) + 1;
}

QuorumPlan quorum_plan(const Params& p) {
    QuorumPlan plan;
    plan.p_holds = predicate_p(p.n, p.k, p.r_eff, p.b_eff);
    plan.q_w = p.n - p.k;
    if (plan.p_holds) {
        plan.q_r = p.n - p.k;
        for (ProcessId i = 1; i <= 2 * p.k + p.r_eff + 1; ++i) plan.nonvolatile.insert(i);
    } else {
        plan.q_r = p.k + 1;
    }
    plan.below_resilience_bound = p.n < resilience_bound(p.k, p.r_eff, p.b_eff);
    return plan;
}

}  // namespace crr
