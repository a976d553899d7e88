#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "piwb/evaluate.hpp"
#include "piwb/mdp.hpp"
#include "piwb/policy.hpp"

namespace piwb {

struct PiStep {
    Policy policy;
    ValueVector value;
    ImprovementSet improvement_set;
    SwitchSet chosen_switch;  // empty on the final step
};

/// Full record of a greedy policy iteration run: one step per iterate, final
/// step has an empty improvement set.
struct PiTrace {
    std::string mdp_digest;
    std::string update_rule;
    int n = 0;
    int k = 0;
    std::vector<PiStep> steps;

    std::size_t length() const { return steps.size(); }
};

namespace detail {

/// Greedy switch set: one pair per improvement state, choosing the improving
/// action with the largest one-step lookahead, ties to the lowest index.
inline SwitchSet greedy_switch(const Evaluator& ev, const ValueVector& v, const ImprovementSet& tset) {
    SwitchSet u;
    std::size_t i = 0;
    while (i < tset.pairs.size()) {
        const State s = tset.pairs[i].first;
        ActionIndex best_action = tset.pairs[i].second;
        Rational best_q = ev.lookahead(v, s, best_action);
        for (++i; i < tset.pairs.size() && tset.pairs[i].first == s; ++i) {
            const Rational q = ev.lookahead(v, s, tset.pairs[i].second);
            if (q > best_q) {  // strict: ties keep the lowest action index
                best_q = q;
                best_action = tset.pairs[i].second;
            }
        }
        u.pairs.emplace_back(s, best_action);
    }
    return u;
}

}  // namespace detail

/// One greedy improvement step. Requires a nonempty improvement set.
inline std::pair<Policy, SwitchSet> greedy_step(const Evaluator& ev, const Policy& policy) {
    const ValueVector v = ev.evaluate(policy);
    const ImprovementSet tset = ev.improvement_set_fast(policy, v);
    if (tset.empty()) throw std::invalid_argument("greedy_step: empty improvement set");
    SwitchSet u = detail::greedy_switch(ev, v, tset);
    return {apply_switch(policy, u), std::move(u)};
}

inline std::pair<Policy, SwitchSet> greedy_step(const Mdp& mdp, const Policy& policy) {
    return greedy_step(Evaluator(mdp), policy);
}

/**
 * Greedy policy iteration from `start`, recording every iterate. Terminates
 * when the improvement set is empty. Strict value growth makes revisits
 * impossible, so a run can never exceed k^n iterations; hitting that cap
 * (override with iteration_cap > 0) aborts with an error.
 */
inline PiTrace run_policy_iteration(const Mdp& mdp, const Policy& start, std::uint64_t iteration_cap = 0) {
    const Evaluator ev(mdp);
    if (!valid_policy(mdp, start)) throw std::invalid_argument("run_policy_iteration: start policy invalid");
    if (iteration_cap == 0) {
        iteration_cap = 1;
        for (int i = 0; i < mdp.n; ++i) {
            if (iteration_cap > UINT64_MAX / static_cast<std::uint64_t>(mdp.k)) {
                iteration_cap = UINT64_MAX;
                break;
            }
            iteration_cap *= static_cast<std::uint64_t>(mdp.k);
        }
    }

    PiTrace trace;
    trace.mdp_digest = mdp_digest(mdp);
    trace.update_rule = "greedy";
    trace.n = mdp.n;
    trace.k = mdp.k;

    Policy policy = start;
    while (true) {
        PiStep step;
        step.policy = policy;
        step.value = ev.evaluate(policy);
        step.improvement_set = ev.improvement_set_fast(policy, step.value);
        const bool done = step.improvement_set.empty();
        if (!done) {
            step.chosen_switch = detail::greedy_switch(ev, step.value, step.improvement_set);
            policy = apply_switch(policy, step.chosen_switch);
        }
        trace.steps.push_back(std::move(step));
        if (done) break;
        if (trace.steps.size() >= iteration_cap)
            throw std::runtime_error("run_policy_iteration: iteration cap exceeded (implementation bug?)");
    }
    return trace;
}

}  // namespace piwb
