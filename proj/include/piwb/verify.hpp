#pragma once

#include <sstream>
#include <string>

#include "piwb/bounds.hpp"
#include "piwb/enumerate.hpp"
#include "piwb/policy_iteration.hpp"
#include "piwb/sequence_checks.hpp"

namespace piwb {

/**
 * Structural checks on a recorded trace. Value vectors (when present) must
 * strictly increase for any sequence; the iteration-shaped checks (final
 * improvement set empty, recorded switches well-defined, inside the
 * improvement set, covering every improvement state, and producing the next
 * policy) apply to greedy runs, not to abstract sequence files.
 */
inline ViolationReport verify_trace_structure(const PiTrace& trace) {
    ViolationReport report;
    const bool greedy = trace.update_rule == "greedy";
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const PiStep& step = trace.steps[i];
        const bool final_step = i + 1 == trace.steps.size();
        if (!step.value.empty() && i + 1 < trace.steps.size() && !trace.steps[i + 1].value.empty()) {
            if (compare_values(trace.steps[i + 1].value, step.value) != Comparison::StrictlyGreater)
                report.add({i, i + 1}, "value-monotonicity", "consecutive values do not strictly increase");
        }
        if (!greedy) continue;
        if (final_step) {
            if (!step.improvement_set.empty())
                report.add({i}, "final-improvement-set", "last step still has improving switches");
            if (!step.chosen_switch.empty())
                report.add({i}, "final-improvement-set", "last step records a switch");
            continue;
        }
        if (!step.chosen_switch.well_defined()) {
            report.add({i}, "chosen-switch", "switch set repeats a state");
            continue;
        }
        for (const auto& [s, a] : step.chosen_switch.pairs)
            if (!step.improvement_set.contains(s, a)) {
                std::ostringstream os;
                os << "switch pair (" << s << "," << a << ") is not in the improvement set";
                report.add({i}, "chosen-switch", os.str());
            }
        if (step.chosen_switch.states() != step.improvement_set.improvement_states())
            report.add({i}, "chosen-switch", "greedy rule must switch every improvement state");
        if (apply_switch(step.policy, step.chosen_switch) != trace.steps[i + 1].policy)
            report.add({i, i + 1}, "switch-consistency", "next policy is not the recorded switch of this one");
    }
    return report;
}

/**
 * Recomputes the trace against its instance: digest, exact values,
 * improvement sets, the greedy action choice, and (within the enumeration
 * budget) a neighbor chain witness for every step.
 */
inline ViolationReport verify_trace_against_mdp(const PiTrace& trace, const Mdp& mdp,
                                                std::uint64_t chain_budget = std::uint64_t{1} << 16) {
    ViolationReport report;
    if (trace.n != mdp.n || trace.k != mdp.k) {
        report.add({}, "instance-mismatch", "trace header (n,k) does not match the instance");
        return report;
    }
    if (!trace.mdp_digest.empty() && trace.mdp_digest != mdp_digest(mdp))
        report.add({}, "digest-mismatch", "trace was recorded for a different instance");

    const Evaluator ev(mdp);
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const PiStep& step = trace.steps[i];
        if (!valid_policy(mdp, step.policy)) {
            report.add({i}, "policy-range", "policy invalid for the instance");
            return report;
        }
        const ValueVector v = ev.evaluate(step.policy);
        if (!step.value.empty() && step.value != v)
            report.add({i}, "value-recompute", "recorded value vector differs from the exact solve");
        const ImprovementSet tset = ev.improvement_set_fast(step.policy, v);
        if (step.improvement_set != tset)
            report.add({i}, "improvement-set-recompute", "recorded improvement set differs from the recomputed one");
        if (i + 1 < trace.steps.size() && trace.update_rule == "greedy" && !tset.empty()) {
            if (detail::greedy_switch(ev, v, tset) != step.chosen_switch)
                report.add({i}, "greedy-rule", "recorded switch is not the greedy choice");
        }
    }

    bool within_budget = true;
    try {
        checked_policy_count(mdp.n, mdp.k, chain_budget);
    } catch (const BudgetExceeded&) {
        within_budget = false;
    }
    if (within_budget) {
        const DominationDag dag = domination_dag(mdp, chain_budget);
        for (std::size_t i = 0; i + 1 < trace.steps.size(); ++i) {
            const PiStep& step = trace.steps[i];
            if (step.chosen_switch.empty()) continue;
            try {
                const auto chain = find_neighbor_chain(dag, step.policy, trace.steps[i + 1].policy,
                                                       static_cast<int>(step.chosen_switch.size()));
                if (!chain.has_value())
                    report.add({i, i + 1}, "neighbor-chain",
                               "THEOREM VIOLATION: no neighbor chain between consecutive iterates");
            } catch (const std::invalid_argument& e) {
                report.add({i, i + 1}, "neighbor-chain", std::string("chain preconditions failed: ") + e.what());
            }
        }
    }
    return report;
}

/// Everything that can be checked for a trace: structure, the pairwise
/// sequence properties, repetition/tensor certificates and iteration bounds;
/// plus the exact recomputation when the instance is supplied.
inline ViolationReport verify_trace_full(const PiTrace& trace, const Mdp* mdp = nullptr,
                                         std::uint64_t chain_budget = std::uint64_t{1} << 16) {
    ViolationReport report = verify_trace_structure(trace);
    const AnnotatedSequence seq = to_annotated_sequence(trace);
    report.merge(check_non_inclusion(seq));
    report.merge(check_acyclicity(seq));
    auto repetition = count_repeated_state_sets(seq);
    report.merge(std::move(repetition.report));
    for (const auto& [states, members] : group_by_state_set(seq)) {
        std::vector<AnnotatedItem> group;
        for (std::size_t idx : members) group.push_back(seq.items[idx]);
        const auto r = tensor_rank_check(group, seq.k);
        if (!r.ok) {
            std::ostringstream os;
            os << "tensor rank " << r.rank << " below group size " << group.size();
            report.add(members, "tensor-rank", os.str());
        }
    }
    report.merge(validate_trace_bounds(trace));
    if (mdp != nullptr) report.merge(verify_trace_against_mdp(trace, *mdp, chain_budget));
    return report;
}

}  // namespace piwb
