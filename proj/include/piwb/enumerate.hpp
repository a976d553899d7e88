#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "piwb/evaluate.hpp"
#include "piwb/mdp.hpp"
#include "piwb/policy.hpp"

namespace piwb {

class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Default guard for full policy-space enumeration: k^n <= 2^24.
inline constexpr std::uint64_t kDefaultEnumerationBudget = std::uint64_t{1} << 24;

/// k^n, throwing BudgetExceeded when the policy space is larger than budget.
inline std::uint64_t checked_policy_count(int n, int k, std::uint64_t budget = kDefaultEnumerationBudget) {
    if (n < 1 || k < 2) throw std::invalid_argument("need n >= 1 and k >= 2");
    std::uint64_t count = 1;
    for (int i = 0; i < n; ++i) {
        if (count > budget / static_cast<std::uint64_t>(k))
            throw BudgetExceeded("policy space k^n exceeds enumeration budget");
        count *= static_cast<std::uint64_t>(k);
    }
    if (count > budget) throw BudgetExceeded("policy space k^n exceeds enumeration budget");
    return count;
}

/// Visits all k^n policies in lexicographic order (state 0 most significant).
template <typename Fn>
void for_each_policy(int n, int k, Fn&& fn) {
    Policy p(n, 0);
    while (true) {
        fn(std::as_const(p));
        int s = n - 1;
        while (s >= 0 && p[s] == k - 1) p[s--] = 0;
        if (s < 0) break;
        ++p[s];
    }
}

/// Exact values of every policy, indexed by lexicographic rank.
inline std::vector<ValueVector> all_policy_values(const Evaluator& ev, std::uint64_t budget = kDefaultEnumerationBudget) {
    const std::uint64_t count = checked_policy_count(ev.mdp().n, ev.mdp().k, budget);
    std::vector<ValueVector> values;
    values.reserve(count);
    for_each_policy(ev.mdp().n, ev.mdp().k, [&](const Policy& p) { values.push_back(ev.evaluate(p)); });
    return values;
}

/**
 * Enumerates all k^n policies and returns one whose value vector dominates
 * every other policy's (such a policy always exists). Ties on the exact
 * optimal value vector are broken toward the lexicographically smallest
 * action vector.
 */
inline Policy brute_force_optimal(const Mdp& mdp, std::uint64_t budget = kDefaultEnumerationBudget) {
    checked_policy_count(mdp.n, mdp.k, budget);
    const Evaluator ev(mdp);
    Policy best;
    ValueVector best_value;
    for_each_policy(mdp.n, mdp.k, [&](const Policy& p) {
        ValueVector v = ev.evaluate(p);
        if (best.empty() || compare_values(v, best_value) == Comparison::StrictlyGreater) {
            best = p;
            best_value = std::move(v);
        }
    });
    return best;
}

/**
 * The partial order of all k^n policies, restricted to neighbor pairs.
 * For each policy pi and pair (s,a), neighbor_cmp holds
 * compare(v(pi + (s,a)), v(pi)); strict edges run from dominated to
 * dominating, Equal neighbors are recorded as flat edges, and Incomparable
 * neighbors (impossible for a real MDP) are surfaced separately.
 */
struct DominationDag {
    int n = 0;
    int k = 0;
    std::uint64_t count = 0;
    std::vector<Comparison> neighbor_cmp;  // [(rank * n + s) * k + a]

    Comparison cmp(std::uint64_t rank, State s, ActionIndex a) const {
        return neighbor_cmp[(rank * n + static_cast<std::uint64_t>(s)) * k + static_cast<std::uint64_t>(a)];
    }

    ImprovementSet improvement_set(const Policy& policy) const {
        const std::uint64_t rank = rank_of_policy(policy, k);
        std::vector<std::pair<State, ActionIndex>> pairs;
        for (int s = 0; s < n; ++s)
            for (int a = 0; a < k; ++a)
                if (a != policy[s] && cmp(rank, s, a) == Comparison::StrictlyGreater) pairs.emplace_back(s, a);
        return ImprovementSet{std::move(pairs)};
    }

    /// Directed neighbor edges (dominated rank, dominating rank).
    std::vector<std::pair<std::uint64_t, std::uint64_t>> strict_edges() const { return collect(Comparison::StrictlyGreater); }
    /// Neighbor pairs with exactly equal value vectors.
    std::vector<std::pair<std::uint64_t, std::uint64_t>> flat_edges() const { return collect(Comparison::Equal); }
    /// Neighbor pairs violating "neighbors are always comparable".
    std::vector<std::pair<std::uint64_t, std::uint64_t>> incomparable_pairs() const { return collect(Comparison::Incomparable); }

private:
    std::vector<std::pair<std::uint64_t, std::uint64_t>> collect(Comparison want) const {
        std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
        std::vector<std::uint64_t> pow(n);
        std::uint64_t p = 1;
        for (int s = n - 1; s >= 0; --s) {
            pow[s] = p;
            p *= static_cast<std::uint64_t>(k);
        }
        std::uint64_t rank = 0;
        for_each_policy(n, k, [&](const Policy& pi) {
            for (int s = 0; s < n; ++s) {
                for (int a = pi[s] + 1; a < k; ++a) {
                    const std::uint64_t other = rank + pow[s] * static_cast<std::uint64_t>(a - pi[s]);
                    const Comparison c = cmp(rank, s, a);  // v(neighbor) vs v(pi)
                    if (want == Comparison::Equal || want == Comparison::Incomparable) {
                        if (c == want) out.emplace_back(rank, other);
                    } else if (c == Comparison::StrictlyGreater) {
                        out.emplace_back(rank, other);
                    } else if (c == Comparison::StrictlyLess) {
                        out.emplace_back(other, rank);
                    }
                }
            }
            ++rank;
        });
        return out;
    }
};

/// Builds the dag from a precomputed by-rank value table.
inline DominationDag domination_dag_from_values(const Mdp& mdp, const std::vector<ValueVector>& values) {
    DominationDag dag;
    dag.n = mdp.n;
    dag.k = mdp.k;
    dag.count = values.size();
    dag.neighbor_cmp.assign(dag.count * static_cast<std::uint64_t>(mdp.n) * mdp.k, Comparison::Equal);
    std::vector<std::uint64_t> pow(mdp.n);
    std::uint64_t p = 1;
    for (int s = mdp.n - 1; s >= 0; --s) {
        pow[s] = p;
        p *= static_cast<std::uint64_t>(mdp.k);
    }
    std::uint64_t rank = 0;
    for_each_policy(mdp.n, mdp.k, [&](const Policy& pi) {
        const auto at = [&](std::uint64_t r, int s, int a) -> Comparison& {
            return dag.neighbor_cmp[(r * mdp.n + static_cast<std::uint64_t>(s)) * mdp.k + static_cast<std::uint64_t>(a)];
        };
        for (int s = 0; s < mdp.n; ++s) {
            for (int a = pi[s] + 1; a < mdp.k; ++a) {
                const std::uint64_t other = rank + pow[s] * static_cast<std::uint64_t>(a - pi[s]);
                const Comparison c = compare_values(values[other], values[rank]);
                at(rank, s, a) = c;
                at(other, s, pi[s]) = reverse(c);
            }
        }
        ++rank;
    });
    return dag;
}

inline DominationDag domination_dag(const Mdp& mdp, std::uint64_t budget = kDefaultEnumerationBudget) {
    checked_policy_count(mdp.n, mdp.k, budget);
    const Evaluator ev(mdp);
    return domination_dag_from_values(mdp, all_policy_values(ev, budget));
}

}  // namespace piwb
