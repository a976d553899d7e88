#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "piwb/enumerate.hpp"
#include "piwb/linalg.hpp"
#include "piwb/policy.hpp"
#include "piwb/policy_iteration.hpp"

namespace piwb {

struct Violation {
    std::vector<std::size_t> indices;
    std::string rule;
    std::string witness;
};

struct ViolationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    void add(std::vector<std::size_t> indices, std::string rule, std::string witness) {
        violations.push_back({std::move(indices), std::move(rule), std::move(witness)});
    }
    void merge(ViolationReport other) {
        for (auto& v : other.violations) violations.push_back(std::move(v));
    }
};

/// A policy sequence annotated with improvement sets. The sets may be
/// abstract (not derived from any MDP).
struct AnnotatedItem {
    Policy policy;
    ImprovementSet improvement_set;
};

struct AnnotatedSequence {
    int n = 0;
    int k = 0;
    std::vector<AnnotatedItem> items;

    std::size_t size() const { return items.size(); }
};

inline AnnotatedSequence to_annotated_sequence(const PiTrace& trace) {
    AnnotatedSequence seq;
    seq.n = trace.n;
    seq.k = trace.k;
    seq.items.reserve(trace.steps.size());
    for (const PiStep& step : trace.steps) seq.items.push_back({step.policy, step.improvement_set});
    return seq;
}

namespace detail {

/// Dense per-item lookups: improvement states and (s,a) membership flags.
struct SequenceIndex {
    std::vector<std::vector<State>> states;
    std::vector<std::vector<char>> member;  // [item][s * k + a]

    explicit SequenceIndex(const AnnotatedSequence& seq) {
        states.reserve(seq.size());
        member.reserve(seq.size());
        for (const AnnotatedItem& item : seq.items) {
            if (static_cast<int>(item.policy.size()) != seq.n)
                throw std::invalid_argument("sequence item policy length != n");
            states.push_back(item.improvement_set.improvement_states());
            std::vector<char> m(static_cast<std::size_t>(seq.n) * seq.k, 0);
            for (const auto& [s, a] : item.improvement_set.pairs) {
                if (s < 0 || s >= seq.n || a < 0 || a >= seq.k)
                    throw std::invalid_argument("improvement pair out of range");
                m[static_cast<std::size_t>(s) * seq.k + a] = 1;
            }
            member.push_back(std::move(m));
        }
    }
};

}  // namespace detail

/**
 * Non-inclusion check: for every ordered pair i < j there must be an
 * improvement state s of item i with policy_i(s) != policy_j(s) and
 * (s, policy_i(s)) absent from item j's improvement set. Violations carry
 * the full scan of S^{pi_i} as the witness text.
 */
inline ViolationReport check_non_inclusion(const AnnotatedSequence& seq) {
    const detail::SequenceIndex index(seq);
    ViolationReport report;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        const Policy& pi = seq.items[i].policy;
        for (std::size_t j = i + 1; j < seq.size(); ++j) {
            const Policy& pj = seq.items[j].policy;
            bool found = false;
            for (State s : index.states[i]) {
                if (pi[s] != pj[s] && !index.member[j][static_cast<std::size_t>(s) * seq.k + pi[s]]) {
                    found = true;
                    break;
                }
            }
            if (found) continue;
            std::ostringstream os;
            os << "no witness state; scan of improvement states of item " << i << ":";
            for (State s : index.states[i]) {
                os << " s=" << s;
                if (pi[s] == pj[s])
                    os << " (actions equal)";
                else
                    os << " ((s," << pi[s] << ") in T_" << j << ")";
            }
            if (index.states[i].empty()) os << " (empty)";
            report.add({i, j}, "non-inclusion", os.str());
        }
    }
    return report;
}

/// k = 2 shortcut: the improvement-state set of an earlier policy must never
/// be contained in a later one's. Necessary consequence of the full check.
inline ViolationReport check_non_inclusion_k2(const AnnotatedSequence& seq) {
    if (seq.k != 2) throw std::invalid_argument("check_non_inclusion_k2 requires k = 2");
    const detail::SequenceIndex index(seq);
    ViolationReport report;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        for (std::size_t j = i + 1; j < seq.size(); ++j) {
            if (!std::includes(index.states[j].begin(), index.states[j].end(), index.states[i].begin(),
                               index.states[i].end()))
                continue;
            std::ostringstream os;
            os << "improvement states of item " << i << " contained in item " << j << "'s";
            report.add({i, j}, "non-inclusion-k2", os.str());
        }
    }
    return report;
}

/**
 * Acyclicity check: no earlier policy may be reachable from a later one by
 * switching a subset of the later one's improvement set. Linear-time
 * characterization: pi_i = pi_j + U for some U inside T_j iff every state
 * where the two differ has its pi_i action in T_j (U empty covers equal
 * policies). Equivalent to enumerating all well-defined subsets of T_j.
 */
inline ViolationReport check_acyclicity(const AnnotatedSequence& seq) {
    const detail::SequenceIndex index(seq);
    ViolationReport report;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        const Policy& pi = seq.items[i].policy;
        for (std::size_t j = i + 1; j < seq.size(); ++j) {
            const Policy& pj = seq.items[j].policy;
            bool reachable = true;
            for (int s = 0; s < seq.n && reachable; ++s) {
                if (pi[s] != pj[s]) reachable = index.member[j][static_cast<std::size_t>(s) * seq.k + pi[s]];
            }
            if (!reachable) continue;
            std::ostringstream os;
            if (pi == pj) {
                os << "policies identical (U = {})";
            } else {
                os << "item " << i << " = item " << j << " + U with U = {";
                bool first = true;
                for (int s = 0; s < seq.n; ++s) {
                    if (pi[s] != pj[s]) {
                        os << (first ? "" : ", ") << "(" << s << "," << pi[s] << ")";
                        first = false;
                    }
                }
                os << "} inside T_" << j;
            }
            report.add({i, j}, "acyclicity", os.str());
        }
    }
    return report;
}

/// Groups item indices by their improvement-state set.
inline std::map<std::vector<State>, std::vector<std::size_t>> group_by_state_set(const AnnotatedSequence& seq) {
    std::map<std::vector<State>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < seq.size(); ++i)
        groups[seq.items[i].improvement_set.improvement_states()].push_back(i);
    return groups;
}

struct RepetitionCounts {
    std::map<std::vector<State>, std::size_t> counts;
    ViolationReport report;
};

/// Counts how often each improvement-state set repeats and flags any set of
/// size d occurring more than (k-1)^d times.
inline RepetitionCounts count_repeated_state_sets(const AnnotatedSequence& seq) {
    RepetitionCounts out;
    const auto groups = group_by_state_set(seq);
    for (const auto& [states, members] : groups) {
        out.counts[states] = members.size();
        BigInt bound;
        mpz_ui_pow_ui(bound.get_mpz_t(), static_cast<unsigned long>(seq.k - 1), static_cast<unsigned long>(states.size()));
        if (bound < static_cast<long>(members.size())) {
            std::ostringstream os;
            os << "state set {";
            for (std::size_t i = 0; i < states.size(); ++i) os << (i ? "," : "") << states[i];
            os << "} repeats " << members.size() << " times, bound (k-1)^d = " << bound.get_str();
            out.report.add(members, "repetition-bound", os.str());
        }
    }
    return out;
}

struct TensorRankResult {
    int rank = 0;
    bool ok = false;
};

/**
 * Linear-independence certificate for a group of policies sharing the same
 * improvement-state set S = {s_1 < ... < s_d}. Each (policy, T) maps to the
 * tensor product over i of (e_{policy(s_i)} - e_{T(s_i)}) in dimension k^d,
 * where T(s_i) is the lowest improving action recorded at s_i. The exact
 * rank of these vectors must equal the group size, which is at most
 * (k-1)^d since every factor lies in the zero-sum subspace.
 */
inline TensorRankResult tensor_rank_check(const std::vector<AnnotatedItem>& group, int k) {
    if (group.empty()) return {0, true};
    const std::vector<State> shared = group.front().improvement_set.improvement_states();
    for (const AnnotatedItem& item : group)
        if (item.improvement_set.improvement_states() != shared)
            throw std::invalid_argument("tensor_rank_check: improvement-state sets differ across group");
    const int d = static_cast<int>(shared.size());
    std::uint64_t dim = 1;
    for (int i = 0; i < d; ++i) {
        if (dim > (std::uint64_t{1} << 24) / static_cast<std::uint64_t>(k))
            throw BudgetExceeded("tensor space k^d too large");
        dim *= static_cast<std::uint64_t>(k);
    }

    std::vector<std::vector<BigInt>> matrix;
    matrix.reserve(group.size());
    for (const AnnotatedItem& item : group) {
        std::vector<BigInt> vec{BigInt(1)};
        for (State s : shared) {
            ActionIndex improving = -1;
            for (const auto& [ps, pa] : item.improvement_set.pairs) {
                if (ps == s) {
                    improving = pa;  // pairs sorted: first hit is the lowest action
                    break;
                }
            }
            const ActionIndex current = item.policy[s];
            std::vector<BigInt> next(vec.size() * static_cast<std::size_t>(k));
            for (std::size_t x = 0; x < vec.size(); ++x) {
                if (sgn(vec[x]) == 0) continue;
                next[x * k + current] += vec[x];
                next[x * k + improving] -= vec[x];
            }
            vec = std::move(next);
        }
        matrix.push_back(std::move(vec));
    }

    TensorRankResult result;
    result.rank = integer_matrix_rank(std::move(matrix));
    BigInt bound;
    mpz_ui_pow_ui(bound.get_mpz_t(), static_cast<unsigned long>(k - 1), static_cast<unsigned long>(d));
    result.ok = result.rank == static_cast<int>(group.size()) && bound >= static_cast<long>(group.size());
    return result;
}

/**
 * Neighbor-to-neighbor chain witness: for hi = lo + U with U a well-defined
 * subset of lo's improvement set of size d, returns d policies
 * p_1 <= ... <= p_d = hi, consecutive ones neighbors, all strictly
 * dominating lo. The chain is found by peeling one switched state at a time:
 * the non-inclusion property guarantees a state s with (s, lo(s)) outside
 * the current policy's improvement set, and un-switching it steps down to a
 * comparable neighbor. Returns nullopt only if no such state exists, which
 * would contradict the theory on a real MDP.
 */
inline std::optional<std::vector<Policy>> find_neighbor_chain(const DominationDag& dag, const Policy& lo,
                                                              const Policy& hi, int d) {
    if (d < 1) throw std::invalid_argument("find_neighbor_chain: d must be >= 1");
    if (hamming_distance(lo, hi) != d) throw std::invalid_argument("find_neighbor_chain: lo and hi differ in != d states");
    const std::uint64_t lo_rank = rank_of_policy(lo, dag.k);
    for (int s = 0; s < dag.n; ++s)
        if (lo[s] != hi[s] && dag.cmp(lo_rank, s, hi[s]) != Comparison::StrictlyGreater)
            throw std::invalid_argument("find_neighbor_chain: hi is not lo switched by a subset of lo's improvement set");

    std::vector<Policy> chain(d);
    Policy cur = hi;
    chain[d - 1] = cur;
    for (int t = d - 1; t >= 1; --t) {
        const std::uint64_t cur_rank = rank_of_policy(cur, dag.k);
        bool peeled = false;
        for (int s = 0; s < dag.n && !peeled; ++s) {
            if (lo[s] == cur[s]) continue;
            if (dag.cmp(cur_rank, s, lo[s]) != Comparison::StrictlyGreater) {
                cur[s] = lo[s];
                chain[t - 1] = cur;
                peeled = true;
            }
        }
        if (!peeled) return std::nullopt;  // theorem violation on a real MDP
    }
    return chain;
}

}  // namespace piwb
