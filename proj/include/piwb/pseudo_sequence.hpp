#pragma once

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <utility>
#include <vector>

#include "piwb/enumerate.hpp"
#include "piwb/sequence_checks.hpp"

namespace piwb {

/**
 * Canonical abstract improvement set: the highest action index k-1 acts as a
 * special action, and every state not already using it gets the single
 * improving pair (s, k-1).
 */
inline ImprovementSet canonical_improvement_set(const Policy& policy, int k) {
    std::vector<std::pair<State, ActionIndex>> pairs;
    for (std::size_t s = 0; s < policy.size(); ++s)
        if (policy[s] != k - 1) pairs.emplace_back(static_cast<State>(s), k - 1);
    return ImprovementSet{std::move(pairs)};
}

/**
 * All k^n policies annotated with their canonical improvement sets, ordered
 * by decreasing improvement-set cardinality; inside a block of equal
 * cardinality the order is lexicographic on action vectors (reproducible
 * instantiation of an otherwise arbitrary choice).
 */
inline AnnotatedSequence build_supersequence(int n, int k, std::uint64_t budget = kDefaultEnumerationBudget) {
    const std::uint64_t count = checked_policy_count(n, k, budget);
    AnnotatedSequence seq;
    seq.n = n;
    seq.k = k;
    seq.items.reserve(count);
    for_each_policy(n, k, [&](const Policy& p) { seq.items.push_back({p, canonical_improvement_set(p, k)}); });
    std::stable_sort(seq.items.begin(), seq.items.end(), [](const AnnotatedItem& a, const AnnotatedItem& b) {
        if (a.improvement_set.size() != b.improvement_set.size()) return a.improvement_set.size() > b.improvement_set.size();
        return a.policy < b.policy;
    });
    return seq;
}

/// A supersequence plus the indices of a jumping subsequence through it.
struct PseudoPiSequence {
    AnnotatedSequence supersequence;
    std::vector<std::size_t> subsequence_indices;
    int n = 0;
    int k = 0;
};

/// Greedy jumping subsequence: start at index 0, and from index i advance by
/// |T^{pi_i}| + 1; stop when the next index runs past the end.
inline PseudoPiSequence greedy_subsequence(AnnotatedSequence o) {
    if (o.items.empty()) throw std::invalid_argument("greedy_subsequence: empty sequence");
    PseudoPiSequence out;
    out.n = o.n;
    out.k = o.k;
    std::size_t idx = 0;
    while (true) {
        out.subsequence_indices.push_back(idx);
        const std::size_t next = idx + o.items[idx].improvement_set.size() + 1;
        if (next >= o.items.size()) break;
        idx = next;
    }
    out.supersequence = std::move(o);
    return out;
}

/// Exact value of sum_{d=0}^{n} C(n,d) (k-1)^d / (d+1) = (k^{n+1} - 1) / ((n+1)(k-1)).
inline Rational closed_form_length(int n, int k) {
    if (n < 1 || k < 2) throw std::invalid_argument("closed_form_length: need n >= 1 and k >= 2");
    BigInt numerator;
    mpz_ui_pow_ui(numerator.get_mpz_t(), static_cast<unsigned long>(k), static_cast<unsigned long>(n + 1));
    numerator -= 1;
    Rational q(numerator, BigInt(static_cast<long>(n + 1)) * (k - 1));
    q.canonicalize();
    return q;
}

namespace detail {

inline bool is_canonical_supersequence(const AnnotatedSequence& seq) {
    std::uint64_t count = 1;
    for (int i = 0; i < seq.n; ++i) {
        count *= static_cast<std::uint64_t>(seq.k);
        if (count > seq.size()) return false;
    }
    if (count != seq.size()) return false;
    std::vector<char> seen(seq.size(), 0);
    for (const AnnotatedItem& item : seq.items) {
        if (item.improvement_set != canonical_improvement_set(item.policy, seq.k)) return false;
        const std::uint64_t rank = rank_of_policy(item.policy, seq.k);
        if (seen[rank]) return false;
        seen[rank] = 1;
    }
    return true;
}

}  // namespace detail

/**
 * Validates a pseudo sequence: the supersequence must pass the non-inclusion
 * check and have non-increasing improvement-set cardinalities, and the
 * subsequence indices must follow the greedy jumping arithmetic from index 0
 * to the end. When the supersequence is recognized as the canonical
 * construction, the subsequence must additionally reach the closed-form
 * length floor.
 */
inline ViolationReport verify_pseudo(const PseudoPiSequence& p) {
    const AnnotatedSequence& seq = p.supersequence;
    ViolationReport report = check_non_inclusion(seq);
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
        if (seq.items[i].improvement_set.size() < seq.items[i + 1].improvement_set.size()) {
            std::ostringstream os;
            os << "improvement-set cardinality increases from " << seq.items[i].improvement_set.size() << " to "
               << seq.items[i + 1].improvement_set.size();
            report.add({i, i + 1}, "cardinality-order", os.str());
        }
    }

    const auto& idx = p.subsequence_indices;
    if (idx.empty() || idx.front() != 0) {
        report.add({}, "jump-arithmetic", "subsequence must start at index 0");
    } else {
        for (std::size_t t = 0; t + 1 < idx.size(); ++t) {
            const std::size_t expect = idx[t] + seq.items[idx[t]].improvement_set.size() + 1;
            if (idx[t + 1] != expect) {
                std::ostringstream os;
                os << "index " << idx[t + 1] << " after " << idx[t] << ", expected " << expect;
                report.add({t, t + 1}, "jump-arithmetic", os.str());
            }
        }
        if (!idx.empty()) {
            const std::size_t last = idx.back();
            if (last >= seq.size()) {
                report.add({idx.size() - 1}, "jump-arithmetic", "subsequence index past the supersequence end");
            } else if (last + seq.items[last].improvement_set.size() + 1 < seq.size()) {
                report.add({idx.size() - 1}, "jump-arithmetic", "subsequence stops before the greedy walk ends");
            }
        }
    }

    if (detail::is_canonical_supersequence(seq)) {
        const Rational bound = closed_form_length(seq.n, seq.k);
        BigInt floor_bound = bound.get_num() / bound.get_den();
        if (floor_bound > static_cast<long>(idx.size())) {
            std::ostringstream os;
            os << "subsequence length " << idx.size() << " below floor(closed form) = " << floor_bound.get_str();
            report.add({}, "length-bound", os.str());
        }
    }
    return report;
}

}  // namespace piwb
