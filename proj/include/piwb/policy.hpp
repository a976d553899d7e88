#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "piwb/rational.hpp"

namespace piwb {

using State = int;
using ActionIndex = int;

/// One action per state, 0-based action indices.
using Policy = std::vector<ActionIndex>;
using ValueVector = std::vector<Rational>;

/// Outcome of an exact componentwise value comparison.
/// StrictlyGreater means ">= everywhere with > somewhere" (strict domination);
/// Equal means identical vectors. ">=" as a whole is Equal or StrictlyGreater.
enum class Comparison : std::uint8_t { StrictlyLess, Equal, StrictlyGreater, Incomparable };

inline const char* to_string(Comparison c) {
    switch (c) {
        case Comparison::StrictlyLess: return "STRICTLY_LESS";
        case Comparison::Equal: return "EQUAL";
        case Comparison::StrictlyGreater: return "STRICTLY_GREATER";
        case Comparison::Incomparable: return "INCOMPARABLE";
    }
    return "?";
}

/// True when the left side of the comparison dominates (componentwise >=).
inline bool dominates(Comparison c) { return c == Comparison::Equal || c == Comparison::StrictlyGreater; }
/// True when the left side is dominated (componentwise <=).
inline bool dominated_by(Comparison c) { return c == Comparison::Equal || c == Comparison::StrictlyLess; }

inline Comparison reverse(Comparison c) {
    if (c == Comparison::StrictlyLess) return Comparison::StrictlyGreater;
    if (c == Comparison::StrictlyGreater) return Comparison::StrictlyLess;
    return c;
}

inline Comparison compare_values(const ValueVector& lhs, const ValueVector& rhs) {
    if (lhs.size() != rhs.size()) throw std::invalid_argument("value vectors differ in length");
    bool any_less = false, any_greater = false;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        const int c = cmp(lhs[i], rhs[i]);
        any_less |= c < 0;
        any_greater |= c > 0;
    }
    if (any_less && any_greater) return Comparison::Incomparable;
    if (any_greater) return Comparison::StrictlyGreater;
    if (any_less) return Comparison::StrictlyLess;
    return Comparison::Equal;
}

/// A collection of (state, action) pairs to switch to. Well-defined iff no
/// state appears twice.
struct SwitchSet {
    std::vector<std::pair<State, ActionIndex>> pairs;

    bool well_defined() const {
        std::vector<State> seen;
        seen.reserve(pairs.size());
        for (const auto& [s, a] : pairs) seen.push_back(s);
        std::sort(seen.begin(), seen.end());
        return std::adjacent_find(seen.begin(), seen.end()) == seen.end();
    }
    std::vector<State> states() const {
        std::vector<State> out;
        out.reserve(pairs.size());
        for (const auto& [s, a] : pairs) out.push_back(s);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
    std::size_t size() const { return pairs.size(); }
    bool empty() const { return pairs.empty(); }
    bool operator==(const SwitchSet&) const = default;
};

/// Applies a switch set to a policy. States not listed keep their action.
inline Policy apply_switch(const Policy& policy, const SwitchSet& u) {
    if (!u.well_defined()) throw std::invalid_argument("switch set ill-defined: state repeated");
    Policy out = policy;
    for (const auto& [s, a] : u.pairs) {
        if (s < 0 || s >= static_cast<State>(out.size())) throw std::invalid_argument("switch state out of range");
        out[s] = a;
    }
    return out;
}

/// The set of single switches that strictly improve a policy, kept sorted by
/// (state, action). The improvement states are its projection onto states.
struct ImprovementSet {
    std::vector<std::pair<State, ActionIndex>> pairs;

    static ImprovementSet from_pairs(std::vector<std::pair<State, ActionIndex>> p) {
        std::sort(p.begin(), p.end());
        p.erase(std::unique(p.begin(), p.end()), p.end());
        return ImprovementSet{std::move(p)};
    }
    bool contains(State s, ActionIndex a) const {
        return std::binary_search(pairs.begin(), pairs.end(), std::make_pair(s, a));
    }
    std::vector<State> improvement_states() const {
        std::vector<State> out;
        for (const auto& [s, a] : pairs) {
            if (out.empty() || out.back() != s) out.push_back(s);
        }
        return out;
    }
    std::size_t size() const { return pairs.size(); }
    bool empty() const { return pairs.empty(); }
    bool operator==(const ImprovementSet&) const = default;
};

/// Lexicographic rank of a policy (state 0 is the most significant digit).
inline std::uint64_t rank_of_policy(const Policy& policy, int k) {
    std::uint64_t r = 0;
    for (ActionIndex a : policy) r = r * static_cast<std::uint64_t>(k) + static_cast<std::uint64_t>(a);
    return r;
}

inline Policy policy_of_rank(std::uint64_t rank, int n, int k) {
    Policy p(n);
    for (int s = n - 1; s >= 0; --s) {
        p[s] = static_cast<ActionIndex>(rank % static_cast<std::uint64_t>(k));
        rank /= static_cast<std::uint64_t>(k);
    }
    return p;
}

inline int hamming_distance(const Policy& a, const Policy& b) {
    if (a.size() != b.size()) throw std::invalid_argument("policies differ in length");
    int d = 0;
    for (std::size_t s = 0; s < a.size(); ++s) d += a[s] != b[s];
    return d;
}

}  // namespace piwb
