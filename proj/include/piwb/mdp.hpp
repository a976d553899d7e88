#pragma once

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "piwb/policy.hpp"
#include "piwb/rational.hpp"

namespace piwb {

/**
 * A finite MDP with a common action numbering: n states, k actions per state,
 * exact rational transition probabilities and rewards, and a rational
 * discount factor 0 < gamma < 1.
 */
struct Mdp {
    int n = 0;
    int k = 0;
    Rational gamma;
    std::vector<std::vector<std::vector<Rational>>> transitions;  // [state][action][successor]
    std::vector<std::vector<Rational>> rewards;                   // [state][action]
};

inline void validate(const Mdp& mdp) {
    const auto fail = [](const std::string& why) { throw std::invalid_argument("invalid mdp: " + why); };
    if (mdp.n < 1) fail("n must be >= 1");
    if (mdp.k < 2) fail("k must be >= 2");
    if (!(mdp.gamma > 0 && mdp.gamma < 1)) fail("gamma must satisfy 0 < gamma < 1, got " + format_rational(mdp.gamma));
    if (static_cast<int>(mdp.transitions.size()) != mdp.n) fail("transitions must have n rows of states");
    if (static_cast<int>(mdp.rewards.size()) != mdp.n) fail("rewards must have n rows of states");
    for (int s = 0; s < mdp.n; ++s) {
        if (static_cast<int>(mdp.transitions[s].size()) != mdp.k) fail("state " + std::to_string(s) + " must expose exactly k actions");
        if (static_cast<int>(mdp.rewards[s].size()) != mdp.k) fail("rewards for state " + std::to_string(s) + " must cover k actions");
        for (int a = 0; a < mdp.k; ++a) {
            const auto& row = mdp.transitions[s][a];
            if (static_cast<int>(row.size()) != mdp.n) fail("transition row (" + std::to_string(s) + "," + std::to_string(a) + ") must have n entries");
            Rational sum(0);
            for (const Rational& p : row) {
                if (p < 0 || p > 1) fail("probability out of [0,1] at (" + std::to_string(s) + "," + std::to_string(a) + ")");
                sum += p;
            }
            if (sum != 1)
                fail("transition row sum != 1 at (" + std::to_string(s) + "," + std::to_string(a) + "): got " + format_rational(sum));
        }
    }
}

inline bool valid_policy(const Mdp& mdp, const Policy& policy) {
    if (static_cast<int>(policy.size()) != mdp.n) return false;
    for (ActionIndex a : policy)
        if (a < 0 || a >= mdp.k) return false;
    return true;
}

namespace detail {

inline Rational rational_from_json(const nlohmann::json& j, const std::string& where) {
    if (j.is_number_integer()) return Rational(static_cast<long>(j.get<std::int64_t>()));
    if (j.is_string()) {
        try {
            return parse_rational(j.get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(std::string(e.what()) + " at " + where);
        }
    }
    throw std::invalid_argument("expected rational string or integer at " + where);
}

}  // namespace detail

/// Parses the MDP document format: a JSON object with fields n, k, gamma,
/// transitions (n x k x n rational strings) and rewards (n x k).
inline Mdp parse_mdp(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("mdp syntax error: ") + e.what());
    }
    if (!doc.is_object()) throw std::invalid_argument("mdp document must be an object");
    for (const char* field : {"n", "k", "gamma", "transitions", "rewards"})
        if (!doc.contains(field)) throw std::invalid_argument(std::string("mdp document missing field \"") + field + "\"");

    Mdp mdp;
    if (!doc["n"].is_number_integer() || !doc["k"].is_number_integer())
        throw std::invalid_argument("fields n and k must be integers");
    mdp.n = doc["n"].get<int>();
    mdp.k = doc["k"].get<int>();
    mdp.gamma = detail::rational_from_json(doc["gamma"], "gamma");

    const auto& tr = doc["transitions"];
    const auto& rw = doc["rewards"];
    if (!tr.is_array() || !rw.is_array()) throw std::invalid_argument("transitions and rewards must be arrays");
    mdp.transitions.resize(tr.size());
    for (std::size_t s = 0; s < tr.size(); ++s) {
        if (!tr[s].is_array()) throw std::invalid_argument("transitions[" + std::to_string(s) + "] must be an array");
        mdp.transitions[s].resize(tr[s].size());
        for (std::size_t a = 0; a < tr[s].size(); ++a) {
            if (!tr[s][a].is_array())
                throw std::invalid_argument("transitions[" + std::to_string(s) + "][" + std::to_string(a) + "] must be an array");
            for (std::size_t t = 0; t < tr[s][a].size(); ++t)
                mdp.transitions[s][a].push_back(detail::rational_from_json(
                    tr[s][a][t], "transitions[" + std::to_string(s) + "][" + std::to_string(a) + "][" + std::to_string(t) + "]"));
        }
    }
    mdp.rewards.resize(rw.size());
    for (std::size_t s = 0; s < rw.size(); ++s) {
        if (!rw[s].is_array()) throw std::invalid_argument("rewards[" + std::to_string(s) + "] must be an array");
        for (std::size_t a = 0; a < rw[s].size(); ++a)
            mdp.rewards[s].push_back(detail::rational_from_json(rw[s][a], "rewards[" + std::to_string(s) + "][" + std::to_string(a) + "]"));
    }
    validate(mdp);
    return mdp;
}

/// Canonical serialization: reduced fractions, sorted keys, fixed layout.
/// parse_mdp(serialize_mdp(m)) reproduces m exactly.
inline std::string serialize_mdp(const Mdp& mdp) {
    nlohmann::json doc;
    doc["n"] = mdp.n;
    doc["k"] = mdp.k;
    doc["gamma"] = format_rational(mdp.gamma);
    auto tr = nlohmann::json::array();
    for (const auto& per_state : mdp.transitions) {
        auto row_s = nlohmann::json::array();
        for (const auto& per_action : per_state) {
            auto row_a = nlohmann::json::array();
            for (const Rational& p : per_action) row_a.push_back(format_rational(p));
            row_s.push_back(std::move(row_a));
        }
        tr.push_back(std::move(row_s));
    }
    doc["transitions"] = std::move(tr);
    auto rw = nlohmann::json::array();
    for (const auto& per_state : mdp.rewards) {
        auto row_s = nlohmann::json::array();
        for (const Rational& r : per_state) row_s.push_back(format_rational(r));
        rw.push_back(std::move(row_s));
    }
    doc["rewards"] = std::move(rw);
    return doc.dump(1) + "\n";
}

/// Content hash of an instance (FNV-1a 64 over the canonical serialization).
inline std::string mdp_digest(const Mdp& mdp) {
    std::ostringstream os;
    os << std::hex;
    const std::uint64_t h = fnv1a64(serialize_mdp(mdp));
    for (int shift = 60; shift >= 0; shift -= 4) os << ((h >> shift) & 0xf);
    return os.str();
}

inline bool operator==(const Mdp& a, const Mdp& b) {
    return a.n == b.n && a.k == b.k && a.gamma == b.gamma && a.transitions == b.transitions && a.rewards == b.rewards;
}

}  // namespace piwb
