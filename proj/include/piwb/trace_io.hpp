#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "piwb/policy_iteration.hpp"
#include "piwb/sequence_checks.hpp"

namespace piwb {

/**
 * Trace file format: one JSON object per line. The first line is a header
 * with mdp_digest, update_rule, n and k; every following line is a record
 * with iteration, policy, improvement_set and chosen_switch. The value field
 * (rational strings) is present for real runs and may be omitted for
 * abstract sequences.
 */
inline std::string format_trace(const PiTrace& trace) {
    nlohmann::json header;
    header["mdp_digest"] = trace.mdp_digest;
    header["update_rule"] = trace.update_rule;
    header["n"] = trace.n;
    header["k"] = trace.k;
    std::string out = header.dump() + "\n";
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const PiStep& step = trace.steps[i];
        nlohmann::json rec;
        rec["iteration"] = i;
        rec["policy"] = step.policy;
        if (!step.value.empty()) {
            auto vals = nlohmann::json::array();
            for (const Rational& q : step.value) vals.push_back(format_rational(q));
            rec["value"] = std::move(vals);
        }
        auto tset = nlohmann::json::array();
        for (const auto& [s, a] : step.improvement_set.pairs) tset.push_back(nlohmann::json::array({s, a}));
        rec["improvement_set"] = std::move(tset);
        auto sw = nlohmann::json::array();
        for (const auto& [s, a] : step.chosen_switch.pairs) sw.push_back(nlohmann::json::array({s, a}));
        rec["chosen_switch"] = std::move(sw);
        out += rec.dump() + "\n";
    }
    return out;
}

namespace detail {

inline std::vector<std::pair<State, ActionIndex>> pairs_from_json(const nlohmann::json& arr, const std::string& where) {
    if (!arr.is_array()) throw std::invalid_argument(where + " must be an array of [state, action] pairs");
    std::vector<std::pair<State, ActionIndex>> out;
    for (const auto& e : arr) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
            throw std::invalid_argument(where + " entries must be [state, action] integer pairs");
        out.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    return out;
}

}  // namespace detail

inline PiTrace parse_trace(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    PiTrace trace;
    bool have_header = false;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw std::invalid_argument("trace line " + std::to_string(lineno) + ": " + e.what());
        }
        try {
            if (!have_header) {
                if (!rec.contains("n") || !rec.contains("k"))
                    throw std::invalid_argument("trace header must carry n and k");
                trace.n = rec["n"].get<int>();
                trace.k = rec["k"].get<int>();
                trace.mdp_digest = rec.value("mdp_digest", std::string{});
                trace.update_rule = rec.value("update_rule", std::string{"abstract"});
                have_header = true;
                continue;
            }
            PiStep step;
            if (!rec.contains("policy")) throw std::invalid_argument("missing policy");
            step.policy = rec["policy"].get<Policy>();
            if (rec.contains("value")) {
                for (const auto& v : rec["value"]) {
                    if (!v.is_string()) throw std::invalid_argument("values must be rational strings");
                    step.value.push_back(parse_rational(v.get<std::string>()));
                }
            }
            if (rec.contains("improvement_set"))
                step.improvement_set =
                    ImprovementSet::from_pairs(detail::pairs_from_json(rec["improvement_set"], "improvement_set"));
            if (rec.contains("chosen_switch"))
                step.chosen_switch.pairs = detail::pairs_from_json(rec["chosen_switch"], "chosen_switch");
            trace.steps.push_back(std::move(step));
        } catch (const nlohmann::json::exception& e) {
            throw std::invalid_argument("trace line " + std::to_string(lineno) + ": " + e.what());
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("trace line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (!have_header) throw std::invalid_argument("trace file is empty");
    return trace;
}

/// Writes an abstract sequence in the trace format (no values).
inline std::string format_annotated_sequence(const AnnotatedSequence& seq, const std::string& update_rule = "abstract") {
    PiTrace shim;
    shim.mdp_digest = "";
    shim.update_rule = update_rule;
    shim.n = seq.n;
    shim.k = seq.k;
    shim.steps.reserve(seq.size());
    for (const AnnotatedItem& item : seq.items) shim.steps.push_back({item.policy, {}, item.improvement_set, {}});
    return format_trace(shim);
}

inline AnnotatedSequence parse_annotated_sequence(const std::string& text) {
    return to_annotated_sequence(parse_trace(text));
}

}  // namespace piwb
