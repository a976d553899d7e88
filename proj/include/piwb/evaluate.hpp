#pragma once

#include <utility>
#include <vector>

#include "piwb/linalg.hpp"
#include "piwb/mdp.hpp"
#include "piwb/policy.hpp"

namespace piwb {

/**
 * Exact policy evaluation for the discounted criterion: v is the unique
 * solution of (I - gamma P) v = r, solved fraction-free over the integers.
 *
 * The constructor clears denominators once per (state, action) pair so that
 * repeated evaluations (policy space sweeps, brute-force oracles) only
 * assemble integer rows and solve.
 */
class Evaluator {
public:
    explicit Evaluator(const Mdp& mdp) : mdp_(&mdp), n_(mdp.n), k_(mdp.k) {
        validate(mdp);
        rows_.resize(static_cast<std::size_t>(n_) * k_);
        BigInt lcm, scale;
        for (int s = 0; s < n_; ++s) {
            for (int a = 0; a < k_; ++a) {
                std::vector<Rational> coeff(n_);
                for (int t = 0; t < n_; ++t) {
                    coeff[t] = -mdp.gamma * mdp.transitions[s][a][t];
                    if (t == s) coeff[t] += 1;
                }
                const Rational& reward = mdp.rewards[s][a];
                lcm = reward.get_den();
                for (int t = 0; t < n_; ++t) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), coeff[t].get_den().get_mpz_t());
                auto& row = rows_[static_cast<std::size_t>(s) * k_ + a];
                row.resize(n_ + 1);
                for (int t = 0; t < n_; ++t) {
                    mpz_divexact(scale.get_mpz_t(), lcm.get_mpz_t(), coeff[t].get_den().get_mpz_t());
                    row[t] = coeff[t].get_num() * scale;
                }
                mpz_divexact(scale.get_mpz_t(), lcm.get_mpz_t(), reward.get_den().get_mpz_t());
                row[n_] = reward.get_num() * scale;
            }
        }
    }

    const Mdp& mdp() const { return *mdp_; }

    ValueVector evaluate(const Policy& policy) const {
        require_policy(policy);
        thread_local std::vector<std::vector<BigInt>> ws;
        ws.resize(n_);
        for (int s = 0; s < n_; ++s) {
            const auto& src = rows_[static_cast<std::size_t>(s) * k_ + policy[s]];
            ws[s].resize(n_ + 1);
            for (int j = 0; j <= n_; ++j) ws[s][j] = src[j];
        }
        return solve_bareiss_augmented(ws);
    }

    /// One-step lookahead value r(s,a) + gamma * P(s,a) . v.
    Rational lookahead(const ValueVector& v, State s, ActionIndex a) const {
        Rational q = mdp_->rewards[s][a];
        Rational acc(0);
        const auto& p = mdp_->transitions[s][a];
        for (int t = 0; t < n_; ++t) {
            if (sgn(p[t]) != 0) acc += p[t] * v[t];
        }
        q += mdp_->gamma * acc;
        return q;
    }

    /// Improvement set via the one-step lookahead test:
    /// (s,a) improves iff r(s,a) + gamma P(s,a).v > v(s).
    ImprovementSet improvement_set_fast(const Policy& policy, const ValueVector& v) const {
        std::vector<std::pair<State, ActionIndex>> pairs;
        for (int s = 0; s < n_; ++s) {
            for (int a = 0; a < k_; ++a) {
                if (a == policy[s]) continue;
                if (lookahead(v, s, a) > v[s]) pairs.emplace_back(s, a);
            }
        }
        return ImprovementSet{std::move(pairs)};  // generated sorted
    }

    ImprovementSet improvement_set_fast(const Policy& policy) const {
        return improvement_set_fast(policy, evaluate(policy));
    }

    /// Literal improvement set: evaluate every single-switch neighbor and
    /// keep the pairs whose switch strictly dominates. Reference oracle for
    /// improvement_set_fast.
    ImprovementSet improvement_set_oracle(const Policy& policy) const {
        const ValueVector v = evaluate(policy);
        std::vector<std::pair<State, ActionIndex>> pairs;
        Policy neighbor = policy;
        for (int s = 0; s < n_; ++s) {
            for (int a = 0; a < k_; ++a) {
                if (a == policy[s]) continue;
                neighbor[s] = a;
                if (compare_values(evaluate(neighbor), v) == Comparison::StrictlyGreater) pairs.emplace_back(s, a);
            }
            neighbor[s] = policy[s];
        }
        return ImprovementSet{std::move(pairs)};
    }

private:
    void require_policy(const Policy& policy) const {
        if (!valid_policy(*mdp_, policy)) throw std::invalid_argument("policy invalid for mdp");
    }

    const Mdp* mdp_;
    int n_, k_;
    std::vector<std::vector<BigInt>> rows_;  // denominator-cleared (I - gamma P | r) rows per (s,a)
};

inline ValueVector evaluate_policy(const Mdp& mdp, const Policy& policy) {
    return Evaluator(mdp).evaluate(policy);
}

inline ImprovementSet improvement_set_oracle(const Mdp& mdp, const Policy& policy) {
    return Evaluator(mdp).improvement_set_oracle(policy);
}

inline ImprovementSet improvement_set_fast(const Mdp& mdp, const Policy& policy) {
    return Evaluator(mdp).improvement_set_fast(policy);
}

}  // namespace piwb
