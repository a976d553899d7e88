#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>

#include "piwb/mdp.hpp"

namespace piwb {

/**
 * Seeded random instance generator. The algorithm is fixed so that instances
 * are reproducible byte for byte:
 *
 *  - PRNG: std::mt19937_64 seeded with `seed`; bounded draws are
 *    `rng() % bound` (the engine is fully specified by the standard, the
 *    distribution classes are not, so they are not used).
 *  - For each (state, action), in row-major order: `support` distinct
 *    successors chosen by a partial Fisher-Yates shuffle of [0, n), then
 *    integer weights in [1, 8] per successor; probabilities are
 *    weight / (sum of weights), which sums to exactly 1.
 *  - Rewards are x/16 with x drawn from [0, 16], so rewards lie in [0, 1].
 *
 * gamma defaults to 9/10.
 */
inline Mdp generate_random_mdp(int n, int k, std::uint64_t seed, int support, const Rational& gamma = Rational(9, 10)) {
    if (n < 1) throw std::invalid_argument("generate_random_mdp: n must be >= 1");
    if (k < 2) throw std::invalid_argument("generate_random_mdp: k must be >= 2");
    if (support < 1 || support > n) throw std::invalid_argument("generate_random_mdp: need 1 <= support <= n");
    if (!(gamma > 0 && gamma < 1)) throw std::invalid_argument("generate_random_mdp: gamma must be in (0,1)");

    std::mt19937_64 rng(seed);
    const auto draw = [&rng](std::uint64_t bound) { return static_cast<int>(rng() % bound); };

    Mdp mdp;
    mdp.n = n;
    mdp.k = k;
    mdp.gamma = gamma;
    mdp.transitions.assign(n, std::vector<std::vector<Rational>>(k, std::vector<Rational>(n, Rational(0))));
    mdp.rewards.assign(n, std::vector<Rational>(k));

    std::vector<int> pool(n);
    for (int s = 0; s < n; ++s) {
        for (int a = 0; a < k; ++a) {
            std::iota(pool.begin(), pool.end(), 0);
            for (int i = 0; i < support; ++i) std::swap(pool[i], pool[i + draw(static_cast<std::uint64_t>(n - i))]);
            std::vector<int> weights(support);
            int total = 0;
            for (int i = 0; i < support; ++i) {
                weights[i] = 1 + draw(8);
                total += weights[i];
            }
            for (int i = 0; i < support; ++i) {
                Rational p(weights[i], total);
                p.canonicalize();
                mdp.transitions[s][a][pool[i]] = p;
            }
            Rational r(draw(17), 16);
            r.canonicalize();
            mdp.rewards[s][a] = r;
        }
    }
    validate(mdp);
    return mdp;
}

}  // namespace piwb
