#include <catch2/catch.hpp>

#include "piwb/pseudo_sequence.hpp"
#include "piwb/random_mdp.hpp"
#include "piwb/sequence_checks.hpp"
#include "test_helpers.hpp"

using namespace piwb;
using piwb::testing::acyclicity_by_enumeration;
using piwb::testing::Lcg;
using piwb::testing::make_item;
using piwb::testing::random_abstract_sequence;
using piwb::testing::two_state_self_loop;

TEST_CASE("non-inclusion witnesses and violations", "[seq]") {
    SECTION("hand-checked violating pair") {
        AnnotatedSequence seq;
        seq.n = 1;
        seq.k = 2;
        seq.items.push_back(make_item({0}, {{0, 1}}));
        seq.items.push_back(make_item({1}, {{0, 0}}));
        const auto report = check_non_inclusion(seq);
        REQUIRE_FALSE(report.ok());
        REQUIRE(report.violations.size() == 1);
        CHECK(report.violations[0].indices == std::vector<std::size_t>{0, 1});
        CHECK(report.violations[0].rule == "non-inclusion");
        CHECK_THAT(report.violations[0].witness, Catch::Contains("s=0"));
    }
    SECTION("empty improvement set of the earlier policy always violates") {
        AnnotatedSequence seq;
        seq.n = 2;
        seq.k = 2;
        seq.items.push_back(make_item({0, 0}, {}));
        seq.items.push_back(make_item({1, 1}, {{0, 0}}));
        CHECK_FALSE(check_non_inclusion(seq).ok());
    }
    SECTION("real traces satisfy non-inclusion") {
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const int n = 2 + static_cast<int>(seed % 4);
            const int k = 2 + static_cast<int>(seed % 2);
            const Mdp mdp = generate_random_mdp(n, k, seed, std::min(n, 3));
            const PiTrace trace = run_policy_iteration(mdp, Policy(n, 0));
            CAPTURE(seed);
            REQUIRE(check_non_inclusion(to_annotated_sequence(trace)).ok());
        }
    }
    SECTION("violations come out sorted by (i, j)") {
        AnnotatedSequence seq;
        seq.n = 1;
        seq.k = 3;
        seq.items.push_back(make_item({0}, {{0, 1}}));
        seq.items.push_back(make_item({1}, {{0, 0}}));
        seq.items.push_back(make_item({2}, {{0, 0}}));
        const auto report = check_non_inclusion(seq);
        REQUIRE(report.violations.size() >= 2);
        for (std::size_t t = 0; t + 1 < report.violations.size(); ++t) {
            const auto& a = report.violations[t].indices;
            const auto& b = report.violations[t + 1].indices;
            REQUIRE(std::make_pair(a[0], a[1]) < std::make_pair(b[0], b[1]));
        }
    }
}

TEST_CASE("k=2 subset shortcut", "[seq]") {
    SECTION("strict subset of improvement states violates") {
        AnnotatedSequence seq;
        seq.n = 3;
        seq.k = 2;
        seq.items.push_back(make_item({0, 0, 0}, {{1, 1}}));
        seq.items.push_back(make_item({0, 1, 0}, {{1, 0}, {2, 1}}));
        const auto report = check_non_inclusion_k2(seq);
        REQUIRE_FALSE(report.ok());
        CHECK(report.violations[0].rule == "non-inclusion-k2");
    }
    SECTION("empty sequence is fine") {
        AnnotatedSequence seq;
        seq.n = 2;
        seq.k = 2;
        CHECK(check_non_inclusion_k2(seq).ok());
    }
    SECTION("requires k = 2") {
        AnnotatedSequence seq;
        seq.n = 2;
        seq.k = 3;
        CHECK_THROWS_AS(check_non_inclusion_k2(seq), std::invalid_argument);
    }
    SECTION("full check passing implies subset check passing") {
        // Random subsets of a sequence that passes the full check still pass
        // it (the check is pairwise), giving a rich family of k=2 inputs.
        Lcg rng{2024};
        for (int trial = 0; trial < 60; ++trial) {
            const int n = 2 + static_cast<int>(rng(3));
            const AnnotatedSequence whole = build_supersequence(n, 2);
            AnnotatedSequence seq;
            seq.n = n;
            seq.k = 2;
            for (const AnnotatedItem& item : whole.items)
                if (rng(2) == 0) seq.items.push_back(item);
            CAPTURE(trial, n);
            REQUIRE(check_non_inclusion(seq).ok());
            REQUIRE(check_non_inclusion_k2(seq).ok());
        }
    }
    SECTION("agrees on real k=2 traces") {
        for (std::uint64_t seed = 40; seed < 55; ++seed) {
            const Mdp mdp = generate_random_mdp(4, 2, seed, 2);
            const auto seq = to_annotated_sequence(run_policy_iteration(mdp, Policy(4, 0)));
            CAPTURE(seed);
            REQUIRE(check_non_inclusion(seq).ok());
            REQUIRE(check_non_inclusion_k2(seq).ok());
        }
    }
}

TEST_CASE("acyclicity", "[seq]") {
    SECTION("hand-checked violation: earlier policy reachable by one switch") {
        AnnotatedSequence seq;
        seq.n = 2;
        seq.k = 2;
        seq.items.push_back(make_item({0, 0}, {}));
        seq.items.push_back(make_item({1, 0}, {{0, 0}}));
        const auto report = check_acyclicity(seq);
        REQUIRE_FALSE(report.ok());
        CHECK(report.violations[0].rule == "acyclicity");
        CHECK_THAT(report.violations[0].witness, Catch::Contains("(0,0)"));
    }
    SECTION("duplicate policies violate via the empty subset") {
        AnnotatedSequence seq;
        seq.n = 1;
        seq.k = 2;
        seq.items.push_back(make_item({0}, {{0, 1}}));
        seq.items.push_back(make_item({0}, {{0, 1}}));
        const auto report = check_acyclicity(seq);
        REQUIRE_FALSE(report.ok());
        CHECK_THAT(report.violations[0].witness, Catch::Contains("identical"));
    }
    SECTION("matches brute-force subset enumeration on random abstract inputs") {
        Lcg rng{77};
        for (int trial = 0; trial < 300; ++trial) {
            const AnnotatedSequence seq = random_abstract_sequence(rng, 3, 3, 4, 6);
            const auto fast = check_acyclicity(seq);
            const auto slow = acyclicity_by_enumeration(seq);
            CAPTURE(trial);
            REQUIRE(fast.violations.size() == slow.violations.size());
            for (std::size_t t = 0; t < fast.violations.size(); ++t)
                REQUIRE(fast.violations[t].indices == slow.violations[t].indices);
        }
    }
    SECTION("non-inclusion implies acyclicity") {
        Lcg rng{555};
        for (int trial = 0; trial < 60; ++trial) {
            const int n = 2 + static_cast<int>(rng(3));
            const int k = 2 + static_cast<int>(rng(2));
            const AnnotatedSequence whole = build_supersequence(n, k);
            AnnotatedSequence seq;
            seq.n = n;
            seq.k = k;
            for (const AnnotatedItem& item : whole.items)
                if (rng(2) == 0) seq.items.push_back(item);
            CAPTURE(trial, n, k);
            REQUIRE(check_non_inclusion(seq).ok());
            REQUIRE(check_acyclicity(seq).ok());
        }
        // And on arbitrary abstract inputs, a non-inclusion pass must never
        // coincide with an acyclicity failure.
        for (int trial = 0; trial < 300; ++trial) {
            const AnnotatedSequence seq = random_abstract_sequence(rng, 3, 2, 3, 3);
            if (check_non_inclusion(seq).ok()) {
                CAPTURE(trial);
                REQUIRE(check_acyclicity(seq).ok());
            }
        }
    }
    SECTION("real traces are acyclic") {
        for (std::uint64_t seed = 60; seed < 72; ++seed) {
            const Mdp mdp = generate_random_mdp(4, 3, seed, 2);
            REQUIRE(check_acyclicity(to_annotated_sequence(run_policy_iteration(mdp, Policy(4, 0)))).ok());
        }
    }
}

TEST_CASE("repeated improvement-state sets", "[seq]") {
    SECTION("k=2 repetition bound is 1") {
        AnnotatedSequence seq;
        seq.n = 2;
        seq.k = 2;
        seq.items.push_back(make_item({0, 0}, {{0, 1}}));
        seq.items.push_back(make_item({1, 0}, {{0, 0}}));
        const auto out = count_repeated_state_sets(seq);
        REQUIRE_FALSE(out.report.ok());
        CHECK(out.report.violations[0].rule == "repetition-bound");
        CHECK(out.counts.at({0}) == 2);
    }
    SECTION("single item is fine") {
        AnnotatedSequence seq;
        seq.n = 2;
        seq.k = 2;
        seq.items.push_back(make_item({0, 0}, {{0, 1}, {1, 1}}));
        const auto out = count_repeated_state_sets(seq);
        CHECK(out.report.ok());
        CHECK(out.counts.at({0, 1}) == 1);
    }
    SECTION("k=3 tolerates (k-1)^d repeats and flags one more") {
        AnnotatedSequence seq;
        seq.n = 2;
        seq.k = 3;
        // d = 1, bound (k-1)^1 = 2.
        seq.items.push_back(make_item({0, 2}, {{0, 2}}));
        seq.items.push_back(make_item({1, 2}, {{0, 2}}));
        CHECK(count_repeated_state_sets(seq).report.ok());
        seq.items.push_back(make_item({0, 2}, {{0, 1}}));
        const auto out = count_repeated_state_sets(seq);
        REQUIRE_FALSE(out.report.ok());
        CHECK(out.counts.at({0}) == 3);
    }
}

TEST_CASE("tensor rank certificates", "[seq]") {
    SECTION("single policy has rank 1") {
        const std::vector<AnnotatedItem> group{make_item({0, 1, 2}, {{0, 2}, {1, 2}})};
        const auto r = tensor_rank_check(group, 3);
        CHECK(r.rank == 1);
        CHECK(r.ok);
    }
    SECTION("canonical d=2 block at n=k=3 has full rank 4") {
        std::vector<AnnotatedItem> group;
        for (ActionIndex a0 : {0, 1})
            for (ActionIndex a1 : {0, 1})
                group.push_back(make_item({a0, a1, 2}, {{0, 2}, {1, 2}}));
        const auto r = tensor_rank_check(group, 3);
        CHECK(r.rank == 4);
        CHECK(r.ok);
    }
    SECTION("duplicates drop the rank") {
        std::vector<AnnotatedItem> group;
        group.push_back(make_item({0, 1}, {{0, 1}, {1, 0}}));
        group.push_back(make_item({0, 1}, {{0, 1}, {1, 0}}));
        const auto r = tensor_rank_check(group, 2);
        CHECK(r.rank == 1);
        CHECK_FALSE(r.ok);
    }
    SECTION("exceeding the dimension bound fails even when independent") {
        // d = 1, k = 2: the zero-sum subspace has dimension 1, so two
        // policies sharing one improvement state can never certify.
        std::vector<AnnotatedItem> group;
        group.push_back(make_item({0, 0}, {{0, 1}}));
        group.push_back(make_item({1, 0}, {{0, 0}}));
        const auto r = tensor_rank_check(group, 2);
        CHECK_FALSE(r.ok);
    }
    SECTION("inconsistent state sets are rejected") {
        std::vector<AnnotatedItem> group;
        group.push_back(make_item({0, 0}, {{0, 1}}));
        group.push_back(make_item({0, 0}, {{1, 1}}));
        CHECK_THROWS_AS(tensor_rank_check(group, 2), std::invalid_argument);
    }
    SECTION("empty group is trivially fine") { CHECK(tensor_rank_check({}, 2).ok); }
    SECTION("groups from real traces always certify") {
        for (std::uint64_t seed = 200; seed < 215; ++seed) {
            const Mdp mdp = generate_random_mdp(5, 3, seed, 2);
            const auto seq = to_annotated_sequence(run_policy_iteration(mdp, Policy(5, 0)));
            for (const auto& [states, members] : group_by_state_set(seq)) {
                std::vector<AnnotatedItem> group;
                for (std::size_t idx : members) group.push_back(seq.items[idx]);
                CAPTURE(seed, states);
                REQUIRE(tensor_rank_check(group, 3).ok);
            }
        }
    }
}

TEST_CASE("repetition counts and tensor certificates agree on conforming sequences", "[seq][property]") {
    // For groups extracted from sequences that pass non-inclusion, the
    // counting bound and the rank certificate must reach the same verdict.
    const auto agree = [](const AnnotatedSequence& seq) {
        REQUIRE(count_repeated_state_sets(seq).report.ok());
        for (const auto& [states, members] : group_by_state_set(seq)) {
            std::vector<AnnotatedItem> group;
            for (std::size_t idx : members) group.push_back(seq.items[idx]);
            BigInt bound;
            mpz_ui_pow_ui(bound.get_mpz_t(), seq.k - 1, states.size());
            const bool count_ok = bound >= static_cast<long>(members.size());
            REQUIRE(tensor_rank_check(group, seq.k).ok == count_ok);
        }
    };
    Lcg rng{9001};
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 2 + static_cast<int>(rng(2));
        const int k = 2 + static_cast<int>(rng(2));
        AnnotatedSequence seq;
        seq.n = n;
        seq.k = k;
        for (const AnnotatedItem& item : build_supersequence(n, k).items)
            if (rng(2) == 0) seq.items.push_back(item);
        CAPTURE(trial, n, k);
        REQUIRE(check_non_inclusion(seq).ok());
        agree(seq);
    }
    for (std::uint64_t seed = 500; seed < 512; ++seed) {
        const Mdp mdp = generate_random_mdp(4, 3, seed, 2);
        const auto seq = to_annotated_sequence(run_policy_iteration(mdp, Policy(4, 0)));
        CAPTURE(seed);
        agree(seq);
    }
}

TEST_CASE("neighbor chains", "[seq]") {
    SECTION("two-state example: chain through an intermediate neighbor") {
        const Mdp mdp = two_state_self_loop();
        const DominationDag dag = domination_dag(mdp);
        const auto chain = find_neighbor_chain(dag, {0, 0}, {1, 1}, 2);
        REQUIRE(chain.has_value());
        REQUIRE(chain->size() == 2);
        CHECK(((*chain)[0] == Policy{0, 1} || (*chain)[0] == Policy{1, 0}));
        CHECK((*chain)[1] == Policy{1, 1});
    }
    SECTION("d = 1 returns just hi") {
        const Mdp mdp = two_state_self_loop();
        const DominationDag dag = domination_dag(mdp);
        const auto chain = find_neighbor_chain(dag, {0, 0}, {1, 0}, 1);
        REQUIRE(chain.has_value());
        CHECK(*chain == std::vector<Policy>{{1, 0}});
    }
    SECTION("preconditions are enforced") {
        const Mdp mdp = two_state_self_loop();
        const DominationDag dag = domination_dag(mdp);
        CHECK_THROWS_AS(find_neighbor_chain(dag, {0, 0}, {1, 1}, 1), std::invalid_argument);
        CHECK_THROWS_AS(find_neighbor_chain(dag, {1, 1}, {0, 0}, 2), std::invalid_argument);
    }
    SECTION("every greedy step admits a chain with full betweenness") {
        for (std::uint64_t seed = 300; seed < 325; ++seed) {
            const int n = 2 + static_cast<int>(seed % 4);
            const Mdp mdp = generate_random_mdp(n, 2, seed, 2);
            const DominationDag dag = domination_dag(mdp);
            const Evaluator ev(mdp);
            const PiTrace trace = run_policy_iteration(mdp, Policy(n, 0));
            for (std::size_t i = 0; i + 1 < trace.length(); ++i) {
                const Policy& lo = trace.steps[i].policy;
                const Policy& hi = trace.steps[i + 1].policy;
                const int d = static_cast<int>(trace.steps[i].chosen_switch.size());
                const auto chain = find_neighbor_chain(dag, lo, hi, d);
                CAPTURE(seed, i);
                REQUIRE(chain.has_value());
                REQUIRE(static_cast<int>(chain->size()) == d);
                REQUIRE(chain->back() == hi);
                const ValueVector v_lo = trace.steps[i].value;
                const ValueVector v_hi = trace.steps[i + 1].value;
                for (std::size_t t = 0; t < chain->size(); ++t) {
                    const ValueVector v = ev.evaluate((*chain)[t]);
                    REQUIRE(compare_values(v, v_lo) == Comparison::StrictlyGreater);
                    REQUIRE(dominates(compare_values(v_hi, v)));
                    if (t + 1 < chain->size()) {
                        REQUIRE(hamming_distance((*chain)[t], (*chain)[t + 1]) == 1);
                        REQUIRE(dominates(compare_values(ev.evaluate((*chain)[t + 1]), v)));
                    }
                }
            }
        }
    }
}
