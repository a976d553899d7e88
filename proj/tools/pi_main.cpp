#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "piwb/bounds.hpp"
#include "piwb/enumerate.hpp"
#include "piwb/order_regular.hpp"
#include "piwb/policy_iteration.hpp"
#include "piwb/pseudo_sequence.hpp"
#include "piwb/random_mdp.hpp"
#include "piwb/trace_io.hpp"
#include "piwb/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolations = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::invalid_argument("cannot write " + path);
    out << content;
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty())
        std::cout << content;
    else
        write_file(path, content);
}

void print_report(const piwb::ViolationReport& report, std::ostream& os) {
    for (const auto& v : report.violations) {
        os << "violation [" << v.rule << "] items(";
        for (std::size_t i = 0; i < v.indices.size(); ++i) os << (i ? "," : "") << v.indices[i];
        os << "): " << v.witness << "\n";
    }
    os << (report.ok() ? "ok" : "FAIL (" + std::to_string(report.violations.size()) + " violations)") << "\n";
}

piwb::Policy parse_start_policy(const std::string& text, const piwb::Mdp& mdp, std::uint64_t seed) {
    if (text == "zeros") return piwb::Policy(mdp.n, 0);
    if (text == "random") {
        std::mt19937_64 rng(seed);
        piwb::Policy p(mdp.n);
        for (int s = 0; s < mdp.n; ++s) p[s] = static_cast<int>(rng() % static_cast<std::uint64_t>(mdp.k));
        return p;
    }
    piwb::Policy p;
    std::istringstream is(text);
    std::string part;
    while (std::getline(is, part, ',')) p.push_back(std::stoi(part));
    if (!valid_policy(mdp, p)) throw std::invalid_argument("start policy invalid for the instance");
    return p;
}

std::string format_real(long double x) {
    std::ostringstream os;
    os << std::setprecision(17) << static_cast<double>(x);
    return os.str();
}

int cmd_gen(int n, int k, std::uint64_t seed, int support, const std::string& gamma, const std::string& out) {
    const piwb::Mdp mdp = piwb::generate_random_mdp(n, k, seed, support, piwb::parse_rational(gamma));
    emit(out, piwb::serialize_mdp(mdp));
    return kExitOk;
}

int cmd_run(const std::string& mdp_path, const std::string& start, std::uint64_t seed, std::uint64_t cap,
            const std::string& trace_path) {
    const piwb::Mdp mdp = piwb::parse_mdp(read_file(mdp_path));
    const piwb::Policy start_policy = parse_start_policy(start, mdp, seed);
    const piwb::PiTrace trace = piwb::run_policy_iteration(mdp, start_policy, cap);
    emit(trace_path, piwb::format_trace(trace));
    std::cerr << "iterations=" << trace.length() << "\n";
    return kExitOk;
}

int cmd_verify(const std::string& trace_path, const std::string& mdp_path, std::uint64_t budget) {
    const piwb::PiTrace trace = piwb::parse_trace(read_file(trace_path));
    std::optional<piwb::Mdp> mdp;
    if (!mdp_path.empty()) mdp = piwb::parse_mdp(read_file(mdp_path));
    const piwb::ViolationReport report = piwb::verify_trace_full(trace, mdp ? &*mdp : nullptr, budget);
    print_report(report, std::cout);
    return report.ok() ? kExitOk : kExitViolations;
}

int cmd_pseudo(int n, int k, const std::string& out, const std::string& sub_out, bool verify, std::uint64_t budget) {
    const piwb::PseudoPiSequence p = piwb::greedy_subsequence(piwb::build_supersequence(n, k, budget));
    if (!out.empty()) write_file(out, piwb::format_annotated_sequence(p.supersequence, "canonical-supersequence"));
    if (!sub_out.empty()) {
        piwb::AnnotatedSequence sub;
        sub.n = n;
        sub.k = k;
        for (std::size_t idx : p.subsequence_indices) sub.items.push_back(p.supersequence.items[idx]);
        write_file(sub_out, piwb::format_annotated_sequence(sub, "greedy-subsequence"));
    }
    const piwb::Rational closed = piwb::closed_form_length(n, k);
    std::cout << "supersequence=" << p.supersequence.size() << " subsequence=" << p.subsequence_indices.size()
              << " closed_form=" << piwb::format_rational(closed) << "\n";
    std::map<std::size_t, std::size_t> picks;
    for (std::size_t idx : p.subsequence_indices) ++picks[p.supersequence.items[idx].improvement_set.size()];
    std::cout << "picks_by_cardinality=";
    bool first = true;
    for (const auto& [d, count] : picks) {
        std::cout << (first ? "" : ",") << d << ":" << count;
        first = false;
    }
    std::cout << "\n";
    if (verify) {
        const auto report = piwb::verify_pseudo(p);
        print_report(report, std::cout);
        if (!report.ok()) return kExitViolations;
    }
    return kExitOk;
}

int cmd_bound(int n, int k, bool sweep) {
    if (sweep) {
        std::cout << "n,k,ms_bound,improved_bound,fallback\n";
        for (int kk = 2; kk <= k; ++kk) {
            for (int nn = 1; nn <= n; ++nn) {
                const piwb::BoundBreakdown b = piwb::improved_bound(nn, kk);
                std::cout << nn << "," << kk << ","
                          << format_real(mpq_get_d(piwb::mansour_singh_bound(nn, kk).get_mpq_t())) << ","
                          << format_real(b.total_bound) << "," << (b.fallback_used ? 1 : 0) << "\n";
            }
        }
        return kExitOk;
    }
    const piwb::BoundBreakdown b = piwb::improved_bound(n, k);
    std::cout << "n                      " << n << "\n"
              << "k                      " << k << "\n"
              << "f(n) = sqrt(n ln n)    " << format_real(b.f_n) << "\n"
              << "small-set count bound  " << format_real(b.small_set_count_bound) << "\n"
              << "large-set count bound  " << format_real(b.large_set_count_bound) << "\n"
              << "total bound            " << format_real(b.total_bound) << "\n"
              << "fallback (cap k^n)     " << (b.fallback_used ? "yes" : "no") << "\n"
              << "mansour-singh 13k^n/n  " << piwb::format_rational(piwb::mansour_singh_bound(n, k)) << "\n";
    return kExitOk;
}

int cmd_orm_check(const std::string& path) {
    const piwb::BinaryMatrix m = piwb::parse_matrix_lines(read_file(path));
    const auto report = piwb::check_order_regular(m);
    print_report(report, std::cout);
    return report.ok() ? kExitOk : kExitViolations;
}

int cmd_orm_search(int n, std::uint64_t budget, int workers, bool long_run, const std::string& out) {
    if (n >= 6 && !long_run) {
        std::cerr << "n >= 6 takes a long exhaustive search; pass --long to confirm\n";
        return kExitUsage;
    }
    const piwb::SearchResult r = piwb::search_max_rows(n, budget, workers);
    std::cout << "max_rows=" << r.max_rows << " exhausted=" << (r.exhausted ? "yes" : "no")
              << " nodes=" << r.nodes_explored;
    if (r.exhausted) std::cout << " fibonacci_match=" << (piwb::conjecture_check(n, r) ? "yes" : "no");
    std::cout << "\n";
    emit(out, piwb::format_matrix_lines(r.witness));
    return r.exhausted ? kExitOk : kExitBudget;
}

int cmd_sweep(int count, int n_min, int n_max, int k_min, int k_max, std::uint64_t seed0, int support,
              const std::string& gamma, const std::string& csv) {
    if (n_min < 1 || n_min > n_max || k_min < 2 || k_min > k_max) throw std::invalid_argument("bad sweep ranges");
    const piwb::Rational g = piwb::parse_rational(gamma);
    std::ostringstream os;
    os << "n,k,seed,start,iterations,ms_bound,improved_bound\n";
    const int n_span = n_max - n_min + 1;
    const int k_span = k_max - k_min + 1;
    for (int i = 0; i < count; ++i) {
        const int n = n_min + i % n_span;
        const int k = k_min + (i / n_span) % k_span;
        const std::uint64_t seed = seed0 + static_cast<std::uint64_t>(i);
        const piwb::Mdp mdp = piwb::generate_random_mdp(n, k, seed, std::min(support, n), g);
        const piwb::PiTrace trace = piwb::run_policy_iteration(mdp, piwb::Policy(n, 0));
        os << n << "," << k << "," << seed << ",zeros," << trace.length() << ","
           << format_real(mpq_get_d(piwb::mansour_singh_bound(n, k).get_mpq_t())) << ","
           << format_real(piwb::improved_bound(n, k).total_bound) << "\n";
    }
    emit(csv, os.str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact policy-iteration workbench"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a seeded random instance");
    int gen_n = 3, gen_k = 2, gen_support = 2;
    std::uint64_t gen_seed = 1;
    std::string gen_gamma = "9/10", gen_out;
    gen->add_option("--n", gen_n, "states")->required();
    gen->add_option("--k", gen_k, "actions per state")->required();
    gen->add_option("--seed", gen_seed, "prng seed")->required();
    gen->add_option("--support", gen_support, "successors per (state, action)");
    gen->add_option("--gamma", gen_gamma, "discount factor as p/q");
    gen->add_option("--out", gen_out, "output path (stdout when omitted)");

    // run
    auto* run = app.add_subcommand("run", "run greedy policy iteration");
    std::string run_mdp, run_start = "zeros", run_trace;
    std::uint64_t run_seed = 1, run_cap = 0;
    run->add_option("--mdp", run_mdp, "instance file")->required();
    run->add_option("--start", run_start, "zeros | random | comma-separated actions");
    run->add_option("--seed", run_seed, "seed for --start random");
    run->add_option("--cap", run_cap, "iteration cap override (default k^n)");
    run->add_option("--trace", run_trace, "trace output path (stdout when omitted)");

    // verify
    auto* verify = app.add_subcommand("verify", "check a recorded trace");
    std::string verify_trace, verify_mdp;
    std::uint64_t verify_budget = std::uint64_t{1} << 16;
    verify->add_option("--trace", verify_trace, "trace file")->required();
    verify->add_option("--mdp", verify_mdp, "instance file for exact recomputation");
    verify->add_option("--budget", verify_budget, "policy-space cap for the neighbor-chain check");

    // pseudo
    auto* pseudo = app.add_subcommand("pseudo", "build the canonical supersequence and its jumping subsequence");
    int pseudo_n = 3, pseudo_k = 3;
    std::string pseudo_out, pseudo_sub_out;
    bool pseudo_verify = false;
    std::uint64_t pseudo_budget = piwb::kDefaultEnumerationBudget;
    pseudo->add_option("--n", pseudo_n, "states")->required();
    pseudo->add_option("--k", pseudo_k, "actions per state")->required();
    pseudo->add_option("--out", pseudo_out, "supersequence output path");
    pseudo->add_option("--sub-out", pseudo_sub_out, "subsequence output path");
    pseudo->add_flag("--verify", pseudo_verify, "run the full pairwise verification (quadratic)");
    pseudo->add_option("--budget", pseudo_budget, "enumeration budget for k^n");

    // bound
    auto* bound = app.add_subcommand("bound", "evaluate the iteration bounds");
    int bound_n = 10, bound_k = 2;
    bool bound_sweep = false;
    bound->add_option("--n", bound_n, "states (sweep: maximum n)")->required();
    bound->add_option("--k", bound_k, "actions (sweep: maximum k)")->required();
    bound->add_flag("--sweep", bound_sweep, "emit CSV over 1..n x 2..k");

    // orm
    auto* orm = app.add_subcommand("orm", "order-regular matrices");
    orm->require_subcommand(1);
    auto* orm_check = orm->add_subcommand("check", "check a matrix file");
    std::string orm_file;
    orm_check->add_option("--file", orm_file, "matrix as lines of 0/1")->required();
    auto* orm_search = orm->add_subcommand("search", "search the longest matrix");
    int orm_n = 3, orm_workers = 1;
    std::uint64_t orm_budget = UINT64_MAX;
    bool orm_long = false;
    std::string orm_out;
    orm_search->add_option("--n", orm_n, "columns")->required();
    orm_search->add_option("--budget", orm_budget, "node budget");
    orm_search->add_option("--workers", orm_workers, "worker threads");
    orm_search->add_flag("--long", orm_long, "allow n >= 6 (long run)");
    orm_search->add_option("--out", orm_out, "witness output path (stdout when omitted)");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "batch experiments over random instances");
    int sweep_count = 10, sweep_n_min = 2, sweep_n_max = 8, sweep_k_min = 2, sweep_k_max = 3, sweep_support = 3;
    std::uint64_t sweep_seed0 = 1000;
    std::string sweep_gamma = "9/10", sweep_csv;
    sweep->add_option("--count", sweep_count, "instances to run")->required();
    sweep->add_option("--n-min", sweep_n_min, "smallest n");
    sweep->add_option("--n-max", sweep_n_max, "largest n");
    sweep->add_option("--k-min", sweep_k_min, "smallest k");
    sweep->add_option("--k-max", sweep_k_max, "largest k");
    sweep->add_option("--seed0", sweep_seed0, "first seed");
    sweep->add_option("--support", sweep_support, "successors per (state, action)");
    sweep->add_option("--gamma", sweep_gamma, "discount factor as p/q");
    sweep->add_option("--csv", sweep_csv, "CSV output path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (gen->parsed()) return cmd_gen(gen_n, gen_k, gen_seed, gen_support, gen_gamma, gen_out);
        if (run->parsed()) return cmd_run(run_mdp, run_start, run_seed, run_cap, run_trace);
        if (verify->parsed()) return cmd_verify(verify_trace, verify_mdp, verify_budget);
        if (pseudo->parsed())
            return cmd_pseudo(pseudo_n, pseudo_k, pseudo_out, pseudo_sub_out, pseudo_verify, pseudo_budget);
        if (bound->parsed()) return cmd_bound(bound_n, bound_k, bound_sweep);
        if (orm_check->parsed()) return cmd_orm_check(orm_file);
        if (orm_search->parsed()) return cmd_orm_search(orm_n, orm_budget, orm_workers, orm_long, orm_out);
        if (sweep->parsed())
            return cmd_sweep(sweep_count, sweep_n_min, sweep_n_max, sweep_k_min, sweep_k_max, sweep_seed0,
                             sweep_support, sweep_gamma, sweep_csv);
    } catch (const piwb::BudgetExceeded& e) {
        std::cerr << "budget exhausted: " << e.what() << "\n";
        return kExitBudget;
    } catch (const std::logic_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitViolations;
    }
    return kExitUsage;
}
