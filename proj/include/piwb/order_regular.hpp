#pragma once

#include <atomic>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "piwb/sequence_checks.hpp"

namespace piwb {

/**
 * Binary matrix with rows packed into machine words; column c of a row lives
 * at bit (cols - 1 - c), so numeric order on the packed rows equals
 * lexicographic order on the 0/1 strings.
 */
struct BinaryMatrix {
    int cols = 0;
    std::vector<std::uint32_t> rows;

    int row_count() const { return static_cast<int>(rows.size()); }
    int get(int r, int c) const { return (rows[r] >> (cols - 1 - c)) & 1u; }
    bool operator==(const BinaryMatrix&) const = default;
};

inline BinaryMatrix parse_matrix_lines(const std::string& text) {
    BinaryMatrix m;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (m.cols == 0) {
            if (line.size() > 31) throw std::invalid_argument("matrix rows wider than 31 columns are not supported");
            m.cols = static_cast<int>(line.size());
        } else if (static_cast<int>(line.size()) != m.cols) {
            throw std::invalid_argument("ragged rows: line \"" + line + "\" has width != " + std::to_string(m.cols));
        }
        std::uint32_t row = 0;
        for (char ch : line) {
            if (ch != '0' && ch != '1') throw std::invalid_argument("matrix entries must be 0 or 1");
            row = (row << 1) | static_cast<std::uint32_t>(ch - '0');
        }
        m.rows.push_back(row);
    }
    if (m.rows.empty()) throw std::invalid_argument("matrix file holds no rows");
    return m;
}

inline std::string format_matrix_lines(const BinaryMatrix& m) {
    std::string out;
    for (int r = 0; r < m.row_count(); ++r) {
        for (int c = 0; c < m.cols; ++c) out += static_cast<char>('0' + m.get(r, c));
        out += '\n';
    }
    return out;
}

/**
 * Order-regular condition: for every row pair i < j there is a column where
 * row i flips to row i+1's value and that value persists through rows j and
 * j+1, with the convention that the row after the last one repeats the last.
 * The last two rows must additionally be distinct.
 */
inline ViolationReport check_order_regular(const BinaryMatrix& m) {
    if (m.cols < 1 || m.cols > 31) throw std::invalid_argument("check_order_regular: need 1 <= columns <= 31");
    const int rows = m.row_count();
    const std::uint32_t colmask = (m.cols == 31) ? 0x7fffffffu : ((1u << m.cols) - 1u);
    ViolationReport report;
    for (int i = 0; i + 1 < rows; ++i) {
        const std::uint32_t flip = m.rows[i] ^ m.rows[i + 1];
        for (int j = i + 1; j < rows; ++j) {
            const std::uint32_t after = (j + 1 < rows) ? m.rows[j + 1] : m.rows[rows - 1];
            const std::uint32_t held = ~(m.rows[i + 1] ^ m.rows[j]) & ~(m.rows[j] ^ after) & colmask;
            if ((flip & held) == 0) {
                std::ostringstream os;
                os << "no column flips at row " << i << " and persists through rows " << j << " and " << j + 1;
                report.add({static_cast<std::size_t>(i), static_cast<std::size_t>(j)}, "matrix-condition", os.str());
            }
        }
    }
    if (rows >= 2 && m.rows[rows - 1] == m.rows[rows - 2])
        report.add({static_cast<std::size_t>(rows - 2), static_cast<std::size_t>(rows - 1)}, "last-rows-distinct",
                   "the last two rows are identical");
    return report;
}

inline std::uint64_t fibonacci(int i) {
    if (i < 1) throw std::invalid_argument("fibonacci: index must be >= 1");
    if (i > 93) throw std::invalid_argument("fibonacci: index too large for 64 bits");
    std::uint64_t a = 1, b = 1;
    for (int t = 2; t < i; ++t) {
        const std::uint64_t c = a + b;
        a = b;
        b = c;
    }
    return i == 1 ? 1 : b;
}

struct SearchResult {
    int n = 0;
    int max_rows = 0;
    BinaryMatrix witness;
    std::uint64_t nodes_explored = 0;
    bool exhausted = false;
};

namespace detail {

/**
 * Depth-first enumeration of order-regular matrices over a fixed first two
 * rows. A pair (i, j) is checked the moment row j+1 is placed, and the
 * convention-closed pairs (i, last) are checked when a prefix is considered
 * as a complete candidate. Any repeated row would make some pair
 * unsatisfiable, so candidates are drawn from unused rows only.
 *
 * Besides the fixed all-zeros first row (column complementation), the search
 * exploits column permutations: columns that agree on every placed row are
 * interchangeable, so each new row only needs to be tried in class-sorted
 * form, with its ones packed toward the most significant columns of every
 * class of the partition induced by the rows above it. Within-class
 * permutations leave all previous rows unchanged, so every valid matrix has
 * such a representative and the maximum row count is unaffected.
 */
struct OrmSearcher {
    int n;
    std::uint32_t full;
    std::uint64_t budget;
    std::uint64_t nodes = 0;
    bool exhausted = true;
    int best_len = 0;
    std::vector<std::uint32_t> best_rows;

    std::vector<std::uint32_t> rows;
    std::vector<std::uint32_t> flip;  // flip[i] = rows[i] ^ rows[i+1]
    std::vector<char> used;
    std::vector<std::vector<std::uint32_t>> classes;     // column partition per depth
    std::vector<std::vector<std::uint32_t>> witness_ws;  // per-depth scratch
    std::vector<std::vector<std::uint32_t>> candidate_ws;

    OrmSearcher(int n_, std::uint64_t budget_) : n(n_), full((1u << n_) - 1u), budget(budget_), used(1u << n_, 0) {}

    /// All class-sorted rows for a partition: per class, one of its packed
    /// prefixes (0, top bit, top two bits, ...), combined across classes.
    static void class_sorted_rows(const std::vector<std::uint32_t>& partition, std::vector<std::uint32_t>& out) {
        out.assign(1, 0u);
        std::size_t write = 1;
        for (std::uint32_t cls : partition) {
            const std::size_t base = write;
            std::uint32_t prefix = 0, rest = cls;
            while (rest) {
                const std::uint32_t bit = 1u << (31 - __builtin_clz(rest));
                prefix |= bit;
                rest &= ~bit;
                for (std::size_t i = 0; i < base; ++i) {
                    if (write < out.size())
                        out[write++] = out[i] | prefix;
                    else {
                        out.push_back(out[i] | prefix);
                        ++write;
                    }
                }
            }
        }
        out.resize(write);
        std::sort(out.begin(), out.end());
    }

    static std::vector<std::uint32_t> refine(const std::vector<std::uint32_t>& partition, std::uint32_t row) {
        std::vector<std::uint32_t> out;
        out.reserve(partition.size() + 4);
        for (std::uint32_t cls : partition) {
            if (const std::uint32_t inside = cls & row) out.push_back(inside);
            if (const std::uint32_t outside = cls & ~row) out.push_back(outside);
        }
        return out;
    }

    void run(std::uint32_t second_row) {
        rows = {0, second_row};
        flip = {second_row};
        used.assign(used.size(), 0);
        used[0] = used[second_row] = 1;
        // Depth never exceeds the number of distinct rows; size every
        // per-depth scratch up front so references stay valid across the
        // recursion.
        const std::size_t max_depth = used.size() + 2;
        classes.resize(max_depth);
        witness_ws.resize(max_depth);
        candidate_ws.resize(max_depth);
        classes[2] = refine({full}, second_row);
        best_len = 0;
        best_rows.clear();
        nodes = 0;
        exhausted = true;
        descend();
    }

    void descend() {
        if (++nodes > budget) {
            exhausted = false;
            return;
        }
        const int t = static_cast<int>(rows.size());
        const std::uint32_t last = rows[t - 1];

        // Witness masks for the pairs (i, t-1), i <= t-2: columns that flip at
        // row i and persist through the last row. An empty mask kills the node
        // outright: neither the convention nor any extension can recover it.
        auto& w = witness_ws[t];
        w.clear();
        std::uint32_t forced = 0;
        for (int i = 0; i + 1 < t; ++i) {
            const std::uint32_t m = flip[i] & ~(rows[i + 1] ^ last) & full;
            if (m == 0) return;
            if ((m & (m - 1)) == 0) forced |= m;  // single witness column must persist
            w.push_back(m);
        }
        if (t > best_len) {
            best_len = t;
            best_rows = rows;
        }

        auto& cand = candidate_ws[t];
        class_sorted_rows(classes[t], cand);
        for (std::uint32_t r : cand) {
            if (used[r]) continue;
            const std::uint32_t step = last ^ r;
            if (step & forced) continue;
            // Placing r as row t closes the pairs (i, t-1) for all i <= t-2.
            bool feasible = true;
            for (std::uint32_t m : w) {
                if ((m & ~step) == 0) {
                    feasible = false;
                    break;
                }
            }
            if (!feasible) continue;
            rows.push_back(r);
            flip.push_back(step);
            used[r] = 1;
            classes[t + 1] = refine(classes[t], r);
            descend();
            used[r] = 0;
            flip.pop_back();
            rows.pop_back();
            if (!exhausted) return;
        }
    }
};

}  // namespace detail

/**
 * Longest order-regular matrix with n columns, by exhaustive depth-first
 * search up to symmetry. Complementing a column preserves the condition, so
 * the first row is fixed to all zeros; permuting columns preserves it too,
 * so rows are only tried class-sorted (see OrmSearcher) and the returned
 * witness is the least matrix of maximal row count under that normalization.
 * Work splits into one task per canonical second row, each with an equal
 * share of the node budget, so max_rows, the witness and exhausted do not
 * depend on the worker count.
 */
inline SearchResult search_max_rows(int n, std::uint64_t node_budget = UINT64_MAX, int worker_count = 1) {
    if (n < 1) throw std::invalid_argument("search_max_rows: n must be >= 1");
    if (n > 16) throw std::invalid_argument("search_max_rows: n > 16 is not tractable here");
    if (worker_count < 1) throw std::invalid_argument("search_max_rows: worker_count must be >= 1");

    // Canonical second rows: the ones packed into the most significant
    // columns, one task per popcount.
    std::vector<std::uint32_t> seeds;
    for (int j = 1; j <= n; ++j) seeds.push_back(((1u << j) - 1u) << (n - j));
    const std::uint64_t task_count = seeds.size();
    const std::uint64_t per_task = node_budget == UINT64_MAX ? UINT64_MAX : std::max<std::uint64_t>(1, node_budget / task_count);

    struct TaskResult {
        int best_len = 0;
        std::vector<std::uint32_t> best_rows;
        std::uint64_t nodes = 0;
        bool exhausted = true;
    };
    std::vector<TaskResult> results(task_count);
    std::atomic<std::uint64_t> next{0};

    const auto work = [&]() {
        detail::OrmSearcher searcher(n, per_task);
        while (true) {
            const std::uint64_t task = next.fetch_add(1);
            if (task >= task_count) break;
            searcher.run(seeds[task]);
            results[task] = {searcher.best_len, searcher.best_rows, searcher.nodes, searcher.exhausted};
        }
    };

    const int threads = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(worker_count), task_count));
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int i = 0; i < threads; ++i) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    SearchResult out;
    out.n = n;
    out.exhausted = true;
    out.nodes_explored = 0;
    out.max_rows = 1;  // the single zero row is always a valid matrix
    out.witness = BinaryMatrix{n, {0}};
    for (const TaskResult& r : results) {
        out.nodes_explored += r.nodes;
        out.exhausted = out.exhausted && r.exhausted;
        if (r.best_len > out.max_rows) {
            out.max_rows = r.best_len;
            out.witness = BinaryMatrix{n, r.best_rows};
        }
    }
    return out;
}

/// True iff an exhausted search matched the Fibonacci prediction F_{n+2}.
inline bool conjecture_check(int n, const SearchResult& result) {
    if (!result.exhausted) throw std::invalid_argument("conjecture_check: requires an exhausted search");
    return static_cast<std::uint64_t>(result.max_rows) == fibonacci(n + 2);
}

}  // namespace piwb
