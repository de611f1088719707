#ifndef DYNRING_ORACLE_HPP
#define DYNRING_ORACLE_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynring/ids.hpp"
#include "dynring/protocol_achiral.hpp"
#include "dynring/ring.hpp"

// Brute-force checkers for the small-instance claims the protocol relies
// on. Each checker uses its own minimal movement model, independent of the
// engine, so a shared bug cannot hide itself.

namespace dynring {

// Feasibility cutoffs; beyond these the enumerations stop fitting in a
// minute of CPU.
inline constexpr int kLemmaMainMinN = 3;
inline constexpr int kLemmaMainMaxN = 5;
inline constexpr int kAgreementMinK = 2;
inline constexpr int kAgreementMaxK = 5;
inline constexpr int kContiguousMaxJ = 6;

enum class LemmaPremise { standard, inverted };

struct LemmaMainResult {
    bool pass = true;
    int n = 0;
    std::int64_t placements_checked = 0;   // placements passing the premise filter
    std::int64_t placements_excluded = 0;  // placements rejected by the filter
    std::uint64_t states_explored = 0;
    double sequences_per_placement = 0;    // (n+1)^{2n}, deduplicated by the DFS
    std::optional<std::string> counterexample;
};

namespace oracle_detail {

// Movement model for the two-mover claim: r1 pinned at node 0, r2 and r3
// attempt one clockwise step per round, the adversary removes at most one
// edge. Only three per-round outcomes are distinct: both move, r2 blocked,
// r3 blocked. Returns true iff on every adversary path r2 reaches r1 or r3
// reaches r2 within the remaining rounds.
inline bool always_meets(int p2, int p3, int rounds_left, int n,
                         std::vector<signed char>& memo, std::uint64_t& states) {
    if (p2 == 0 || p2 == p3) return true;
    if (rounds_left == 0) return false;
    const size_t key =
        (static_cast<size_t>(rounds_left) * static_cast<size_t>(n) + static_cast<size_t>(p2)) *
            static_cast<size_t>(n) +
        static_cast<size_t>(p3);
    if (memo[key]) return memo[key] > 0;
    ++states;
    const int p2m = (p2 + 1) % n;
    const int p3m = (p3 + 1) % n;
    const bool ok = always_meets(p2m, p3m, rounds_left - 1, n, memo, states) && // both move
                    always_meets(p2, p3m, rounds_left - 1, n, memo, states) &&  // r2 blocked
                    always_meets(p2m, p3, rounds_left - 1, n, memo, states);    // r3 blocked
    memo[key] = ok ? 1 : -1;
    return ok;
}

} // namespace oracle_detail

// Exhaustive check of the core meeting claim: with r1 static at a node and
// r2, r3 trying to move clockwise for 2n rounds from any placement with
// 0 <= d_cw(r1,r3) < d_cw(r1,r2), on every adversary sequence either r2
// meets r1 or r3 meets r2.
inline LemmaMainResult check_lemma_main(int n,
                                        LemmaPremise premise = LemmaPremise::standard) {
    if (n < kLemmaMainMinN || n > kLemmaMainMaxN)
        throw std::invalid_argument("lemma-main: n must be in [" +
                                    std::to_string(kLemmaMainMinN) + "," +
                                    std::to_string(kLemmaMainMaxN) + "]");
    LemmaMainResult res;
    res.n = n;
    res.sequences_per_placement = std::pow(static_cast<double>(n + 1), 2.0 * n);
    const int horizon = 2 * n;
    std::vector<signed char> memo;
    // Placements as clockwise distances from r1: d3 for r3, d2 for r2.
    for (int d3 = 0; d3 < n; ++d3)
        for (int d2 = 1; d2 < n; ++d2) {
            if (d3 == d2) continue;
            const bool qualifies =
                premise == LemmaPremise::standard ? d3 < d2 : d3 > d2 && d3 < d2;
            if (!qualifies) {
                ++res.placements_excluded;
                continue;
            }
            ++res.placements_checked;
            memo.assign(static_cast<size_t>(horizon + 1) * n * n, 0);
            if (!oracle_detail::always_meets(d2, d3, horizon, n, memo,
                                             res.states_explored)) {
                res.pass = false;
                if (!res.counterexample)
                    res.counterexample = "placement d_cw(r1,r3)=" + std::to_string(d3) +
                                         ", d_cw(r1,r2)=" + std::to_string(d2) +
                                         " admits an adversary sequence without the meeting";
            }
        }
    return res;
}

struct AgreementResult {
    bool pass = true;
    int k = 0;
    std::int64_t triples_checked = 0;
    std::optional<std::string> counterexample;
};

namespace oracle_detail {

inline std::string id_string(unsigned bits, int k) {
    std::string s(static_cast<size_t>(k), '0');
    for (int i = 0; i < k; ++i)
        if (bits & (1u << (k - 1 - i))) s[static_cast<size_t>(i)] = '1';
    return s;
}

} // namespace oracle_detail

// For every triple of distinct k-bit ids, the modified identifiers admit
// all four index patterns: all-equal, and each agent differing alone.
inline AgreementResult check_agreement_indices(int k) {
    if (k < kAgreementMinK || k > kAgreementMaxK)
        throw std::invalid_argument("agreement: k must be in [" +
                                    std::to_string(kAgreementMinK) + "," +
                                    std::to_string(kAgreementMaxK) + "]");
    AgreementResult res;
    res.k = k;
    const unsigned count = 1u << k;
    for (unsigned a = 0; a < count; ++a)
        for (unsigned b = a + 1; b < count; ++b)
            for (unsigned c = b + 1; c < count; ++c) {
                ++res.triples_checked;
                const ModifiedId m1 = modified_id(AgentId(oracle_detail::id_string(a, k)));
                const ModifiedId m2 = modified_id(AgentId(oracle_detail::id_string(b, k)));
                const ModifiedId m3 = modified_id(AgentId(oracle_detail::id_string(c, k)));
                bool all_eq = false, r3_diff = false, r2_diff = false, r1_diff = false;
                for (int i = 1; i <= m1.length(); ++i) {
                    const int b1 = m1.bit(i), b2 = m2.bit(i), b3 = m3.bit(i);
                    if (b1 == b2 && b2 == b3) all_eq = true;
                    else if (b1 == b2) r3_diff = true;
                    else if (b1 == b3) r2_diff = true;
                    else r1_diff = true;
                }
                if (!(all_eq && r3_diff && r2_diff && r1_diff)) {
                    res.pass = false;
                    if (!res.counterexample)
                        res.counterexample = "triple " + oracle_detail::id_string(a, k) +
                                             "," + oracle_detail::id_string(b, k) + "," +
                                             oracle_detail::id_string(c, k) +
                                             " lacks a pattern";
                }
            }
    return res;
}

struct ContiguousResult {
    bool pass = true;
    int k = 0;
    int j = 0;
    std::int64_t cases_checked = 0; // triples x orientation assignments
    std::optional<std::string> counterexample;
};

// In phase j of the direction-agreement schedule, every triple of distinct
// ids under every orientation assignment shares one global direction for at
// least 2^j consecutive rounds.
inline ContiguousResult check_contiguous_block(int k, int j) {
    if (k < kAgreementMinK || k > kAgreementMaxK)
        throw std::invalid_argument("contiguous: k must be in [" +
                                    std::to_string(kAgreementMinK) + "," +
                                    std::to_string(kAgreementMaxK) + "]");
    if (j < 0 || j > kContiguousMaxJ)
        throw std::invalid_argument("contiguous: j must be in [0," +
                                    std::to_string(kContiguousMaxJ) + "]");
    ContiguousResult res;
    res.k = k;
    res.j = j;
    const unsigned count = 1u << k;
    const std::int64_t mid_len = static_cast<std::int64_t>(k) * (k - 1) / 2 + k + 1;
    const std::int64_t phase_len = (std::int64_t{1} << j) * mid_len;
    const std::int64_t need = std::int64_t{1} << j;
    for (unsigned a = 0; a < count; ++a)
        for (unsigned b = a + 1; b < count; ++b)
            for (unsigned c = b + 1; c < count; ++c) {
                const ModifiedId mids[3] = {
                    modified_id(AgentId(oracle_detail::id_string(a, k))),
                    modified_id(AgentId(oracle_detail::id_string(b, k))),
                    modified_id(AgentId(oracle_detail::id_string(c, k)))};
                for (int mask = 0; mask < 8; ++mask) {
                    ++res.cases_checked;
                    Orientation orients[3] = {Orientation{(mask & 1) != 0},
                                              Orientation{(mask & 2) != 0},
                                              Orientation{(mask & 4) != 0}};
                    std::int64_t best = 0, run = 0;
                    std::optional<GlobalDir> prev;
                    for (std::int64_t r = 0; r < phase_len; ++r) {
                        const GlobalDir g0 = to_global(orients[0], ca_direction(mids[0], j, r));
                        const GlobalDir g1 = to_global(orients[1], ca_direction(mids[1], j, r));
                        const GlobalDir g2 = to_global(orients[2], ca_direction(mids[2], j, r));
                        if (g0 == g1 && g1 == g2) {
                            run = (prev && *prev == g0) ? run + 1 : 1;
                            prev = g0;
                        } else {
                            run = 0;
                            prev.reset();
                        }
                        if (run > best) best = run;
                    }
                    if (best < need) {
                        res.pass = false;
                        if (!res.counterexample)
                            res.counterexample =
                                "triple " + oracle_detail::id_string(a, k) + "," +
                                oracle_detail::id_string(b, k) + "," +
                                oracle_detail::id_string(c, k) + " orientation mask " +
                                std::to_string(mask) + ": longest agreed block " +
                                std::to_string(best) + " < " + std::to_string(need);
                    }
                }
            }
    return res;
}

} // namespace dynring

#endif // DYNRING_ORACLE_HPP
