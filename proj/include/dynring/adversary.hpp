#ifndef DYNRING_ADVERSARY_HPP
#define DYNRING_ADVERSARY_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynring/ring.hpp"

// Per-round choice of the missing edge. The adversary is omniscient and
// adaptive: it sees positions, liveness and this round's computed intents
// before choosing. All strategies are deterministic given their parameters.

namespace dynring {

// splitmix64: tiny documented generator so traces reproduce across
// implementations given the seed.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

enum class AdversaryKind { none, random, scripted, front_blocker, gap_keeper, cursor };

struct AdversaryStrategy {
    AdversaryKind kind = AdversaryKind::none;
    std::uint64_t seed = 0;      // random
    double p_none = 0.5;         // random
    std::vector<std::optional<int>> script; // scripted / cursor
    bool cycle = false;          // scripted: repeat the script instead of falling to none
    int target = 0;              // front_blocker
};

// The adversary's view of one round, after Compute.
struct AdversaryView {
    std::vector<int> positions;
    std::vector<std::optional<GlobalDir>> intents;
    std::vector<bool> alive;
    int n = 0;
};

class Adversary {
  public:
    explicit Adversary(AdversaryStrategy s)
        : strategy_(std::move(s)), rng_(strategy_.seed) {}

    const AdversaryStrategy& strategy() const { return strategy_; }

    RoundEdgeState choose(const AdversaryView& w, std::int64_t round) {
        switch (strategy_.kind) {
            case AdversaryKind::none:
                return {};
            case AdversaryKind::random: {
                const double u = rng_.next_double();
                if (u < strategy_.p_none) return {};
                const auto e = static_cast<int>(rng_.next() % static_cast<std::uint64_t>(w.n));
                return {e};
            }
            case AdversaryKind::scripted:
            case AdversaryKind::cursor: {
                if (strategy_.script.empty()) return {};
                auto idx = static_cast<size_t>(round);
                if (idx >= strategy_.script.size()) {
                    if (!strategy_.cycle) return {}; // exhausted behaves as none
                    idx %= strategy_.script.size();
                }
                auto choice = strategy_.script[idx];
                if (choice && (*choice < 0 || *choice >= w.n))
                    throw std::invalid_argument("scripted adversary: edge out of range");
                return {choice};
            }
            case AdversaryKind::front_blocker: {
                const auto t = static_cast<size_t>(strategy_.target);
                if (t >= w.positions.size())
                    throw std::invalid_argument("front_blocker: bad target");
                if (!w.alive[t] || !w.intents[t]) return {};
                return {traversed_edge(w.positions[t], *w.intents[t], w.n)};
            }
            case AdversaryKind::gap_keeper: {
                // Block the moving agent of the closest approaching pair.
                int best_dist = w.n + 1;
                std::optional<int> edge;
                for (size_t i = 0; i < w.positions.size(); ++i) {
                    if (!w.alive[i] || !w.intents[i]) continue;
                    const int next = *w.intents[i] == GlobalDir::cw
                                         ? (w.positions[i] + 1) % w.n
                                         : (w.positions[i] - 1 + w.n) % w.n;
                    for (size_t j = 0; j < w.positions.size(); ++j) {
                        if (j == i || !w.alive[j]) continue;
                        const int before = std::min(cw_distance(w.positions[i], w.positions[j], w.n),
                                                    ccw_distance(w.positions[i], w.positions[j], w.n));
                        const int after = std::min(cw_distance(next, w.positions[j], w.n),
                                                   ccw_distance(next, w.positions[j], w.n));
                        if (after < before && before < best_dist) {
                            best_dist = before;
                            edge = traversed_edge(w.positions[i], *w.intents[i], w.n);
                        }
                    }
                }
                return {edge};
            }
        }
        return {};
    }

  private:
    AdversaryStrategy strategy_;
    SplitMix64 rng_;
};

inline const char* to_string(AdversaryKind k) {
    switch (k) {
        case AdversaryKind::none: return "none";
        case AdversaryKind::random: return "random";
        case AdversaryKind::scripted: return "scripted";
        case AdversaryKind::front_blocker: return "front_blocker";
        case AdversaryKind::gap_keeper: return "gap_keeper";
        case AdversaryKind::cursor: return "cursor";
    }
    return "?";
}

} // namespace dynring

#endif // DYNRING_ADVERSARY_HPP
