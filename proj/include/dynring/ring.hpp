#ifndef DYNRING_RING_HPP
#define DYNRING_RING_HPP

#include <optional>
#include <stdexcept>
#include <vector>

// The dynamic ring: global clockwise coordinates 0..n-1, edge e_i joins
// node i and node (i+1) mod n. At most one edge is missing per round.
// Global coordinates exist only in the engine/world; agents never see them.

namespace dynring {

enum class GlobalDir { cw, ccw };
enum class PrivateDir { left, right };

// One agent's fixed private orientation of the ring.
struct Orientation {
    bool right_is_clockwise = true;
};

inline GlobalDir to_global(const Orientation& o, PrivateDir d) {
    const bool right = (d == PrivateDir::right);
    return (right == o.right_is_clockwise) ? GlobalDir::cw : GlobalDir::ccw;
}

inline PrivateDir to_private(const Orientation& o, GlobalDir g) {
    const bool cw = (g == GlobalDir::cw);
    return (cw == o.right_is_clockwise) ? PrivateDir::right : PrivateDir::left;
}

inline int cw_distance(int a, int b, int n) {
    if (n < 3 || a < 0 || a >= n || b < 0 || b >= n)
        throw std::invalid_argument("cw_distance: bad node or size");
    return (b - a + n) % n;
}

inline int ccw_distance(int a, int b, int n) {
    if (n < 3 || a < 0 || a >= n || b < 0 || b >= n)
        throw std::invalid_argument("ccw_distance: bad node or size");
    return (a - b + n) % n;
}

// Either no missing edge or exactly one edge index in 0..n-1.
struct RoundEdgeState {
    std::optional<int> missing;
};

// The Compute decision carried into Move, in the agent's private frame.
struct MoveIntent {
    bool move = false;
    PrivateDir dir = PrivateDir::right; // meaningful only when move
};

enum class ArrivalTag { stayed, blocked, arrived_cw, arrived_ccw };

inline bool arrived(ArrivalTag t) {
    return t == ArrivalTag::arrived_cw || t == ArrivalTag::arrived_ccw;
}

// Edge traversed when leaving node v in direction d.
inline int traversed_edge(int v, GlobalDir d, int n) {
    return d == GlobalDir::cw ? v : (v - 1 + n) % n;
}

struct MoveResolution {
    std::vector<int> positions;
    std::vector<ArrivalTag> tags;
};

// Applies one synchronous Move. Intents are already in global directions;
// an agent whose traversed edge is the missing one stays and is tagged
// blocked. Two agents crossing the same present edge oppositely both
// succeed (swap) without meeting.
inline MoveResolution resolve_moves(const std::vector<int>& positions,
                                    const std::vector<std::optional<GlobalDir>>& intents,
                                    const RoundEdgeState& edges,
                                    const std::vector<bool>& alive, int n) {
    if (positions.size() != intents.size() || positions.size() != alive.size())
        throw std::invalid_argument("resolve_moves: size mismatch");
    MoveResolution out;
    out.positions = positions;
    out.tags.assign(positions.size(), ArrivalTag::stayed);
    for (size_t i = 0; i < positions.size(); ++i) {
        if (positions[i] < 0 || positions[i] >= n)
            throw std::invalid_argument("resolve_moves: position out of range");
        if (!alive[i] || !intents[i]) continue;
        const GlobalDir d = *intents[i];
        if (edges.missing && traversed_edge(positions[i], d, n) == *edges.missing) {
            out.tags[i] = ArrivalTag::blocked;
            continue;
        }
        if (d == GlobalDir::cw) {
            out.positions[i] = (positions[i] + 1) % n;
            out.tags[i] = ArrivalTag::arrived_cw;
        } else {
            out.positions[i] = (positions[i] - 1 + n) % n;
            out.tags[i] = ArrivalTag::arrived_ccw;
        }
    }
    return out;
}

} // namespace dynring

#endif // DYNRING_RING_HPP
