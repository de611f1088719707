#ifndef DYNRING_PROTOCOL_ACHIRAL_HPP
#define DYNRING_PROTOCOL_ACHIRAL_HPP

#include <cstdint>

#include "dynring/agent.hpp"
#include "dynring/ids.hpp"
#include "dynring/protocol_chiral.hpp"
#include "dynring/ring.hpp"

// Contiguous Agreement direction schedule, the achiral meeting schedule,
// and the achiral exploration wrapper that agrees on a direction at the
// first meeting and then delegates to the shared state machines.

namespace dynring {

// Direction chosen in round round_in_phase (0-based) of phase j: left if
// the corresponding bit of Dup(MID, 2^j) is 0, otherwise right. Phase j
// has length 2^j * |MID|; Dup is indexed without materializing it.
inline PrivateDir ca_direction(const ModifiedId& mid, std::int64_t phase,
                               std::int64_t round_in_phase) {
    const std::int64_t source = (round_in_phase >> phase) + 1; // 1-indexed
    return mid.bit(static_cast<int>(source)) == 0 ? PrivateDir::left : PrivateDir::right;
}

// Achiral meeting schedule: phase j splits into |MID| blocks of length
// 2^{j+k}; the block's MID bit picks left/right, and within the block the
// agent moves for the first val(ID)*2^j rounds and then stays.
inline MoveIntent meeting_intent_achiral(const AgentId& id, const ModifiedId& mid,
                                         std::int64_t phase, std::int64_t round_in_phase) {
    const int k = id.length();
    const std::int64_t block_len = std::int64_t{1} << (phase + k);
    const std::int64_t block = round_in_phase / block_len;
    const std::int64_t offset = round_in_phase % block_len;
    const PrivateDir dir = mid.bit(static_cast<int>(block + 1)) == 0 ? PrivateDir::left
                                                                     : PrivateDir::right;
    const auto moving = static_cast<std::int64_t>(value_of(id)) << phase;
    return MoveIntent{offset < moving, dir};
}

inline std::int64_t achiral_phase_length(int k, std::int64_t phase) {
    const std::int64_t mid_len = static_cast<std::int64_t>(k) * (k - 1) / 2 + k + 1;
    return (std::int64_t{1} << (phase + k)) * mid_len;
}

// Achiral transition: before the first meeting the agent follows the
// achiral meeting schedule; afterwards logical clockwise is the direction
// agreed at that meeting and the shared machines take over.
inline TransitionResult transition_achiral(const AgentVars& vars, const AgentId& id,
                                           const Orientation& orientation,
                                           const Observation& obs, std::int64_t true_round) {
    detail::TransitionCtx ctx;
    ctx.achiral = true;
    ctx.own_orientation = orientation;
    auto core = detail::transition_core(vars, id, obs, true_round, ctx);

    MoveIntent intent{false, PrivateDir::right};
    if (core.vars.state == AgentState::search && !core.vars.met_once && !core.terminate) {
        const ModifiedId mid = modified_id(id);
        intent = meeting_intent_achiral(id, mid, core.vars.phase_index,
                                        core.vars.round_in_phase);
        if (++core.vars.round_in_phase == achiral_phase_length(id.length(),
                                                               core.vars.phase_index)) {
            core.vars.round_in_phase = 0;
            ++core.vars.phase_index;
        }
    } else if (core.intent.move) {
        if (!core.vars.agreed_direction)
            throw ProtocolViolation(true_round, "moving without an agreed direction");
        intent = MoveIntent{true,
                            detail::to_private_dir(core.intent.dir,
                                                   *core.vars.agreed_direction)};
    }
    return TransitionResult{std::move(core.vars), intent, core.terminate};
}

} // namespace dynring

#endif // DYNRING_PROTOCOL_ACHIRAL_HPP
