#ifndef DYNRING_PROTOCOL_CHIRAL_HPP
#define DYNRING_PROTOCOL_CHIRAL_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "dynring/agent.hpp"
#include "dynring/ids.hpp"
#include "dynring/ring.hpp"

// The exploration state machines, expressed as a pure transition function
// from (own vars, observation) to (new vars, move intent, termination).
// Internally the machine reasons in a logical clockwise direction; for
// chiral agents logical clockwise is the agent's right, for achiral agents
// it is the direction agreed at the first meeting.

namespace dynring {

inline std::int64_t ceil_log2(std::int64_t n) {
    std::int64_t p = 0;
    while ((std::int64_t{1} << p) < n) ++p;
    return p;
}

// Meeting schedule with chirality: in phase j (length 2^{j+k}) an agent
// tries to move clockwise for the first val(ID)*2^j rounds, then stays.
inline MoveIntent meeting_intent_chiral(const AgentId& id, std::int64_t round_in_phase,
                                        std::int64_t phase) {
    const auto moving = static_cast<std::int64_t>(value_of(id)) << phase;
    return MoveIntent{round_in_phase < moving, PrivateDir::right};
}

namespace detail {

enum class LogicalDir { cw, ccw };

struct LogicalIntent {
    bool move = false;
    LogicalDir dir = LogicalDir::cw;
};

inline bool peer_arrived(const PeerInfo& p) { return arrived(p.tag); }

// Counters as they will read after the peer's own Compute this round,
// i.e. including the bookkeeping for the move that created this meeting.
inline std::int64_t eff_scount(const PeerInfo& p) {
    return (p.vars.scount ? *p.vars.scount : 0) + (peer_arrived(p) ? 1 : 0);
}
inline std::int64_t eff_fsteps(const PeerInfo& p) {
    return p.vars.fsteps +
           ((p.vars.state == AgentState::forward && peer_arrived(p)) ? 1 : 0);
}
inline std::int64_t eff_bsteps(const PeerInfo& p) {
    return p.vars.bsteps +
           ((p.vars.state == AgentState::bounce && peer_arrived(p)) ? 1 : 0);
}
inline std::int64_t eff_rsteps(const PeerInfo& p) {
    return p.vars.rsteps +
           ((p.vars.state == AgentState::ret && peer_arrived(p)) ? 1 : 0);
}
inline bool peer_knows_n(const PeerInfo& p) { return p.vars.rsize.has_value(); }

struct TransitionCtx {
    bool achiral = false;
    Orientation own_orientation;
};

inline std::int64_t stime_cutoff_value(int k, std::int64_t n) {
    return static_cast<std::int64_t>(k) * k * (std::int64_t{1} << (k + ceil_log2(n) + 4));
}

// Enter a fresh bounce run.
inline void enter_bounce(AgentVars& v) {
    if (v.state == AgentState::bounce || v.state == AgentState::ret) ++v.run_counter;
    v.state = AgentState::bounce;
    v.bsteps = 0;
    v.bblocked = 0;
    v.met_settled_in_run = 0;
}

// Enter a return run; BSteps/BBlocked of the last bounce run stay frozen
// because Events 2 and 3 read them.
inline void enter_return(AgentVars& v) {
    ++v.run_counter;
    v.state = AgentState::ret;
    v.rsteps = 0;
    v.met_settled_in_run = 0;
}

inline void adopt_agreed_direction(AgentVars& v, const TransitionCtx& ctx,
                                   const Orientation& source_orientation,
                                   PrivateDir source_dir) {
    if (v.agreed_direction) return;
    const GlobalDir g = to_global(source_orientation, source_dir);
    v.agreed_direction = to_private(ctx.own_orientation, g);
}

// Core of Algorithms 1-5 plus the achiral wrapper behaviors. Returns the
// updated vars, a logical intent, and whether the agent terminates now.
struct CoreResult {
    AgentVars vars;
    LogicalIntent intent;
    bool terminate = false;
};

inline CoreResult transition_core(const AgentVars& in, const AgentId& id,
                                  const Observation& obs, std::int64_t true_round,
                                  const TransitionCtx& ctx) {
    if (in.state == AgentState::terminated)
        throw ProtocolViolation(true_round, "transition on terminated agent");

    AgentVars v = in;
    v.global_round = true_round;
    v.stime = true_round;

    // Bookkeeping for the previous round's move. State changes happen only
    // in Compute, so the current state is the state the move was made in.
    const bool moved = arrived(obs.own_tag);
    switch (v.state) {
        case AgentState::search:
            if (moved && v.scount) ++*v.scount;
            break;
        case AgentState::forward:
            if (moved) {
                ++v.fsteps;
                if (v.scount) ++*v.scount;
            }
            break;
        case AgentState::bounce:
            if (moved) {
                ++v.bsteps;
                if (v.scount) ++*v.scount;
            } else if (obs.own_tag == ArrivalTag::blocked) {
                ++v.bblocked;
            }
            break;
        case AgentState::ret:
            if (moved) ++v.rsteps;
            break;
        default:
            break;
    }
    if (v.ttime) ++*v.ttime;

    std::vector<const PeerInfo*> newly;
    for (const auto& p : obs.peers)
        if (p.new_meeting) newly.push_back(&p);

    const auto terminate_now = [&](AgentVars vars) {
        return CoreResult{std::move(vars), LogicalIntent{false, LogicalDir::cw}, true};
    };
    const auto any_new_peer_knows = [&] {
        return std::any_of(newly.begin(), newly.end(),
                           [](const PeerInfo* p) { return peer_knows_n(*p); });
    };
    const auto find_new = [&](AgentState s) -> const PeerInfo* {
        for (const auto* p : newly)
            if (p->vars.state == s) return p;
        return nullptr;
    };

    switch (v.state) {
        // ---------------------------------------------------------- search
        case AgentState::search: {
            if (!newly.empty()) {
                // An agent meeting a peer that already knows n terminates
                // immediately; it cannot contribute anything further.
                if (!v.rsize && any_new_peer_knows()) return terminate_now(std::move(v));

                const bool holding = v.countdown.has_value() || v.stime_cutoff.has_value();
                if (!v.met_once && !holding) {
                    v.met_once = true;
                    if (newly.size() >= 2) {
                        const bool all_search = std::all_of(
                            newly.begin(), newly.end(), [](const PeerInfo* p) {
                                return p->vars.state == AgentState::search &&
                                       !p->vars.winner && !p->vars.met_once;
                            });
                        if (all_search) {
                            // Three search agents meet at once: settled,
                            // bounce, forward by ascending identifier value.
                            const auto own = value_of(id);
                            int larger = 0;
                            const PeerInfo* largest_peer = nullptr;
                            std::uint64_t best = own;
                            for (const auto* p : newly) {
                                const auto pv = value_of(p->id);
                                if (pv > own) ++larger;
                                if (pv > best) {
                                    best = pv;
                                    largest_peer = p;
                                }
                            }
                            if (ctx.achiral) {
                                if (largest_peer)
                                    adopt_agreed_direction(v, ctx, largest_peer->orientation,
                                                           PrivateDir::right);
                                else
                                    v.agreed_direction = PrivateDir::right;
                            }
                            if (larger == 2) { // smallest value settles
                                v.state = AgentState::settled;
                                break;
                            }
                            if (larger == 0) { // largest value explores forward
                                v.state = AgentState::forward;
                                v.ttime = 0;
                                v.scount = 0;
                                break;
                            }
                            enter_bounce(v); // middle value probes backward
                            v.ttime = 0;
                            v.scount = 0;
                            v.met_settled_in_run = 1;
                            break;
                        }
                        // Two agents encountered in the first meeting.
                        if (ctx.achiral) {
                            for (const auto* p : newly)
                                if (p->vars.agreed_direction)
                                    adopt_agreed_direction(v, ctx, p->orientation,
                                                           *p->vars.agreed_direction);
                        }
                        enter_bounce(v);
                        v.ttime = 0;
                        if (find_new(AgentState::settled)) {
                            v.met_settled_in_run = 1;
                            v.scount = 0;
                        }
                        break;
                    }
                    const PeerInfo& p = *newly.front();
                    if (p.vars.state == AgentState::settled) {
                        // Keep moving clockwise until the next meeting.
                        if (ctx.achiral && p.vars.agreed_direction)
                            adopt_agreed_direction(v, ctx, p.orientation,
                                                   *p.vars.agreed_direction);
                        v.scount = 0;
                        break;
                    }
                    if (p.vars.state == AgentState::search && !p.vars.winner &&
                        !p.vars.met_once) {
                        // First meeting of two searchers: smaller value
                        // settles, larger value becomes the winner.
                        if (ctx.achiral) {
                            const bool peer_larger = value_of(p.id) > value_of(id);
                            const Orientation& src =
                                peer_larger ? p.orientation : ctx.own_orientation;
                            adopt_agreed_direction(v, ctx, src, PrivateDir::right);
                        }
                        if (value_of(id) < value_of(p.id)) {
                            v.state = AgentState::settled;
                        } else {
                            v.winner = true;
                            v.scount = 0;
                        }
                        break;
                    }
                    if (p.vars.state == AgentState::search && p.vars.winner) {
                        if (ctx.achiral && p.vars.agreed_direction)
                            adopt_agreed_direction(v, ctx, p.orientation,
                                                   *p.vars.agreed_direction);
                        enter_bounce(v);
                        v.ttime = 0;
                        break;
                    }
                    throw ProtocolViolation(true_round,
                                            "impossible peer state in first meeting");
                }
                if (!holding) {
                    // Subsequent meeting.
                    const PeerInfo* p = newly.front();
                    if (newly.size() >= 2) {
                        p = find_new(AgentState::search);
                        if (!p)
                            throw ProtocolViolation(
                                true_round, "two peers in subsequent meeting, none search");
                    }
                    const bool at_settled = find_new(AgentState::settled) != nullptr;
                    if (p->vars.state == AgentState::search) {
                        if (!p->vars.winner) {
                            if (v.rsize)
                                throw ProtocolViolation(true_round,
                                                        "RSize set before triple formation");
                            v.state = AgentState::forward;
                            v.ttime = 0;
                            if (at_settled) v.scount = 0; // triple formed at the settled node
                            break;
                        }
                        // Peer is the winner; peer with RSize was handled by
                        // the knowledge check above.
                        if (ctx.achiral && p->vars.agreed_direction)
                            adopt_agreed_direction(v, ctx, p->orientation,
                                                   *p->vars.agreed_direction);
                        enter_bounce(v);
                        v.ttime = 0;
                        if (at_settled) {
                            v.met_settled_in_run = 1;
                            v.scount = 0;
                        }
                        break;
                    }
                    if (p->vars.state == AgentState::settled) {
                        if (v.winner && !v.rsize) {
                            // Second visit to the settled agent: the number
                            // of successful steps in between equals n.
                            v.rsize = v.scount ? *v.scount : 0;
                            v.scount = 0;
                            if (ctx.achiral) {
                                v.stime_cutoff = stime_cutoff_value(id.length(), *v.rsize);
                            } else {
                                v.countdown = 2 * *v.rsize + 1; // epilogue decrements
                            }
                            break;
                        }
                        // Non-winner passing the settled agent: keep moving.
                        v.scount = 0;
                        break;
                    }
                    throw ProtocolViolation(true_round,
                                            "search agent met forward/bounce/return");
                }
            }
            break;
        }

        // --------------------------------------------------------- settled
        case AgentState::settled: {
            // 1.1: both other agents present and one of them is forward.
            if (obs.peers.size() >= 2) {
                const bool any_forward = std::any_of(
                    obs.peers.begin(), obs.peers.end(),
                    [](const PeerInfo& p) { return p.vars.state == AgentState::forward; });
                if (any_forward) return terminate_now(std::move(v));
            }
            if (!newly.empty()) {
                // 1.2: an agreed upper bound exists, acknowledgment received.
                for (const auto* p : newly)
                    if (p->vars.sbound) return terminate_now(std::move(v));
                // 1.3: we know n and the peer does not.
                if (v.rsize) {
                    for (const auto* p : newly)
                        if (!peer_knows_n(*p)) return terminate_now(std::move(v));
                }
                for (const auto* p : newly) {
                    if (p->vars.state == AgentState::search && p->vars.winner &&
                        !p->vars.rsize && !v.rsize) {
                        // 1.4: the winner is back, so its step count equals n.
                        // Only applies when the winner is alone with us;
                        // with a third searcher present the winner forms a
                        // triple instead and informs nothing.
                        const bool other_search = std::any_of(
                            obs.peers.begin(), obs.peers.end(), [&](const PeerInfo& q) {
                                return &q != p && q.vars.state == AgentState::search;
                            });
                        if (other_search) continue;
                        v.rsize = eff_scount(*p);
                        if (ctx.achiral)
                            v.stime_cutoff = stime_cutoff_value(id.length(), *v.rsize);
                        else
                            v.countdown = 2 * *v.rsize + 1;
                        continue;
                    }
                    if (p->vars.state == AgentState::forward) {
                        // 1.5: a forward peer either already knows n or is
                        // inferring it right now from its own step count.
                        if (!v.rsize)
                            v.rsize = p->vars.rsize ? *p->vars.rsize : eff_scount(*p);
                        if (!v.ttime && p->vars.ttime) v.ttime = *p->vars.ttime + 1;
                        continue;
                    }
                    if (p->vars.state == AgentState::bounce &&
                        p->vars.met_settled_in_run == 1) {
                        // Second meeting in the peer's run: it infers n now.
                        if (!v.rsize) v.rsize = eff_scount(*p);
                        if (!v.ttime && p->vars.ttime) v.ttime = *p->vars.ttime + 1;
                        continue;
                    }
                    if (p->vars.state == AgentState::ret && p->vars.rsize) {
                        if (!v.rsize) v.rsize = *p->vars.rsize;
                        if (!v.ttime && p->vars.ttime) v.ttime = *p->vars.ttime + 1;
                        continue;
                    }
                }
            }
            break;
        }

        // --------------------------------------------------------- forward
        case AgentState::forward: {
            if (!newly.empty()) {
                if (obs.peers.size() >= 2) return terminate_now(std::move(v)); // all three met
                const PeerInfo& p = *newly.front();
                if (v.countdown) {
                    if (p.vars.state == AgentState::settled) return terminate_now(std::move(v));
                    if (!v.rsize && peer_knows_n(p)) return terminate_now(std::move(v));
                } else {
                    // 2.1: knowledge of n must be symmetric.
                    if (static_cast<bool>(v.rsize) != peer_knows_n(p))
                        return terminate_now(std::move(v));
                    if (p.vars.state == AgentState::settled) {
                        // 2.2: second encounter with the settled agent.
                        if (!v.rsize) {
                            if (!v.scount)
                                throw ProtocolViolation(true_round,
                                                        "forward met settled without SCount");
                            v.rsize = *v.scount;
                        }
                        v.scount = 0;
                    } else if (p.vars.state == AgentState::bounce) {
                        // 2.3 / Event 1.
                        if (!v.rsize && !peer_knows_n(p)) {
                            v.sbound = v.fsteps + eff_bsteps(p);
                            v.countdown = *v.sbound + 1;
                        }
                    } else if (p.vars.state == AgentState::ret) {
                        const bool i_catch = arrived(obs.own_tag) && !peer_arrived(p);
                        const bool caught = !arrived(obs.own_tag) && peer_arrived(p);
                        if (i_catch && !v.rsize) {
                            // 2.4.1 / Event 2.
                            v.sbound = v.fsteps + p.vars.bsteps;
                            v.countdown = *v.sbound + 1;
                        } else if (caught && !v.rsize) {
                            // 2.4.2 / Event 3, unless the return agent made
                            // good progress and re-bounces.
                            if (eff_rsteps(p) <= 2 * p.vars.bsteps) {
                                v.sbound = v.fsteps + p.vars.bsteps + 1;
                                v.countdown = *v.sbound + 1;
                            }
                        } else if (!i_catch && !caught) {
                            throw ProtocolViolation(true_round,
                                                    "forward and return met head-on");
                        }
                    } else if (p.vars.state == AgentState::search) {
                        throw ProtocolViolation(true_round, "forward met a search agent");
                    }
                }
            }
            break;
        }

        // ---------------------------------------------------------- bounce
        case AgentState::bounce: {
            if (!newly.empty()) {
                if (obs.peers.size() >= 2) return terminate_now(std::move(v));
                const PeerInfo& p = *newly.front();
                if (v.countdown) {
                    if (p.vars.state == AgentState::settled) return terminate_now(std::move(v));
                    if (!v.rsize && peer_knows_n(p)) return terminate_now(std::move(v));
                } else {
                    if (static_cast<bool>(v.rsize) != peer_knows_n(p))
                        return terminate_now(std::move(v));
                    if (p.vars.state == AgentState::settled) {
                        if (v.met_settled_in_run == 0) {
                            // 2.2.1: first meeting in this run.
                            v.met_settled_in_run = 1;
                            v.scount = 0;
                        } else {
                            // 2.2.2: second meeting in the run closes a full
                            // counterclockwise loop, so SCount equals n.
                            v.rsize = v.scount ? *v.scount : 0;
                            enter_return(v);
                        }
                    } else if (p.vars.state == AgentState::forward) {
                        // 2.3 / Event 1.
                        if (!v.rsize && !peer_knows_n(p)) {
                            v.sbound = eff_fsteps(p) + v.bsteps;
                            v.countdown = *v.sbound + 1;
                        }
                    } else if (p.vars.state == AgentState::search) {
                        throw ProtocolViolation(true_round, "bounce met a search agent");
                    }
                }
            }
            // Too many failed attempts: turn around.
            if (v.state == AgentState::bounce && !v.countdown && v.bblocked > v.bsteps)
                enter_return(v);
            break;
        }

        // ---------------------------------------------------------- return
        case AgentState::ret: {
            if (!newly.empty()) {
                if (obs.peers.size() >= 2) return terminate_now(std::move(v));
                const PeerInfo& p = *newly.front();
                if (v.countdown) {
                    if (p.vars.state == AgentState::settled) return terminate_now(std::move(v));
                    if (!v.rsize && peer_knows_n(p)) return terminate_now(std::move(v));
                } else {
                    if (static_cast<bool>(v.rsize) != peer_knows_n(p))
                        return terminate_now(std::move(v));
                    if (p.vars.state == AgentState::forward) {
                        const bool caught = !arrived(obs.own_tag) && peer_arrived(p);
                        const bool i_catch = arrived(obs.own_tag) && !peer_arrived(p);
                        if (caught && !v.rsize) {
                            // 2.2.1 / Event 2 from the caught side.
                            v.sbound = eff_fsteps(p) + v.bsteps;
                            v.countdown = *v.sbound + 1;
                        } else if (i_catch && !v.rsize) {
                            if (v.rsteps <= 2 * v.bsteps) {
                                // 2.2.2.1 / Event 3.
                                v.sbound = eff_fsteps(p) + v.bsteps + 1;
                                v.countdown = *v.sbound + 1;
                            } else {
                                // 2.2.2.2: probe backward again.
                                enter_bounce(v);
                            }
                        } else if (!caught && !i_catch) {
                            throw ProtocolViolation(true_round,
                                                    "forward and return met head-on");
                        }
                    } else if (p.vars.state == AgentState::search) {
                        throw ProtocolViolation(true_round, "return met a search agent");
                    }
                    // Settled peer: no rule applies while n is unknown.
                }
            }
            break;
        }

        default:
            break;
    }

    // Common epilogue: countdown obligations and the TTime/STime cutoffs.
    if (v.countdown) {
        --*v.countdown;
        if (*v.countdown == 0) return terminate_now(std::move(v));
    }
    if (v.rsize && v.ttime && *v.ttime > 16 * *v.rsize) return terminate_now(std::move(v));
    if (v.stime_cutoff && v.stime > *v.stime_cutoff) return terminate_now(std::move(v));

    // Movement.
    LogicalIntent intent{false, LogicalDir::cw};
    switch (v.state) {
        case AgentState::search:
            if (v.met_once) {
                intent = {true, LogicalDir::cw};
            }
            // else: caller applies the meeting schedule
            break;
        case AgentState::settled:
            intent = {false, LogicalDir::cw};
            break;
        case AgentState::forward:
            intent = {true, LogicalDir::cw};
            break;
        case AgentState::bounce:
            intent = {true, LogicalDir::ccw};
            break;
        case AgentState::ret:
            intent = {true, v.countdown ? LogicalDir::ccw : LogicalDir::cw};
            break;
        default:
            break;
    }
    return CoreResult{std::move(v), intent, false};
}

inline PrivateDir to_private_dir(LogicalDir d, PrivateDir cw_private) {
    const bool cw = (d == LogicalDir::cw);
    if (cw_private == PrivateDir::right)
        return cw ? PrivateDir::right : PrivateDir::left;
    return cw ? PrivateDir::left : PrivateDir::right;
}

} // namespace detail

// Chiral transition: logical clockwise is the agent's right. Messages out
// are the full AgentVars disclosure, which the engine snapshots for peers.
inline TransitionResult transition(const AgentVars& vars, const AgentId& id,
                                   const Orientation& orientation, const Observation& obs,
                                   std::int64_t true_round) {
    detail::TransitionCtx ctx;
    ctx.achiral = false;
    ctx.own_orientation = orientation;
    auto core = detail::transition_core(vars, id, obs, true_round, ctx);
    MoveIntent intent{core.intent.move,
                      detail::to_private_dir(core.intent.dir, PrivateDir::right)};
    if (core.vars.state == AgentState::search && !core.vars.met_once && !core.terminate &&
        !core.vars.countdown) {
        // Still in the meeting schedule.
        const std::int64_t phase_len = std::int64_t{1}
                                       << (core.vars.phase_index + id.length());
        intent = meeting_intent_chiral(id, core.vars.round_in_phase, core.vars.phase_index);
        if (++core.vars.round_in_phase == phase_len) {
            core.vars.round_in_phase = 0;
            ++core.vars.phase_index;
        }
    }
    return TransitionResult{std::move(core.vars), intent, core.terminate};
}

} // namespace dynring

#endif // DYNRING_PROTOCOL_CHIRAL_HPP
