#ifndef DYNRING_AGENT_HPP
#define DYNRING_AGENT_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynring/ids.hpp"
#include "dynring/ring.hpp"

namespace dynring {

enum class AgentState { search, settled, forward, bounce, ret, terminated };

inline const char* to_string(AgentState s) {
    switch (s) {
        case AgentState::search: return "search";
        case AgentState::settled: return "settled";
        case AgentState::forward: return "forward";
        case AgentState::bounce: return "bounce";
        case AgentState::ret: return "return";
        case AgentState::terminated: return "terminated";
    }
    return "?";
}

inline AgentState agent_state_from_string(const std::string& s) {
    if (s == "search") return AgentState::search;
    if (s == "settled") return AgentState::settled;
    if (s == "forward") return AgentState::forward;
    if (s == "bounce") return AgentState::bounce;
    if (s == "return") return AgentState::ret;
    if (s == "terminated") return AgentState::terminated;
    throw std::invalid_argument("unknown agent state: " + s);
}

// The full per-agent protocol state. Everything here is disclosed to
// co-located peers during Look.
struct AgentVars {
    AgentState state = AgentState::search;
    bool winner = false;
    std::optional<std::int64_t> scount;    // successful steps since meeting the settled agent
    std::int64_t fsteps = 0;
    std::int64_t bsteps = 0;               // per current bounce run
    std::int64_t rsteps = 0;               // per current return run
    std::int64_t bblocked = 0;             // per current bounce run
    std::optional<std::int64_t> ttime;     // rounds since the triple formed
    std::optional<std::int64_t> rsize;     // exact ring size, once learned
    std::optional<std::int64_t> sbound;    // upper bound on n, once agreed
    std::int64_t run_counter = 0;
    std::optional<std::int64_t> countdown; // remaining rounds of a move-then-terminate obligation
    int met_settled_in_run = 0;
    std::int64_t phase_index = 0;          // meeting-schedule phase j
    std::int64_t round_in_phase = 0;
    std::int64_t global_round = 0;
    bool met_once = false;                 // left the meeting schedule

    // Achiral extensions; unused (and left at defaults) in chiral runs.
    std::int64_t stime = 0;
    std::optional<PrivateDir> agreed_direction;
    std::optional<std::int64_t> stime_cutoff; // set when the STime termination path is armed
};

// What one agent sees of a co-located alive peer during Look.
struct PeerInfo {
    int index = 0;
    AgentId id{"00"};
    AgentVars vars;                 // snapshot from the end of the previous Compute
    Orientation orientation;        // physically comparable at a shared node
    ArrivalTag tag = ArrivalTag::stayed;
    bool new_meeting = false;       // this co-location was created this round
};

struct Observation {
    std::vector<PeerInfo> peers;    // alive co-located agents only
    ArrivalTag own_tag = ArrivalTag::stayed;
};

// Raised when an observation is impossible under the model; the run is
// aborted with a diagnostic rather than guessing.
struct ProtocolViolation : std::runtime_error {
    std::int64_t round;
    ProtocolViolation(std::int64_t r, const std::string& what)
        : std::runtime_error("protocol violation at round " + std::to_string(r) + ": " + what),
          round(r) {}
};

struct TransitionResult {
    AgentVars vars;
    MoveIntent intent;
    bool terminate = false;
};

} // namespace dynring

#endif // DYNRING_AGENT_HPP
