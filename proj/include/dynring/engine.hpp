#ifndef DYNRING_ENGINE_HPP
#define DYNRING_ENGINE_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynring/adversary.hpp"
#include "dynring/agent.hpp"
#include "dynring/protocol_achiral.hpp"
#include "dynring/protocol_chiral.hpp"
#include "dynring/ring.hpp"

// The fully synchronous round loop: Look (message exchange at co-located
// nodes), Compute (pure transitions on same-round snapshots), adversary
// choice, Move. One run is single-threaded and deterministic.

namespace dynring {

enum class ChiralityMode { chiral, achiral };
enum class Task { explore, meet };

struct SimulationConfig {
    int n = 3;
    std::vector<std::string> ids;        // three binary strings, equal length k > 1
    std::vector<int> positions;          // co-location allowed
    std::vector<bool> orientations;      // right_is_clockwise, per agent
    ChiralityMode mode = ChiralityMode::chiral;
    Task task = Task::explore;
    AdversaryStrategy adversary;
    std::optional<std::int64_t> max_rounds; // default: 4x the proven bound
    bool full_trace = true;

    int id_length() const { return ids.empty() ? 0 : static_cast<int>(ids[0].size()); }

    void validate() const {
        if (n < 3) throw std::invalid_argument("config: n must be >= 3");
        if (ids.size() != 3) throw std::invalid_argument("config: exactly three ids required");
        for (const auto& s : ids) {
            if (s.size() < 2) throw std::invalid_argument("config: id length must be > 1");
            if (s.size() != ids[0].size())
                throw std::invalid_argument("config: ids must share one length");
            for (char c : s)
                if (c != '0' && c != '1')
                    throw std::invalid_argument("config: ids must be binary strings");
        }
        if (ids[0] == ids[1] || ids[0] == ids[2] || ids[1] == ids[2])
            throw std::invalid_argument("config: ids must be pairwise distinct");
        if (positions.size() != 3)
            throw std::invalid_argument("config: exactly three positions required");
        for (int p : positions)
            if (p < 0 || p >= n) throw std::invalid_argument("config: position out of range");
        if (orientations.size() != 3)
            throw std::invalid_argument("config: exactly three orientations required");
        if (mode == ChiralityMode::chiral &&
            !(orientations[0] == orientations[1] && orientations[1] == orientations[2]))
            throw std::invalid_argument("config: chiral mode requires equal orientations");
        if (max_rounds && *max_rounds < 1)
            throw std::invalid_argument("config: max_rounds must be positive");
    }
};

// Proven worst-case round bound, by mode and task.
inline std::int64_t proven_bound(ChiralityMode mode, Task task, int k, int n) {
    const std::int64_t logn = ceil_log2(n);
    const std::int64_t k2 = static_cast<std::int64_t>(k) * k;
    switch (task) {
        case Task::meet:
            return mode == ChiralityMode::chiral
                       ? (std::int64_t{1} << (k + logn + 2))
                       : k2 * (std::int64_t{1} << (k + logn + 3));
        case Task::explore:
            return mode == ChiralityMode::chiral
                       ? (std::int64_t{1} << (k + logn + 3)) + 23 * n
                       : k2 * (std::int64_t{1} << (k + logn + 4)) + 23 * n;
    }
    return 0;
}

struct AgentRecord {
    int position = 0;
    AgentVars vars;
    std::optional<GlobalDir> intent; // nullopt = stay
    ArrivalTag tag = ArrivalTag::stayed;
    bool terminated = false;
};

struct MeetingRecord {
    int a = 0;
    int b = 0;
    std::string kind; // "head_on", "initial", or "catch" (a catches b)
};

struct RoundRecord {
    std::int64_t round = 0;
    std::vector<int> missing; // zero or one edge in a conforming trace
    std::array<AgentRecord, 3> agents;
    std::vector<MeetingRecord> meetings;
};

struct SimulationOutcome {
    bool explored = false;
    bool all_terminated = false;
    bool met = false; // first meeting observed (meaningful for Task::meet)
    std::int64_t rounds_elapsed = 0;
    std::int64_t bound = 0;
    bool bound_satisfied = false;
    std::optional<std::string> violation;
};

struct RunResult {
    SimulationOutcome outcome;
    std::vector<RoundRecord> trace;
};

inline RunResult run(const SimulationConfig& config) {
    config.validate();
    const int n = config.n;
    const int k = config.id_length();
    const bool achiral = config.mode == ChiralityMode::achiral;

    std::vector<AgentId> ids;
    std::vector<Orientation> orients;
    for (int i = 0; i < 3; ++i) {
        ids.emplace_back(config.ids[static_cast<size_t>(i)]);
        orients.push_back(Orientation{config.orientations[static_cast<size_t>(i)]});
    }

    RunResult result;
    auto& out = result.outcome;
    out.bound = proven_bound(config.mode, config.task, k, n);
    const std::int64_t max_rounds = config.max_rounds.value_or(4 * out.bound);

    std::vector<int> positions = config.positions;
    std::vector<int> prev_look_positions = positions; // only meaningful after round 0
    std::array<AgentVars, 3> vars{};
    std::array<ArrivalTag, 3> tags{ArrivalTag::stayed, ArrivalTag::stayed, ArrivalTag::stayed};
    std::array<bool, 3> alive{true, true, true};
    Adversary adversary(config.adversary);

    std::set<int> coverage(positions.begin(), positions.end());
    const auto covered = [&] { return static_cast<int>(coverage.size()) == n; };

    const auto note_violation = [&](std::int64_t round, const std::string& what) {
        if (!out.violation)
            out.violation = "round " + std::to_string(round) + ": " + what;
    };

    std::int64_t round = 0;
    for (; round < max_rounds; ++round) {
        // Look: co-location among alive agents; a pair meets when its
        // co-location is newly created (or at round 0).
        std::array<std::array<bool, 3>, 3> together{};
        std::array<std::array<bool, 3>, 3> fresh{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                if (i == j || !alive[i] || !alive[j]) continue;
                together[i][j] = positions[i] == positions[j];
                fresh[i][j] = together[i][j] &&
                              (round == 0 || prev_look_positions[i] != prev_look_positions[j]);
            }

        std::vector<MeetingRecord> meetings;
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                if (!fresh[i][j]) continue;
                out.met = true;
                if (round == 0 && !arrived(tags[i]) && !arrived(tags[j]))
                    meetings.push_back({i, j, "initial"});
                else if (arrived(tags[i]) && arrived(tags[j]))
                    meetings.push_back({i, j, "head_on"});
                else if (arrived(tags[i]))
                    meetings.push_back({i, j, "catch"});
                else
                    meetings.push_back({j, i, "catch"});
            }

        if (config.task == Task::meet && out.met) {
            out.rounds_elapsed = round;
            break;
        }

        // Compute, on snapshots taken before any transition.
        std::array<TransitionResult, 3> results{};
        for (int i = 0; i < 3; ++i) {
            if (!alive[i]) continue;
            if (config.task == Task::meet) {
                AgentVars v = vars[i];
                v.global_round = round;
                v.stime = round;
                MoveIntent intent;
                if (achiral) {
                    const ModifiedId mid = modified_id(ids[static_cast<size_t>(i)]);
                    intent = meeting_intent_achiral(ids[static_cast<size_t>(i)], mid,
                                                    v.phase_index, v.round_in_phase);
                    if (++v.round_in_phase == achiral_phase_length(k, v.phase_index)) {
                        v.round_in_phase = 0;
                        ++v.phase_index;
                    }
                } else {
                    intent = meeting_intent_chiral(ids[static_cast<size_t>(i)],
                                                   v.round_in_phase, v.phase_index);
                    if (++v.round_in_phase == (std::int64_t{1} << (v.phase_index + k))) {
                        v.round_in_phase = 0;
                        ++v.phase_index;
                    }
                }
                results[i] = TransitionResult{std::move(v), intent, false};
                continue;
            }
            Observation obs;
            obs.own_tag = tags[i];
            for (int j = 0; j < 3; ++j) {
                if (j == i || !together[i][j]) continue;
                PeerInfo p;
                p.index = j;
                p.id = ids[static_cast<size_t>(j)];
                p.vars = vars[static_cast<size_t>(j)];
                p.orientation = orients[static_cast<size_t>(j)];
                p.tag = tags[static_cast<size_t>(j)];
                p.new_meeting = fresh[i][j];
                obs.peers.push_back(std::move(p));
            }
            results[i] = achiral
                             ? transition_achiral(vars[static_cast<size_t>(i)],
                                                  ids[static_cast<size_t>(i)],
                                                  orients[static_cast<size_t>(i)], obs, round)
                             : transition(vars[static_cast<size_t>(i)],
                                          ids[static_cast<size_t>(i)],
                                          orients[static_cast<size_t>(i)], obs, round);
        }

        std::array<bool, 3> newly_terminated{};
        std::vector<std::optional<GlobalDir>> intents(3);
        for (int i = 0; i < 3; ++i) {
            if (!alive[i]) continue;
            const auto& res = results[i];
            newly_terminated[i] = res.terminate;
            // Live cross-checks against the world's ground truth.
            if (res.vars.rsize && !vars[static_cast<size_t>(i)].rsize && *res.vars.rsize != n)
                note_violation(round, "agent " + std::to_string(i) + " set RSize=" +
                                          std::to_string(*res.vars.rsize) + " but n=" +
                                          std::to_string(n));
            if (res.vars.sbound && !vars[static_cast<size_t>(i)].sbound &&
                (*res.vars.sbound < n || *res.vars.sbound > 3 * n))
                note_violation(round, "agent " + std::to_string(i) + " set SBound=" +
                                          std::to_string(*res.vars.sbound) +
                                          " outside [n,3n]");
            vars[static_cast<size_t>(i)] = res.vars;
            if (res.terminate && !covered())
                note_violation(round,
                               "agent " + std::to_string(i) + " terminated before coverage");
            if (!res.terminate && res.intent.move)
                intents[static_cast<size_t>(i)] =
                    to_global(orients[static_cast<size_t>(i)], res.intent.dir);
        }

        // Adversary chooses after seeing the computed intents.
        AdversaryView view;
        view.positions = positions;
        view.intents = intents;
        view.alive.assign(alive.begin(), alive.end());
        view.n = n;
        const RoundEdgeState edges = adversary.choose(view, round);

        // Move.
        prev_look_positions = positions;
        std::vector<bool> alive_vec(alive.begin(), alive.end());
        const auto res = resolve_moves(positions, intents, edges, alive_vec, n);
        positions = res.positions;
        for (int i = 0; i < 3; ++i) {
            tags[i] = alive[i] ? res.tags[static_cast<size_t>(i)] : ArrivalTag::stayed;
            if (alive[i]) coverage.insert(positions[static_cast<size_t>(i)]);
        }

        RoundRecord rec;
        rec.round = round;
        if (edges.missing) rec.missing.push_back(*edges.missing);
        rec.meetings = std::move(meetings);
        for (int i = 0; i < 3; ++i) {
            auto& a = rec.agents[static_cast<size_t>(i)];
            a.position = positions[static_cast<size_t>(i)];
            a.vars = vars[static_cast<size_t>(i)];
            a.intent = intents[static_cast<size_t>(i)];
            a.tag = tags[static_cast<size_t>(i)];
            a.terminated = !alive[i] || newly_terminated[i];
        }
        result.trace.push_back(std::move(rec));

        bool all_done = true;
        for (int i = 0; i < 3; ++i) {
            if (newly_terminated[i]) {
                alive[i] = false;
                vars[static_cast<size_t>(i)].state = AgentState::terminated;
            }
            all_done = all_done && !alive[i];
        }
        if (all_done) {
            out.rounds_elapsed = round + 1;
            break;
        }
    }

    out.explored = covered();
    out.all_terminated = !alive[0] && !alive[1] && !alive[2];
    if (config.task == Task::meet) {
        if (!out.met) out.rounds_elapsed = max_rounds;
        out.bound_satisfied = out.met && out.rounds_elapsed <= out.bound;
    } else {
        if (!out.all_terminated) {
            out.rounds_elapsed = max_rounds;
            note_violation(max_rounds, "max_rounds reached without full termination");
        }
        out.bound_satisfied =
            out.all_terminated && out.explored && out.rounds_elapsed <= out.bound;
    }
    return result;
}

} // namespace dynring

#endif // DYNRING_ENGINE_HPP
