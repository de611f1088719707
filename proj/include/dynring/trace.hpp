#ifndef DYNRING_TRACE_HPP
#define DYNRING_TRACE_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dynring/engine.hpp"

// JSONL trace format: one header object, one object per round, one outcome
// object. ordered_json keeps key order fixed so identical runs serialize to
// identical bytes.

namespace dynring {

using json = nlohmann::ordered_json;

inline const char* to_string(GlobalDir d) { return d == GlobalDir::cw ? "cw" : "ccw"; }
inline const char* to_string(PrivateDir d) { return d == PrivateDir::right ? "right" : "left"; }
inline const char* to_string(ArrivalTag t) {
    switch (t) {
        case ArrivalTag::stayed: return "stayed";
        case ArrivalTag::blocked: return "blocked";
        case ArrivalTag::arrived_cw: return "arrived_cw";
        case ArrivalTag::arrived_ccw: return "arrived_ccw";
    }
    return "?";
}
inline const char* to_string(ChiralityMode m) {
    return m == ChiralityMode::chiral ? "chiral" : "achiral";
}
inline const char* to_string(Task t) { return t == Task::explore ? "explore" : "meet"; }

inline ArrivalTag arrival_tag_from_string(const std::string& s) {
    if (s == "stayed") return ArrivalTag::stayed;
    if (s == "blocked") return ArrivalTag::blocked;
    if (s == "arrived_cw") return ArrivalTag::arrived_cw;
    if (s == "arrived_ccw") return ArrivalTag::arrived_ccw;
    throw std::invalid_argument("unknown arrival tag: " + s);
}

namespace detail {

template <typename T>
json opt_json(const std::optional<T>& v) {
    if (!v) return nullptr;
    return *v;
}

template <typename T>
std::optional<T> opt_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<T>();
}

} // namespace detail

inline json to_json(const AgentVars& v) {
    json j;
    j["state"] = to_string(v.state);
    j["winner"] = v.winner;
    j["scount"] = detail::opt_json(v.scount);
    j["fsteps"] = v.fsteps;
    j["bsteps"] = v.bsteps;
    j["rsteps"] = v.rsteps;
    j["bblocked"] = v.bblocked;
    j["ttime"] = detail::opt_json(v.ttime);
    j["rsize"] = detail::opt_json(v.rsize);
    j["sbound"] = detail::opt_json(v.sbound);
    j["run_counter"] = v.run_counter;
    j["countdown"] = detail::opt_json(v.countdown);
    j["met_settled_in_run"] = v.met_settled_in_run;
    j["phase"] = v.phase_index;
    j["round_in_phase"] = v.round_in_phase;
    j["met_once"] = v.met_once;
    j["stime"] = v.stime;
    j["agreed_direction"] =
        v.agreed_direction ? json(to_string(*v.agreed_direction)) : json(nullptr);
    j["stime_cutoff"] = detail::opt_json(v.stime_cutoff);
    return j;
}

inline AgentVars agent_vars_from_json(const json& j) {
    AgentVars v;
    v.state = agent_state_from_string(j.at("state").get<std::string>());
    v.winner = j.at("winner").get<bool>();
    v.scount = detail::opt_from<std::int64_t>(j.at("scount"));
    v.fsteps = j.at("fsteps").get<std::int64_t>();
    v.bsteps = j.at("bsteps").get<std::int64_t>();
    v.rsteps = j.at("rsteps").get<std::int64_t>();
    v.bblocked = j.at("bblocked").get<std::int64_t>();
    v.ttime = detail::opt_from<std::int64_t>(j.at("ttime"));
    v.rsize = detail::opt_from<std::int64_t>(j.at("rsize"));
    v.sbound = detail::opt_from<std::int64_t>(j.at("sbound"));
    v.run_counter = j.at("run_counter").get<std::int64_t>();
    v.countdown = detail::opt_from<std::int64_t>(j.at("countdown"));
    v.met_settled_in_run = j.at("met_settled_in_run").get<int>();
    v.phase_index = j.at("phase").get<std::int64_t>();
    v.round_in_phase = j.at("round_in_phase").get<std::int64_t>();
    v.met_once = j.at("met_once").get<bool>();
    v.stime = j.at("stime").get<std::int64_t>();
    if (!j.at("agreed_direction").is_null())
        v.agreed_direction = j.at("agreed_direction").get<std::string>() == "right"
                                 ? PrivateDir::right
                                 : PrivateDir::left;
    v.stime_cutoff = detail::opt_from<std::int64_t>(j.at("stime_cutoff"));
    return v;
}

inline json to_json(const AgentRecord& a) {
    json j;
    j["position"] = a.position;
    j["intent"] = a.intent ? json(to_string(*a.intent)) : json(nullptr);
    j["tag"] = to_string(a.tag);
    j["terminated"] = a.terminated;
    j["vars"] = to_json(a.vars);
    return j;
}

inline AgentRecord agent_record_from_json(const json& j) {
    AgentRecord a;
    a.position = j.at("position").get<int>();
    if (!j.at("intent").is_null())
        a.intent = j.at("intent").get<std::string>() == "cw" ? GlobalDir::cw : GlobalDir::ccw;
    a.tag = arrival_tag_from_string(j.at("tag").get<std::string>());
    a.terminated = j.at("terminated").get<bool>();
    a.vars = agent_vars_from_json(j.at("vars"));
    return a;
}

inline json to_json(const RoundRecord& r) {
    json j;
    j["type"] = "round";
    j["round"] = r.round;
    j["missing"] = r.missing;
    json agents = json::array();
    for (const auto& a : r.agents) agents.push_back(to_json(a));
    j["agents"] = std::move(agents);
    json meetings = json::array();
    for (const auto& m : r.meetings)
        meetings.push_back(json{{"a", m.a}, {"b", m.b}, {"kind", m.kind}});
    j["meetings"] = std::move(meetings);
    return j;
}

inline RoundRecord round_record_from_json(const json& j) {
    RoundRecord r;
    r.round = j.at("round").get<std::int64_t>();
    r.missing = j.at("missing").get<std::vector<int>>();
    const auto& agents = j.at("agents");
    if (agents.size() != 3) throw std::invalid_argument("trace: round needs three agents");
    for (size_t i = 0; i < 3; ++i) r.agents[i] = agent_record_from_json(agents[i]);
    for (const auto& m : j.at("meetings"))
        r.meetings.push_back(MeetingRecord{m.at("a").get<int>(), m.at("b").get<int>(),
                                           m.at("kind").get<std::string>()});
    return r;
}

inline json header_json(const SimulationConfig& c, std::int64_t bound) {
    json j;
    j["type"] = "header";
    j["n"] = c.n;
    j["k"] = c.id_length();
    j["ids"] = c.ids;
    j["positions"] = c.positions;
    json orients = json::array();
    for (bool b : c.orientations) orients.push_back(b);
    j["orientations"] = std::move(orients);
    j["mode"] = to_string(c.mode);
    j["task"] = to_string(c.task);
    j["adversary"] = json{{"kind", to_string(c.adversary.kind)},
                          {"seed", c.adversary.seed},
                          {"p_none", c.adversary.p_none},
                          {"target", c.adversary.target}};
    j["bound"] = bound;
    j["max_rounds"] = c.max_rounds ? json(*c.max_rounds) : json(nullptr);
    return j;
}

inline json outcome_json(const SimulationOutcome& o) {
    json j;
    j["type"] = "outcome";
    j["explored"] = o.explored;
    j["all_terminated"] = o.all_terminated;
    j["met"] = o.met;
    j["rounds_elapsed"] = o.rounds_elapsed;
    j["bound"] = o.bound;
    j["bound_satisfied"] = o.bound_satisfied;
    j["violation"] = o.violation ? json(*o.violation) : json(nullptr);
    return j;
}

inline void write_trace(std::ostream& os, const SimulationConfig& config,
                        const RunResult& result) {
    os << header_json(config, result.outcome.bound).dump() << '\n';
    for (const auto& r : result.trace) os << to_json(r).dump() << '\n';
    os << outcome_json(result.outcome).dump() << '\n';
}

inline std::string trace_string(const SimulationConfig& config, const RunResult& result) {
    std::ostringstream os;
    write_trace(os, config, result);
    return os.str();
}

// --- Independent trace verifier ---------------------------------------

struct TraceCheck {
    std::string name;
    bool pass = true;
    std::string detail; // first failure only
};

struct VerifyReport {
    std::vector<TraceCheck> checks;
    bool ok() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

struct ParsedTrace {
    json header;
    std::vector<RoundRecord> rounds;
    json outcome;
};

inline ParsedTrace parse_trace(std::istream& is) {
    ParsedTrace t;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        const auto type = j.at("type").get<std::string>();
        if (type == "header")
            t.header = std::move(j);
        else if (type == "round")
            t.rounds.push_back(round_record_from_json(j));
        else if (type == "outcome")
            t.outcome = std::move(j);
        else
            throw std::invalid_argument("trace: unknown record type " + type);
    }
    if (t.header.is_null()) throw std::invalid_argument("trace: missing header");
    return t;
}

// Replays the recorded run against the model rules, independently of the
// engine's own bookkeeping. Every check covers the whole trace and reports
// the first offending round.
inline VerifyReport verify_trace(const ParsedTrace& t) {
    VerifyReport rep;
    const int n = t.header.at("n").get<int>();
    const auto initial = t.header.at("positions").get<std::vector<int>>();
    const auto task = t.header.at("task").get<std::string>();

    rep.checks.reserve(16); // add() hands out references into this vector
    const auto add = [&](const std::string& name) -> TraceCheck& {
        rep.checks.push_back(TraceCheck{name, true, ""});
        return rep.checks.back();
    };
    const auto fail = [](TraceCheck& c, std::int64_t round, const std::string& why) {
        if (!c.pass) return;
        c.pass = false;
        c.detail = "round " + std::to_string(round) + ": " + why;
    };

    auto& c_edge = add("single_missing_edge");
    auto& c_settled = add("single_settled");
    auto& c_station = add("settled_stationary");
    auto& c_rsize = add("rsize_equals_n");
    auto& c_sbound = add("sbound_in_range");
    auto& c_cover = add("no_termination_before_coverage");
    auto& c_step = add("moves_are_single_steps");
    auto& c_ttime = add("ttime_counts_rounds");
    auto& c_term = add("termination_is_final");
    auto& c_out = add("outcome_consistent");

    std::set<int> coverage(initial.begin(), initial.end());
    std::array<int, 3> prev_pos{};
    std::array<bool, 3> prev_term{false, false, false};
    std::array<std::optional<std::int64_t>, 3> prev_ttime{};
    std::array<std::optional<std::int64_t>, 3> prev_rsize{};
    std::array<std::optional<std::int64_t>, 3> prev_sbound{};
    std::optional<int> settled_node;
    for (size_t i = 0; i < 3; ++i) prev_pos[i] = initial[i];

    bool met = false;
    for (const auto& r : t.rounds) {
        if (r.missing.size() > 1)
            fail(c_edge, r.round, std::to_string(r.missing.size()) + " edges missing");
        for (int e : r.missing)
            if (e < 0 || e >= n) fail(c_edge, r.round, "edge index out of range");

        int settled_count = 0;
        for (size_t i = 0; i < 3; ++i) {
            const auto& a = r.agents[i];
            const auto& v = a.vars;
            if (v.state == AgentState::settled && !a.terminated) ++settled_count;

            // One step per round along the ring, or stay.
            const int fwd = cw_distance(prev_pos[i], a.position, n);
            if (fwd != 0 && fwd != 1 && fwd != n - 1)
                fail(c_step, r.round, "agent " + std::to_string(i) + " jumped");

            if (v.state == AgentState::settled) {
                if (a.intent)
                    fail(c_station, r.round, "settled agent " + std::to_string(i) + " moved");
                if (!settled_node) settled_node = a.position;
                if (*settled_node != a.position)
                    fail(c_station, r.round, "settled position changed");
            }

            if (v.rsize && *v.rsize != n)
                fail(c_rsize, r.round,
                     "agent " + std::to_string(i) + " holds RSize=" + std::to_string(*v.rsize));
            if (prev_rsize[i] && v.rsize && *prev_rsize[i] != *v.rsize)
                fail(c_rsize, r.round, "RSize changed after being set");
            if (v.sbound && (*v.sbound < n || *v.sbound > 3 * n))
                fail(c_sbound, r.round,
                     "agent " + std::to_string(i) + " holds SBound=" + std::to_string(*v.sbound));

            // Coverage is judged on positions reached before this round's
            // moves, matching when Compute decided to terminate.
            if (a.terminated && !prev_term[i] &&
                static_cast<int>(coverage.size()) != n && task == "explore")
                fail(c_cover, r.round, "agent " + std::to_string(i) + " terminated early");

            // Once running, the clock ticks by exactly 1 per round. It may
            // start at 0 (triple formation) or at an adopted peer value.
            if (v.ttime && prev_ttime[i]) {
                const bool reset = *v.ttime == 0;
                const bool counted = *v.ttime == *prev_ttime[i] + 1;
                if (!reset && !counted && !a.terminated)
                    fail(c_ttime, r.round, "agent " + std::to_string(i) + " ttime skipped");
            }

            if (prev_term[i]) {
                if (!a.terminated)
                    fail(c_term, r.round, "agent " + std::to_string(i) + " revived");
                if (a.position != prev_pos[i])
                    fail(c_term, r.round, "terminated agent " + std::to_string(i) + " moved");
            }
        }
        if (settled_count > 1) fail(c_settled, r.round, "two settled agents");

        for (const auto& m : r.meetings) met = true, (void)m;

        for (size_t i = 0; i < 3; ++i) {
            prev_pos[i] = r.agents[i].position;
            prev_term[i] = prev_term[i] || r.agents[i].terminated;
            prev_ttime[i] = r.agents[i].vars.ttime;
            prev_rsize[i] = r.agents[i].vars.rsize;
            prev_sbound[i] = r.agents[i].vars.sbound;
            if (!r.agents[i].terminated) coverage.insert(r.agents[i].position);
        }
    }

    if (!t.outcome.is_null()) {
        const bool covered = static_cast<int>(coverage.size()) == n;
        if (t.outcome.at("explored").get<bool>() != covered)
            fail(c_out, -1, "explored flag does not match visited nodes");
        const bool term = prev_term[0] && prev_term[1] && prev_term[2];
        if (t.outcome.at("all_terminated").get<bool>() != term)
            fail(c_out, -1, "all_terminated flag does not match trace");
        if (task == "meet" && t.outcome.at("met").get<bool>() &&
            t.outcome.at("rounds_elapsed").get<std::int64_t>() == 0 && !met) {
            // Initial co-location: nothing to check in the (empty) round list.
        }
    } else {
        fail(c_out, -1, "missing outcome record");
    }
    return rep;
}

inline VerifyReport verify_trace(std::istream& is) { return verify_trace(parse_trace(is)); }

inline VerifyReport verify_trace_string(const std::string& s) {
    std::istringstream is(s);
    return verify_trace(is);
}

} // namespace dynring

#endif // DYNRING_TRACE_HPP
