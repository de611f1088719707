#include <catch_amalgamated.hpp>

#include <functional>
#include <sstream>

#include "dynring/config_io.hpp"
#include "dynring/engine.hpp"
#include "dynring/trace.hpp"

using namespace dynring;

namespace {

SimulationConfig base_config() {
    SimulationConfig c;
    c.n = 5;
    c.ids = {"01", "10", "11"};
    c.positions = {0, 1, 3};
    c.orientations = {true, true, true};
    return c;
}

} // namespace

TEST_CASE("config validation names the problem") {
    auto c = base_config();
    c.ids = {"01", "01", "11"};
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = base_config();
    c.positions = {0, 1, 9};
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = base_config();
    c.orientations = {true, false, true};
    CHECK_THROWS_AS(c.validate(), std::invalid_argument); // chiral requires agreement
    c.mode = ChiralityMode::achiral;
    CHECK_NOTHROW(c.validate());
    c = base_config();
    c.n = 2;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("bound formulas") {
    CHECK(proven_bound(ChiralityMode::chiral, Task::meet, 2, 3) == (1 << (2 + 2 + 2)));
    CHECK(proven_bound(ChiralityMode::chiral, Task::explore, 2, 3) ==
          (1 << (2 + 2 + 3)) + 23 * 3);
    CHECK(proven_bound(ChiralityMode::achiral, Task::meet, 2, 3) == 4 * (1 << (2 + 2 + 3)));
    CHECK(proven_bound(ChiralityMode::achiral, Task::explore, 3, 8) ==
          9 * (std::int64_t{1} << (3 + 3 + 4)) + 23 * 8);
}

TEST_CASE("chiral exploration completes and verifies with no adversary") {
    const auto c = base_config();
    const auto result = run(c);
    CHECK(result.outcome.explored);
    CHECK(result.outcome.all_terminated);
    CHECK(result.outcome.bound_satisfied);
    CHECK_FALSE(result.outcome.violation.has_value());
    CHECK(result.outcome.rounds_elapsed <= result.outcome.bound);

    const auto report = verify_trace_string(trace_string(c, result));
    for (const auto& check : report.checks) {
        INFO(check.name << ": " << check.detail);
        CHECK(check.pass);
    }
}

TEST_CASE("meeting task reports the first meeting round") {
    auto c = base_config();
    c.task = Task::meet;
    const auto result = run(c);
    CHECK(result.outcome.met);
    CHECK(result.outcome.rounds_elapsed <= result.outcome.bound);
    CHECK(result.outcome.bound_satisfied);

    // co-located start meets at round zero
    c.positions = {2, 2, 4};
    const auto instant = run(c);
    CHECK(instant.outcome.met);
    CHECK(instant.outcome.rounds_elapsed == 0);
}

TEST_CASE("adversaries delay but do not break exploration") {
    for (int target = 0; target < 3; ++target) {
        auto c = base_config();
        c.adversary.kind = AdversaryKind::front_blocker;
        c.adversary.target = target;
        const auto result = run(c);
        INFO("front_blocker target " << target);
        CHECK(result.outcome.bound_satisfied);
        CHECK_FALSE(result.outcome.violation.has_value());
    }
    auto c = base_config();
    c.adversary.kind = AdversaryKind::gap_keeper;
    CHECK(run(c).outcome.bound_satisfied);
    c.adversary.kind = AdversaryKind::random;
    c.adversary.seed = 1;
    c.adversary.p_none = 0.5;
    CHECK(run(c).outcome.bound_satisfied);
}

TEST_CASE("achiral exploration with mixed orientations") {
    auto c = base_config();
    c.mode = ChiralityMode::achiral;
    c.n = 4;
    c.positions = {0, 1, 2};
    c.orientations = {true, false, true};
    c.adversary.kind = AdversaryKind::random;
    c.adversary.seed = 1;
    const auto result = run(c);
    CHECK(result.outcome.explored);
    CHECK(result.outcome.all_terminated);
    CHECK(result.outcome.bound_satisfied);
    CHECK(verify_trace_string(trace_string(c, result)).ok());
}

TEST_CASE("co-located starts are handled") {
    auto c = base_config();
    c.mode = ChiralityMode::achiral;
    SECTION("two together") { c.positions = {2, 2, 0}; }
    SECTION("three together") { c.positions = {1, 1, 1}; }
    const auto result = run(c);
    CHECK(result.outcome.explored);
    CHECK(result.outcome.all_terminated);
    CHECK(result.outcome.bound_satisfied);
}

TEST_CASE("known limitation: all-zero identifier can prevent termination") {
    // An agent whose identifier is all zeros never moves while searching.
    // Once the other two agents meet, an adversary that keeps blocking the
    // remaining mover prevents any further meeting, so the run cannot
    // terminate. This pins the documented limitation (see README).
    SimulationConfig c;
    c.n = 3;
    c.ids = {"00", "01", "10"};
    c.positions = {0, 1, 2};
    c.orientations = {true, true, true};
    c.adversary.kind = AdversaryKind::front_blocker;
    c.adversary.target = 2;
    c.max_rounds = 2000;
    const auto result = run(c);
    CHECK(result.outcome.met); // the first meeting still happens on time
    CHECK_FALSE(result.outcome.all_terminated);
    CHECK(result.outcome.violation.has_value());
}

TEST_CASE("determinism: identical configs yield identical traces") {
    auto c = base_config();
    c.adversary.kind = AdversaryKind::random;
    c.adversary.seed = 99;
    const auto a = trace_string(c, run(c));
    const auto b = trace_string(c, run(c));
    CHECK(a == b);
    CHECK_FALSE(a.empty());
}

TEST_CASE("max_rounds overrun is reported, never silently truncated") {
    auto c = base_config();
    c.max_rounds = 1;
    const auto result = run(c);
    CHECK_FALSE(result.outcome.all_terminated);
    CHECK_FALSE(result.outcome.bound_satisfied);
    CHECK(result.outcome.violation.has_value());
}

TEST_CASE("trace round-trips through JSONL") {
    const auto c = base_config();
    const auto result = run(c);
    const auto text = trace_string(c, result);
    std::istringstream is(text);
    const auto parsed = parse_trace(is);
    CHECK(parsed.rounds.size() == result.trace.size());
    CHECK(parsed.header.at("n").get<int>() == c.n);
    CHECK(parsed.outcome.at("rounds_elapsed").get<std::int64_t>() ==
          result.outcome.rounds_elapsed);
    // re-serializing the parsed rounds reproduces the original lines
    std::ostringstream os;
    os << header_json(c, result.outcome.bound).dump() << '\n';
    for (const auto& r : parsed.rounds) os << to_json(r).dump() << '\n';
    os << parsed.outcome.dump() << '\n';
    CHECK(os.str() == text);
}

TEST_CASE("negative controls: corrupted traces fail the matching verdict") {
    const auto c = base_config();
    const auto result = run(c);
    const auto text = trace_string(c, result);

    const auto mutate = [&](const std::function<void(json&)>& f) {
        std::istringstream is(text);
        std::ostringstream os;
        std::string line;
        bool first_round = true;
        while (std::getline(is, line)) {
            json j = json::parse(line);
            if (j.at("type") == "round" && first_round) {
                f(j);
                first_round = false;
            }
            os << j.dump() << '\n';
        }
        return verify_trace_string(os.str());
    };
    const auto failed = [](const VerifyReport& r, const std::string& name) {
        for (const auto& c : r.checks)
            if (c.name == name) return !c.pass;
        return false;
    };

    SECTION("two missing edges") {
        const auto rep = mutate([](json& j) { j["missing"] = {0, 2}; });
        CHECK(failed(rep, "single_missing_edge"));
    }
    SECTION("termination before coverage") {
        const auto rep = mutate([](json& j) {
            j["agents"][0]["terminated"] = true;
        });
        CHECK(failed(rep, "no_termination_before_coverage"));
    }
    SECTION("settled agent moves") {
        const auto rep = mutate([](json& j) {
            j["agents"][0]["vars"]["state"] = "settled";
            j["agents"][0]["intent"] = "cw";
        });
        CHECK(failed(rep, "settled_stationary"));
    }
    SECTION("wrong ring size") {
        const auto rep = mutate([](json& j) {
            j["agents"][0]["vars"]["rsize"] = 99;
        });
        CHECK(failed(rep, "rsize_equals_n"));
    }
    SECTION("upper bound out of range") {
        const auto rep = mutate([](json& j) {
            j["agents"][0]["vars"]["sbound"] = 99;
        });
        CHECK(failed(rep, "sbound_in_range"));
    }
    SECTION("unmodified trace passes everything") {
        CHECK(verify_trace_string(text).ok());
    }
}

TEST_CASE("manifest expansion crosses the grid") {
    json m;
    m["grid"]["n"] = {4, 5};
    m["grid"]["id_sets"] = {{"01", "10", "11"}};
    m["grid"]["adversaries"] = json::array(
        {json{{"kind", "none"}}, json{{"kind", "random"}, {"p_none", 0.5}}});
    m["grid"]["seeds"] = {1, 2, 3};
    // 2 n-values x 1 id set x (1 none + 1 random x 3 seeds) = 8 cells
    const auto cells = expand_manifest(m);
    CHECK(cells.size() == 8);
    CHECK_THROWS_AS(expand_manifest(json::object()), std::invalid_argument);
}

TEST_CASE("config json round trip") {
    json j;
    j["n"] = 6;
    j["ids"] = {"01", "10", "11"};
    const auto c = config_from_json(j);
    CHECK(c.positions == spread_positions(6));
    CHECK(c.orientations == std::vector<bool>{true, true, true});
    CHECK(c.mode == ChiralityMode::chiral);
    const auto back = config_to_json(c);
    CHECK(config_from_json(back).n == 6);

    j["ids"] = {"01", "01", "11"};
    CHECK_THROWS_WITH(config_from_json(j), Catch::Matchers::ContainsSubstring("ids"));
}
