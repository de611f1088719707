#ifndef DYNRING_CONFIG_IO_HPP
#define DYNRING_CONFIG_IO_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dynring/engine.hpp"
#include "dynring/trace.hpp"

// JSON config and batch-manifest parsing. Every parse error names the
// offending field.

namespace dynring {

inline std::vector<int> spread_positions(int n) {
    return {0, n / 3, 2 * n / 3};
}

inline AdversaryStrategy adversary_from_json(const json& j) {
    AdversaryStrategy s;
    if (j.is_null()) return s;
    const auto kind = j.value("kind", std::string("none"));
    if (kind == "none") s.kind = AdversaryKind::none;
    else if (kind == "random") s.kind = AdversaryKind::random;
    else if (kind == "scripted") s.kind = AdversaryKind::scripted;
    else if (kind == "front_blocker") s.kind = AdversaryKind::front_blocker;
    else if (kind == "gap_keeper") s.kind = AdversaryKind::gap_keeper;
    else if (kind == "cursor") s.kind = AdversaryKind::cursor;
    else throw std::invalid_argument("adversary.kind: unknown kind '" + kind + "'");
    s.seed = j.value("seed", std::uint64_t{0});
    s.p_none = j.value("p_none", 0.5);
    if (s.p_none < 0.0 || s.p_none > 1.0)
        throw std::invalid_argument("adversary.p_none: must be in [0,1]");
    s.cycle = j.value("cycle", false);
    s.target = j.value("target", 0);
    if (s.target < 0 || s.target > 2)
        throw std::invalid_argument("adversary.target: must be 0, 1 or 2");
    if (j.contains("script"))
        for (const auto& e : j.at("script")) {
            if (e.is_null()) s.script.push_back(std::nullopt);
            else s.script.push_back(e.get<int>());
        }
    return s;
}

inline json adversary_to_json(const AdversaryStrategy& s) {
    json j;
    j["kind"] = to_string(s.kind);
    j["seed"] = s.seed;
    j["p_none"] = s.p_none;
    j["cycle"] = s.cycle;
    j["target"] = s.target;
    json script = json::array();
    for (const auto& e : s.script) script.push_back(e ? json(*e) : json(nullptr));
    j["script"] = std::move(script);
    return j;
}

inline SimulationConfig config_from_json(const json& j) {
    SimulationConfig c;
    if (!j.contains("n")) throw std::invalid_argument("config.n: missing");
    c.n = j.at("n").get<int>();
    if (!j.contains("ids")) throw std::invalid_argument("config.ids: missing");
    c.ids = j.at("ids").get<std::vector<std::string>>();
    if (j.contains("positions"))
        c.positions = j.at("positions").get<std::vector<int>>();
    else
        c.positions = spread_positions(c.n);
    if (j.contains("orientations"))
        c.orientations = j.at("orientations").get<std::vector<bool>>();
    else
        c.orientations = {true, true, true};
    const auto mode = j.value("mode", std::string("chiral"));
    if (mode == "chiral") c.mode = ChiralityMode::chiral;
    else if (mode == "achiral") c.mode = ChiralityMode::achiral;
    else throw std::invalid_argument("config.mode: unknown mode '" + mode + "'");
    const auto task = j.value("task", std::string("explore"));
    if (task == "explore") c.task = Task::explore;
    else if (task == "meet") c.task = Task::meet;
    else throw std::invalid_argument("config.task: unknown task '" + task + "'");
    c.adversary = adversary_from_json(j.contains("adversary") ? j.at("adversary") : json());
    if (j.contains("max_rounds") && !j.at("max_rounds").is_null())
        c.max_rounds = j.at("max_rounds").get<std::int64_t>();
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(e.what()); // validate() already names the field
    }
    return c;
}

inline json config_to_json(const SimulationConfig& c) {
    json j;
    j["n"] = c.n;
    j["ids"] = c.ids;
    j["positions"] = c.positions;
    json orients = json::array();
    for (bool b : c.orientations) orients.push_back(b);
    j["orientations"] = std::move(orients);
    j["mode"] = to_string(c.mode);
    j["task"] = to_string(c.task);
    j["adversary"] = adversary_to_json(c.adversary);
    j["max_rounds"] = c.max_rounds ? json(*c.max_rounds) : json(nullptr);
    return j;
}

// A manifest is a list of explicit cells plus an optional cross-product
// grid: n x id sets x orientation assignments x adversaries (x seeds for
// the random kind).
inline std::vector<SimulationConfig> expand_manifest(const json& m) {
    std::vector<SimulationConfig> cells;
    if (m.contains("cells"))
        for (const auto& c : m.at("cells")) cells.push_back(config_from_json(c));
    if (m.contains("grid")) {
        const auto& g = m.at("grid");
        if (!g.contains("n")) throw std::invalid_argument("manifest.grid.n: missing");
        if (!g.contains("id_sets"))
            throw std::invalid_argument("manifest.grid.id_sets: missing");
        const auto ns = g.at("n").get<std::vector<int>>();
        const auto id_sets = g.at("id_sets").get<std::vector<std::vector<std::string>>>();
        std::vector<std::vector<bool>> orient_sets = {{true, true, true}};
        if (g.contains("orientations"))
            orient_sets = g.at("orientations").get<std::vector<std::vector<bool>>>();
        std::vector<json> adversaries = {json()};
        if (g.contains("adversaries"))
            adversaries.assign(g.at("adversaries").begin(), g.at("adversaries").end());
        std::vector<std::uint64_t> seeds;
        if (g.contains("seeds")) seeds = g.at("seeds").get<std::vector<std::uint64_t>>();
        std::vector<std::vector<int>> position_sets;
        if (g.contains("positions"))
            position_sets = g.at("positions").get<std::vector<std::vector<int>>>();

        json base;
        if (g.contains("mode")) base["mode"] = g.at("mode");
        if (g.contains("task")) base["task"] = g.at("task");
        if (g.contains("max_rounds")) base["max_rounds"] = g.at("max_rounds");

        for (int n : ns)
            for (const auto& ids : id_sets)
                for (const auto& orients : orient_sets)
                    for (const auto& adv : adversaries) {
                        const bool random_kind =
                            !adv.is_null() && adv.value("kind", "none") == std::string("random");
                        const auto make_cell = [&](std::optional<std::uint64_t> seed,
                                                   const std::vector<int>* positions) {
                            json cell = base;
                            cell["n"] = n;
                            cell["ids"] = ids;
                            cell["orientations"] = orients;
                            if (positions) cell["positions"] = *positions;
                            if (!adv.is_null()) cell["adversary"] = adv;
                            if (seed) cell["adversary"]["seed"] = *seed;
                            cells.push_back(config_from_json(cell));
                        };
                        const auto expand_positions = [&](std::optional<std::uint64_t> seed) {
                            if (position_sets.empty()) make_cell(seed, nullptr);
                            else
                                for (const auto& p : position_sets) make_cell(seed, &p);
                        };
                        if (random_kind && !seeds.empty())
                            for (auto seed : seeds) expand_positions(seed);
                        else
                            expand_positions(std::nullopt);
                    }
    }
    if (cells.empty()) throw std::invalid_argument("manifest: no cells");
    return cells;
}

} // namespace dynring

#endif // DYNRING_CONFIG_IO_HPP
