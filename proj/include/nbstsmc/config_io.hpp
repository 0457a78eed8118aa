// JSON configuration files, dotted-key overrides, bundled scenarios and CSV/report output.

#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "json.hpp"

#include "core_types.hpp"
#include "diagnostics.hpp"
#include "perturbation.hpp"
#include "plant_sim.hpp"

namespace nbstsmc {

using json = nlohmann::json;

/// Configuration problem tied to a key (dotted path for scenario keys).
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message)
        : std::runtime_error("config key '" + key + "': " + message), key_(std::move(key)) {}

    [[nodiscard]] const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

struct SimulationSetup {
    ControllerConfig config;
    PerturbationSpec perturbation;
};

inline const std::set<std::string, std::less<>>& top_level_keys() {
    static const std::set<std::string, std::less<>> keys{
        "alpha", "gamma", "nu", "dt", "horizon", "layers", "sdot_floor", "gain_floor", "k1d_init",
        "k2d_init", "s0", "v0", "scenario", "entry_fraction", "u_max"};
    return keys;
}

inline const std::set<std::string, std::less<>>& scenario_keys() {
    static const std::set<std::string, std::less<>> keys{"kind", "amplitude", "period", "duty", "schedule",
                                                         "table"};
    return keys;
}

[[nodiscard]] inline json scenario_to_json(const PerturbationSpec& spec) {
    return std::visit(
        [](const auto& p) -> json {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, StepTrain>) {
                return {{"kind", "steps"}, {"amplitude", p.amplitude}, {"period", p.period}, {"duty", p.duty}};
            } else if constexpr (std::is_same_v<T, SinusoidSchedule>) {
                json sched = json::array();
                for (const auto& seg : p.schedule) sched.push_back({seg.t_start, seg.frequency});
                return {{"kind", "sinusoid"}, {"amplitude", p.amplitude}, {"schedule", sched}};
            } else {
                json table = json::array();
                for (const auto& x : p.samples) table.push_back({x.t, x.d});
                return {{"kind", "table"}, {"table", table}};
            }
        },
        spec);
}

[[nodiscard]] inline json setup_to_json(const ControllerConfig& cfg, const PerturbationSpec& spec) {
    json j{{"alpha", cfg.alpha},
           {"gamma", cfg.gamma},
           {"nu", cfg.nu},
           {"dt", cfg.dt},
           {"horizon", cfg.horizon},
           {"layers", cfg.layers},
           {"sdot_floor", cfg.sdot_floor},
           {"gain_floor", cfg.gain_floor},
           {"k1d_init", cfg.k1d_init},
           {"k2d_init", cfg.k2d_init},
           {"s0", cfg.s0},
           {"v0", cfg.v0},
           {"entry_fraction", cfg.entry_fraction},
           {"scenario", scenario_to_json(spec)}};
    if (cfg.u_max) j["u_max"] = *cfg.u_max;
    return j;
}

/// Bundled scenarios: "steps" (d = 100 square pulses) and "sinusoid" (1/5/10 Hz schedule).
[[nodiscard]] inline PerturbationSpec bundled_scenario(std::string_view name) {
    if (name == "steps") return StepTrain{};
    if (name == "sinusoid") return SinusoidSchedule{};
    throw ConfigError("scenario", "unknown bundled scenario '" + std::string(name) + "'");
}

namespace detail {

inline double number_at(const json& obj, const char* key, const std::string& path, double fallback) {
    const auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_number()) throw ConfigError(path, "expected a number");
    return it->get<double>();
}

inline std::vector<std::pair<double, double>> pairs_at(const json& obj, const char* key, const std::string& path) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError(path, "required for this scenario kind");
    if (!it->is_array()) throw ConfigError(path, "expected an array of [t, value] pairs");
    std::vector<std::pair<double, double>> out;
    for (const auto& item : *it) {
        if (!item.is_array() || item.size() != 2 || !item[0].is_number() || !item[1].is_number()) {
            throw ConfigError(path, "expected an array of [t, value] pairs");
        }
        out.emplace_back(item[0].get<double>(), item[1].get<double>());
    }
    return out;
}

inline PerturbationSpec parse_scenario(const json& sc) {
    if (!sc.is_object()) throw ConfigError("scenario", "expected an object");
    for (const auto& [key, value] : sc.items()) {
        (void)value;
        if (!scenario_keys().contains(key)) throw ConfigError("scenario." + key, "unknown key");
    }
    const auto kind_it = sc.find("kind");
    if (kind_it == sc.end() || !kind_it->is_string()) {
        throw ConfigError("scenario.kind", "must be one of steps, sinusoid, table");
    }
    const auto kind = kind_it->get<std::string>();
    if (kind == "steps") {
        StepTrain p;
        p.amplitude = number_at(sc, "amplitude", "scenario.amplitude", p.amplitude);
        p.period = number_at(sc, "period", "scenario.period", p.period);
        p.duty = number_at(sc, "duty", "scenario.duty", p.duty);
        return p;
    }
    if (kind == "sinusoid") {
        SinusoidSchedule p;
        p.amplitude = number_at(sc, "amplitude", "scenario.amplitude", p.amplitude);
        if (sc.contains("schedule")) {
            p.schedule.clear();
            for (const auto& [t, f] : pairs_at(sc, "schedule", "scenario.schedule")) p.schedule.push_back({t, f});
        }
        return p;
    }
    if (kind == "table") {
        Table p;
        p.samples.clear();
        for (const auto& [t, d] : pairs_at(sc, "table", "scenario.table")) p.samples.push_back({t, d});
        return p;
    }
    throw ConfigError("scenario.kind", "must be one of steps, sinusoid, table");
}

}  // namespace detail

/**
 * Builds a setup from a JSON document.
 *
 * Missing keys keep their defaults; unknown keys and wrongly typed values
 * throw ConfigError. No range validation happens here (see validate_config).
 */
[[nodiscard]] inline SimulationSetup setup_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("<root>", "expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!top_level_keys().contains(key)) throw ConfigError(key, "unknown key");
    }

    SimulationSetup setup;
    ControllerConfig& cfg = setup.config;
    cfg.alpha = detail::number_at(j, "alpha", "alpha", cfg.alpha);
    cfg.gamma = detail::number_at(j, "gamma", "gamma", cfg.gamma);
    cfg.nu = detail::number_at(j, "nu", "nu", cfg.nu);
    cfg.dt = detail::number_at(j, "dt", "dt", cfg.dt);
    cfg.horizon = detail::number_at(j, "horizon", "horizon", cfg.horizon);
    cfg.sdot_floor = detail::number_at(j, "sdot_floor", "sdot_floor", cfg.sdot_floor);
    cfg.gain_floor = detail::number_at(j, "gain_floor", "gain_floor", cfg.gain_floor);
    cfg.k1d_init = detail::number_at(j, "k1d_init", "k1d_init", cfg.k1d_init);
    cfg.k2d_init = detail::number_at(j, "k2d_init", "k2d_init", cfg.k2d_init);
    cfg.s0 = detail::number_at(j, "s0", "s0", cfg.s0);
    cfg.v0 = detail::number_at(j, "v0", "v0", cfg.v0);
    cfg.entry_fraction = detail::number_at(j, "entry_fraction", "entry_fraction", cfg.entry_fraction);
    if (const auto it = j.find("u_max"); it != j.end() && !it->is_null()) {
        cfg.u_max = detail::number_at(j, "u_max", "u_max", 0.0);
    }
    if (const auto it = j.find("layers"); it != j.end()) {
        if (!it->is_array()) throw ConfigError("layers", "expected an array of numbers");
        cfg.layers.clear();
        for (const auto& x : *it) {
            if (!x.is_number()) throw ConfigError("layers", "expected an array of numbers");
            cfg.layers.push_back(x.get<double>());
        }
    }
    if (const auto it = j.find("scenario"); it != j.end()) {
        setup.perturbation = detail::parse_scenario(*it);
    } else {
        setup.perturbation = StepTrain{};
    }
    return setup;
}

/// Parses "KEY=VALUE" and writes VALUE (JSON if it parses, else a string) at the dotted KEY.
inline void apply_override(json& doc, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError(std::string(assignment), "override must look like KEY=VALUE");
    }
    const std::string key(assignment.substr(0, eq));
    const std::string raw(assignment.substr(eq + 1));

    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;

    const auto dot = key.find('.');
    if (dot == std::string::npos) {
        if (!top_level_keys().contains(key) || key == "scenario") throw ConfigError(key, "unknown key");
        doc[key] = std::move(value);
        return;
    }
    const std::string head = key.substr(0, dot);
    const std::string tail = key.substr(dot + 1);
    if (head != "scenario" || !scenario_keys().contains(tail)) throw ConfigError(key, "unknown key");
    if (!doc.contains("scenario") || !doc["scenario"].is_object()) doc["scenario"] = json::object();
    doc["scenario"][tail] = std::move(value);
}

[[nodiscard]] inline json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot open " + path.string());
    json j = json::parse(in, nullptr, false, true);
    if (j.is_discarded()) throw ConfigError("<file>", "malformed JSON in " + path.string());
    return j;
}

/// Shortest decimal text that parses back to exactly `x`.
inline void append_number(std::string& out, double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    out.append(buf, res.ptr);
}

inline constexpr std::string_view csv_header = "t,s,u,v,k1,k2,mode,d,delta,V_out";

[[nodiscard]] inline std::string trajectory_csv(const Trajectory& traj) {
    std::string out;
    out.reserve(traj.records.size() * 160 + 64);
    out.append(csv_header);
    out.push_back('\n');
    for (const auto& r : traj.records) {
        append_number(out, r.t);
        out.push_back(',');
        append_number(out, r.s);
        out.push_back(',');
        append_number(out, r.u);
        out.push_back(',');
        append_number(out, r.v);
        out.push_back(',');
        append_number(out, r.k1);
        out.push_back(',');
        append_number(out, r.k2);
        out.push_back(',');
        out.append(std::to_string(r.mode));
        out.push_back(',');
        append_number(out, r.d);
        out.push_back(',');
        if (r.delta) append_number(out, *r.delta);
        out.push_back(',');
        if (r.v_out) append_number(out, *r.v_out);
        out.push_back('\n');
    }
    return out;
}

[[nodiscard]] inline json report_to_json(const DiagnosticsReport& report) {
    json j;
    j["decrease_fraction"] = report.decrease_fraction ? json(*report.decrease_fraction) : json(nullptr);
    j["a0_pairs"] = report.a0_pairs;
    j["violations"] = report.violations;
    j["reach_time"] = report.reach_time ? json(*report.reach_time) : json(nullptr);
    json occupancy = json::object();
    for (std::size_t i = 0; i < report.mode_occupancy.size(); ++i) {
        occupancy["A" + std::to_string(i)] = report.mode_occupancy[i];
    }
    j["mode_occupancy"] = occupancy;
    j["switch_counts"] = {{"total", report.switch_counts.total}, {"a0_entries", report.switch_counts.a0_entries}};
    return j;
}

/// Writes via a sibling temporary file and rename, so readers never see a partial file.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw std::runtime_error("cannot rename to " + path.string());
    }
}

}  // namespace nbstsmc
