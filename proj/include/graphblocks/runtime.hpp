#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "graphblocks/compiler.hpp"
#include "graphblocks/diagnostics.hpp"
#include "graphblocks/scalar.hpp"

namespace graphblocks {

struct SpriteState {
    double x = 0.0;
    double y = 0.0;
    double direction = 90.0;  // degrees, 0 = up, 90 = right, in (-180, 180]
    double size = 100.0;
    std::map<std::string, Scalar> variables;

    bool operator==(const SpriteState&) const = default;
};

struct TimedEvent {
    enum class Kind { flag_clicked, key_down, key_up, mouse_down, mouse_up };

    long long t = 0;          // virtual ticks
    Kind kind = Kind::flag_clicked;
    std::string key;          // key_down / key_up only

    bool operator==(const TimedEvent&) const = default;
};

struct EventSchedule {
    std::vector<TimedEvent> events;  // kept sorted by t (stable)

    bool operator==(const EventSchedule&) const = default;
};

EventSchedule parse_event_schedule(const std::string& json_text);

struct RunConfig {
    long long max_ticks = 1'000'000;
    long long max_iterations_per_loop = 10'000;
    long long ticks_per_second = 1000;
    long long ticks_per_statement = 1;
    std::uint32_t seed = 0;

    bool operator==(const RunConfig&) const = default;
};

enum class Termination { completed, stopped, tick_cap, loop_cap, runtime_error };

const char* termination_name(Termination t);

struct RunResult {
    SpriteState final_state;
    std::vector<std::string> log;  // one phrase per executed block + stop line
    long long ticks = 0;
    Termination termination = Termination::completed;
    std::optional<Diagnostic> error;  // set iff termination == runtime_error

    bool operator==(const RunResult&) const = default;
};

// Deterministic replay: same plan + schedule + config => identical result.
// Triggered scripts run sequentially; sensing reads the schedule state at
// the current virtual tick.  docs/runtime.md defines per-block semantics.
RunResult run(const CompiledPlan& plan, const EventSchedule& schedule, const RunConfig& config);

std::string render_log(const RunResult& r);          // '\n'-joined log lines
nlohmann::json state_to_json(const SpriteState& s);  // canonical state dump

}  // namespace graphblocks
