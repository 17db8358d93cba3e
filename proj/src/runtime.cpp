#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <json.hpp>

#include "graphblocks/runtime.hpp"

namespace graphblocks {

namespace {

// ---------------------------------------------------------------------------
// Numeric helpers (docs/runtime.md pins these down)
// ---------------------------------------------------------------------------

constexpr double kPi = 3.14159265358979323846;

double normalize_direction(double d) {
    d = std::fmod(d, 360.0);
    if (d > 180.0) d -= 360.0;
    if (d <= -180.0) d += 360.0;
    return d;
}

// Exact values at multiples of 90 degrees so square walks land on integers.
bool exact_trig(double degrees, double& s, double& c) {
    double m = std::fmod(degrees, 360.0);
    if (m < 0) m += 360.0;
    if (m == 0.0) { s = 0.0; c = 1.0; return true; }
    if (m == 90.0) { s = 1.0; c = 0.0; return true; }
    if (m == 180.0) { s = 0.0; c = -1.0; return true; }
    if (m == 270.0) { s = -1.0; c = 0.0; return true; }
    return false;
}

double sin_degrees(double d) {
    double s, c;
    if (exact_trig(d, s, c)) return s;
    return std::sin(d * kPi / 180.0);
}

double cos_degrees(double d) {
    double s, c;
    if (exact_trig(d, s, c)) return c;
    return std::cos(d * kPi / 180.0);
}

double floor_mod(double a, double b) {
    double r = std::fmod(a, b);
    if (r != 0.0 && ((r < 0.0) != (b < 0.0))) r += b;
    return r;
}

double round_half_up(double x) { return std::floor(x + 0.5); }

bool is_integral(double x) { return std::isfinite(x) && x == std::floor(x); }

// ---------------------------------------------------------------------------
// Coercions.  Values are stored raw; consumption coerces and may fail.
// ---------------------------------------------------------------------------

double as_number(const Scalar& v) {
    auto n = to_number(v);
    if (!n)
        fail(DiagCode::BadCoercion,
             "cannot interpret \"" + format_scalar(v) + "\" as a number");
    return *n;
}

bool as_boolean(const Scalar& v) {
    if (is_boolean(v)) return std::get<bool>(v);
    if (is_number(v)) return std::get<double>(v) != 0.0;
    std::string low = ascii_lower(std::get<std::string>(v));
    if (low == "true") return true;
    if (low == "false") return false;
    fail(DiagCode::BadCoercion,
         "cannot interpret \"" + format_scalar(v) + "\" as a boolean");
}

std::string as_text(const Scalar& v) { return format_scalar(v); }

bool numeric_like(const Scalar& v) {
    if (is_number(v)) return true;
    if (is_string(v)) return parse_number(std::get<std::string>(v)).has_value();
    return false;
}

// ---------------------------------------------------------------------------
// Interpreter
// ---------------------------------------------------------------------------

struct StopAllSignal {};
struct StopScriptSignal {};
struct CapSignal {
    Termination reason;
};

class Interpreter {
  public:
    Interpreter(const CompiledPlan& plan, const EventSchedule& schedule, const RunConfig& config)
        : plan_(plan), config_(config), engine_(config.seed) {
        events_ = schedule.events;
        std::stable_sort(events_.begin(), events_.end(),
                         [](const TimedEvent& a, const TimedEvent& b) { return a.t < b.t; });
    }

    RunResult run() {
        RunResult result;
        try {
            for (const TimedEvent& event : events_)
                for (const Script& script : plan_.scripts)
                    if (triggers(script, event)) run_script(script, event.t);
            result.termination = Termination::completed;
        } catch (const StopAllSignal&) {
            result.termination = Termination::stopped;
        } catch (const CapSignal& cap) {
            result.termination = cap.reason;
        } catch (const PipelineError& e) {
            result.termination = Termination::runtime_error;
            result.error = e.diag();
        }
        std::string reason = termination_name(result.termination);
        if (result.error) reason += std::string(": ") + code_name(result.error->code);
        log_.push_back("stopped (" + reason + ")");
        result.final_state = state_;
        result.log = std::move(log_);
        result.ticks = now_;
        return result;
    }

  private:
    static bool triggers(const Script& script, const TimedEvent& event) {
        const std::string& hat = script.trigger.block;
        if (hat == "WhenFlagClicked") return event.kind == TimedEvent::Kind::flag_clicked;
        if (hat == "WhenKeyPressed") {
            if (event.kind != TimedEvent::Kind::key_down) return false;
            auto it = script.trigger.fields.find("KEY");
            std::string key = it == script.trigger.fields.end() ? std::string("any") : it->second;
            return key == "any" || key == event.key;
        }
        return false;
    }

    void run_script(const Script& script, long long start) {
        now_ = std::max(now_, start);
        try {
            exec_body(script.body);
        } catch (const StopScriptSignal&) {
            // only this script ends; later triggers still run
        }
    }

    // --- schedule sensing: pure function of (events, now_) ----------------

    bool key_down_at(const std::string& key, long long t) const {
        if (key == "any") {
            std::map<std::string, bool> down;
            for (const TimedEvent& e : events_) {
                if (e.t > t) break;
                if (e.kind == TimedEvent::Kind::key_down) down[e.key] = true;
                if (e.kind == TimedEvent::Kind::key_up) down[e.key] = false;
            }
            for (const auto& [k, d] : down)
                if (d) return true;
            return false;
        }
        bool down = false;
        for (const TimedEvent& e : events_) {
            if (e.t > t) break;
            if (e.key != key) continue;
            if (e.kind == TimedEvent::Kind::key_down) down = true;
            if (e.kind == TimedEvent::Kind::key_up) down = false;
        }
        return down;
    }

    bool mouse_down_at(long long t) const {
        bool down = false;
        for (const TimedEvent& e : events_) {
            if (e.t > t) break;
            if (e.kind == TimedEvent::Kind::mouse_down) down = true;
            if (e.kind == TimedEvent::Kind::mouse_up) down = false;
        }
        return down;
    }

    // --- time -------------------------------------------------------------

    void spend(long long ticks) {
        now_ += ticks;
        if (now_ > config_.max_ticks) throw CapSignal{Termination::tick_cap};
    }

    void tick_statement() { spend(config_.ticks_per_statement); }

    void tick_timed(double secs) {
        double ticks = round_half_up(secs * static_cast<double>(config_.ticks_per_second));
        spend(ticks > 0 ? static_cast<long long>(ticks) : 0);
    }

    // --- random draws (documented reductions of mt19937 outputs) ----------

    double random_between(double lo, double hi) {
        if (lo > hi) std::swap(lo, hi);
        if (is_integral(lo) && is_integral(hi)) {
            auto span = static_cast<std::uint64_t>(hi - lo) + 1;
            return lo + static_cast<double>(engine_() % span);
        }
        double unit = static_cast<double>(engine_()) / 4294967296.0;  // [0, 1)
        return lo + unit * (hi - lo);
    }

    double random_stage_x() { return -240.0 + static_cast<double>(engine_() % 481); }
    double random_stage_y() { return -180.0 + static_cast<double>(engine_() % 361); }

    // --- expression evaluation (0 ticks) -----------------------------------

    Scalar arg(const Stmt& s, const std::string& port) {
        auto it = s.args.find(port);
        if (it == s.args.end())
            fail(DiagCode::MissingRequiredInput,
                 s.block + " is missing input " + port, {s.node_id}, {port});
        return eval(it->second);
    }

    std::string field(const Stmt& s, const std::string& id) const {
        auto it = s.fields.find(id);
        if (it == s.fields.end())
            fail(DiagCode::MissingRequiredInput,
                 s.block + " is missing field " + id, {s.node_id}, {id});
        return it->second;
    }

    Scalar child(const ExprNode& e, const std::string& port) {
        auto it = e.children.find(port);
        if (it == e.children.end())
            fail(DiagCode::MissingRequiredInput, e.block + " is missing input " + port, {}, {port});
        return eval(it->second);
    }

    Scalar variable(const std::string& name) const {
        auto it = state_.variables.find(name);
        if (it == state_.variables.end())
            fail(DiagCode::UndeclaredVariable, "variable '" + name + "' read before it was set");
        return it->second;
    }

    Scalar eval(const ExprNode& e) {
        if (e.kind == ExprNode::Kind::constant) return e.value;
        const std::string& b = e.block;

        if (b == "XPosition") return Scalar(state_.x);
        if (b == "YPosition") return Scalar(state_.y);
        if (b == "KeyPressed") {
            auto it = e.fields.find("KEY");
            std::string key = it == e.fields.end() ? std::string("any") : it->second;
            return Scalar(key_down_at(key, now_));
        }
        if (b == "MouseDown") return Scalar(mouse_down_at(now_));
        if (b == "GetVariable") {
            auto it = e.fields.find("VARIABLE");
            if (it == e.fields.end())
                fail(DiagCode::MissingRequiredInput, "GetVariable is missing field VARIABLE");
            return variable(it->second);
        }

        if (b == "Add") return Scalar(as_number(child(e, "NUM1")) + as_number(child(e, "NUM2")));
        if (b == "Subtract")
            return Scalar(as_number(child(e, "NUM1")) - as_number(child(e, "NUM2")));
        if (b == "Multiply")
            return Scalar(as_number(child(e, "NUM1")) * as_number(child(e, "NUM2")));
        if (b == "Divide") {
            double num = as_number(child(e, "NUM1"));
            double den = as_number(child(e, "NUM2"));
            if (den == 0.0) fail(DiagCode::DivisionByZero, "division by zero");
            return Scalar(num / den);
        }
        if (b == "Mod") {
            double num = as_number(child(e, "NUM1"));
            double den = as_number(child(e, "NUM2"));
            if (den == 0.0) fail(DiagCode::DivisionByZero, "modulo by zero");
            return Scalar(floor_mod(num, den));
        }
        if (b == "Random")
            return Scalar(random_between(as_number(child(e, "FROM")), as_number(child(e, "TO"))));
        if (b == "GreaterThan")
            return Scalar(as_number(child(e, "OPERAND1")) > as_number(child(e, "OPERAND2")));
        if (b == "LessThan")
            return Scalar(as_number(child(e, "OPERAND1")) < as_number(child(e, "OPERAND2")));
        if (b == "Equals") {
            Scalar a = child(e, "OPERAND1");
            Scalar b2 = child(e, "OPERAND2");
            if (numeric_like(a) && numeric_like(b2))
                return Scalar(as_number(a) == as_number(b2));
            return Scalar(ascii_lower(as_text(a)) == ascii_lower(as_text(b2)));
        }
        if (b == "And")
            return Scalar(as_boolean(child(e, "OPERAND1")) && as_boolean(child(e, "OPERAND2")));
        if (b == "Or")
            return Scalar(as_boolean(child(e, "OPERAND1")) || as_boolean(child(e, "OPERAND2")));
        if (b == "Not") return Scalar(!as_boolean(child(e, "OPERAND")));
        if (b == "Join")
            return Scalar(as_text(child(e, "STRING1")) + as_text(child(e, "STRING2")));
        if (b == "LetterOf") {
            double pos = std::floor(as_number(child(e, "LETTER")));
            std::string text = as_text(child(e, "STRING"));
            if (pos < 1 || pos > static_cast<double>(text.size()))
                fail(DiagCode::IndexOutOfRange,
                     "letter " + format_number(pos) + " of a " +
                         std::to_string(text.size()) + "-letter text");
            return Scalar(std::string(1, text[static_cast<size_t>(pos) - 1]));
        }
        if (b == "LengthOf")
            return Scalar(static_cast<double>(as_text(child(e, "STRING")).size()));
        if (b == "Contains") {
            std::string hay = ascii_lower(as_text(child(e, "STRING1")));
            std::string needle = ascii_lower(as_text(child(e, "STRING2")));
            return Scalar(hay.find(needle) != std::string::npos);
        }
        if (b == "Round") return Scalar(round_half_up(as_number(child(e, "NUM"))));
        if (b == "MathFunction") return math_function(e);

        fail(DiagCode::UnknownBlock, "no reporter named '" + b + "'");
    }

    Scalar math_function(const ExprNode& e) {
        auto it = e.fields.find("OPERATOR");
        if (it == e.fields.end())
            fail(DiagCode::MissingRequiredInput, "MathFunction is missing field OPERATOR");
        const std::string& op = it->second;
        double x = as_number(child(e, "NUM"));
        if (op == "abs") return Scalar(std::fabs(x));
        if (op == "floor") return Scalar(std::floor(x));
        if (op == "ceiling") return Scalar(std::ceil(x));
        if (op == "sqrt") return Scalar(std::sqrt(x));
        if (op == "sin") return Scalar(sin_degrees(x));
        if (op == "cos") return Scalar(cos_degrees(x));
        if (op == "tan") {
            double m = std::fmod(x, 360.0);
            if (m < 0) m += 360.0;
            if (m == 90.0) return Scalar(std::numeric_limits<double>::infinity());
            if (m == 270.0) return Scalar(-std::numeric_limits<double>::infinity());
            return Scalar(std::tan(x * kPi / 180.0));
        }
        if (op == "asin") return Scalar(std::asin(x) * 180.0 / kPi);
        if (op == "acos") return Scalar(std::acos(x) * 180.0 / kPi);
        if (op == "atan") return Scalar(std::atan(x) * 180.0 / kPi);
        if (op == "ln") return Scalar(std::log(x));
        if (op == "log") return Scalar(std::log10(x));
        if (op == "e^") return Scalar(std::exp(x));
        if (op == "10^") return Scalar(std::pow(10.0, x));
        fail(DiagCode::BadFieldValue, "MathFunction has no operator '" + op + "'");
    }

    // --- statement execution ------------------------------------------------

    void exec_body(const std::vector<Stmt>& body) {
        for (const Stmt& s : body) exec(s);
    }

    void say(const std::string& line) { log_.push_back(line); }

    void move_to(double x, double y) {
        state_.x = x;
        state_.y = y;
    }

    void exec(const Stmt& s) {
        const std::string& b = s.block;

        // control blocks manage their own time; everything else is
        // effect first, then the statement tick.
        if (b == "Repeat") {
            double raw = as_number(arg(s, "TIMES"));
            long long times = raw > 0 ? static_cast<long long>(std::floor(raw)) : 0;
            for (long long i = 0; i < times; ++i) {
                check_loop(s, i + 1);
                exec_body(s.substacks.at(0));
            }
            return;
        }
        if (b == "Forever") {
            for (long long i = 1;; ++i) {
                check_loop(s, i);
                exec_body(s.substacks.at(0));
            }
        }
        if (b == "RepeatUntil") {
            for (long long i = 1;; ++i) {
                if (as_boolean(arg(s, "CONDITION"))) return;
                check_loop(s, i);
                exec_body(s.substacks.at(0));
            }
        }
        if (b == "If") {
            if (as_boolean(arg(s, "CONDITION"))) exec_body(s.substacks.at(0));
            return;
        }
        if (b == "IfElse") {
            if (as_boolean(arg(s, "CONDITION")))
                exec_body(s.substacks.at(0));
            else
                exec_body(s.substacks.at(1));
            return;
        }
        if (b == "WaitUntil") {
            while (!as_boolean(arg(s, "CONDITION"))) spend(1);
            say("waited until condition");
            tick_statement();
            return;
        }

        if (b == "MoveSteps") {
            double steps = as_number(arg(s, "STEPS"));
            move_to(state_.x + steps * sin_degrees(state_.direction),
                    state_.y + steps * cos_degrees(state_.direction));
            say("moved " + format_number(steps) + " steps");
        } else if (b == "TurnRight") {
            double d = as_number(arg(s, "DEGREES"));
            state_.direction = normalize_direction(state_.direction + d);
            say("turned right " + format_number(d) + " degrees");
        } else if (b == "TurnLeft") {
            double d = as_number(arg(s, "DEGREES"));
            state_.direction = normalize_direction(state_.direction - d);
            say("turned left " + format_number(d) + " degrees");
        } else if (b == "GoToRandom") {
            double x = random_stage_x();
            double y = random_stage_y();
            move_to(x, y);
            say("went to x: " + format_number(x) + " y: " + format_number(y));
        } else if (b == "GotoXY") {
            double x = as_number(arg(s, "X"));
            double y = as_number(arg(s, "Y"));
            move_to(x, y);
            say("went to x: " + format_number(x) + " y: " + format_number(y));
        } else if (b == "GlideToRandom") {
            double secs = as_number(arg(s, "SECS"));
            double x = random_stage_x();
            double y = random_stage_y();
            move_to(x, y);
            say("glided to (" + format_number(x) + ", " + format_number(y) + ") over " +
                format_number(secs) + " secs");
            tick_timed(secs);
            return;
        } else if (b == "GlideToXY") {
            double secs = as_number(arg(s, "SECS"));
            double x = as_number(arg(s, "X"));
            double y = as_number(arg(s, "Y"));
            move_to(x, y);
            say("glided to (" + format_number(x) + ", " + format_number(y) + ") over " +
                format_number(secs) + " secs");
            tick_timed(secs);
            return;
        } else if (b == "PointInDirection") {
            double d = as_number(arg(s, "DIRECTION"));
            state_.direction = normalize_direction(d);
            say("pointed in direction " + format_number(state_.direction));
        } else if (b == "ChangeXBy") {
            double dx = as_number(arg(s, "DX"));
            move_to(state_.x + dx, state_.y);
            say("changed x by " + format_number(dx));
        } else if (b == "SetXTo") {
            double x = as_number(arg(s, "X"));
            move_to(x, state_.y);
            say("set x to " + format_number(x));
        } else if (b == "ChangeYBy") {
            double dy = as_number(arg(s, "DY"));
            move_to(state_.x, state_.y + dy);
            say("changed y by " + format_number(dy));
        } else if (b == "SetYTo") {
            double y = as_number(arg(s, "Y"));
            move_to(state_.x, y);
            say("set y to " + format_number(y));
        } else if (b == "Say") {
            say("said: " + as_text(arg(s, "MESSAGE")));
        } else if (b == "SayForSecs") {
            std::string m = as_text(arg(s, "MESSAGE"));
            double secs = as_number(arg(s, "SECS"));
            say("said: " + m + " for " + format_number(secs) + " secs");
            tick_timed(secs);
            return;
        } else if (b == "Think") {
            say("thought: " + as_text(arg(s, "MESSAGE")));
        } else if (b == "ThinkForSecs") {
            std::string m = as_text(arg(s, "MESSAGE"));
            double secs = as_number(arg(s, "SECS"));
            say("thought: " + m + " for " + format_number(secs) + " secs");
            tick_timed(secs);
            return;
        } else if (b == "ChangeSizeBy") {
            double d = as_number(arg(s, "CHANGE"));
            state_.size += d;
            say("changed size by " + format_number(d));
        } else if (b == "SetSizeTo") {
            double v = as_number(arg(s, "SIZE"));
            state_.size = v;
            say("set size to " + format_number(v));
        } else if (b == "Wait") {
            double secs = as_number(arg(s, "DURATION"));
            say("waited " + format_number(secs) + " secs");
            tick_timed(secs);
            return;
        } else if (b == "Stop") {
            std::string option = field(s, "OPTION");
            if (option == "all") {
                say("stopped all");
                tick_statement();
                throw StopAllSignal{};
            }
            say("stopped this script");
            tick_statement();
            throw StopScriptSignal{};
        } else if (b == "SetVariable") {
            std::string name = field(s, "VARIABLE");
            Scalar v = arg(s, "VALUE");
            state_.variables[name] = v;
            say("set " + name + " to " + format_scalar(v));
        } else if (b == "ChangeVariableBy") {
            std::string name = field(s, "VARIABLE");
            double delta = as_number(arg(s, "VALUE"));
            double current = as_number(variable(name));
            state_.variables[name] = Scalar(current + delta);
            say("changed " + name + " by " + format_number(delta));
        } else {
            fail(DiagCode::UnknownBlock, "no statement named '" + b + "'", {s.node_id});
        }
        tick_statement();
    }

    void check_loop(const Stmt& s, long long iteration) {
        (void)s;
        if (iteration > config_.max_iterations_per_loop) throw CapSignal{Termination::loop_cap};
    }

    const CompiledPlan& plan_;
    RunConfig config_;
    std::vector<TimedEvent> events_;
    SpriteState state_;
    std::vector<std::string> log_;
    long long now_ = 0;
    std::mt19937 engine_;
};

TimedEvent::Kind kind_from_name(const std::string& name) {
    if (name == "flag_clicked") return TimedEvent::Kind::flag_clicked;
    if (name == "key_down") return TimedEvent::Kind::key_down;
    if (name == "key_up") return TimedEvent::Kind::key_up;
    if (name == "mouse_down") return TimedEvent::Kind::mouse_down;
    if (name == "mouse_up") return TimedEvent::Kind::mouse_up;
    fail(DiagCode::SchemaViolation, "unknown event kind '" + name + "'");
}

}  // namespace

const char* termination_name(Termination t) {
    switch (t) {
        case Termination::completed: return "completed";
        case Termination::stopped: return "stopped";
        case Termination::tick_cap: return "tick cap";
        case Termination::loop_cap: return "loop cap";
        case Termination::runtime_error: return "runtime error";
    }
    return "unknown";
}

EventSchedule parse_event_schedule(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(DiagCode::MalformedJson, e.what());
    }
    nlohmann::json items = doc;
    if (doc.is_object()) {
        if (!doc.contains("events"))
            fail(DiagCode::SchemaViolation, "schedule object needs an 'events' array");
        items = doc["events"];
    }
    if (!items.is_array()) fail(DiagCode::SchemaViolation, "schedule must be an array of events");

    EventSchedule schedule;
    for (const auto& item : items) {
        if (!item.is_object() || !item.contains("t") || !item.contains("kind"))
            fail(DiagCode::SchemaViolation, "each event needs 't' and 'kind'");
        if (!item["t"].is_number())
            fail(DiagCode::SchemaViolation, "event 't' must be a number of ticks");
        TimedEvent e;
        e.t = item["t"].get<long long>();
        if (e.t < 0) fail(DiagCode::SchemaViolation, "event 't' must not be negative");
        e.kind = kind_from_name(item["kind"].get<std::string>());
        bool needs_key =
            e.kind == TimedEvent::Kind::key_down || e.kind == TimedEvent::Kind::key_up;
        if (needs_key) {
            if (!item.contains("key") || !item["key"].is_string() ||
                item["key"].get<std::string>().empty())
                fail(DiagCode::SchemaViolation, "key events need a non-empty 'key'");
            e.key = item["key"].get<std::string>();
        }
        schedule.events.push_back(std::move(e));
    }
    std::stable_sort(schedule.events.begin(), schedule.events.end(),
                     [](const TimedEvent& a, const TimedEvent& b) { return a.t < b.t; });
    return schedule;
}

RunResult run(const CompiledPlan& plan, const EventSchedule& schedule, const RunConfig& config) {
    Interpreter interp(plan, schedule, config);
    return interp.run();
}

std::string render_log(const RunResult& r) {
    std::string out;
    for (const auto& line : r.log) {
        out += line;
        out += '\n';
    }
    return out;
}

nlohmann::json state_to_json(const SpriteState& s) {
    nlohmann::json j;
    j["x"] = scalar_to_json(Scalar(s.x));
    j["y"] = scalar_to_json(Scalar(s.y));
    j["direction"] = scalar_to_json(Scalar(s.direction));
    j["size"] = scalar_to_json(Scalar(s.size));
    j["variables"] = nlohmann::json::object();
    for (const auto& [name, value] : s.variables) j["variables"][name] = scalar_to_json(value);
    return j;
}

}  // namespace graphblocks
