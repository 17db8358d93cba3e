#include <algorithm>
#include <cctype>
#include <cmath>
#include <regex>

#include "graphblocks/harness.hpp"

namespace graphblocks {

namespace {

// ---------------------------------------------------------------------------
// Log inspection helpers.  Checkers are necessary conditions, not proofs:
// they accept every reasonable solution and rely on manual annotations for
// anything subtler (docs/benchmark.md).
// ---------------------------------------------------------------------------

bool starts_with(const std::string& s, const std::string& prefix) {
    return s.rfind(prefix, 0) == 0;
}

int count_prefix(const RunResult& r, const std::string& prefix) {
    int n = 0;
    for (const auto& line : r.log)
        if (starts_with(line, prefix)) ++n;
    return n;
}

int count_contains(const RunResult& r, const std::string& needle) {
    int n = 0;
    for (const auto& line : r.log)
        if (line.find(needle) != std::string::npos) ++n;
    return n;
}

// Messages of say/think lines; the "for {s} secs" suffix of the timed
// variants is stripped when present.
std::vector<std::string> said_messages(const RunResult& r) {
    static const std::regex timed_suffix(" for -?[0-9.]+(e[+-]?[0-9]+)? secs$");
    std::vector<std::string> out;
    for (const auto& line : r.log) {
        std::string m;
        if (starts_with(line, "said: "))
            m = line.substr(6);
        else if (starts_with(line, "thought: "))
            m = line.substr(9);
        else
            continue;
        out.push_back(m);
        std::string stripped = std::regex_replace(m, timed_suffix, "");
        if (stripped != m) out.push_back(stripped);
    }
    return out;
}

std::vector<double> moved_amounts(const RunResult& r) {
    std::vector<double> out;
    for (const auto& line : r.log) {
        if (!starts_with(line, "moved ")) continue;
        size_t end = line.rfind(" steps");
        if (end == std::string::npos) continue;
        auto n = parse_number(line.substr(6, end - 6));
        if (n) out.push_back(*n);
    }
    return out;
}

int motion_lines(const RunResult& r) {
    return count_prefix(r, "moved ") + count_prefix(r, "went to x: ") +
           count_prefix(r, "glided to (");
}

int size_lines(const RunResult& r) {
    return count_prefix(r, "changed size by ") + count_prefix(r, "set size to ");
}

bool completed(const RunResult& r) { return r.termination == Termination::completed; }

bool capped(const RunResult& r) {
    return r.termination == Termination::tick_cap || r.termination == Termination::loop_cap;
}

bool no_runtime_error(const RunResult& r) {
    return r.termination != Termination::runtime_error;
}

bool any_variable_numeric(const RunResult& r) {
    for (const auto& [name, value] : r.final_state.variables)
        if (to_number(value)) return true;
    return !r.final_state.variables.empty();
}

// ---------------------------------------------------------------------------
// The twenty benchmark prompts
// ---------------------------------------------------------------------------

std::vector<PromptCase> build_prompts() {
    std::vector<PromptCase> p;

    p.push_back({1,
                 "When the green flag is clicked, continuously move in a square pattern until "
                 "the user presses the space key.",
                 [](const RunResult& r) {
                     return completed(r) && count_prefix(r, "moved ") >= 4 &&
                            count_contains(r, " 90 degrees") >= 4;
                 }});

    p.push_back({2,
                 "When the \"r\" key is pressed, set size to a random number between 50 and 150.",
                 [](const RunResult& r) {
                     return completed(r) && size_lines(r) >= 1 && r.final_state.size >= 50 &&
                            r.final_state.size <= 150;
                 }});

    p.push_back({3,
                 "When the \"s\" key is pressed, say a secret password made of two random "
                 "letters and three random numbers.",
                 [](const RunResult& r) {
                     if (!completed(r)) return false;
                     for (const auto& m : said_messages(r)) {
                         int digits = 0, letters = 0;
                         for (char c : m) {
                             if (std::isdigit(static_cast<unsigned char>(c))) ++digits;
                             if (std::isalpha(static_cast<unsigned char>(c))) ++letters;
                         }
                         if (m.size() >= 5 && digits >= 3 && letters >= 2) return true;
                     }
                     return false;
                 }});

    p.push_back({4,
                 "When the green flag is clicked, simulate a loading bar by incrementally "
                 "increasing a progress variable and displaying it.",
                 [](const RunResult& r) {
                     int variable_ops =
                         count_prefix(r, "set ") + count_prefix(r, "changed ") -
                         size_lines(r) - count_prefix(r, "set x to ") -
                         count_prefix(r, "set y to ") - count_prefix(r, "changed x by ") -
                         count_prefix(r, "changed y by ");
                     return no_runtime_error(r) && any_variable_numeric(r) &&
                            variable_ops >= 2 && !said_messages(r).empty();
                 }});

    p.push_back({5,
                 "When the green flag is clicked, repeat until key \"q\" is pressed: move "
                 "randomly.",
                 [](const RunResult& r) { return completed(r) && motion_lines(r) >= 1; }});

    p.push_back({6,
                 "When the green flag is clicked, move forward by 50 steps and rotate right 45 "
                 "degrees, repeating forever.",
                 [](const RunResult& r) {
                     return capped(r) && count_prefix(r, "moved 50 steps") >= 2 &&
                            count_prefix(r, "turned right 45 degrees") >= 2;
                 }});

    p.push_back({7, "When the \"down arrow\" key is pressed, decrease the sprite's size by 10.",
                 [](const RunResult& r) {
                     return completed(r) && size_lines(r) >= 1 && r.final_state.size == 90.0;
                 }});

    p.push_back({8,
                 "When the green flag is clicked, repeat until X is greater than 150: move 10 "
                 "steps.",
                 [](const RunResult& r) {
                     return completed(r) && count_prefix(r, "moved ") >= 1 &&
                            r.final_state.x > 150.0;
                 }});

    p.push_back({9,
                 "When the green flag is clicked, join \"X is \" with current X position and "
                 "say it.",
                 [](const RunResult& r) {
                     if (!completed(r)) return false;
                     for (const auto& m : said_messages(r))
                         if (ascii_lower(m).find("x is") != std::string::npos) return true;
                     return false;
                 }});

    p.push_back({10, "When the \"d\" key is pressed, set X to 30 and Y to 6.",
                 [](const RunResult& r) {
                     return completed(r) && r.final_state.x == 30.0 && r.final_state.y == 6.0;
                 }});

    p.push_back({11,
                 "When the green flag is clicked, simulate a spiral by increasing steps and "
                 "turning each time.",
                 [](const RunResult& r) {
                     if (!no_runtime_error(r)) return false;
                     std::vector<double> steps = moved_amounts(r);
                     if (steps.size() < 3 || count_prefix(r, "turned ") < 2) return false;
                     for (size_t i = 1; i < steps.size(); ++i)
                         if (steps[i] <= steps[i - 1]) return false;
                     return true;
                 }});

    p.push_back({12,
                 "When the green flag is clicked, if size is greater than 100, say \"Too "
                 "big!\".",
                 [](const RunResult& r) {
                     if (!completed(r)) return false;
                     // size starts at 100, so an untouched sprite must stay quiet
                     bool resized = size_lines(r) > 0;
                     if (resized) return true;
                     return count_contains(r, "Too big!") == 0;
                 }});

    p.push_back({13,
                 "When the green flag is clicked, say a sentence constructed from 3 random "
                 "words.",
                 [](const RunResult& r) {
                     if (!completed(r)) return false;
                     for (const auto& m : said_messages(r))
                         if (std::count(m.begin(), m.end(), ' ') >= 2 && m.size() >= 5)
                             return true;
                     return false;
                 }});

    p.push_back({14, "When the \"r\" key is pressed, simulate a die roll and say the result.",
                 [](const RunResult& r) {
                     if (!completed(r)) return false;
                     for (const auto& m : said_messages(r)) {
                         auto n = parse_number(m);
                         if (n && *n == std::floor(*n) && *n >= 1 && *n <= 6) return true;
                     }
                     return false;
                 }});

    p.push_back({15,
                 "When the green flag is clicked, count up for 5s from 0 to 100, saying each "
                 "number.",
                 [](const RunResult& r) {
                     if (!completed(r)) return false;
                     int says = count_prefix(r, "said: ") + count_prefix(r, "thought: ");
                     bool reached = false;
                     for (const auto& m : said_messages(r)) {
                         auto n = parse_number(m);
                         if (n && *n == 100.0) reached = true;
                     }
                     return says >= 10 && reached;
                 }});

    p.push_back({16,
                 "When the green flag is clicked, simulate a heartbeat by growing and "
                 "shrinking repeatedly.",
                 [](const RunResult& r) { return no_runtime_error(r) && size_lines(r) >= 4; }});

    p.push_back({17,
                 "When the \"left arrow\" key is pressed, change X by -20 and say \"Going "
                 "left!\"",
                 [](const RunResult& r) {
                     return completed(r) && r.final_state.x == -20.0 &&
                            count_contains(r, "Going left!") >= 1;
                 }});

    p.push_back({18,
                 "When the green flag is clicked, wait until the \"a\" key is pressed, then "
                 "jump to (0, 0).",
                 [](const RunResult& r) {
                     return completed(r) && count_prefix(r, "waited") >= 1 &&
                            r.final_state.x == 0.0 && r.final_state.y == 0.0;
                 }});

    p.push_back({19,
                 "When the green flag is clicked, alternate between saying \"Tick\" and "
                 "\"Tock\" forever.",
                 [](const RunResult& r) {
                     return capped(r) && count_contains(r, "Tick") >= 2 &&
                            count_contains(r, "Tock") >= 2;
                 }});

    p.push_back({20, "When the \"x\" key is pressed, say a randomly selected word from a list.",
                 [](const RunResult& r) {
                     if (!completed(r)) return false;
                     for (const auto& m : said_messages(r))
                         if (!m.empty()) return true;
                     return false;
                 }});

    return p;
}

TimedEvent key_at(long long t, const std::string& key) {
    TimedEvent e;
    e.t = t;
    e.kind = TimedEvent::Kind::key_down;
    e.key = key;
    return e;
}

}  // namespace

const std::vector<PromptCase>& benchmark_prompts() {
    static const std::vector<PromptCase> prompts = build_prompts();
    return prompts;
}

const PromptCase& prompt_by_id(int id) {
    for (const auto& p : benchmark_prompts())
        if (p.id == id) return p;
    fail(DiagCode::SchemaViolation, "no benchmark prompt " + std::to_string(id));
}

EventSchedule default_schedule(int prompt_id) {
    EventSchedule s;
    TimedEvent flag;
    flag.t = 0;
    flag.kind = TimedEvent::Kind::flag_clicked;
    s.events.push_back(flag);
    switch (prompt_id) {
        case 1: s.events.push_back(key_at(64, "space")); break;
        case 2: s.events.push_back(key_at(0, "r")); break;
        case 3: s.events.push_back(key_at(0, "s")); break;
        case 5: s.events.push_back(key_at(40, "q")); break;
        case 7: s.events.push_back(key_at(0, "down arrow")); break;
        case 10: s.events.push_back(key_at(0, "d")); break;
        case 14: s.events.push_back(key_at(0, "r")); break;
        case 17: s.events.push_back(key_at(0, "left arrow")); break;
        case 18: s.events.push_back(key_at(7, "a")); break;
        case 20: s.events.push_back(key_at(0, "x")); break;
        default: break;
    }
    return s;
}

}  // namespace graphblocks
