#pragma once

// Shared fuzz generators and oracles for the test binaries.  Everything is
// seeded explicitly so failures reproduce.

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "graphblocks/compiler.hpp"
#include "graphblocks/graph.hpp"
#include "graphblocks/runtime.hpp"

namespace testing_helpers {

using namespace graphblocks;

// ---------------------------------------------------------------------------
// Node id supply: node_a, node_b, ..., node_z, node_aa, ...
// ---------------------------------------------------------------------------

inline std::string letters_id(int n) {
    std::string suffix;
    do {
        suffix.insert(suffix.begin(), static_cast<char>('a' + n % 26));
        n = n / 26 - 1;
    } while (n >= 0);
    return "node_" + suffix;
}

// ---------------------------------------------------------------------------
// Random digraphs for toposort fuzzing (block names are irrelevant there)
// ---------------------------------------------------------------------------

struct RawDigraph {
    GraphDoc doc;
    bool has_cycle = false;
};

// Brute-force cycle oracle: three-color DFS over the edge list.
inline bool dfs_has_cycle(const GraphDoc& g) {
    std::map<std::string, std::vector<std::string>> succ;
    for (const auto& e : g.edges) {
        if (!g.nodes.count(e.out_node) || !g.nodes.count(e.in_node)) continue;
        succ[e.out_node].push_back(e.in_node);
    }
    std::map<std::string, int> color;  // 0 white, 1 gray, 2 black
    std::vector<std::pair<std::string, size_t>> stack;
    for (const auto& [start, _] : g.nodes) {
        if (color[start] != 0) continue;
        stack.push_back({start, 0});
        color[start] = 1;
        while (!stack.empty()) {
            auto& [id, next] = stack.back();
            auto& out = succ[id];
            if (next < out.size()) {
                const std::string& to = out[next++];
                if (color[to] == 1) return true;
                if (color[to] == 0) {
                    color[to] = 1;
                    stack.push_back({to, 0});
                }
            } else {
                color[id] = 2;
                stack.pop_back();
            }
        }
    }
    return false;
}

// Either a guaranteed DAG (edges only from lower to higher index) or the
// same construction with one random back edge planted.
inline RawDigraph random_digraph(std::mt19937& rng, bool plant_cycle) {
    RawDigraph out;
    int n = 2 + static_cast<int>(rng() % 12);
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) {
        ids.push_back(letters_id(i));
        out.doc.nodes[ids.back()] = NodeEntry{"Constant", Scalar(0.0)};
    }
    int edges = static_cast<int>(rng() % (2 * n + 1));
    for (int i = 0; i < edges; ++i) {
        int a = static_cast<int>(rng() % n);
        int b = static_cast<int>(rng() % n);
        if (a == b) continue;
        if (a > b) std::swap(a, b);  // forward edge keeps the base acyclic
        out.doc.edges.push_back(Edge{ids[a], "OUT", ids[b], "IN"});
    }
    if (plant_cycle) {
        // A cycle of length 1..3 somewhere in the node set.
        int len = 1 + static_cast<int>(rng() % 3);
        std::vector<int> ring;
        for (int i = 0; i < len; ++i) ring.push_back(static_cast<int>(rng() % n));
        for (int i = 0; i < len; ++i)
            out.doc.edges.push_back(
                Edge{ids[ring[i]], "OUT", ids[ring[(i + 1) % len]], "IN"});
        out.has_cycle = true;
    }
    return out;
}

// True when `order` contains every node exactly once and respects every
// edge between known nodes.
inline bool is_topological_order(const GraphDoc& g, const std::vector<std::string>& order) {
    if (order.size() != g.nodes.size()) return false;
    std::map<std::string, size_t> pos;
    for (size_t i = 0; i < order.size(); ++i) {
        if (!g.nodes.count(order[i]) || pos.count(order[i])) return false;
        pos[order[i]] = i;
    }
    for (const auto& e : g.edges) {
        if (!pos.count(e.out_node) || !pos.count(e.in_node)) continue;
        if (pos[e.out_node] >= pos[e.in_node]) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Random convertible graphs for representation round-trips.  Every in-port
// and field of every placed block is wired, each from its own fresh source,
// and no two edges share an unordered node pair (parallel edges between one
// pair are ambiguous in the per-node adjacency encoding; docs covers this).
// ---------------------------------------------------------------------------

inline GraphDoc random_convertible_graph(std::mt19937& rng, const Catalog& catalog) {
    GraphDoc g;
    int next = 0;
    auto fresh = [&] { return letters_id(next++); };

    const auto& blocks = catalog.list_blocks();
    std::vector<const BlockSpec*> statements, reporters;
    for (const auto& b : blocks) {
        if (b.category == Category::statement || b.category == Category::control)
            statements.push_back(&b);
        if (b.category == Category::reporter) reporters.push_back(&b);
    }

    // Variable reads only validate once some SetVariable writes the (shared,
    // free-form) binding "score"; gate the reading blocks on that.
    bool have_writer = false;

    auto constant_for = [&](ValueType t) {
        std::string id = fresh();
        Scalar v = t == ValueType::string ? Scalar(std::string("text"))
                   : t == ValueType::boolean
                       ? Scalar(true)
                       : Scalar(static_cast<double>(rng() % 100));
        g.nodes[id] = NodeEntry{"Constant", v};
        return id;
    };

    // Wires every value in-port and field of `id`; reporters feed number
    // ports sometimes, fresh constants always work.
    std::function<void(const std::string&, const BlockSpec&, int)> wire_inputs =
        [&](const std::string& id, const BlockSpec& spec, int depth) {
            for (const PortSpec* p : spec.value_in_ports()) {
                if (depth > 0 && p->type == ValueType::number && rng() % 3 == 0) {
                    const BlockSpec* r;
                    do {
                        r = reporters[rng() % reporters.size()];
                    } while (r->out_ports[0].type != ValueType::number ||
                             (!have_writer && r->name == "GetVariable"));
                    std::string rid = fresh();
                    g.nodes[rid] = NodeEntry{r->name, std::nullopt};
                    wire_inputs(rid, *r, depth - 1);
                    g.edges.push_back(Edge{rid, r->out_ports[0].id, id, p->id});
                } else {
                    g.edges.push_back(Edge{constant_for(p->type), "", id, p->id});
                }
            }
            for (const FieldSpec& f : spec.fields) {
                std::string token = f.free_form ? "score" : f.allowed_values[rng() % f.allowed_values.size()];
                std::string cid = fresh();
                g.nodes[cid] = NodeEntry{"Constant", Scalar(token)};
                g.edges.push_back(Edge{cid, "", id, f.id});
            }
        };

    auto pick_statement = [&] {
        const BlockSpec* s;
        do {
            s = statements[rng() % statements.size()];
        } while (!have_writer && s->name == "ChangeVariableBy");
        return s;
    };

    // One hat with a chain of statements; loops get a one-statement body.
    std::string hat = fresh();
    g.nodes[hat] = NodeEntry{"WhenFlagClicked", std::nullopt};
    std::string prev = hat;
    int chain = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < chain; ++i) {
        const BlockSpec* spec = pick_statement();
        std::string id = fresh();
        g.nodes[id] = NodeEntry{spec->name, std::nullopt};
        if (spec->name == "SetVariable") have_writer = true;
        g.edges.push_back(Edge{prev, "THEN", id, "EXEC"});
        wire_inputs(id, *spec, 2);
        for (const PortSpec* sub : spec->substack_ports()) {
            const BlockSpec* inner = pick_statement();
            while (!inner->substack_ports().empty()) inner = pick_statement();
            std::string iid = fresh();
            g.nodes[iid] = NodeEntry{inner->name, std::nullopt};
            if (inner->name == "SetVariable") have_writer = true;
            g.edges.push_back(Edge{id, sub->id, iid, "EXEC"});
            wire_inputs(iid, *inner, 1);
        }
        prev = id;
    }
    return g;
}

// ---------------------------------------------------------------------------
// Random compiled plans for the script round-trip equivalence fuzz
// ---------------------------------------------------------------------------

class PlanFuzzer {
  public:
    explicit PlanFuzzer(unsigned seed) : rng_(seed) {}

    CompiledPlan plan() {
        CompiledPlan p;
        next_id_ = 0;
        settled_.clear();
        int scripts = 1 + static_cast<int>(rng_() % 3);
        for (int i = 0; i < scripts; ++i) p.scripts.push_back(script());
        // Declared variables mirror the script parser: every SetVariable
        // binding anywhere, sorted and deduplicated.
        std::set<std::string> vars;
        std::function<void(const Stmt&)> collect = [&](const Stmt& s) {
            if (s.block == "SetVariable") {
                auto it = s.fields.find("VARIABLE");
                if (it != s.fields.end()) vars.insert(it->second);
            }
            for (const auto& sub : s.substacks)
                for (const Stmt& child : sub) collect(child);
        };
        for (const Script& sc : p.scripts)
            for (const Stmt& s : sc.body) collect(s);
        p.declared_variables.assign(vars.begin(), vars.end());
        return p;
    }

    static EventSchedule schedule() {
        EventSchedule s;
        TimedEvent flag;
        flag.t = 0;
        flag.kind = TimedEvent::Kind::flag_clicked;
        s.events.push_back(flag);
        TimedEvent a;
        a.t = 3;
        a.kind = TimedEvent::Kind::key_down;
        a.key = "a";
        s.events.push_back(a);
        TimedEvent mouse;
        mouse.t = 6;
        mouse.kind = TimedEvent::Kind::mouse_down;
        s.events.push_back(mouse);
        TimedEvent space;
        space.t = 10;
        space.kind = TimedEvent::Kind::key_down;
        space.key = "space";
        s.events.push_back(space);
        return s;
    }

    static RunConfig config(unsigned seed) {
        RunConfig c;
        c.max_ticks = 2000;
        c.max_iterations_per_loop = 50;
        c.seed = seed;
        return c;
    }

  private:
    std::mt19937 rng_;
    int next_id_ = 0;
    std::vector<std::string> settled_;  // variables set at top level so far

    std::string fresh() { return letters_id(next_id_++); }
    int pick(int n) { return static_cast<int>(rng_() % static_cast<unsigned>(n)); }

    ExprNode constant(Scalar v) {
        ExprNode e;
        e.kind = ExprNode::Kind::constant;
        e.value = std::move(v);
        return e;
    }

    ExprNode reporter(const char* block) {
        ExprNode e;
        e.kind = ExprNode::Kind::reporter;
        e.block = block;
        return e;
    }

    ExprNode number_expr(int depth) {
        if (depth <= 0 || pick(3) == 0) {
            switch (pick(5)) {
                case 0: return constant(Scalar(static_cast<double>(pick(20)) - 5.0));
                case 1: return constant(Scalar(0.5 + pick(4)));
                case 2: return constant(Scalar(std::string("12")));  // numeric string
                case 3:
                    if (!settled_.empty()) {
                        ExprNode e = reporter("GetVariable");
                        e.fields["VARIABLE"] = settled_[pick(static_cast<int>(settled_.size()))];
                        return e;
                    }
                    [[fallthrough]];
                default: return constant(Scalar(static_cast<double>(pick(10))));
            }
        }
        switch (pick(8)) {
            case 0: {
                ExprNode e = reporter("Add");
                e.children["NUM1"] = number_expr(depth - 1);
                e.children["NUM2"] = number_expr(depth - 1);
                return e;
            }
            case 1: {
                ExprNode e = reporter("Multiply");
                e.children["NUM1"] = number_expr(depth - 1);
                e.children["NUM2"] = number_expr(depth - 1);
                return e;
            }
            case 2: {
                ExprNode e = reporter("Mod");
                e.children["NUM1"] = number_expr(depth - 1);
                e.children["NUM2"] = constant(Scalar(static_cast<double>(2 + pick(4))));
                return e;
            }
            case 3: {
                ExprNode e = reporter("Random");
                e.children["FROM"] = constant(Scalar(static_cast<double>(pick(5))));
                e.children["TO"] = constant(Scalar(static_cast<double>(5 + pick(10))));
                return e;
            }
            case 4: {
                ExprNode e = reporter("Round");
                e.children["NUM"] = number_expr(depth - 1);
                return e;
            }
            case 5: {
                ExprNode e = reporter("LengthOf");
                e.children["STRING"] = string_expr(depth - 1);
                return e;
            }
            case 6: {
                ExprNode e = reporter("MathFunction");
                static const char* ops[] = {"abs", "floor", "ceiling"};
                e.fields["OPERATOR"] = ops[pick(3)];
                e.children["NUM"] = number_expr(depth - 1);
                return e;
            }
            default: return pick(2) ? reporter("XPosition") : reporter("YPosition");
        }
    }

    ExprNode string_expr(int depth) {
        static const char* words[] = {"fox", "lamp", "Quartz", "12", "a b"};
        if (depth <= 0 || pick(2) == 0) return constant(Scalar(std::string(words[pick(5)])));
        switch (pick(3)) {
            case 0: {
                ExprNode e = reporter("Join");
                e.children["STRING1"] = string_expr(depth - 1);
                e.children["STRING2"] = string_expr(depth - 1);
                return e;
            }
            case 1: {
                ExprNode e = reporter("LetterOf");
                e.children["LETTER"] = constant(Scalar(static_cast<double>(1 + pick(3))));
                e.children["STRING"] = constant(Scalar(std::string("abcdef")));
                return e;
            }
            default: {
                ExprNode e = reporter("Join");
                e.children["STRING1"] = constant(Scalar(std::string("n=")));
                e.children["STRING2"] = number_expr(depth - 1);
                return e;
            }
        }
    }

    ExprNode boolean_expr(int depth) {
        switch (pick(depth <= 0 ? 3 : 6)) {
            case 0: {
                ExprNode e = reporter("KeyPressed");
                e.fields["KEY"] = pick(2) ? "a" : "space";
                return e;
            }
            case 1: return reporter("MouseDown");
            case 2: {
                ExprNode e = reporter("GreaterThan");
                e.children["OPERAND1"] = number_expr(0);
                e.children["OPERAND2"] = number_expr(0);
                return e;
            }
            case 3: {
                ExprNode e = reporter("Equals");
                e.children["OPERAND1"] = number_expr(depth - 1);
                e.children["OPERAND2"] = number_expr(depth - 1);
                return e;
            }
            case 4: {
                ExprNode e = reporter("Not");
                e.children["OPERAND"] = boolean_expr(depth - 1);
                return e;
            }
            default: {
                ExprNode e = reporter(pick(2) ? "And" : "Or");
                e.children["OPERAND1"] = boolean_expr(depth - 1);
                e.children["OPERAND2"] = boolean_expr(depth - 1);
                return e;
            }
        }
    }

    Stmt statement(const char* block) {
        Stmt s;
        s.node_id = fresh();
        s.block = block;
        return s;
    }

    Stmt simple_statement() {
        switch (pick(12)) {
            case 0: {
                Stmt s = statement("MoveSteps");
                s.args["STEPS"] = number_expr(2);
                return s;
            }
            case 1: {
                Stmt s = statement("TurnRight");
                s.args["DEGREES"] = number_expr(1);
                return s;
            }
            case 2: {
                Stmt s = statement("GotoXY");
                s.args["X"] = number_expr(1);
                s.args["Y"] = number_expr(1);
                return s;
            }
            case 3: {
                Stmt s = statement("Say");
                s.args["MESSAGE"] = string_expr(2);
                return s;
            }
            case 4: {
                Stmt s = statement("ThinkForSecs");
                s.args["MESSAGE"] = string_expr(1);
                s.args["SECS"] = constant(Scalar(0.001 * (1 + pick(5))));
                return s;
            }
            case 5: {
                Stmt s = statement("ChangeSizeBy");
                s.args["CHANGE"] = number_expr(1);
                return s;
            }
            case 6: {
                Stmt s = statement("Wait");
                s.args["DURATION"] = constant(Scalar(0.001 * pick(4)));
                return s;
            }
            case 7: {
                Stmt s = statement("SetVariable");
                static const char* names[] = {"score", "count", "total"};
                s.fields["VARIABLE"] = names[pick(3)];
                s.args["VALUE"] = number_expr(2);
                return s;
            }
            case 8: {
                if (!settled_.empty()) {
                    Stmt s = statement("ChangeVariableBy");
                    s.fields["VARIABLE"] = settled_[pick(static_cast<int>(settled_.size()))];
                    s.args["VALUE"] = number_expr(1);
                    return s;
                }
                [[fallthrough]];
            }
            case 9: {
                Stmt s = statement("ChangeXBy");
                s.args["DX"] = number_expr(1);
                return s;
            }
            case 10: {
                Stmt s = statement("PointInDirection");
                s.args["DIRECTION"] = number_expr(1);
                return s;
            }
            default: {
                Stmt s = statement("GoToRandom");
                return s;
            }
        }
    }

    std::vector<Stmt> body(int len, bool top_level) {
        std::vector<Stmt> out;
        for (int i = 0; i < len; ++i) {
            int roll = pick(10);
            if (roll < 6) {
                Stmt s = simple_statement();
                if (top_level && s.block == "SetVariable") settled_.push_back(s.fields["VARIABLE"]);
                out.push_back(std::move(s));
            } else if (roll < 7) {
                Stmt s = statement("Repeat");
                s.args["TIMES"] = constant(Scalar(static_cast<double>(pick(4))));
                s.substacks.push_back(body(1 + pick(2), false));
                out.push_back(std::move(s));
            } else if (roll < 8) {
                Stmt s = statement("If");
                s.args["CONDITION"] = boolean_expr(2);
                s.substacks.push_back(body(1 + pick(2), false));
                out.push_back(std::move(s));
            } else if (roll < 9) {
                Stmt s = statement("IfElse");
                s.args["CONDITION"] = boolean_expr(1);
                s.substacks.push_back(body(1 + pick(2), false));
                s.substacks.push_back(body(1 + pick(2), false));
                out.push_back(std::move(s));
            } else {
                Stmt s = statement("RepeatUntil");
                s.args["CONDITION"] = boolean_expr(1);
                s.substacks.push_back(body(1, false));
                out.push_back(std::move(s));
            }
        }
        return out;
    }

    Script script() {
        Script s;
        s.trigger.node_id = fresh();
        if (pick(3) == 0) {
            s.trigger.block = "WhenKeyPressed";
            s.trigger.fields["KEY"] = pick(2) ? "a" : "space";
        } else {
            s.trigger.block = "WhenFlagClicked";
        }
        // Only flag scripts settle variables for later GetVariable picks:
        // they run at t=0 in generation order, so a variable settled here is
        // always written before any later-generated reader runs.  Key
        // scripts run at t>0 and could be read by earlier-triggered code.
        s.body = body(1 + pick(4), s.trigger.block == "WhenFlagClicked");
        return s;
    }
};

}  // namespace testing_helpers
