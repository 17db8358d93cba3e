#include "graphblocks/compiler.hpp"

#include <algorithm>
#include <queue>
#include <set>

namespace graphblocks {

namespace {

// How one endpoint of an edge resolved against the catalog.
enum class EndKind {
    missing_node,   // endpoint id not in the graph
    unknown_block,  // node's block name not in the catalog (skip silently;
                    // the per-node UnknownBlock diagnostic already fired)
    unknown_port,
    wrong_side,     // port exists but on the opposite side
    exec_out,       // THEN / SUBSTACK
    value_out,      // reporter VALUE (type in value_type)
    constant_out,   // constant source (kind in value_type semantics)
    exec_in,
    value_in,
    field_in,
};

struct EndInfo {
    EndKind kind = EndKind::missing_node;
    ValueType value_type = ValueType::number;  // value_out / value_in
    const NodeEntry* node = nullptr;
    const FieldSpec* field = nullptr;  // field_in
};

EndInfo resolve_out_side(const GraphDoc& g, const Catalog& catalog, const Edge& e) {
    EndInfo info;
    auto it = g.nodes.find(e.out_node);
    if (it == g.nodes.end()) return info;
    info.node = &it->second;
    if (is_constant(it->second)) {
        // parse_graph canonicalizes VALUE to "".
        info.kind = e.out_port.empty() ? EndKind::constant_out : EndKind::unknown_port;
        return info;
    }
    const BlockSpec* spec = catalog.lookup_block(it->second.name);
    if (!spec) {
        info.kind = EndKind::unknown_block;
        return info;
    }
    if (const PortSpec* p = spec->out_port(e.out_port)) {
        info.kind = p->type == ValueType::exec ? EndKind::exec_out : EndKind::value_out;
        info.value_type = p->type;
        return info;
    }
    if (spec->in_port(e.out_port) || spec->field(e.out_port)) {
        info.kind = EndKind::wrong_side;
        return info;
    }
    info.kind = EndKind::unknown_port;
    return info;
}

EndInfo resolve_in_side(const GraphDoc& g, const Catalog& catalog, const Edge& e) {
    EndInfo info;
    auto it = g.nodes.find(e.in_node);
    if (it == g.nodes.end()) return info;
    info.node = &it->second;
    if (is_constant(it->second)) {
        // A constant has no inPorts; its single port is an outPort.
        info.kind = (e.in_port == "VALUE" || e.in_port.empty()) ? EndKind::wrong_side
                                                                : EndKind::unknown_port;
        return info;
    }
    const BlockSpec* spec = catalog.lookup_block(it->second.name);
    if (!spec) {
        info.kind = EndKind::unknown_block;
        return info;
    }
    if (const PortSpec* p = spec->in_port(e.in_port)) {
        info.kind = p->type == ValueType::exec ? EndKind::exec_in : EndKind::value_in;
        info.value_type = p->type;
        return info;
    }
    if (const FieldSpec* f = spec->field(e.in_port)) {
        info.kind = EndKind::field_in;
        info.field = f;
        return info;
    }
    if (spec->out_port(e.in_port)) {
        info.kind = EndKind::wrong_side;
        return info;
    }
    info.kind = EndKind::unknown_port;
    return info;
}

const char* scalar_kind_name(const Scalar& s) {
    if (is_number(s)) return "number";
    if (is_boolean(s)) return "boolean";
    return "string";
}

// Static compatibility of a constant with a value sink.  Numeric strings
// coerce into number ports; everything else must match the port type, so a
// bare number in a string port is a TypeMismatch (quote it instead).
bool constant_fits(const Scalar& v, ValueType sink) {
    switch (sink) {
        case ValueType::number:
            if (is_number(v)) return true;
            if (is_string(v)) return parse_number(std::get<std::string>(v)).has_value();
            return false;
        case ValueType::string: return is_string(v);
        case ValueType::boolean: return is_boolean(v);
        case ValueType::exec: return false;
    }
    return false;
}

// Reporter outputs are runtime scalars: number/string cross-wiring defers
// to runtime coercion, booleans render into string sinks, but only boolean
// sources satisfy a boolean sink.
bool reporter_fits(ValueType source, ValueType sink) {
    switch (sink) {
        case ValueType::number: return source == ValueType::number || source == ValueType::string;
        case ValueType::string: return source != ValueType::exec;
        case ValueType::boolean: return source == ValueType::boolean;
        case ValueType::exec: return source == ValueType::exec;
    }
    return false;
}

struct EdgeIndex {
    // Only edges whose two endpoints resolved cleanly (out -> in).
    std::map<std::pair<std::string, std::string>, std::vector<size_t>> into;   // (node, in port)
    std::map<std::pair<std::string, std::string>, std::vector<size_t>> outof;  // (node, out port)
};

}  // namespace

std::vector<std::string> toposort(const GraphDoc& g) {
    std::map<std::string, int> in_degree;
    std::map<std::string, std::vector<std::string>> successors;
    for (const auto& [id, _] : g.nodes) in_degree[id] = 0;
    for (const auto& e : g.edges) {
        if (!g.nodes.count(e.out_node) || !g.nodes.count(e.in_node)) continue;
        ++in_degree[e.in_node];
        successors[e.out_node].push_back(e.in_node);
    }

    std::set<std::string> ready;  // ordered: smallest id first
    for (const auto& [id, deg] : in_degree)
        if (deg == 0) ready.insert(id);

    std::vector<std::string> order;
    while (!ready.empty()) {
        std::string id = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(id);
        for (const auto& next : successors[id])
            if (--in_degree[next] == 0) ready.insert(next);
    }

    if (order.size() != g.nodes.size()) {
        // Strip acyclic fringes off the leftover set to point at the core.
        std::set<std::string> leftover;
        for (const auto& [id, deg] : in_degree)
            if (deg > 0) leftover.insert(id);
        bool changed = true;
        while (changed) {
            changed = false;
            for (auto it = leftover.begin(); it != leftover.end();) {
                bool has_successor = false;
                for (const auto& next : successors[*it])
                    if (leftover.count(next)) { has_successor = true; break; }
                if (!has_successor) {
                    it = leftover.erase(it);
                    changed = true;
                } else {
                    ++it;
                }
            }
        }
        std::vector<std::string> cycle(leftover.begin(), leftover.end());
        if (cycle.empty())  // degenerate, should not happen
            for (const auto& [id, deg] : in_degree)
                if (deg > 0) cycle.push_back(id);
        fail(DiagCode::CycleDetected,
             "graph contains a cycle through: " + [&] {
                 std::string s;
                 for (const auto& id : cycle) s += (s.empty() ? "" : ", ") + id;
                 return s;
             }(),
             cycle);
    }
    return order;
}

namespace {

// Shared by compile() and the Orphan pass: builds the plan and records
// which nodes were consumed.  Assumes a validated graph.
struct PlanWalker {
    const GraphDoc& g;
    const Catalog& catalog;
    EdgeIndex index;
    std::set<std::string> consumed;

    PlanWalker(const GraphDoc& graph, const Catalog& cat) : g(graph), catalog(cat) {
        for (size_t i = 0; i < g.edges.size(); ++i) {
            const Edge& e = g.edges[i];
            EndInfo out = resolve_out_side(g, catalog, e);
            EndInfo in = resolve_in_side(g, catalog, e);
            bool out_ok = out.kind == EndKind::exec_out || out.kind == EndKind::value_out ||
                          out.kind == EndKind::constant_out;
            bool in_ok = in.kind == EndKind::exec_in || in.kind == EndKind::value_in ||
                         in.kind == EndKind::field_in;
            if (!out_ok || !in_ok) continue;
            index.into[{e.in_node, e.in_port}].push_back(i);
            index.outof[{e.out_node, e.out_port}].push_back(i);
        }
    }

    const Edge* edge_into(const std::string& node, const std::string& port) const {
        auto it = index.into.find({node, port});
        if (it == index.into.end() || it->second.empty()) return nullptr;
        return &g.edges[it->second.front()];
    }

    const Edge* edge_outof(const std::string& node, const std::string& port) const {
        auto it = index.outof.find({node, port});
        if (it == index.outof.end() || it->second.empty()) return nullptr;
        return &g.edges[it->second.front()];
    }

    std::map<std::string, std::string> field_bindings(const std::string& id,
                                                      const BlockSpec& spec) {
        std::map<std::string, std::string> out;
        for (const auto& f : spec.fields) {
            const Edge* e = edge_into(id, f.id);
            if (!e) continue;
            const NodeEntry& src = g.nodes.at(e->out_node);
            consumed.insert(e->out_node);
            if (src.value && is_string(*src.value))
                out[f.id] = std::get<std::string>(*src.value);
        }
        return out;
    }

    ExprNode build_expr(const std::string& id) {
        consumed.insert(id);
        const NodeEntry& n = g.nodes.at(id);
        ExprNode expr;
        if (is_constant(n)) {
            expr.kind = ExprNode::Kind::constant;
            expr.value = *n.value;
            return expr;
        }
        const BlockSpec& spec = *catalog.lookup_block(n.name);
        expr.kind = ExprNode::Kind::reporter;
        expr.block = n.name;
        expr.fields = field_bindings(id, spec);
        for (const PortSpec* p : spec.value_in_ports()) {
            const Edge* e = edge_into(id, p->id);
            if (e) expr.children[p->id] = build_expr(e->out_node);
        }
        return expr;
    }

    Stmt build_stmt(const std::string& id) {
        consumed.insert(id);
        const NodeEntry& n = g.nodes.at(id);
        const BlockSpec& spec = *catalog.lookup_block(n.name);
        Stmt s;
        s.node_id = id;
        s.block = n.name;
        s.fields = field_bindings(id, spec);
        for (const PortSpec* p : spec.value_in_ports()) {
            const Edge* e = edge_into(id, p->id);
            if (e) s.args[p->id] = build_expr(e->out_node);
        }
        for (const PortSpec* sub : spec.substack_ports()) {
            const Edge* e = edge_outof(id, sub->id);
            s.substacks.push_back(e ? build_chain(e->in_node) : std::vector<Stmt>{});
        }
        return s;
    }

    std::vector<Stmt> build_chain(const std::string& start) {
        std::vector<Stmt> body;
        std::string id = start;
        while (true) {
            body.push_back(build_stmt(id));
            const Edge* next = edge_outof(id, "THEN");
            if (!next) break;
            id = next->in_node;
        }
        return body;
    }

    CompiledPlan build() {
        CompiledPlan plan;
        for (const auto& [id, n] : g.nodes) {  // map order = lexicographic
            if (is_constant(n)) continue;
            const BlockSpec* spec = catalog.lookup_block(n.name);
            if (!spec || spec->category != Category::hat) continue;
            consumed.insert(id);
            Script script;
            script.trigger.node_id = id;
            script.trigger.block = n.name;
            script.trigger.fields = field_bindings(id, *spec);
            if (const Edge* first = edge_outof(id, "THEN"))
                script.body = build_chain(first->in_node);
            plan.scripts.push_back(std::move(script));
        }
        std::set<std::string> vars;
        for (const auto& [id, n] : g.nodes) {
            if (n.name != "SetVariable") continue;
            const Edge* e = edge_into(id, "VARIABLE");
            if (!e) continue;
            const NodeEntry& src = g.nodes.at(e->out_node);
            if (src.value && is_string(*src.value)) vars.insert(std::get<std::string>(*src.value));
        }
        plan.declared_variables.assign(vars.begin(), vars.end());
        return plan;
    }
};

}  // namespace

std::vector<Diagnostic> validate(const GraphDoc& g, const Catalog& catalog) {
    std::vector<Diagnostic> diags;

    // Unknown block names (node order).
    for (const auto& [id, n] : g.nodes) {
        if (is_constant(n)) continue;
        if (!catalog.lookup_block(n.name))
            diags.push_back(make_diag(DiagCode::UnknownBlock,
                                      "node '" + id + "' uses unknown block '" + n.name + "'",
                                      {id}));
    }

    // Per-edge structural and type checks (edge order).  Edges that fail
    // here are excluded from the aggregate checks below.
    std::vector<bool> edge_ok(g.edges.size(), false);
    // A type-failed edge still occupies its in port: MissingRequiredInput
    // means "no input at all", not "bad input".  Structural failures
    // (dangling node, unknown port, wrong side) occupy nothing.
    std::vector<bool> edge_occupies(g.edges.size(), false);
    for (size_t i = 0; i < g.edges.size(); ++i) {
        const Edge& e = g.edges[i];
        EndInfo out = resolve_out_side(g, catalog, e);
        EndInfo in = resolve_in_side(g, catalog, e);

        if (out.kind == EndKind::missing_node || in.kind == EndKind::missing_node) {
            diags.push_back(make_diag(
                DiagCode::DanglingEdgeEndpoint,
                "edge references undeclared node '" +
                    (out.kind == EndKind::missing_node ? e.out_node : e.in_node) + "'",
                {out.kind == EndKind::missing_node ? e.out_node : e.in_node}));
            continue;
        }
        if (out.kind == EndKind::unknown_block || in.kind == EndKind::unknown_block)
            continue;  // UnknownBlock already reported for the node
        if (out.kind == EndKind::unknown_port || in.kind == EndKind::unknown_port) {
            bool out_bad = out.kind == EndKind::unknown_port;
            diags.push_back(make_diag(
                DiagCode::UnknownPort,
                "node '" + (out_bad ? e.out_node : e.in_node) + "' has no port '" +
                    (out_bad ? e.out_port : e.in_port) + "'",
                {out_bad ? e.out_node : e.in_node}, {out_bad ? e.out_port : e.in_port}));
            continue;
        }
        if (out.kind == EndKind::wrong_side || in.kind == EndKind::wrong_side) {
            diags.push_back(make_diag(
                DiagCode::SameDirectionConnection,
                "edge from '" + e.out_node + "." + e.out_port + "' to '" + e.in_node + "." +
                    e.in_port + "' does not run from an outPort to an inPort",
                {e.out_node, e.in_node}, {e.out_port, e.in_port}));
            continue;
        }

        // Both endpoints resolved on the correct sides; check types.
        edge_occupies[i] = in.kind == EndKind::value_in || in.kind == EndKind::field_in;
        auto mismatch = [&](const std::string& expected, const std::string& actual) {
            diags.push_back(make_diag(DiagCode::TypeMismatch,
                                      "port '" + e.in_node + "." + e.in_port + "' expects " +
                                          expected + " but '" + e.out_node + "' supplies " + actual,
                                      {e.out_node, e.in_node}, {e.out_port, e.in_port}));
        };

        if (in.kind == EndKind::exec_in) {
            if (out.kind != EndKind::exec_out) {
                mismatch("exec", out.kind == EndKind::constant_out
                                     ? std::string("a constant (") +
                                           scalar_kind_name(*out.node->value) + ")"
                                     : std::string("a ") + value_type_name(out.value_type) +
                                           " value");
                continue;
            }
        } else if (in.kind == EndKind::field_in) {
            if (out.kind != EndKind::constant_out) {
                mismatch("a field constant", out.kind == EndKind::exec_out
                                                 ? "an exec connection"
                                                 : "a computed value");
                continue;
            }
            const Scalar& v = *out.node->value;
            const FieldSpec& f = *in.field;
            if (!is_string(v)) {
                diags.push_back(make_diag(
                    DiagCode::BadFieldValue,
                    "field '" + e.in_node + "." + f.id + "' takes a string token, got " +
                        scalar_kind_name(v),
                    {e.out_node, e.in_node}, {f.id}));
                continue;
            }
            const std::string& token = std::get<std::string>(v);
            bool ok = f.free_form
                          ? !token.empty()
                          : std::find(f.allowed_values.begin(), f.allowed_values.end(), token) !=
                                f.allowed_values.end();
            if (!ok) {
                diags.push_back(make_diag(
                    DiagCode::BadFieldValue,
                    "'" + token + "' is not an allowed value of field '" + e.in_node + "." +
                        f.id + "'",
                    {e.out_node, e.in_node}, {f.id}));
                continue;
            }
        } else {  // value_in
            if (out.kind == EndKind::exec_out) {
                mismatch(value_type_name(in.value_type), "an exec connection");
                continue;
            }
            if (out.kind == EndKind::constant_out) {
                if (!constant_fits(*out.node->value, in.value_type)) {
                    mismatch(value_type_name(in.value_type),
                             std::string("a ") + scalar_kind_name(*out.node->value) + " constant");
                    continue;
                }
            } else if (!reporter_fits(out.value_type, in.value_type)) {
                mismatch(value_type_name(in.value_type),
                         std::string("a ") + value_type_name(out.value_type) + " value");
                continue;
            }
        }
        edge_ok[i] = true;
    }

    // Duplicate connections.  An exec link is one-to-one on both ends; value
    // in-ports and fields take exactly one source (reporter fan-out is legal
    // on the out side).
    {
        std::map<std::pair<std::string, std::string>, int> in_count, exec_out_count;
        for (size_t i = 0; i < g.edges.size(); ++i) {
            if (!edge_ok[i]) continue;
            const Edge& e = g.edges[i];
            ++in_count[{e.in_node, e.in_port}];
            EndInfo out = resolve_out_side(g, catalog, e);
            if (out.kind == EndKind::exec_out) ++exec_out_count[{e.out_node, e.out_port}];
        }
        for (const auto& [key, count] : in_count)
            if (count > 1)
                diags.push_back(make_diag(DiagCode::DuplicateInputEdge,
                                          "port '" + key.first + "." + key.second + "' has " +
                                              std::to_string(count) + " incoming edges",
                                          {key.first}, {key.second}));
        for (const auto& [key, count] : exec_out_count)
            if (count > 1)
                diags.push_back(make_diag(DiagCode::DuplicateInputEdge,
                                          "exec port '" + key.first + "." + key.second +
                                              "' fans out to " + std::to_string(count) + " blocks",
                                          {key.first}, {key.second}));
    }

    // Required inputs: every value in-port and every field must be wired.
    std::set<std::pair<std::string, std::string>> wired;
    for (size_t i = 0; i < g.edges.size(); ++i)
        if (edge_occupies[i]) wired.insert({g.edges[i].in_node, g.edges[i].in_port});
    for (const auto& [id, n] : g.nodes) {
        if (is_constant(n)) continue;
        const BlockSpec* spec = catalog.lookup_block(n.name);
        if (!spec) continue;
        for (const PortSpec* p : spec->value_in_ports())
            if (!wired.count({id, p->id}))
                diags.push_back(make_diag(DiagCode::MissingRequiredInput,
                                          "port '" + id + "." + p->id + "' (" + n.name +
                                              ") has no input",
                                          {id}, {p->id}));
        for (const FieldSpec& f : spec->fields)
            if (!wired.count({id, f.id}))
                diags.push_back(make_diag(DiagCode::MissingRequiredInput,
                                          "field '" + id + "." + f.id + "' (" + n.name +
                                              ") has no binding",
                                          {id}, {f.id}));
    }

    // Variable declarations: SetVariable anywhere declares the name.
    {
        auto binding = [&](const std::string& id, const NodeEntry& n) -> std::optional<std::string> {
            for (size_t i = 0; i < g.edges.size(); ++i) {
                if (!edge_ok[i]) continue;
                const Edge& e = g.edges[i];
                if (e.in_node != id || e.in_port != "VARIABLE") continue;
                const NodeEntry& src = g.nodes.at(e.out_node);
                if (src.value && is_string(*src.value)) return std::get<std::string>(*src.value);
            }
            (void)n;
            return std::nullopt;
        };
        std::set<std::string> declared;
        for (const auto& [id, n] : g.nodes)
            if (n.name == "SetVariable")
                if (auto v = binding(id, n)) declared.insert(*v);
        for (const auto& [id, n] : g.nodes) {
            if (n.name != "GetVariable" && n.name != "ChangeVariableBy") continue;
            auto v = binding(id, n);
            if (v && !declared.count(*v))
                diags.push_back(make_diag(DiagCode::UndeclaredVariable,
                                          "variable '" + *v + "' is read by '" + id +
                                              "' but never set",
                                          {id}));
        }
    }

    // Trigger coverage.
    {
        bool any_hat = false;
        for (const auto& [id, n] : g.nodes) {
            const BlockSpec* spec = catalog.lookup_block(n.name);
            if (spec && spec->category == Category::hat) any_hat = true;
        }
        if (!any_hat)
            diags.push_back(make_diag(DiagCode::NoHatBlock,
                                      "graph has no hat block, so nothing can ever run"));
    }

    // Cycles over the full edge set.
    try {
        toposort(g);
    } catch (const PipelineError& err) {
        diags.push_back(err.diag());
    }

    // Orphans are only meaningful for otherwise-clean graphs (the walker
    // assumes validated structure).
    if (!has_errors(diags)) {
        PlanWalker walker(g, catalog);
        walker.build();
        for (const auto& [id, n] : g.nodes)
            if (!walker.consumed.count(id))
                diags.push_back(make_diag(DiagCode::Orphan,
                                          "node '" + id + "' (" + n.name +
                                              ") is never reached or consumed",
                                          {id}));
    }

    return diags;
}

CompiledPlan compile(const GraphDoc& g, const Catalog& catalog) {
    PlanWalker walker(g, catalog);
    return walker.build();
}

}  // namespace graphblocks
