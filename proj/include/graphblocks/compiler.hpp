#pragma once

#include <map>
#include <string>
#include <vector>

#include "graphblocks/catalog.hpp"
#include "graphblocks/diagnostics.hpp"
#include "graphblocks/graph.hpp"
#include "graphblocks/scalar.hpp"

namespace graphblocks {

// ---------------------------------------------------------------------------
// Compiled plan: sequential scripts with folded expression trees
// ---------------------------------------------------------------------------

struct ExprNode {
    enum class Kind { constant, reporter };

    Kind kind = Kind::constant;
    Scalar value = 0.0;                        // constant only
    std::string block;                         // reporter only
    std::map<std::string, std::string> fields; // field id -> token
    std::map<std::string, ExprNode> children;  // value in-port id -> source

    bool operator==(const ExprNode&) const = default;
};

struct Stmt {
    std::string node_id;
    std::string block;
    std::map<std::string, std::string> fields;
    std::map<std::string, ExprNode> args;      // value in-port id -> expr
    std::vector<std::vector<Stmt>> substacks;  // SUBSTACK, then SUBSTACK2

    bool operator==(const Stmt&) const = default;
};

struct Script {
    Stmt trigger;            // hat block; only node_id/block/fields used
    std::vector<Stmt> body;

    bool operator==(const Script&) const = default;
};

struct CompiledPlan {
    std::vector<Script> scripts;                  // lexicographic trigger id
    std::vector<std::string> declared_variables;  // sorted, deduplicated

    bool operator==(const CompiledPlan&) const = default;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// Collects the full diagnostic list (docs/validator.md defines each rule).
// Orphan is the only warning; everything else is an error.
std::vector<Diagnostic> validate(const GraphDoc& g, const Catalog& catalog);

inline bool has_errors(const std::vector<Diagnostic>& diags) {
    for (const auto& d : diags)
        if (code_severity(d.code) == Severity::error) return true;
    return false;
}

// Kahn's algorithm over all edges, smallest node id first among ready
// nodes.  Throws CycleDetected listing the entangled nodes.
std::vector<std::string> toposort(const GraphDoc& g);

// Precondition: validate() reported no errors.
CompiledPlan compile(const GraphDoc& g, const Catalog& catalog);

// Deterministic script text (grammar in docs/script_language.md).  The
// only contract is readability plus parse_script(emit_script(p)) == p.
std::string emit_script(const CompiledPlan& plan, const Catalog& catalog);
CompiledPlan parse_script(const std::string& text, const Catalog& catalog);

}  // namespace graphblocks
