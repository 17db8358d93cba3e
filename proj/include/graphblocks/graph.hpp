#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "graphblocks/catalog.hpp"
#include "graphblocks/diagnostics.hpp"
#include "graphblocks/scalar.hpp"

namespace graphblocks {

// ---------------------------------------------------------------------------
// Primary representation: {"nodes": {id: {name, value}}, "edges": [...]}
// ---------------------------------------------------------------------------

struct NodeEntry {
    std::string name;
    std::optional<Scalar> value;  // present iff name == "Constant"

    bool operator==(const NodeEntry&) const = default;
};

struct Edge {
    std::string out_node;
    std::string out_port;  // "" is the canonical constant out-port
    std::string in_node;
    std::string in_port;

    bool operator==(const Edge&) const = default;
    auto operator<=>(const Edge&) const = default;
};

struct GraphDoc {
    std::map<std::string, NodeEntry> nodes;  // keyed by node id, sorted
    std::vector<Edge> edges;                 // declaration order preserved

    bool operator==(const GraphDoc&) const = default;
};

// ---------------------------------------------------------------------------
// Alternative representation: {id: {nodeName, value, edges: [{portID,
// otherNodeID}]}} with every edge declared under both endpoints.
// ---------------------------------------------------------------------------

struct AltEdgeEntry {
    std::string port;
    std::string other;

    bool operator==(const AltEdgeEntry&) const = default;
};

struct AltNode {
    std::string name;
    std::optional<Scalar> value;
    std::vector<AltEdgeEntry> edges;

    bool operator==(const AltNode&) const = default;
};

struct AltGraphDoc {
    std::map<std::string, AltNode> nodes;

    bool operator==(const AltGraphDoc&) const = default;
};

// ---------------------------------------------------------------------------
// Operations (failures throw PipelineError with the taxonomy code)
// ---------------------------------------------------------------------------

// Largest balanced top-level JSON object substring of a raw model reply,
// with bare Python literals (True/False/None) normalized outside strings.
// Idempotent on clean JSON.  Throws NoJsonFound.
std::string extract_json(const std::string& raw);

// Structural parse: shape, node id regex (node_[A-Za-z]+), constant/value
// rule.  Semantic checks (block names, ports, types) belong to validate().
GraphDoc parse_graph(const std::string& text);
std::string serialize_graph(const GraphDoc& g);  // canonical, 2-space indent

// Same structural duties plus the both-endpoints mirror rule.
AltGraphDoc parse_alt_graph(const std::string& text);
std::string serialize_alt_graph(const AltGraphDoc& g);

// Cross-conversions.  Port directions are resolved against the catalog;
// a pair of same-direction mirrored ports is a SameDirectionConnection.
GraphDoc alt_to_proposed(const AltGraphDoc& alt, const Catalog& catalog);
AltGraphDoc proposed_to_alt(const GraphDoc& g, const Catalog& catalog);

bool is_constant(const NodeEntry& n);
bool valid_node_id(const std::string& id);

}  // namespace graphblocks
