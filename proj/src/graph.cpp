#include "graphblocks/graph.hpp"

#include <algorithm>
#include <cctype>

#include <json.hpp>

namespace graphblocks {

namespace {

using ordered_json = nlohmann::ordered_json;

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Replaces bare Python literals outside of string literals.
std::string normalize_python_literals(const std::string& text) {
    static const std::pair<const char*, const char*> subs[] = {
        {"True", "true"}, {"False", "false"}, {"None", "null"}};
    std::string out;
    out.reserve(text.size());
    bool in_string = false;
    for (size_t i = 0; i < text.size();) {
        char c = text[i];
        if (in_string) {
            out += c;
            if (c == '\\' && i + 1 < text.size()) {
                out += text[i + 1];
                i += 2;
                continue;
            }
            if (c == '"') in_string = false;
            ++i;
            continue;
        }
        if (c == '"') {
            in_string = true;
            out += c;
            ++i;
            continue;
        }
        bool replaced = false;
        for (const auto& [from, to] : subs) {
            size_t n = std::char_traits<char>::length(from);
            if (text.compare(i, n, from) == 0 &&
                (i == 0 || !is_word_char(text[i - 1])) &&
                (i + n >= text.size() || !is_word_char(text[i + n]))) {
                out += to;
                i += n;
                replaced = true;
                break;
            }
        }
        if (!replaced) {
            out += c;
            ++i;
        }
    }
    return out;
}

// Scans forward from an opening brace; returns one-past-the-closing-brace
// or npos when unbalanced.
size_t match_object(const std::string& text, size_t start) {
    int depth = 0;
    bool in_string = false;
    for (size_t i = start; i < text.size(); ++i) {
        char c = text[i];
        if (in_string) {
            if (c == '\\') {
                ++i;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) return i + 1;
        }
    }
    return std::string::npos;
}

Scalar require_scalar(const ordered_json& j, const std::string& path) {
    if (!j.is_number() && !j.is_string() && !j.is_boolean())
        fail(DiagCode::SchemaViolation, path + " must be a number, string or boolean");
    return scalar_from_json(j);
}

// Shared node-entry checks: id regex plus the constant/value rule.
std::optional<Scalar> parse_node_value(const std::string& id, const std::string& name,
                                       const ordered_json& entry, const std::string& path) {
    std::optional<Scalar> value;
    if (entry.contains("value") && !entry["value"].is_null())
        value = require_scalar(entry["value"], path + "/value");
    if (name == "Constant") {
        if (!value)
            fail(DiagCode::ConstantValueRule, "Constant node '" + id + "' must carry a value", {id});
    } else if (value) {
        fail(DiagCode::ConstantValueRule,
             "node '" + id + "' (" + name + ") must not carry a value", {id});
    }
    return value;
}

ordered_json parse_json_or_fail(const std::string& text) {
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(DiagCode::MalformedJson, e.what());
    }
}

void require_keys(const ordered_json& obj, const std::string& path,
                  std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional = {}) {
    for (const char* key : required)
        if (!obj.contains(key))
            fail(DiagCode::SchemaViolation, path + " is missing required key '" + key + "'");
    for (const auto& [key, _] : obj.items()) {
        bool known = std::any_of(required.begin(), required.end(),
                                 [&](const char* k) { return key == k; }) ||
                     std::any_of(optional.begin(), optional.end(),
                                 [&](const char* k) { return key == k; });
        if (!known) fail(DiagCode::SchemaViolation, path + " has unexpected key '" + key + "'");
    }
}

}  // namespace

bool is_constant(const NodeEntry& n) { return n.name == "Constant"; }

bool valid_node_id(const std::string& id) {
    if (id.size() < 6 || id.compare(0, 5, "node_") != 0) return false;
    for (size_t i = 5; i < id.size(); ++i)
        if (!std::isalpha(static_cast<unsigned char>(id[i]))) return false;
    return true;
}

std::string extract_json(const std::string& raw) {
    size_t best_start = 0, best_len = 0;
    size_t i = 0;
    while (i < raw.size()) {
        if (raw[i] != '{') {
            ++i;
            continue;
        }
        size_t end = match_object(raw, i);
        if (end == std::string::npos) {
            ++i;
            continue;
        }
        if (end - i > best_len) {
            best_start = i;
            best_len = end - i;
        }
        i = end;  // candidates never overlap
    }
    if (best_len == 0)
        fail(DiagCode::NoJsonFound, "no balanced JSON object found in the output");
    return normalize_python_literals(raw.substr(best_start, best_len));
}

GraphDoc parse_graph(const std::string& text) {
    ordered_json doc = parse_json_or_fail(text);
    if (!doc.is_object()) fail(DiagCode::SchemaViolation, "document must be a JSON object");
    require_keys(doc, "document", {"nodes", "edges"});
    if (!doc["nodes"].is_object()) fail(DiagCode::SchemaViolation, "/nodes must be an object");
    if (!doc["edges"].is_array()) fail(DiagCode::SchemaViolation, "/edges must be an array");

    GraphDoc g;
    for (const auto& [id, entry] : doc["nodes"].items()) {
        if (!valid_node_id(id))
            fail(DiagCode::BadNodeId,
                 "node id '" + id + "' must match node_[A-Za-z]+ (letters only after the prefix)",
                 {id});
        std::string path = "/nodes/" + id;
        if (!entry.is_object()) fail(DiagCode::SchemaViolation, path + " must be an object");
        require_keys(entry, path, {"name"}, {"value"});
        if (!entry["name"].is_string())
            fail(DiagCode::SchemaViolation, path + "/name must be a string");
        std::string name = entry["name"].get<std::string>();
        g.nodes[id] = NodeEntry{name, parse_node_value(id, name, entry, path)};
    }

    size_t idx = 0;
    for (const auto& item : doc["edges"]) {
        std::string path = "/edges/" + std::to_string(idx++);
        if (!item.is_object()) fail(DiagCode::SchemaViolation, path + " must be an object");
        require_keys(item, path, {"outNodeID", "outPortID", "inNodeID", "inPortID"});
        for (const char* key : {"outNodeID", "outPortID", "inNodeID", "inPortID"})
            if (!item[key].is_string())
                fail(DiagCode::SchemaViolation, path + "/" + key + " must be a string");
        Edge e{item["outNodeID"].get<std::string>(), item["outPortID"].get<std::string>(),
               item["inNodeID"].get<std::string>(), item["inPortID"].get<std::string>()};
        // Canonical constant out-port is the empty string; accept VALUE too.
        auto src = g.nodes.find(e.out_node);
        if (src != g.nodes.end() && is_constant(src->second) && e.out_port == "VALUE")
            e.out_port.clear();
        g.edges.push_back(std::move(e));
    }
    return g;
}

std::string serialize_graph(const GraphDoc& g) {
    ordered_json doc;
    ordered_json nodes = ordered_json::object();
    for (const auto& [id, n] : g.nodes) {
        ordered_json entry;
        entry["name"] = n.name;
        entry["value"] = n.value ? scalar_to_json(*n.value) : nlohmann::json();
        nodes[id] = std::move(entry);
    }
    doc["nodes"] = std::move(nodes);
    ordered_json edges = ordered_json::array();
    for (const auto& e : g.edges)
        edges.push_back(ordered_json{{"outNodeID", e.out_node},
                                     {"outPortID", e.out_port},
                                     {"inNodeID", e.in_node},
                                     {"inPortID", e.in_port}});
    doc["edges"] = std::move(edges);
    return doc.dump(2) + "\n";
}

AltGraphDoc parse_alt_graph(const std::string& text) {
    ordered_json doc = parse_json_or_fail(text);
    if (!doc.is_object()) fail(DiagCode::SchemaViolation, "document must be a JSON object");

    AltGraphDoc g;
    for (const auto& [id, entry] : doc.items()) {
        if (!valid_node_id(id))
            fail(DiagCode::BadNodeId,
                 "node id '" + id + "' must match node_[A-Za-z]+ (letters only after the prefix)",
                 {id});
        std::string path = "/" + id;
        if (!entry.is_object()) fail(DiagCode::SchemaViolation, path + " must be an object");
        require_keys(entry, path, {"nodeName", "edges"}, {"value"});
        if (!entry["nodeName"].is_string())
            fail(DiagCode::SchemaViolation, path + "/nodeName must be a string");
        if (!entry["edges"].is_array())
            fail(DiagCode::SchemaViolation, path + "/edges must be an array");
        std::string name = entry["nodeName"].get<std::string>();
        AltNode node;
        node.name = name;
        node.value = parse_node_value(id, name, entry, path);
        size_t idx = 0;
        for (const auto& item : entry["edges"]) {
            std::string epath = path + "/edges/" + std::to_string(idx++);
            if (!item.is_object()) fail(DiagCode::SchemaViolation, epath + " must be an object");
            require_keys(item, epath, {"portID", "otherNodeID"});
            if (!item["portID"].is_string() || !item["otherNodeID"].is_string())
                fail(DiagCode::SchemaViolation, epath + " entries must be strings");
            node.edges.push_back(AltEdgeEntry{item["portID"].get<std::string>(),
                                              item["otherNodeID"].get<std::string>()});
        }
        g.nodes[id] = std::move(node);
    }

    // Every connection must be declared under both endpoints: the number of
    // entries a -> b has to match the number of entries b -> a.
    for (const auto& [id, node] : g.nodes) {
        std::map<std::string, int> toward;
        for (const auto& e : node.edges) ++toward[e.other];
        for (const auto& [other, count] : toward) {
            auto it = g.nodes.find(other);
            if (it == g.nodes.end())
                fail(DiagCode::DanglingEdgeEndpoint,
                     "node '" + id + "' references missing node '" + other + "'", {id, other});
            if (id == other) {
                if (count % 2 != 0)
                    fail(DiagCode::MissingMirrorEdge,
                         "self connection of '" + id + "' is not declared twice", {id});
                continue;
            }
            int back = 0;
            for (const auto& e : it->second.edges)
                if (e.other == id) ++back;
            if (back != count) {
                // Point at one of the unmatched ports for the message.
                std::string port;
                for (const auto& e : node.edges)
                    if (e.other == other) port = e.port;
                fail(DiagCode::MissingMirrorEdge,
                     "edge between '" + id + "' and '" + other +
                         "' is not declared under both nodes",
                     {id, other}, {port});
            }
        }
    }
    return g;
}

std::string serialize_alt_graph(const AltGraphDoc& g) {
    ordered_json doc = ordered_json::object();
    for (const auto& [id, n] : g.nodes) {
        ordered_json entry;
        entry["nodeName"] = n.name;
        entry["value"] = n.value ? scalar_to_json(*n.value) : nlohmann::json();
        ordered_json edges = ordered_json::array();
        for (const auto& e : n.edges)
            edges.push_back(ordered_json{{"portID", e.port}, {"otherNodeID", e.other}});
        entry["edges"] = std::move(edges);
        doc[id] = std::move(entry);
    }
    return doc.dump(2) + "\n";
}

namespace {

enum class PortRole { out, in };

// Resolves which side of a block a port id belongs to.  Constants expose a
// single out port spelled VALUE (or the canonical empty string).
PortRole resolve_role(const std::string& node_id, const std::string& name,
                      const std::string& port, const Catalog& catalog) {
    if (name == "Constant") {
        if (port == "VALUE" || port.empty()) return PortRole::out;
        fail(DiagCode::UnknownPort, "Constant '" + node_id + "' has no port '" + port + "'",
             {node_id}, {port});
    }
    const BlockSpec* spec = catalog.lookup_block(name);
    if (!spec) fail(DiagCode::UnknownBlock, "no block named '" + name + "'", {node_id});
    if (spec->out_port(port)) return PortRole::out;
    if (spec->in_port(port) || spec->field(port)) return PortRole::in;
    fail(DiagCode::UnknownPort, name + " ('" + node_id + "') has no port '" + port + "'",
         {node_id}, {port});
}

}  // namespace

GraphDoc alt_to_proposed(const AltGraphDoc& alt, const Catalog& catalog) {
    GraphDoc g;
    for (const auto& [id, n] : alt.nodes) g.nodes[id] = NodeEntry{n.name, n.value};

    // Pair each declared entry with its mirror on the other endpoint; each
    // pair yields exactly one edge.
    std::map<std::string, std::vector<bool>> consumed;
    for (const auto& [id, n] : alt.nodes) consumed[id].assign(n.edges.size(), false);

    for (const auto& [id, n] : alt.nodes) {
        for (size_t i = 0; i < n.edges.size(); ++i) {
            if (consumed[id][i]) continue;
            const AltEdgeEntry& mine = n.edges[i];
            auto other_it = alt.nodes.find(mine.other);
            if (other_it == alt.nodes.end())
                fail(DiagCode::DanglingEdgeEndpoint,
                     "node '" + id + "' references missing node '" + mine.other + "'",
                     {id, mine.other});
            const AltNode& other = other_it->second;
            size_t match = other.edges.size();
            for (size_t j = 0; j < other.edges.size(); ++j) {
                if (consumed[mine.other][j]) continue;
                if (id == mine.other && j == i) continue;  // self edge: need the twin entry
                if (other.edges[j].other == id) {
                    match = j;
                    break;
                }
            }
            if (match == other.edges.size())
                fail(DiagCode::MissingMirrorEdge,
                     "edge between '" + id + "' and '" + mine.other +
                         "' is not declared under both nodes",
                     {id, mine.other}, {mine.port});
            consumed[id][i] = true;
            consumed[mine.other][match] = true;

            const AltEdgeEntry& theirs = other.edges[match];
            PortRole my_role = resolve_role(id, n.name, mine.port, catalog);
            PortRole their_role = resolve_role(mine.other, other.name, theirs.port, catalog);
            if (my_role == their_role)
                fail(DiagCode::SameDirectionConnection,
                     std::string(my_role == PortRole::out ? "two outPorts" : "two inPorts") +
                         " connected between '" + id + "' and '" + mine.other + "'",
                     {id, mine.other}, {mine.port, theirs.port});
            Edge e;
            if (my_role == PortRole::out) {
                e = Edge{id, mine.port, mine.other, theirs.port};
            } else {
                e = Edge{mine.other, theirs.port, id, mine.port};
            }
            if (alt.nodes.at(e.out_node).name == "Constant") e.out_port.clear();
            g.edges.push_back(std::move(e));
        }
    }
    // canonical edge order so conversions are stable functions of the graph
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

AltGraphDoc proposed_to_alt(const GraphDoc& g, const Catalog& catalog) {
    AltGraphDoc alt;
    for (const auto& [id, n] : g.nodes) alt.nodes[id] = AltNode{n.name, n.value, {}};

    for (const auto& e : g.edges) {
        auto out_it = alt.nodes.find(e.out_node);
        auto in_it = alt.nodes.find(e.in_node);
        if (out_it == alt.nodes.end() || in_it == alt.nodes.end())
            fail(DiagCode::DanglingEdgeEndpoint,
                 "edge references a node that is not declared",
                 {out_it == alt.nodes.end() ? e.out_node : e.in_node});
        // Make sure the ports exist and sit on the right sides.
        PortRole out_role = resolve_role(e.out_node, out_it->second.name, e.out_port, catalog);
        PortRole in_role = resolve_role(e.in_node, in_it->second.name, e.in_port, catalog);
        if (out_role != PortRole::out || in_role != PortRole::in)
            fail(DiagCode::SameDirectionConnection,
                 "edge does not run from an outPort to an inPort",
                 {e.out_node, e.in_node}, {e.out_port, e.in_port});
        std::string out_port = out_it->second.name == "Constant" ? "VALUE" : e.out_port;
        out_it->second.edges.push_back(AltEdgeEntry{out_port, e.in_node});
        in_it->second.edges.push_back(AltEdgeEntry{e.in_port, e.out_node});
    }
    // canonical per-node entry order, mirroring alt_to_proposed's sort
    for (auto& [id, n] : alt.nodes)
        std::sort(n.edges.begin(), n.edges.end(), [](const AltEdgeEntry& a, const AltEdgeEntry& b) {
            return std::tie(a.port, a.other) < std::tie(b.port, b.other);
        });
    return alt;
}

}  // namespace graphblocks
