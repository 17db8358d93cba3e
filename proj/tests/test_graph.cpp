#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "graphblocks/graph.hpp"
#include "helpers.hpp"

using namespace graphblocks;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE_MESSAGE(bool(in), "cannot open " << path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

DiagCode thrown_code(const std::function<void()>& f) {
    try {
        f();
    } catch (const PipelineError& e) {
        return e.diag().code;
    }
    FAIL("expected a PipelineError");
    return DiagCode::SchemaViolation;
}

}  // namespace

TEST_CASE("primary format parses and serializes losslessly") {
    std::string text = R"({
        "nodes": {
            "node_flag": {"name": "WhenFlagClicked"},
            "node_say": {"name": "Say", "value": null},
            "node_msg": {"name": "Constant", "value": "hi"},
            "node_num": {"name": "Constant", "value": -2.5},
            "node_bool": {"name": "Constant", "value": true}
        },
        "edges": [
            {"outNodeID": "node_flag", "outPortID": "THEN", "inNodeID": "node_say", "inPortID": "EXEC"},
            {"outNodeID": "node_msg", "outPortID": "VALUE", "inNodeID": "node_say", "inPortID": "MESSAGE"}
        ]
    })";
    GraphDoc g = parse_graph(text);
    CHECK(g.nodes.size() == 5);
    CHECK(g.nodes.at("node_msg").value == Scalar(std::string("hi")));
    CHECK(g.nodes.at("node_num").value == Scalar(-2.5));
    CHECK(g.nodes.at("node_bool").value == Scalar(true));
    CHECK(!g.nodes.at("node_flag").value.has_value());
    // The constant's VALUE out-port spelling canonicalizes to "".
    CHECK(g.edges[1].out_port == "");

    GraphDoc again = parse_graph(serialize_graph(g));
    CHECK(again == g);
    CHECK(serialize_graph(again) == serialize_graph(g));
}

TEST_CASE("primary format rejects malformed documents with precise codes") {
    CHECK(thrown_code([] { (void)parse_graph("not json at all {{{"); }) == DiagCode::MalformedJson);
    CHECK(thrown_code([] { (void)parse_graph("[1,2]"); }) == DiagCode::SchemaViolation);
    CHECK(thrown_code([] { (void)parse_graph(R"({"nodes": {}})"); }) == DiagCode::SchemaViolation);
    CHECK(thrown_code([] {
              (void)parse_graph(R"({"nodes": {"move": {"name": "MoveSteps"}}, "edges": []})");
          }) == DiagCode::BadNodeId);
    CHECK(thrown_code([] {
              (void)parse_graph(R"({"nodes": {"node_m1": {"name": "MoveSteps"}}, "edges": []})");
          }) == DiagCode::BadNodeId);
    CHECK(thrown_code([] {
              (void)parse_graph(
                  R"({"nodes": {"node_m": {"name": "MoveSteps", "extra": 1}}, "edges": []})");
          }) == DiagCode::SchemaViolation);
    CHECK(thrown_code([] {
              (void)parse_graph(R"({"nodes": {}, "edges": [{"outNodeID": "node_a"}]})");
          }) == DiagCode::SchemaViolation);

    // Constants must carry a scalar value; other nodes must not carry one.
    CHECK(thrown_code([] {
              (void)parse_graph(R"({"nodes": {"node_c": {"name": "Constant"}}, "edges": []})");
          }) == DiagCode::ConstantValueRule);
    CHECK(thrown_code([] {
              (void)parse_graph(
                  R"({"nodes": {"node_c": {"name": "Constant", "value": null}}, "edges": []})");
          }) == DiagCode::ConstantValueRule);
    // A non-scalar value is a shape problem, not a placement problem.
    CHECK(thrown_code([] {
              (void)parse_graph(
                  R"({"nodes": {"node_c": {"name": "Constant", "value": [1]}}, "edges": []})");
          }) == DiagCode::SchemaViolation);
    CHECK(thrown_code([] {
              (void)parse_graph(
                  R"({"nodes": {"node_m": {"name": "MoveSteps", "value": 3}}, "edges": []})");
          }) == DiagCode::ConstantValueRule);
}

TEST_CASE("json extraction finds the graph inside chatter") {
    std::string graph = R"({"nodes": {"node_a": {"name": "Forever"}}, "edges": []})";

    CHECK(extract_json(graph) == graph);
    CHECK(extract_json("Here you go:\n```json\n" + graph + "\n```\nEnjoy!") == graph);
    CHECK(extract_json("prefix {\"tiny\": 1} middle " + graph + " suffix") == graph);

    // Balanced braces inside strings must not confuse the scanner.
    std::string tricky = R"({"nodes": {"node_a": {"name": "Say{not}a{brace"}}, "edges": []})";
    CHECK(extract_json("x " + tricky + " y") == tricky);

    // Python-style keyword literals normalize on the way out (quote style
    // is left alone: only the bare words are rewritten).
    CHECK(extract_json(R"({"k": True, "v": None, "w": False})") ==
          R"({"k": true, "v": null, "w": false})");

    CHECK(thrown_code([] { (void)extract_json("no json here"); }) == DiagCode::NoJsonFound);
    CHECK(thrown_code([] { (void)extract_json("{\"unterminated\": "); }) == DiagCode::NoJsonFound);
}

TEST_CASE("alternative format parses, mirrors, and serializes") {
    std::string text = R"({
        "node_flag": {"nodeName": "WhenFlagClicked",
                      "edges": [{"portID": "THEN", "otherNodeID": "node_move"}]},
        "node_move": {"nodeName": "MoveSteps",
                      "edges": [{"portID": "EXEC", "otherNodeID": "node_flag"},
                                 {"portID": "STEPS", "otherNodeID": "node_steps"}]},
        "node_steps": {"nodeName": "Constant", "value": 50,
                       "edges": [{"portID": "VALUE", "otherNodeID": "node_move"}]}
    })";
    AltGraphDoc alt = parse_alt_graph(text);
    CHECK(alt.nodes.size() == 3);
    CHECK(alt.nodes.at("node_move").edges.size() == 2);

    AltGraphDoc again = parse_alt_graph(serialize_alt_graph(alt));
    CHECK(again == alt);

    SUBCASE("asymmetric edge is rejected") {
        std::string broken = R"({
            "node_flag": {"nodeName": "WhenFlagClicked",
                          "edges": [{"portID": "THEN", "otherNodeID": "node_move"}]},
            "node_move": {"nodeName": "MoveSteps", "edges": []}
        })";
        CHECK(thrown_code([&] { (void)parse_alt_graph(broken); }) == DiagCode::MissingMirrorEdge);
    }
    SUBCASE("edge toward an undeclared node is rejected") {
        std::string broken = R"({
            "node_flag": {"nodeName": "WhenFlagClicked",
                          "edges": [{"portID": "THEN", "otherNodeID": "node_ghost"}]}
        })";
        CHECK(thrown_code([&] { (void)parse_alt_graph(broken); }) ==
              DiagCode::DanglingEdgeEndpoint);
    }
    SUBCASE("bad ids are rejected") {
        CHECK(thrown_code([] {
                  (void)parse_alt_graph(R"({"node_9": {"nodeName": "Forever", "edges": []}})");
              }) == DiagCode::BadNodeId);
    }
}

TEST_CASE("conversions move between the representations faithfully") {
    const Catalog& catalog = Catalog::instance();
    GraphDoc square = parse_graph(slurp("fixtures/graphs/square_walk.json"));

    AltGraphDoc alt = proposed_to_alt(square, catalog);
    size_t entries = 0;
    for (const auto& [id, n] : alt.nodes) entries += n.edges.size();
    CHECK(entries == 2 * square.edges.size());

    // Constants are spelled VALUE in the adjacency lists.
    bool saw_value_port = false;
    for (const auto& e : alt.nodes.at("node_steps").edges)
        if (e.port == "VALUE") saw_value_port = true;
    CHECK(saw_value_port);

    GraphDoc back = alt_to_proposed(alt, catalog);
    GraphDoc canonical = square;
    std::sort(canonical.edges.begin(), canonical.edges.end());
    CHECK(back == canonical);

    // Converting repeatedly is stable byte-for-byte.
    CHECK(serialize_alt_graph(proposed_to_alt(back, catalog)) == serialize_alt_graph(alt));

    SUBCASE("two out-ports cannot pair") {
        std::string broken = R"({
            "node_flag": {"nodeName": "WhenFlagClicked",
                          "edges": [{"portID": "THEN", "otherNodeID": "node_move"}]},
            "node_move": {"nodeName": "MoveSteps",
                          "edges": [{"portID": "THEN", "otherNodeID": "node_flag"}]}
        })";
        CHECK(thrown_code([&] { (void)alt_to_proposed(parse_alt_graph(broken), catalog); }) ==
              DiagCode::SameDirectionConnection);
    }
    SUBCASE("unknown ports are caught during pairing") {
        std::string broken = R"({
            "node_flag": {"nodeName": "WhenFlagClicked",
                          "edges": [{"portID": "BOGUS", "otherNodeID": "node_move"}]},
            "node_move": {"nodeName": "MoveSteps",
                          "edges": [{"portID": "EXEC", "otherNodeID": "node_flag"}]}
        })";
        CHECK(thrown_code([&] { (void)alt_to_proposed(parse_alt_graph(broken), catalog); }) ==
              DiagCode::UnknownPort);
    }
    SUBCASE("proposed edges must run out -> in to convert") {
        GraphDoc bad = square;
        bad.edges.push_back(Edge{"node_flag", "THEN", "node_loop", "THEN"});
        CHECK(thrown_code([&] { (void)proposed_to_alt(bad, catalog); }) ==
              DiagCode::SameDirectionConnection);
    }
}

TEST_CASE("fuzzed graphs survive the round-trip with doubled adjacency entries") {
    const Catalog& catalog = Catalog::instance();
    std::mt19937 rng(2024);
    for (int i = 0; i < 300; ++i) {
        GraphDoc g = testing_helpers::random_convertible_graph(rng, catalog);
        AltGraphDoc alt = proposed_to_alt(g, catalog);

        size_t entries = 0;
        for (const auto& [id, n] : alt.nodes) entries += n.edges.size();
        REQUIRE(entries == 2 * g.edges.size());

        GraphDoc back = alt_to_proposed(alt, catalog);
        GraphDoc canonical = g;
        std::sort(canonical.edges.begin(), canonical.edges.end());
        REQUIRE(back == canonical);

        // And the serialized alternative re-parses to the same document.
        REQUIRE(parse_alt_graph(serialize_alt_graph(alt)) == alt);
    }
}
