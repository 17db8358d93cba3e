#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "graphblocks/compiler.hpp"
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

const Catalog& cat() { return Catalog::instance(); }

std::vector<Diagnostic> validate_file(const std::string& path) {
    return validate(parse_graph(slurp(path)), cat());
}

std::vector<DiagCode> error_codes(const std::vector<Diagnostic>& diags) {
    std::vector<DiagCode> codes;
    for (const auto& d : diags)
        if (code_severity(d.code) == Severity::error) codes.push_back(d.code);
    return codes;
}

GraphDoc quick_graph(const std::string& json) { return parse_graph(json); }

}  // namespace

TEST_CASE("each curated broken graph trips exactly its own rule") {
    struct Row {
        const char* file;
        DiagCode code;
    };
    // These two fail while the document is still being decoded.
    for (Row row : {Row{"fixtures/graphs/err_bad_node_id.json", DiagCode::BadNodeId},
                    Row{"fixtures/graphs/err_missing_mirror.json", DiagCode::MissingMirrorEdge}}) {
        CAPTURE(row.file);
        std::string text = slurp(row.file);
        try {
            if (row.code == DiagCode::MissingMirrorEdge)
                (void)parse_alt_graph(text);
            else
                (void)parse_graph(text);
            FAIL_CHECK(row.file << " parsed cleanly");
        } catch (const PipelineError& e) {
            CHECK(e.diag().code == row.code);
        }
    }
    // The rest parse fine and fail validation with a single diagnostic.
    for (Row row : {Row{"fixtures/graphs/err_type_mismatch.json", DiagCode::TypeMismatch},
                    Row{"fixtures/graphs/err_same_direction.json",
                        DiagCode::SameDirectionConnection},
                    Row{"fixtures/graphs/err_undeclared_variable.json",
                        DiagCode::UndeclaredVariable},
                    Row{"fixtures/graphs/err_cycle.json", DiagCode::CycleDetected},
                    Row{"fixtures/graphs/err_bad_field_value.json", DiagCode::BadFieldValue},
                    Row{"fixtures/graphs/err_missing_required_input.json",
                        DiagCode::MissingRequiredInput},
                    Row{"fixtures/graphs/err_duplicate_input_edge.json",
                        DiagCode::DuplicateInputEdge},
                    Row{"fixtures/graphs/err_no_hat.json", DiagCode::NoHatBlock}}) {
        CAPTURE(row.file);
        auto codes = error_codes(validate_file(row.file));
        REQUIRE(codes.size() == 1);
        CHECK(codes[0] == row.code);
    }
}

TEST_CASE("the reference square graph validates clean and compiles") {
    GraphDoc g = parse_graph(slurp("fixtures/graphs/square_walk.json"));
    auto diags = validate(g, cat());
    CHECK(diags.empty());

    CompiledPlan plan = compile(g, cat());
    REQUIRE(plan.scripts.size() == 1);
    CHECK(plan.declared_variables.empty());
    const Script& s = plan.scripts[0];
    CHECK(s.trigger.block == "WhenFlagClicked");
    CHECK(s.trigger.node_id == "node_flag");
    REQUIRE(s.body.size() == 1);
    const Stmt& loop = s.body[0];
    CHECK(loop.block == "RepeatUntil");
    REQUIRE(loop.args.count("CONDITION") == 1);
    const ExprNode& cond = loop.args.at("CONDITION");
    CHECK(cond.kind == ExprNode::Kind::reporter);
    CHECK(cond.block == "KeyPressed");
    CHECK(cond.fields.at("KEY") == "space");
    REQUIRE(loop.substacks.size() == 1);
    REQUIRE(loop.substacks[0].size() == 2);
    CHECK(loop.substacks[0][0].block == "MoveSteps");
    CHECK(loop.substacks[0][0].args.at("STEPS").value == Scalar(50.0));
    CHECK(loop.substacks[0][1].block == "TurnRight");
    CHECK(loop.substacks[0][1].args.at("DEGREES").value == Scalar(90.0));
}

TEST_CASE("a badly typed edge is a type error, never a missing input") {
    // Number constant into a string port: the port is occupied, so only
    // TypeMismatch may fire.
    GraphDoc g = quick_graph(R"({
        "nodes": {
            "node_flag": {"name": "WhenFlagClicked"},
            "node_say": {"name": "Say"},
            "node_num": {"name": "Constant", "value": 5}
        },
        "edges": [
            {"outNodeID": "node_flag", "outPortID": "THEN", "inNodeID": "node_say", "inPortID": "EXEC"},
            {"outNodeID": "node_num", "outPortID": "", "inNodeID": "node_say", "inPortID": "MESSAGE"}
        ]
    })");
    auto codes = error_codes(validate(g, cat()));
    REQUIRE(codes.size() == 1);
    CHECK(codes[0] == DiagCode::TypeMismatch);
}

TEST_CASE("structural edge failures still leave the port unfilled") {
    // An edge from a nonexistent node cannot occupy MESSAGE, so both the
    // dangling endpoint and the missing input are real problems.
    GraphDoc g = quick_graph(R"({
        "nodes": {
            "node_flag": {"name": "WhenFlagClicked"},
            "node_say": {"name": "Say"}
        },
        "edges": [
            {"outNodeID": "node_flag", "outPortID": "THEN", "inNodeID": "node_say", "inPortID": "EXEC"},
            {"outNodeID": "node_ghost", "outPortID": "", "inNodeID": "node_say", "inPortID": "MESSAGE"}
        ]
    })");
    auto codes = error_codes(validate(g, cat()));
    REQUIRE(codes.size() == 2);
    CHECK(std::count(codes.begin(), codes.end(), DiagCode::DanglingEdgeEndpoint) == 1);
    CHECK(std::count(codes.begin(), codes.end(), DiagCode::MissingRequiredInput) == 1);
}

TEST_CASE("assorted single-rule violations") {
    SUBCASE("unknown block name") {
        GraphDoc g = quick_graph(
            R"({"nodes": {"node_a": {"name": "Teleport"}}, "edges": []})");
        auto codes = error_codes(validate(g, cat()));
        CHECK(std::count(codes.begin(), codes.end(), DiagCode::UnknownBlock) == 1);
    }
    SUBCASE("unknown port name") {
        GraphDoc g = quick_graph(R"({
            "nodes": {
                "node_flag": {"name": "WhenFlagClicked"},
                "node_move": {"name": "MoveSteps"},
                "node_steps": {"name": "Constant", "value": 10}
            },
            "edges": [
                {"outNodeID": "node_flag", "outPortID": "THEN", "inNodeID": "node_move", "inPortID": "EXEC"},
                {"outNodeID": "node_steps", "outPortID": "", "inNodeID": "node_move", "inPortID": "STEPS"},
                {"outNodeID": "node_flag", "outPortID": "WHOOSH", "inNodeID": "node_move", "inPortID": "EXEC"}
            ]
        })");
        auto codes = error_codes(validate(g, cat()));
        bool saw_unknown_port = false;
        for (DiagCode c : codes) saw_unknown_port |= c == DiagCode::UnknownPort;
        CHECK(saw_unknown_port);
    }
    SUBCASE("sequence out-port cannot fan out") {
        GraphDoc g = quick_graph(R"({
            "nodes": {
                "node_flag": {"name": "WhenFlagClicked"},
                "node_move": {"name": "MoveSteps"},
                "node_turn": {"name": "TurnRight"},
                "node_steps": {"name": "Constant", "value": 10},
                "node_degrees": {"name": "Constant", "value": 90}
            },
            "edges": [
                {"outNodeID": "node_flag", "outPortID": "THEN", "inNodeID": "node_move", "inPortID": "EXEC"},
                {"outNodeID": "node_flag", "outPortID": "THEN", "inNodeID": "node_turn", "inPortID": "EXEC"},
                {"outNodeID": "node_steps", "outPortID": "", "inNodeID": "node_move", "inPortID": "STEPS"},
                {"outNodeID": "node_degrees", "outPortID": "", "inNodeID": "node_turn", "inPortID": "DEGREES"}
            ]
        })");
        auto codes = error_codes(validate(g, cat()));
        REQUIRE(codes.size() == 1);
        CHECK(codes[0] == DiagCode::DuplicateInputEdge);
    }
    SUBCASE("unreachable work is only a warning") {
        GraphDoc g = quick_graph(R"({
            "nodes": {
                "node_flag": {"name": "WhenFlagClicked"},
                "node_move": {"name": "MoveSteps"},
                "node_steps": {"name": "Constant", "value": 10},
                "node_lost": {"name": "Think"},
                "node_msg": {"name": "Constant", "value": "hm"}
            },
            "edges": [
                {"outNodeID": "node_flag", "outPortID": "THEN", "inNodeID": "node_move", "inPortID": "EXEC"},
                {"outNodeID": "node_steps", "outPortID": "", "inNodeID": "node_move", "inPortID": "STEPS"},
                {"outNodeID": "node_msg", "outPortID": "", "inNodeID": "node_lost", "inPortID": "MESSAGE"}
            ]
        })");
        auto diags = validate(g, cat());
        CHECK(!has_errors(diags));
        // Both the unreached statement and its feeding constant get flagged.
        bool saw_lost = false;
        for (const auto& d : diags) {
            if (d.code != DiagCode::Orphan) continue;
            CHECK(code_severity(d.code) == Severity::warning);
            if (d.message.find("node_lost") != std::string::npos) saw_lost = true;
        }
        CHECK(saw_lost);
    }
    SUBCASE("variable reads require a writer somewhere") {
        GraphDoc g = quick_graph(R"({
            "nodes": {
                "node_flag": {"name": "WhenFlagClicked"},
                "node_change": {"name": "ChangeVariableBy"},
                "node_delta": {"name": "Constant", "value": 1},
                "node_name": {"name": "Constant", "value": "score"}
            },
            "edges": [
                {"outNodeID": "node_flag", "outPortID": "THEN", "inNodeID": "node_change", "inPortID": "EXEC"},
                {"outNodeID": "node_delta", "outPortID": "", "inNodeID": "node_change", "inPortID": "VALUE"},
                {"outNodeID": "node_name", "outPortID": "", "inNodeID": "node_change", "inPortID": "VARIABLE"}
            ]
        })");
        auto codes = error_codes(validate(g, cat()));
        REQUIRE(codes.size() == 1);
        CHECK(codes[0] == DiagCode::UndeclaredVariable);
    }
}

TEST_CASE("topological order is deterministic and respects every edge") {
    GraphDoc g;
    for (const char* id : {"node_a", "node_b", "node_c", "node_d", "node_z"})
        g.nodes[id] = NodeEntry{"Constant", Scalar(0.0)};
    g.edges = {
        {"node_a", "", "node_b", "NUM1"},
        {"node_a", "", "node_c", "NUM1"},
        {"node_b", "", "node_d", "NUM1"},
        {"node_c", "", "node_d", "NUM2"},
    };
    auto order = toposort(g);
    CHECK(order == std::vector<std::string>{"node_a", "node_b", "node_c", "node_d", "node_z"});

    SUBCASE("cycle reporting strips the acyclic fringe") {
        g.edges.push_back({"node_d", "", "node_b", "NUM2"});
        try {
            (void)toposort(g);
            FAIL("expected CycleDetected");
        } catch (const PipelineError& e) {
            CHECK(e.diag().code == DiagCode::CycleDetected);
            CHECK(e.diag().message.find("node_b") != std::string::npos);
            CHECK(e.diag().message.find("node_d") != std::string::npos);
            // node_a feeds the cycle and node_z is disconnected; neither is in it.
            CHECK(e.diag().message.find("node_a") == std::string::npos);
            CHECK(e.diag().message.find("node_z") == std::string::npos);
        }
    }
}

TEST_CASE("fuzzed digraphs agree with a brute-force cycle oracle") {
    std::mt19937 rng(77);
    int cyclic_seen = 0, acyclic_seen = 0;
    for (int i = 0; i < 300; ++i) {
        auto raw = testing_helpers::random_digraph(rng, i % 2 == 1);
        bool oracle = testing_helpers::dfs_has_cycle(raw.doc);
        REQUIRE(oracle == raw.has_cycle);
        try {
            auto order = toposort(raw.doc);
            REQUIRE(!oracle);
            REQUIRE(testing_helpers::is_topological_order(raw.doc, order));
            ++acyclic_seen;
        } catch (const PipelineError& e) {
            REQUIRE(e.diag().code == DiagCode::CycleDetected);
            REQUIRE(oracle);
            ++cyclic_seen;
        }
    }
    // The generator must actually exercise both halves.
    CHECK(cyclic_seen >= 100);
    CHECK(acyclic_seen >= 100);
}

TEST_CASE("script text round-trips the compiled plan") {
    GraphDoc g = parse_graph(slurp("fixtures/graphs/square_walk.json"));
    CompiledPlan plan = compile(g, cat());
    std::string text = emit_script(plan, cat());
    CHECK(text.find("node_loop RepeatUntil") != std::string::npos);
    CHECK(text.find("KEY := \"space\"") != std::string::npos);

    CompiledPlan reparsed = parse_script(text, cat());
    CHECK(reparsed == plan);
    // Emission is a fixed point.
    CHECK(emit_script(reparsed, cat()) == text);
}

TEST_CASE("script parsing rejects malformed programs") {
    auto expect_syntax_error = [](const std::string& text, const char* fragment) {
        CAPTURE(text);
        try {
            (void)parse_script(text, cat());
            FAIL_CHECK("parsed despite: " << fragment);
        } catch (const PipelineError& e) {
            CHECK(e.diag().code == DiagCode::ScriptSyntaxError);
            CHECK_MESSAGE(e.diag().message.find(fragment) != std::string::npos,
                          "message was: " << e.diag().message);
        }
    };

    expect_syntax_error("banana node_a WhenFlagClicked {\n}\n", "expected 'script'");
    expect_syntax_error("script node_a MoveSteps {\n}\n", "not a hat block");
    expect_syntax_error("script node_a WhenFlagClicked {\n  node_b Zoom\n}\n",
                        "unknown block");
    expect_syntax_error("script node_a WhenFlagClicked {\n  node_b Add\n}\n",
                        "cannot appear as a statement");
    expect_syntax_error(
        "script node_a WhenFlagClicked {\n  node_b WhenFlagClicked\n}\n",
        "cannot appear as a statement");
    expect_syntax_error(
        "script node_a WhenFlagClicked {\n  node_b Say(MESSAGE = Wait)\n}\n",
        "not a reporter block");
    expect_syntax_error(
        "script node_a WhenKeyPressed(KEY := space) {\n}\n",
        "field values are string literals");
    expect_syntax_error("script node_a WhenFlagClicked {\n", "expected");
    expect_syntax_error(
        "script node_a WhenFlagClicked {\n  node_b MoveSteps(SIZE = 1)\n}\n",
        "has no value port");
    expect_syntax_error("script node_a WhenFlagClicked {\n  node_b Say(MESSAGE = @)\n}\n",
                        "unexpected character");

    SUBCASE("comments and variable collection work") {
        std::string text =
            "# leading remark\n"
            "script node_hat WhenFlagClicked {\n"
            "  node_set SetVariable(VALUE = 3, VARIABLE := \"score\")  # inline\n"
            "}\n";
        CompiledPlan plan = parse_script(text, cat());
        REQUIRE(plan.scripts.size() == 1);
        CHECK(plan.declared_variables == std::vector<std::string>{"score"});
        CHECK(plan.scripts[0].body[0].args.at("VALUE").value == Scalar(3.0));
    }
}

TEST_CASE("fuzzed convertible graphs validate cleanly and round-trip as script") {
    std::mt19937 rng(5150);
    for (int i = 0; i < 150; ++i) {
        GraphDoc g = testing_helpers::random_convertible_graph(rng, cat());
        auto diags = validate(g, cat());
        CAPTURE(serialize_graph(g));
        REQUIRE(!has_errors(diags));
        CompiledPlan plan = compile(g, cat());
        CompiledPlan reparsed = parse_script(emit_script(plan, cat()), cat());
        REQUIRE(reparsed == plan);
    }
}
