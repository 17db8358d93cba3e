#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include <json.hpp>

#include "graphblocks/catalog.hpp"
#include "graphblocks/diagnostics.hpp"

using namespace graphblocks;

namespace {

const std::vector<std::string> kExpectedOrder = {
    "WhenFlagClicked", "WhenKeyPressed",
    "MoveSteps", "TurnRight", "TurnLeft", "GoToRandom", "GotoXY", "GlideToRandom",
    "GlideToXY", "PointInDirection", "ChangeXBy", "SetXTo", "ChangeYBy", "SetYTo",
    "XPosition", "YPosition",
    "Say", "SayForSecs", "Think", "ThinkForSecs", "ChangeSizeBy", "SetSizeTo",
    "Wait", "Repeat", "Forever", "If", "IfElse", "WaitUntil", "RepeatUntil", "Stop",
    "KeyPressed", "MouseDown",
    "Add", "Subtract", "Multiply", "Divide", "Random", "GreaterThan", "LessThan",
    "Equals", "And", "Or", "Not", "Join", "LetterOf", "LengthOf", "Contains", "Mod",
    "Round", "MathFunction",
    "SetVariable", "ChangeVariableBy", "GetVariable",
};

}  // namespace

TEST_CASE("catalog holds exactly the 53 blocks in contract order") {
    const auto& blocks = Catalog::instance().list_blocks();
    REQUIRE(blocks.size() == 53);
    REQUIRE(kExpectedOrder.size() == 53);
    for (size_t i = 0; i < blocks.size(); ++i) CHECK(blocks[i].name == kExpectedOrder[i]);
}

TEST_CASE("lookup and port specs") {
    const Catalog& c = Catalog::instance();
    CHECK(c.lookup_block("Constant") == nullptr);  // special node kind, not a block
    CHECK(c.lookup_block("NoSuchBlock") == nullptr);

    const BlockSpec* move = c.lookup_block("MoveSteps");
    REQUIRE(move != nullptr);
    CHECK(move->category == Category::statement);
    REQUIRE(move->in_ports.size() == 2);
    CHECK(move->in_ports[0].id == "EXEC");
    CHECK(move->in_ports[0].type == ValueType::exec);
    CHECK(move->in_ports[1].id == "STEPS");
    CHECK(move->in_ports[1].type == ValueType::number);
    REQUIRE(move->out_ports.size() == 1);
    CHECK(move->out_ports[0].id == "THEN");
    CHECK(move->value_in_ports().size() == 1);
    CHECK(move->substack_ports().empty());

    const BlockSpec* if_else = c.lookup_block("IfElse");
    REQUIRE(if_else != nullptr);
    CHECK(if_else->category == Category::control);
    std::vector<std::string> outs;
    for (const auto& p : if_else->out_ports) outs.push_back(p.id);
    CHECK(outs == std::vector<std::string>{"THEN", "SUBSTACK", "SUBSTACK2"});
    CHECK(if_else->substack_ports().size() == 2);

    const BlockSpec* hat = c.lookup_block("WhenFlagClicked");
    REQUIRE(hat != nullptr);
    CHECK(hat->category == Category::hat);
    CHECK(hat->in_ports.empty());
    REQUIRE(hat->out_ports.size() == 1);
    CHECK(hat->out_ports[0].id == "THEN");

    const BlockSpec* get = c.lookup_block("GetVariable");
    REQUIRE(get != nullptr);
    CHECK(get->category == Category::reporter);
    CHECK(get->in_ports.empty());
    REQUIRE(get->fields.size() == 1);
    CHECK(get->fields[0].id == "VARIABLE");
    CHECK(get->fields[0].free_form);
    REQUIRE(get->out_ports.size() == 1);
    CHECK(get->out_ports[0].id == "VALUE");
    CHECK(get->out_ports[0].type == ValueType::number);
}

TEST_CASE("closed field vocabularies") {
    const Catalog& c = Catalog::instance();

    const auto& stop = c.field_values("Stop", "OPTION");
    CHECK(stop == std::vector<std::string>{"all", "this script"});

    const auto& keys = c.field_values("WhenKeyPressed", "KEY");
    CHECK(keys.size() == 42);  // a-z, 0-9, space, 4 arrows, any
    std::set<std::string> key_set(keys.begin(), keys.end());
    CHECK(key_set.count("a"));
    CHECK(key_set.count("z"));
    CHECK(key_set.count("0"));
    CHECK(key_set.count("9"));
    CHECK(key_set.count("space"));
    CHECK(key_set.count("up arrow"));
    CHECK(key_set.count("down arrow"));
    CHECK(key_set.count("left arrow"));
    CHECK(key_set.count("right arrow"));
    CHECK(key_set.count("any"));
    CHECK(c.field_values("KeyPressed", "KEY") == keys);

    const auto& ops = c.field_values("MathFunction", "OPERATOR");
    CHECK(ops == std::vector<std::string>{"abs", "floor", "ceiling", "sqrt", "sin", "cos",
                                          "tan", "asin", "acos", "atan", "ln", "log",
                                          "e^", "10^"});

    CHECK(c.field_values("SetVariable", "VARIABLE").empty());  // free-form

    CHECK_THROWS_AS((void)c.field_values("NoSuchBlock", "KEY"), PipelineError);
    try {
        (void)c.field_values("MoveSteps", "KEY");
        FAIL("expected UnknownField");
    } catch (const PipelineError& e) {
        CHECK(e.diag().code == DiagCode::UnknownField);
    }
}

TEST_CASE("reference round-trips for the styles that carry types") {
    const Catalog& c = Catalog::instance();

    std::string proposed = c.emit_reference(ReferenceStyle::proposed);
    CHECK(same_structure(parse_reference(proposed), c.list_blocks()));

    std::string extra = c.emit_reference(ReferenceStyle::extra_description);
    CHECK(same_structure(parse_reference(extra), c.list_blocks()));

    // The styles must actually differ: the no-type style drops annotations,
    // the extra style adds port/field prose.
    std::string no_types = c.emit_reference(ReferenceStyle::no_types);
    CHECK(no_types != proposed);
    CHECK(extra != proposed);
    CHECK(no_types.find("\"type\"") == std::string::npos);
    CHECK(proposed.find("\"type\"") != std::string::npos);
    CHECK(extra.size() > proposed.size());

    // All three carry all 53 block names.
    for (const auto& b : c.list_blocks()) {
        CHECK(no_types.find('"' + b.name + '"') != std::string::npos);
        CHECK(proposed.find('"' + b.name + '"') != std::string::npos);
        CHECK(extra.find('"' + b.name + '"') != std::string::npos);
    }
}

TEST_CASE("same_structure is sensitive to every structural facet") {
    const Catalog& c = Catalog::instance();
    std::vector<BlockSpec> blocks = c.list_blocks();
    CHECK(same_structure(blocks, c.list_blocks()));

    SUBCASE("renamed block") {
        blocks[0].name = "WhenFlagTapped";
        CHECK(!same_structure(blocks, c.list_blocks()));
    }
    SUBCASE("reordered blocks") {
        std::swap(blocks[0], blocks[1]);
        CHECK(!same_structure(blocks, c.list_blocks()));
    }
    SUBCASE("dropped port") {
        for (auto& b : blocks)
            if (b.name == "MoveSteps") b.in_ports.pop_back();
        CHECK(!same_structure(blocks, c.list_blocks()));
    }
    SUBCASE("retyped port") {
        for (auto& b : blocks)
            if (b.name == "MoveSteps") b.in_ports[1].type = ValueType::string;
        CHECK(!same_structure(blocks, c.list_blocks()));
    }
    SUBCASE("renamed field") {
        for (auto& b : blocks)
            if (b.name == "Stop") b.fields[0].id = "MODE";
        CHECK(!same_structure(blocks, c.list_blocks()));
    }
    SUBCASE("description changes are not structural") {
        blocks[0].description = "something else";
        CHECK(same_structure(blocks, c.list_blocks()));
    }
}

TEST_CASE("description overrides keep structure and replace prose") {
    const Catalog& c = Catalog::instance();
    using ordered_json = nlohmann::ordered_json;
    ordered_json doc = ordered_json::parse(c.emit_reference(ReferenceStyle::extra_description));

    // Rewrite one block's description, reapply, and observe the change.
    REQUIRE(doc.is_object());
    doc["WhenFlagClicked"]["description"] = "customized trigger description";
    Catalog overridden = c.with_description_overrides(doc.dump());
    CHECK(overridden.list_blocks()[0].description == "customized trigger description");
    CHECK(same_structure(overridden.list_blocks(), c.list_blocks()));

    // A structural mismatch must be rejected.
    ordered_json broken = doc;
    broken["MoveSteps"]["inPorts"][1]["id"] = "STRIDE";
    CHECK_THROWS_AS((void)c.with_description_overrides(broken.dump()), PipelineError);
}
