#include "graphblocks/catalog.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

#include "graphblocks/diagnostics.hpp"

namespace graphblocks {

namespace {

using ordered_json = nlohmann::ordered_json;

// Shared port descriptions (extra_description style).
constexpr const char* kExecDesc = "Previous block that triggers this block";
constexpr const char* kThenDesc = "Next block to trigger after this block finishes";
constexpr const char* kSubstackDesc = "First block of the body this block executes";
constexpr const char* kSubstack2Desc = "First block of the body executed when the condition is false";

PortSpec exec_in() { return {"EXEC", ValueType::exec, kExecDesc}; }
PortSpec then_out() { return {"THEN", ValueType::exec, kThenDesc}; }
PortSpec substack_out() { return {"SUBSTACK", ValueType::exec, kSubstackDesc}; }
PortSpec substack2_out() { return {"SUBSTACK2", ValueType::exec, kSubstack2Desc}; }

PortSpec num(const char* id, const char* desc) { return {id, ValueType::number, desc}; }
PortSpec str(const char* id, const char* desc) { return {id, ValueType::string, desc}; }
PortSpec boolean(const char* id, const char* desc) { return {id, ValueType::boolean, desc}; }
PortSpec value_out(ValueType t, const char* desc) { return {"VALUE", t, desc}; }

const std::vector<std::string>& key_tokens() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> v;
        for (char c = 'a'; c <= 'z'; ++c) v.emplace_back(1, c);
        for (char c = '0'; c <= '9'; ++c) v.emplace_back(1, c);
        v.insert(v.end(), {"space", "up arrow", "down arrow", "left arrow", "right arrow", "any"});
        return v;
    }();
    return keys;
}

FieldSpec key_field() {
    return {"KEY", key_tokens(), false, "Keyboard key this block senses (single letters, digits, arrow keys, space or any)"};
}

FieldSpec variable_field(const char* desc) {
    return {"VARIABLE", {}, true, desc};
}

BlockSpec hat(const char* name, const char* desc, std::vector<FieldSpec> fields = {}) {
    return {name, Category::hat, {}, std::move(fields), {then_out()}, desc};
}

BlockSpec stmt(const char* name, const char* desc, std::vector<PortSpec> value_ports,
               std::vector<FieldSpec> fields = {}) {
    std::vector<PortSpec> in{exec_in()};
    in.insert(in.end(), value_ports.begin(), value_ports.end());
    return {name, Category::statement, std::move(in), std::move(fields), {then_out()}, desc};
}

BlockSpec control(const char* name, const char* desc, std::vector<PortSpec> value_ports,
                  bool two_substacks = false) {
    std::vector<PortSpec> in{exec_in()};
    in.insert(in.end(), value_ports.begin(), value_ports.end());
    std::vector<PortSpec> out{then_out(), substack_out()};
    if (two_substacks) out.push_back(substack2_out());
    return {name, Category::control, std::move(in), {}, std::move(out), desc};
}

BlockSpec reporter(const char* name, const char* desc, std::vector<PortSpec> value_ports,
                   PortSpec out, std::vector<FieldSpec> fields = {}) {
    return {name, Category::reporter, std::move(value_ports), std::move(fields), {std::move(out)}, desc};
}

std::vector<BlockSpec> build_blocks() {
    std::vector<BlockSpec> b;
    b.reserve(53);

    // --- events ---
    b.push_back(hat("WhenFlagClicked", "Starts this script when the green flag is clicked"));
    b.push_back(hat("WhenKeyPressed", "Starts this script when the specified key is pressed",
                    {key_field()}));

    // --- motion ---
    b.push_back(stmt("MoveSteps", "Move sprite forward by specified number of steps",
                     {num("STEPS", "Number of steps to move in the current direction")}));
    b.push_back(stmt("TurnRight", "Rotate sprite clockwise by specified degrees",
                     {num("DEGREES", "Degrees to rotate clockwise")}));
    b.push_back(stmt("TurnLeft", "Rotate sprite counterclockwise by specified degrees",
                     {num("DEGREES", "Degrees to rotate counterclockwise")}));
    b.push_back(stmt("GoToRandom", "Move sprite to a random position on the stage", {}));
    b.push_back(stmt("GotoXY", "Move sprite to the specified x and y position",
                     {num("X", "Target x position"), num("Y", "Target y position")}));
    b.push_back(stmt("GlideToRandom", "Glide sprite to a random position over the specified time",
                     {num("SECS", "Seconds the glide takes")}));
    b.push_back(stmt("GlideToXY", "Glide sprite to the specified position over the specified time",
                     {num("SECS", "Seconds the glide takes"), num("X", "Target x position"),
                      num("Y", "Target y position")}));
    b.push_back(stmt("PointInDirection", "Point sprite in the specified direction",
                     {num("DIRECTION", "Direction in degrees (0 is up, 90 is right)")}));
    b.push_back(stmt("ChangeXBy", "Change sprite's x position by the specified amount",
                     {num("DX", "Amount to add to the x position")}));
    b.push_back(stmt("SetXTo", "Set sprite's x position to the specified value",
                     {num("X", "New x position")}));
    b.push_back(stmt("ChangeYBy", "Change sprite's y position by the specified amount",
                     {num("DY", "Amount to add to the y position")}));
    b.push_back(stmt("SetYTo", "Set sprite's y position to the specified value",
                     {num("Y", "New y position")}));
    b.push_back(reporter("XPosition", "Reports sprite's current x position", {},
                         value_out(ValueType::number, "The current x position")));
    b.push_back(reporter("YPosition", "Reports sprite's current y position", {},
                         value_out(ValueType::number, "The current y position")));

    // --- looks ---
    b.push_back(stmt("Say", "Show a speech bubble with the specified message",
                     {str("MESSAGE", "Text to say")}));
    b.push_back(stmt("SayForSecs", "Show a speech bubble for the specified time",
                     {str("MESSAGE", "Text to say"), num("SECS", "Seconds to keep the bubble")}));
    b.push_back(stmt("Think", "Show a thought bubble with the specified message",
                     {str("MESSAGE", "Text to think")}));
    b.push_back(stmt("ThinkForSecs", "Show a thought bubble for the specified time",
                     {str("MESSAGE", "Text to think"), num("SECS", "Seconds to keep the bubble")}));
    b.push_back(stmt("ChangeSizeBy", "Change sprite's size by the specified amount",
                     {num("CHANGE", "Amount to add to the size percentage")}));
    b.push_back(stmt("SetSizeTo", "Set sprite's size to the specified percentage",
                     {num("SIZE", "New size percentage")}));

    // --- control ---
    b.push_back(stmt("Wait", "Pause this script for the specified time",
                     {num("DURATION", "Seconds to wait")}));
    b.push_back(control("Repeat", "Run the body the specified number of times",
                        {num("TIMES", "Number of iterations")}));
    b.push_back(control("Forever", "Run the body forever", {}));
    b.push_back(control("If", "Run the body when the condition is true",
                        {boolean("CONDITION", "Condition to test")}));
    b.push_back(control("IfElse", "Run one body when the condition is true, the other when false",
                        {boolean("CONDITION", "Condition to test")}, true));
    b.push_back(stmt("WaitUntil", "Pause this script until the condition becomes true",
                     {boolean("CONDITION", "Condition to wait for")}));
    b.push_back(control("RepeatUntil", "Run the body until the condition becomes true",
                        {boolean("CONDITION", "Condition that ends the loop")}));
    b.push_back(stmt("Stop", "Stop scripts according to the chosen option", {},
                     {{"OPTION", {"all", "this script"}, false, "What to stop"}}));

    // --- sensing ---
    b.push_back(reporter("KeyPressed", "Reports whether the specified key is currently pressed", {},
                         value_out(ValueType::boolean, "True while the key is held down"),
                         {key_field()}));
    b.push_back(reporter("MouseDown", "Reports whether the mouse button is currently pressed", {},
                         value_out(ValueType::boolean, "True while the mouse button is held down")));

    // --- operators ---
    b.push_back(reporter("Add", "Reports the sum of two numbers",
                         {num("NUM1", "First addend"), num("NUM2", "Second addend")},
                         value_out(ValueType::number, "NUM1 plus NUM2")));
    b.push_back(reporter("Subtract", "Reports the difference of two numbers",
                         {num("NUM1", "Number to subtract from"), num("NUM2", "Number to subtract")},
                         value_out(ValueType::number, "NUM1 minus NUM2")));
    b.push_back(reporter("Multiply", "Reports the product of two numbers",
                         {num("NUM1", "First factor"), num("NUM2", "Second factor")},
                         value_out(ValueType::number, "NUM1 times NUM2")));
    b.push_back(reporter("Divide", "Reports the quotient of two numbers",
                         {num("NUM1", "Dividend"), num("NUM2", "Divisor")},
                         value_out(ValueType::number, "NUM1 divided by NUM2")));
    b.push_back(reporter("Random", "Reports a random number between two bounds (integer when both bounds are integers)",
                         {num("FROM", "Lower bound"), num("TO", "Upper bound")},
                         value_out(ValueType::number, "Random number between FROM and TO inclusive")));
    b.push_back(reporter("GreaterThan", "Reports whether the first number is greater than the second",
                         {num("OPERAND1", "Left operand"), num("OPERAND2", "Right operand")},
                         value_out(ValueType::boolean, "True when OPERAND1 > OPERAND2")));
    b.push_back(reporter("LessThan", "Reports whether the first number is less than the second",
                         {num("OPERAND1", "Left operand"), num("OPERAND2", "Right operand")},
                         value_out(ValueType::boolean, "True when OPERAND1 < OPERAND2")));
    b.push_back(reporter("Equals", "Reports whether two values are equal (numeric when both are numbers, case-insensitive text otherwise)",
                         {num("OPERAND1", "Left operand"), num("OPERAND2", "Right operand")},
                         value_out(ValueType::boolean, "True when the operands are equal")));
    b.push_back(reporter("And", "Reports whether both conditions are true",
                         {boolean("OPERAND1", "First condition"), boolean("OPERAND2", "Second condition")},
                         value_out(ValueType::boolean, "True when both operands are true")));
    b.push_back(reporter("Or", "Reports whether at least one condition is true",
                         {boolean("OPERAND1", "First condition"), boolean("OPERAND2", "Second condition")},
                         value_out(ValueType::boolean, "True when either operand is true")));
    b.push_back(reporter("Not", "Reports the opposite of the condition",
                         {boolean("OPERAND", "Condition to negate")},
                         value_out(ValueType::boolean, "True when the operand is false")));
    b.push_back(reporter("Join", "Reports the two texts joined together",
                         {str("STRING1", "First part"), str("STRING2", "Second part")},
                         value_out(ValueType::string, "STRING1 followed by STRING2")));
    b.push_back(reporter("LetterOf", "Reports the letter at the specified position of a text (1 is the first letter)",
                         {num("LETTER", "1-based position"), str("STRING", "Text to index")},
                         value_out(ValueType::string, "The single letter at the position")));
    b.push_back(reporter("LengthOf", "Reports the number of letters in a text",
                         {str("STRING", "Text to measure")},
                         value_out(ValueType::number, "Number of letters")));
    b.push_back(reporter("Contains", "Reports whether a text contains another text (case-insensitive)",
                         {str("STRING1", "Text to search in"), str("STRING2", "Text to search for")},
                         value_out(ValueType::boolean, "True when STRING1 contains STRING2")));
    b.push_back(reporter("Mod", "Reports the remainder of a division (result has the divisor's sign)",
                         {num("NUM1", "Dividend"), num("NUM2", "Divisor")},
                         value_out(ValueType::number, "NUM1 modulo NUM2")));
    b.push_back(reporter("Round", "Reports the number rounded to the nearest integer",
                         {num("NUM", "Number to round")},
                         value_out(ValueType::number, "Nearest integer")));
    b.push_back(reporter("MathFunction", "Reports the chosen math function applied to a number",
                         {num("NUM", "Function argument")},
                         value_out(ValueType::number, "Result of the function"),
                         {{"OPERATOR",
                           {"abs", "floor", "ceiling", "sqrt", "sin", "cos", "tan", "asin",
                            "acos", "atan", "ln", "log", "e^", "10^"},
                           false,
                           "Math function to apply (trigonometry in degrees)"}}));

    // --- variables ---
    b.push_back(stmt("SetVariable", "Set the named variable to the specified value",
                     {num("VALUE", "Value to store")},
                     {variable_field("Name of the variable to set (also declares it)")}));
    b.push_back(stmt("ChangeVariableBy", "Change the named variable by the specified amount",
                     {num("VALUE", "Amount to add")},
                     {variable_field("Name of the variable to change")}));
    b.push_back(reporter("GetVariable", "Reports the current value of the named variable", {},
                         value_out(ValueType::number, "The variable's current value"),
                         {variable_field("Name of the variable to read")}));

    return b;
}

Category derive_category(const BlockSpec& spec) {
    bool has_exec = spec.in_port("EXEC") != nullptr;
    bool has_substack = spec.out_port("SUBSTACK") != nullptr;
    bool has_then = spec.out_port("THEN") != nullptr;
    if (!has_exec && has_then) return Category::hat;
    if (has_exec && has_substack) return Category::control;
    if (has_exec) return Category::statement;
    return Category::reporter;
}

ordered_json port_to_json(const PortSpec& p, ReferenceStyle style) {
    ordered_json j;
    j["id"] = p.id;
    if (style != ReferenceStyle::no_types) j["type"] = value_type_name(p.type);
    if (style == ReferenceStyle::extra_description) j["description"] = p.description;
    return j;
}

ordered_json field_to_json(const FieldSpec& f, ReferenceStyle style) {
    ordered_json j;
    j["id"] = f.id;
    if (style != ReferenceStyle::no_types) j["type"] = "string";
    if (style == ReferenceStyle::extra_description) j["description"] = f.description;
    return j;
}

ValueType value_type_from_name(const std::string& name) {
    if (name == "number") return ValueType::number;
    if (name == "string") return ValueType::string;
    if (name == "boolean") return ValueType::boolean;
    if (name == "exec") return ValueType::exec;
    fail(DiagCode::SchemaViolation, "unknown port type '" + name + "'");
}

}  // namespace

const char* value_type_name(ValueType t) {
    switch (t) {
        case ValueType::number: return "number";
        case ValueType::string: return "string";
        case ValueType::boolean: return "boolean";
        case ValueType::exec: return "exec";
    }
    return "unknown";
}

const char* category_name(Category c) {
    switch (c) {
        case Category::hat: return "hat";
        case Category::statement: return "statement";
        case Category::control: return "control";
        case Category::reporter: return "reporter";
    }
    return "unknown";
}

const PortSpec* BlockSpec::in_port(const std::string& id) const {
    for (const auto& p : in_ports)
        if (p.id == id) return &p;
    return nullptr;
}

const PortSpec* BlockSpec::out_port(const std::string& id) const {
    for (const auto& p : out_ports)
        if (p.id == id) return &p;
    return nullptr;
}

const FieldSpec* BlockSpec::field(const std::string& id) const {
    for (const auto& f : fields)
        if (f.id == id) return &f;
    return nullptr;
}

std::vector<const PortSpec*> BlockSpec::value_in_ports() const {
    std::vector<const PortSpec*> out;
    for (const auto& p : in_ports)
        if (p.type != ValueType::exec) out.push_back(&p);
    return out;
}

std::vector<const PortSpec*> BlockSpec::substack_ports() const {
    std::vector<const PortSpec*> out;
    for (const auto& p : out_ports)
        if (p.id == "SUBSTACK" || p.id == "SUBSTACK2") out.push_back(&p);
    return out;
}

Catalog::Catalog() : blocks_(build_blocks()) {}

const Catalog& Catalog::instance() {
    static const Catalog catalog;
    return catalog;
}

const BlockSpec* Catalog::lookup_block(const std::string& name) const {
    for (const auto& b : blocks_)
        if (b.name == name) return &b;
    return nullptr;
}

const std::vector<std::string>& Catalog::field_values(const std::string& block,
                                                      const std::string& field_id) const {
    const BlockSpec* spec = lookup_block(block);
    if (!spec) fail(DiagCode::UnknownBlock, "no block named '" + block + "'");
    const FieldSpec* f = spec->field(field_id);
    if (!f) fail(DiagCode::UnknownField, block + " has no field '" + field_id + "'", {}, {field_id});
    return f->allowed_values;
}

std::string Catalog::emit_reference(ReferenceStyle style) const {
    ordered_json doc = ordered_json::object();
    for (const auto& b : blocks_) {
        ordered_json entry;
        if (style == ReferenceStyle::extra_description) entry["description"] = b.description;
        entry["inPorts"] = ordered_json::array();
        for (const auto& p : b.in_ports) entry["inPorts"].push_back(port_to_json(p, style));
        entry["fields"] = ordered_json::array();
        for (const auto& f : b.fields) entry["fields"].push_back(field_to_json(f, style));
        entry["outPorts"] = ordered_json::array();
        for (const auto& p : b.out_ports) entry["outPorts"].push_back(port_to_json(p, style));
        doc[b.name] = std::move(entry);
    }
    return doc.dump(2) + "\n";
}

Catalog Catalog::with_description_overrides(const std::string& json_text) const {
    std::vector<BlockSpec> external = parse_reference(json_text);
    if (!same_structure(blocks_, external))
        fail(DiagCode::SchemaViolation,
             "external catalog structure does not match the embedded block vocabulary");
    Catalog out = *this;
    for (size_t i = 0; i < out.blocks_.size(); ++i) {
        BlockSpec& mine = out.blocks_[i];
        const BlockSpec& theirs = external[i];
        if (!theirs.description.empty()) mine.description = theirs.description;
        for (size_t p = 0; p < mine.in_ports.size(); ++p)
            if (!theirs.in_ports[p].description.empty())
                mine.in_ports[p].description = theirs.in_ports[p].description;
        for (size_t p = 0; p < mine.out_ports.size(); ++p)
            if (!theirs.out_ports[p].description.empty())
                mine.out_ports[p].description = theirs.out_ports[p].description;
        for (size_t f = 0; f < mine.fields.size(); ++f)
            if (!theirs.fields[f].description.empty())
                mine.fields[f].description = theirs.fields[f].description;
    }
    return out;
}

std::vector<BlockSpec> parse_reference(const std::string& json_text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(DiagCode::MalformedJson, e.what());
    }
    if (!doc.is_object()) fail(DiagCode::SchemaViolation, "reference must be a JSON object");

    auto parse_ports = [](const ordered_json& arr, const std::string& path) {
        std::vector<PortSpec> out;
        if (!arr.is_array()) fail(DiagCode::SchemaViolation, path + " must be an array");
        for (const auto& item : arr) {
            if (!item.is_object() || !item.contains("id") || !item.contains("type"))
                fail(DiagCode::SchemaViolation, path + " entries need id and type");
            PortSpec p{item["id"].get<std::string>(),
                       value_type_from_name(item["type"].get<std::string>()),
                       item.value("description", std::string())};
            out.push_back(std::move(p));
        }
        return out;
    };

    std::vector<BlockSpec> blocks;
    for (const auto& [name, entry] : doc.items()) {
        if (!entry.is_object()) fail(DiagCode::SchemaViolation, name + " must be an object");
        BlockSpec spec;
        spec.name = name;
        spec.description = entry.value("description", std::string());
        spec.in_ports = parse_ports(entry.value("inPorts", ordered_json::array()), name + ".inPorts");
        spec.out_ports = parse_ports(entry.value("outPorts", ordered_json::array()), name + ".outPorts");
        for (const auto& item : entry.value("fields", ordered_json::array())) {
            if (!item.is_object() || !item.contains("id"))
                fail(DiagCode::SchemaViolation, name + ".fields entries need an id");
            FieldSpec f;
            f.id = item["id"].get<std::string>();
            f.description = item.value("description", std::string());
            spec.fields.push_back(std::move(f));
        }
        spec.category = derive_category(spec);
        blocks.push_back(std::move(spec));
    }
    return blocks;
}

bool same_structure(const std::vector<BlockSpec>& a, const std::vector<BlockSpec>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        const BlockSpec& x = a[i];
        const BlockSpec& y = b[i];
        if (x.name != y.name || x.category != y.category) return false;
        if (x.in_ports.size() != y.in_ports.size() || x.out_ports.size() != y.out_ports.size() ||
            x.fields.size() != y.fields.size())
            return false;
        for (size_t p = 0; p < x.in_ports.size(); ++p)
            if (x.in_ports[p].id != y.in_ports[p].id || x.in_ports[p].type != y.in_ports[p].type)
                return false;
        for (size_t p = 0; p < x.out_ports.size(); ++p)
            if (x.out_ports[p].id != y.out_ports[p].id || x.out_ports[p].type != y.out_ports[p].type)
                return false;
        for (size_t f = 0; f < x.fields.size(); ++f)
            if (x.fields[f].id != y.fields[f].id) return false;
    }
    return true;
}

}  // namespace graphblocks
