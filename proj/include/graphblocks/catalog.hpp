#pragma once

#include <optional>
#include <string>
#include <vector>

namespace graphblocks {

enum class ValueType { number, string, boolean, exec };

enum class Category { hat, statement, control, reporter };

const char* value_type_name(ValueType t);
const char* category_name(Category c);

struct PortSpec {
    std::string id;
    ValueType type;
    std::string description;
};

// Fields are menu-like inputs bound to constants.  Closed fields carry the
// allowed token list; free-form fields (variable names) accept any
// non-empty string and leave allowed_values empty.
struct FieldSpec {
    std::string id;
    std::vector<std::string> allowed_values;
    bool free_form = false;
    std::string description;
};

struct BlockSpec {
    std::string name;
    Category category;
    std::vector<PortSpec> in_ports;    // EXEC first for statements/controls
    std::vector<FieldSpec> fields;
    std::vector<PortSpec> out_ports;   // THEN / SUBSTACK(2) / VALUE
    std::string description;

    const PortSpec* in_port(const std::string& id) const;
    const PortSpec* out_port(const std::string& id) const;
    const FieldSpec* field(const std::string& id) const;
    // Value in-ports in declared order (everything except EXEC).
    std::vector<const PortSpec*> value_in_ports() const;
    std::vector<const PortSpec*> substack_ports() const;
};

enum class ReferenceStyle { proposed, no_types, extra_description };

// The fixed 53-block vocabulary.  Block order is part of the contract: it
// is the order used by the emitted reference text.
class Catalog {
  public:
    static const Catalog& instance();

    const std::vector<BlockSpec>& list_blocks() const { return blocks_; }
    // Nullptr when the name is unknown.  "Constant" is not in the catalog;
    // it is a special node kind handled by the graph layer.
    const BlockSpec* lookup_block(const std::string& name) const;

    // Allowed tokens of a closed field; empty list for free-form fields.
    // Throws UnknownBlock / UnknownField.
    const std::vector<std::string>& field_values(const std::string& block,
                                                 const std::string& field_id) const;

    // Canonical reference document (2-space indent, catalog order).
    std::string emit_reference(ReferenceStyle style) const;

    // Applies per-block / per-port description overrides from a JSON file
    // shaped like emit_reference(extra_description).  Structure (names,
    // ports, types) must match the embedded catalog exactly.
    Catalog with_description_overrides(const std::string& json_text) const;

  private:
    Catalog();
    std::vector<BlockSpec> blocks_;
};

// Structural parse-back of an emitted reference (proposed or
// extra_description style; no_types lacks the type information needed to
// rebuild specs).  Categories are reconstructed from the port structure.
std::vector<BlockSpec> parse_reference(const std::string& json_text);

// Structural equality used by the reference round-trip checks: name order,
// derived category, port ids/types in order, field ids in order.
bool same_structure(const std::vector<BlockSpec>& a, const std::vector<BlockSpec>& b);

}  // namespace graphblocks
