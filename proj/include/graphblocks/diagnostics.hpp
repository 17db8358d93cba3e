#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace graphblocks {

// Closed error taxonomy shared by every pipeline stage.  Each code maps to
// exactly one failure class; docs/validator.md describes when each fires.
enum class DiagCode {
    // extraction / structural parse
    NoJsonFound,
    MalformedJson,
    SchemaViolation,
    BadNodeId,
    ConstantValueRule,
    MissingMirrorEdge,
    // graph validation
    UnknownBlock,
    UnknownPort,
    UnknownField,
    TypeMismatch,
    SameDirectionConnection,
    DuplicateInputEdge,
    MissingRequiredInput,
    DanglingEdgeEndpoint,
    BadFieldValue,
    UndeclaredVariable,
    NoHatBlock,
    Orphan,
    CycleDetected,
    // script text
    ScriptSyntaxError,
    // interpreter
    DivisionByZero,
    BadCoercion,
    IndexOutOfRange,
    // benchmark harness
    AuthError,
    RateLimited,
    TransportError,
    EmptyResponse,
    MissingJudgment,
    DegenerateSample,
};

enum class Severity { error, warning };

struct Diagnostic {
    DiagCode code;
    std::string message;
    std::vector<std::string> node_ids;
    std::vector<std::string> port_ids;

    bool operator==(const Diagnostic&) const = default;
};

const char* code_name(DiagCode code);
Severity code_severity(DiagCode code);  // Orphan is the only warning
const char* severity_name(Severity s);

// One diagnostic per line, machine-readable.
nlohmann::json diagnostic_to_json(const Diagnostic& d);

// Thrown by operations whose contract is "first failure aborts" (parsing,
// conversion, compilation, network).  validate() collects instead.
class PipelineError : public std::runtime_error {
  public:
    explicit PipelineError(Diagnostic d)
        : std::runtime_error(std::string(code_name(d.code)) + ": " + d.message),
          diag_(std::move(d)) {}

    const Diagnostic& diag() const { return diag_; }

  private:
    Diagnostic diag_;
};

inline Diagnostic make_diag(DiagCode code, std::string message,
                            std::vector<std::string> node_ids = {},
                            std::vector<std::string> port_ids = {}) {
    return Diagnostic{code, std::move(message), std::move(node_ids), std::move(port_ids)};
}

[[noreturn]] inline void fail(DiagCode code, std::string message,
                              std::vector<std::string> node_ids = {},
                              std::vector<std::string> port_ids = {}) {
    throw PipelineError(make_diag(code, std::move(message), std::move(node_ids), std::move(port_ids)));
}

}  // namespace graphblocks
