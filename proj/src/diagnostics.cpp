#include "graphblocks/diagnostics.hpp"

namespace graphblocks {

const char* code_name(DiagCode code) {
    switch (code) {
        case DiagCode::NoJsonFound: return "NoJsonFound";
        case DiagCode::MalformedJson: return "MalformedJson";
        case DiagCode::SchemaViolation: return "SchemaViolation";
        case DiagCode::BadNodeId: return "BadNodeId";
        case DiagCode::ConstantValueRule: return "ConstantValueRule";
        case DiagCode::MissingMirrorEdge: return "MissingMirrorEdge";
        case DiagCode::UnknownBlock: return "UnknownBlock";
        case DiagCode::UnknownPort: return "UnknownPort";
        case DiagCode::UnknownField: return "UnknownField";
        case DiagCode::TypeMismatch: return "TypeMismatch";
        case DiagCode::SameDirectionConnection: return "SameDirectionConnection";
        case DiagCode::DuplicateInputEdge: return "DuplicateInputEdge";
        case DiagCode::MissingRequiredInput: return "MissingRequiredInput";
        case DiagCode::DanglingEdgeEndpoint: return "DanglingEdgeEndpoint";
        case DiagCode::BadFieldValue: return "BadFieldValue";
        case DiagCode::UndeclaredVariable: return "UndeclaredVariable";
        case DiagCode::NoHatBlock: return "NoHatBlock";
        case DiagCode::Orphan: return "Orphan";
        case DiagCode::CycleDetected: return "CycleDetected";
        case DiagCode::ScriptSyntaxError: return "ScriptSyntaxError";
        case DiagCode::DivisionByZero: return "DivisionByZero";
        case DiagCode::BadCoercion: return "BadCoercion";
        case DiagCode::IndexOutOfRange: return "IndexOutOfRange";
        case DiagCode::AuthError: return "AuthError";
        case DiagCode::RateLimited: return "RateLimited";
        case DiagCode::TransportError: return "TransportError";
        case DiagCode::EmptyResponse: return "EmptyResponse";
        case DiagCode::MissingJudgment: return "MissingJudgment";
        case DiagCode::DegenerateSample: return "DegenerateSample";
    }
    return "Unknown";
}

Severity code_severity(DiagCode code) {
    return code == DiagCode::Orphan ? Severity::warning : Severity::error;
}

const char* severity_name(Severity s) {
    return s == Severity::warning ? "warning" : "error";
}

nlohmann::json diagnostic_to_json(const Diagnostic& d) {
    return nlohmann::json{
        {"code", code_name(d.code)},
        {"severity", code_severity(d.code) == Severity::error ? "error" : "warning"},
        {"message", d.message},
        {"node_ids", d.node_ids},
        {"port_ids", d.port_ids},
    };
}

}  // namespace graphblocks
