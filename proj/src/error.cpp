#include "graphy/error.hpp"

namespace graphy {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::UnknownOwner: return "UnknownOwner";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::KindViolation: return "KindViolation";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::UnsupportedKind: return "UnsupportedKind";
    case ErrorCode::CorruptDocument: return "CorruptDocument";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::EmbedderFailure: return "EmbedderFailure";
    case ErrorCode::EmptyIndex: return "EmptyIndex";
    case ErrorCode::NoProvider: return "NoProvider";
    case ErrorCode::ProviderFailure: return "ProviderFailure";
    case ErrorCode::ParseFailure: return "ParseFailure";
    case ErrorCode::DuplicatePrefix: return "DuplicatePrefix";
    case ErrorCode::MalformedConfig: return "MalformedConfig";
    case ErrorCode::DuplicateNodeName: return "DuplicateNodeName";
    case ErrorCode::UnknownEdgeEndpoint: return "UnknownEdgeEndpoint";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::DocumentUnreadable: return "DocumentUnreadable";
    case ErrorCode::RuleNoMatch: return "RuleNoMatch";
    case ErrorCode::MissingRequired: return "MissingRequired";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::EmptyTitle: return "EmptyTitle";
    case ErrorCode::RepositoryUnavailable: return "RepositoryUnavailable";
    case ErrorCode::UnknownAttribute: return "UnknownAttribute";
    case ErrorCode::StaleBucket: return "StaleBucket";
    case ErrorCode::EmptySelection: return "EmptySelection";
    case ErrorCode::NotInFuture: return "NotInFuture";
    case ErrorCode::InvalidIR: return "InvalidIR";
    case ErrorCode::NoUsableIntent: return "NoUsableIntent";
    case ErrorCode::UnknownFact: return "UnknownFact";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::BindFailure: return "BindFailure";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace graphy
