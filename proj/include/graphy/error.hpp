#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace graphy {

// Stable error codes. The string form is part of the REST contract
// (`{"code": ..., "message": ...}`), so names must not change.
enum class ErrorCode {
  // graph-core
  SchemaViolation,
  UnknownOwner,
  UnknownNode,
  KindViolation,
  UnknownLabel,
  IoFailure,
  // ingest
  UnsupportedKind,
  CorruptDocument,
  InvalidParams,
  EmbedderFailure,
  EmptyIndex,
  // providers
  NoProvider,
  ProviderFailure,
  ParseFailure,
  DuplicatePrefix,
  // inspection
  MalformedConfig,
  DuplicateNodeName,
  UnknownEdgeEndpoint,
  CycleDetected,
  DocumentUnreadable,
  RuleNoMatch,
  MissingRequired,
  TypeMismatch,
  // navigation
  EmptyTitle,
  RepositoryUnavailable,
  // exploration
  UnknownAttribute,
  StaleBucket,
  EmptySelection,
  NotInFuture,
  InvalidIR,
  // generation
  NoUsableIntent,
  UnknownFact,
  UnsupportedFormat,
  // shell
  UnknownSession,
  InvalidState,
  BindFailure,
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace graphy
