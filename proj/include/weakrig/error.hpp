#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace weakrig {

enum class ErrorKind {
  SelfLoop,
  DuplicateConstraint,
  IndexOutOfRange,
  DegenerateAngleTriple,
  CollocatedPoints,
  EmptyEdgeSet,
  DegenerateConfiguration,
  TargetMismatch,
  WrongTopology,
  CollinearPlacement,
  BadAnchor,
  EdgeNotFound,
  SeedNotRigid,
  PlacementExhausted,
  ParseError,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

/// Where in an input collection an error was detected, e.g. {"edges", 2}.
/// Used by the file readers to map a failure back to a source line.
struct ErrorLocation {
  std::string section;
  int index = -1;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, ErrorLocation location = {})
      : std::runtime_error(message), kind_(kind), location_(std::move(location)) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
  [[nodiscard]] const ErrorLocation& location() const noexcept { return location_; }

 private:
  ErrorKind kind_;
  ErrorLocation location_;
};

}  // namespace weakrig
