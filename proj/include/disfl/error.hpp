#pragma once

#include <stdexcept>
#include <string>

namespace disfl {

enum class ErrorCode {
  InvalidUtf8,
  MalformedTag,
  EmptyPartial,
  MalformedRecord,
  DuplicateId,
  MissingField,
  BadDuration,
  UncoverableCharacter,
  TargetTooSmall,
  EmptyReference,
  UnknownUtteranceId,
  ZeroBaseline,
  IdCollision,
  MissingBaseline,
  InvalidArgument,
  Io,
};

const char* to_string(ErrorCode code);

// All data errors raised by the toolkit. The CLI maps these to exit status 1.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace disfl
