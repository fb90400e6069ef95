#pragma once

#include <stdexcept>
#include <string>

namespace jase {

/// Stable machine-readable error codes; the CLI maps these onto exit
/// status and the `error_code:` report field.
enum class ErrorCode {
  Io,
  Parse,
  Dimension,
  InvalidValue,
  SingleClass,
  RankDeficient,
  Separation,
  NotConverged,
  DegenerateWeights,
  DegenerateSpectrum,
  Insufficient,
  Config,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace jase
