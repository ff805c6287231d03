#pragma once

#include <stdexcept>
#include <string>

namespace dimred {

enum class Err {
  NonSymmetric,
  NonFinite,
  DimensionMismatch,
  NotPositiveDefinite,
  Singular,
  TooFewSamples,
  SingularLocalGram,
  SingleClass,
  AllZeroSpectrum,
  DegenerateData,
  OutOfSampleUnsupported,
  Diverged,
  TooFewSubjects,
  NoPositives,
  ParseError,
  SchemaMismatch,
  MissingCell,
  ConfigError,
};

const char* to_string(Err code);

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& what) { throw Error(code, what); }

}  // namespace dimred
