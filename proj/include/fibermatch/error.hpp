#pragma once

#include <stdexcept>
#include <string>

namespace fibermatch {

// Broad failure classes; the CLI maps these onto its exit codes.
enum class ErrorKind {
  Config,     // bad parameters or configuration
  Data,       // malformed or unusable input data
  Numerical,  // a solver, quadrature or truncation check failed
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& what) : Error(ErrorKind::Config, what) {}
};

struct ConvergenceError : Error {
  explicit ConvergenceError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

// Requested mode is beyond cutoff.
struct NotGuided : Error {
  explicit NotGuided(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

struct TruncationTooCoarse : Error {
  explicit TruncationTooCoarse(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

struct DegenerateField : Error {
  explicit DegenerateField(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

struct ParseError : Error {
  ParseError(const std::string& what, std::size_t line)
      : Error(ErrorKind::Data, what + " (line " + std::to_string(line) + ")"), line_(line) {}
  explicit ParseError(const std::string& what) : Error(ErrorKind::Data, what), line_(0) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct NoPeak : Error {
  explicit NoPeak(const std::string& what) : Error(ErrorKind::Data, what) {}
};

struct SingularFit : Error {
  explicit SingularFit(const std::string& what) : Error(ErrorKind::Data, what) {}
};

}  // namespace fibermatch
