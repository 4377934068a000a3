#ifndef CROSSVOX_ERRORS_HPP
#define CROSSVOX_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace crossvox {

// Every failure is either an environment/IO problem or a domain violation.
// The CLI maps Io -> exit 1 and Domain -> exit 2.
enum class ErrorKind { Io, Domain };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string msg) : std::runtime_error(std::move(msg)), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class FileNotFoundError : public Error {
 public:
  explicit FileNotFoundError(const std::string& path)
      : Error(ErrorKind::Io, "file not found: " + path) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(ErrorKind::Io, "io error: " + msg) {}
};

// An input file that does not follow its schema is an environment problem
// (exit 1 from the CLI), unlike domain violations in otherwise valid data.
class MalformedRowError : public Error {
 public:
  MalformedRowError(std::size_t line, const std::string& msg)
      : Error(ErrorKind::Io, "malformed row at line " + std::to_string(line) + ": " + msg),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class OneHotViolationError : public Error {
 public:
  OneHotViolationError(const std::string& symbol, const std::string& group)
      : Error(ErrorKind::Domain,
              "one-hot violation for symbol '" + symbol + "' in group '" + group + "'") {}
};

class DuplicateSymbolError : public Error {
 public:
  explicit DuplicateSymbolError(const std::string& symbol)
      : Error(ErrorKind::Domain, "duplicate symbol '" + symbol + "'") {}
};

class UnknownSymbolError : public Error {
 public:
  UnknownSymbolError(std::size_t position, const std::string& cluster)
      : Error(ErrorKind::Domain, "unknown symbol '" + cluster + "' at position " +
                                     std::to_string(position)),
        position_(position),
        cluster_(cluster) {}
  std::size_t position() const { return position_; }
  const std::string& cluster() const { return cluster_; }

 private:
  std::size_t position_;
  std::string cluster_;
};

class DimensionMismatchError : public Error {
 public:
  DimensionMismatchError(std::size_t expected, std::size_t got)
      : Error(ErrorKind::Domain, "dimension mismatch: expected " + std::to_string(expected) +
                                     ", got " + std::to_string(got)) {}
};

class ZeroVectorError : public Error {
 public:
  ZeroVectorError() : Error(ErrorKind::Domain, "zero-norm vector: cosine term undefined") {}
};

class EmptyBatchError : public Error {
 public:
  EmptyBatchError() : Error(ErrorKind::Domain, "empty batch") {}
};

class NonFiniteGradientError : public Error {
 public:
  NonFiniteGradientError(int task_id, int inner_step)
      : Error(ErrorKind::Domain, "non-finite gradient (task " + std::to_string(task_id) +
                                     ", inner step " + std::to_string(inner_step) + ")") {}
};

class TooFewFramesError : public Error {
 public:
  TooFewFramesError(std::size_t frames, std::size_t phonemes)
      : Error(ErrorKind::Domain, "too few frames: " + std::to_string(frames) + " frames for " +
                                     std::to_string(phonemes) + " phonemes") {}
};

class DegenerateRowError : public Error {
 public:
  explicit DegenerateRowError(std::size_t frame)
      : Error(ErrorKind::Domain,
              "degenerate attention: no usable cell at frame " + std::to_string(frame)),
        frame_(frame) {}
  std::size_t frame() const { return frame_; }

 private:
  std::size_t frame_;
};

class InstanceTooLargeError : public Error {
 public:
  InstanceTooLargeError(std::size_t frames, std::size_t phonemes)
      : Error(ErrorKind::Domain, "instance too large for enumeration: " + std::to_string(frames) +
                                     "x" + std::to_string(phonemes)) {}
};

class NonStochasticRowError : public Error {
 public:
  NonStochasticRowError(std::size_t row, double sum)
      : Error(ErrorKind::Domain, "attention row " + std::to_string(row) +
                                     " does not sum to 1 (got " + std::to_string(sum) + ")") {}
};

class HeldoutNotInTableError : public Error {
 public:
  explicit HeldoutNotInTableError(const std::string& symbol)
      : Error(ErrorKind::Domain, "held-out symbol '" + symbol + "' not in table") {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error(ErrorKind::Domain, msg) {}
};

}  // namespace crossvox

#endif  // CROSSVOX_ERRORS_HPP
