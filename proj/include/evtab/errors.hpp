#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace evtab {

// Root of every error the library throws. Subclasses map one-to-one onto the
// named failure modes of each module.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// corpus
class UnbalancedTag : public Error { using Error::Error; };
class OverlappingTags : public Error { using Error::Error; };
class UnknownTag : public Error { using Error::Error; };

class DecodeError : public Error {
 public:
  DecodeError(std::size_t record, std::size_t line, const std::string& what)
      : Error("record " + std::to_string(record) + " (line " +
              std::to_string(line) + "): " + what),
        record_(record),
        line_(line) {}
  std::size_t record() const { return record_; }
  std::size_t line() const { return line_; }

 private:
  std::size_t record_;
  std::size_t line_;
};

// ingest
class TransportError : public Error { using Error::Error; };
class ParseError : public Error { using Error::Error; };
class EmptyBody : public Error { using Error::Error; };

class RateLimited : public Error {
 public:
  RateLimited(const std::string& what, double retry_after_seconds)
      : Error(what), retry_after_(retry_after_seconds) {}
  double retry_after() const { return retry_after_; }

 private:
  double retry_after_;
};

// maxent
class NonFiniteLoss : public Error { using Error::Error; };
class DimensionMismatch : public Error { using Error::Error; };

// inference
class EmptyProblem : public Error { using Error::Error; };
class Infeasible : public Error { using Error::Error; };
class ProblemTooLarge : public Error { using Error::Error; };

// eval
class LengthMismatch : public Error { using Error::Error; };
class CorpusTooSmall : public Error { using Error::Error; };
class TooFewPairs : public Error { using Error::Error; };
class EmptyInput : public Error { using Error::Error; };

// evidence tables
class ModeUnsupported : public Error { using Error::Error; };

}  // namespace evtab
