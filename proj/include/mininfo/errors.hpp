#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mininfo {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error { using Error::Error; };
struct InvalidMdp : Error { using Error::Error; };
struct InvalidPolicy : Error { using Error::Error; };
struct InvalidDistribution : Error { using Error::Error; };
struct InvalidPath : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
/// A state handed in as transient is recurrent (or the reverse).
struct RecurrenceMisclassification : Error { using Error::Error; };
struct InvalidUnion : Error { using Error::Error; };
struct SearchTooLarge : Error { using Error::Error; };
struct InvalidGridSpec : Error { using Error::Error; };
struct Unsupported : Error { using Error::Error; };

/// Solver gave up; `best` holds the best iterate found.
struct NumericalFailure : Error {
  NumericalFailure(const std::string& what, std::vector<double> best_iterate)
      : Error(what), best(std::move(best_iterate)) {}
  std::vector<double> best;
};

}  // namespace mininfo
