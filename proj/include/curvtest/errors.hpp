#pragma once

#include <stdexcept>
#include <string>

namespace curvtest {

// =====================================================================
// Error taxonomy.  Every throwing path in the library uses one of the
// three categories below; the CLI maps them onto process exit codes
// (usage -> 1, data -> 2, numerical -> 3).
// =====================================================================

class CurvtestError : public std::runtime_error {
 public:
  explicit CurvtestError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input: unreadable CSV cells, missing columns, undersized or
// non-finite samples, degenerate responses.
class DataError : public CurvtestError {
 public:
  explicit DataError(const std::string& msg) : CurvtestError(msg) {}
};

// Well-formed input on which required numerics break down: singular
// design matrices, zero-variance bandwidth inputs, non-convergent
// quadrature, bootstrap degeneracy.
class NumericalError : public CurvtestError {
 public:
  explicit NumericalError(const std::string& msg) : CurvtestError(msg) {}
};

// Invalid option combinations or values supplied by the caller.
class UsageError : public CurvtestError {
 public:
  explicit UsageError(const std::string& msg) : CurvtestError(msg) {}
};

}  // namespace curvtest
