#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kernelforge {

// Input-side failures: malformed files, bad flags, unusable configs.
// The CLI maps these to exit code 3.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical / model-side failures. The CLI maps these to exit code 2.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

class NotPositiveDefinite : public SolverError {
 public:
  explicit NotPositiveDefinite(std::size_t row)
      : SolverError("matrix is not positive definite: pivot " +
                    std::to_string(row) + " is not positive"),
        row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

class SingularLeadingBlock : public SolverError {
 public:
  explicit SingularLeadingBlock(std::size_t row)
      : SolverError("leading block is singular at pivot " + std::to_string(row)) {}
};

class NoConvergence : public SolverError {
 public:
  explicit NoConvergence(const std::string& what) : SolverError(what) {}
};

class DimensionMismatch : public SolverError {
 public:
  explicit DimensionMismatch(const std::string& what) : SolverError(what) {}
};

class LabelOutOfRange : public SolverError {
 public:
  explicit LabelOutOfRange(const std::string& what) : SolverError(what) {}
};

class SingleClassLabels : public SolverError {
 public:
  SingleClassLabels() : SolverError("training labels contain a single class") {}
};

class NonPsdGram : public SolverError {
 public:
  explicit NonPsdGram(const std::string& what) : SolverError(what) {}
};

class ZeroTrace : public SolverError {
 public:
  ZeroTrace() : SolverError("kernel matrix trace is not positive") {}
};

class EmptyTrainBlock : public SolverError {
 public:
  EmptyTrainBlock() : SolverError("kernel matrix has no training block") {}
};

class NoFreeSupportVector : public SolverError {
 public:
  NoFreeSupportVector() : SolverError("no free support vector for bias recovery") {}
};

class Infeasible : public SolverError {
 public:
  explicit Infeasible(const std::string& what) : SolverError(what) {}
};

class Unbounded : public SolverError {
 public:
  explicit Unbounded(const std::string& what) : SolverError(what) {}
};

class EmptyFamily : public SolverError {
 public:
  EmptyFamily() : SolverError("kernel family has no candidates") {}
};

class TraceBudgetNonpositive : public SolverError {
 public:
  TraceBudgetNonpositive() : SolverError("trace budget must be positive") {}
};

class NonPsdCombination : public SolverError {
 public:
  explicit NonPsdCombination(const std::string& what) : SolverError(what) {}
};

class DegenerateWeights : public SolverError {
 public:
  explicit DegenerateWeights(const std::string& what) : SolverError(what) {}
};

// Parse errors carry the 1-based line number of the offending row.
class ParseError : public InputError {
 public:
  ParseError(const std::string& kind, std::size_t line, const std::string& detail)
      : InputError(kind + " at line " + std::to_string(line) + ": " + detail),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class MalformedRow : public ParseError {
 public:
  MalformedRow(std::size_t line, const std::string& detail)
      : ParseError("malformed row", line, detail) {}
};

class UnlabeledBeforeLabeled : public ParseError {
 public:
  UnlabeledBeforeLabeled(std::size_t line)
      : ParseError("labeled row after unlabeled row", line,
                   "unlabeled rows must form a trailing block") {}
};

class BadLabel : public ParseError {
 public:
  BadLabel(std::size_t line, const std::string& token)
      : ParseError("bad label", line, "expected +1, -1 or ?, got '" + token + "'") {}
};

class InconsistentDimension : public ParseError {
 public:
  InconsistentDimension(std::size_t line, std::size_t expected, std::size_t got)
      : ParseError("inconsistent dimension", line,
                   "expected " + std::to_string(expected) + " features, got " +
                       std::to_string(got)) {}
};

class NonMonotoneIndex : public ParseError {
 public:
  NonMonotoneIndex(std::size_t line, const std::string& detail)
      : ParseError("non-monotone feature index", line, detail) {}
};

class BadConfig : public InputError {
 public:
  explicit BadConfig(const std::string& what) : InputError(what) {}
};

class IoFailure : public InputError {
 public:
  explicit IoFailure(const std::string& what) : InputError(what) {}
};

}  // namespace kernelforge
