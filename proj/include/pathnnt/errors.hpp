#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pathnnt {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// An estimation routine needed observations in both exposure groups.
class EmptyGroup : public Error {
public:
  explicit EmptyGroup(const std::string& what) : Error(what) {}
};

/// Umbrella for regression-fitting failures raised out of the solver.
class GlmFailure : public Error {
public:
  explicit GlmFailure(const std::string& what) : Error(what) {}
};

class RankDeficientDesign : public GlmFailure {
public:
  explicit RankDeficientDesign(const std::string& what) : GlmFailure(what) {}
};

/// Carries the state of the last iterate so callers can diagnose separation
/// or a too-tight tolerance.
class DidNotConverge : public GlmFailure {
public:
  DidNotConverge(const std::string& what, std::size_t iterations, double score_norm)
      : GlmFailure(what), iterations(iterations), score_norm(score_norm) {}

  std::size_t iterations;
  double score_norm;
};

/// The bread matrix of the sandwich covariance was numerically singular.
class SingularBread : public Error {
public:
  explicit SingularBread(const std::string& what) : Error(what) {}
};

/// Malformed input data; reports the 1-based file line and the column name.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t line, std::string column)
      : Error(what), line(line), column(std::move(column)) {}

  std::size_t line;
  std::string column;
};

}  // namespace pathnnt
