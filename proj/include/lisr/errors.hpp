#pragma once

#include <stdexcept>
#include <string>

namespace lisr {

/* Factorization or solve hit a matrix that is not (numerically) positive
   definite.  Thrown by spd_solve and by solver steps when the aggregate
   estimator loses definiteness, which signals an invalid configuration. */
struct NotPositiveDefinite : std::runtime_error {
  explicit NotPositiveDefinite(const std::string& what) : std::runtime_error(what) {}
};

/* The middle matrix of a low-rank inverse update is numerically singular,
   so the incremental inverse cannot be formed for this correction. */
struct SingularCorrection : std::runtime_error {
  explicit SingularCorrection(const std::string& what) : std::runtime_error(what) {}
};

/* A direction vector supplied to an update is identically zero. */
struct ZeroDirection : std::runtime_error {
  explicit ZeroDirection(const std::string& what) : std::runtime_error(what) {}
};

/* A direction block supplied to a rank-k update is not full column rank. */
struct RankDeficientDirections : std::runtime_error {
  explicit RankDeficientDirections(const std::string& what) : std::runtime_error(what) {}
};

/* Problem sizes that the generators cannot honor (e.g. odd dimension for
   the half/half conditioned quadratic family). */
struct InvalidDimension : std::runtime_error {
  explicit InvalidDimension(const std::string& what) : std::runtime_error(what) {}
};

/* An oracle does not expose a constant (typically the Hessian Lipschitz
   bound) that the requested configuration needs. */
struct MissingConstants : std::runtime_error {
  explicit MissingConstants(const std::string& what) : std::runtime_error(what) {}
};

/* Malformed input data; line is 1-based within the parsed stream. */
struct ParseError : std::runtime_error {
  ParseError(int line_number, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_number) + ": " + what),
        line(line_number) {}
  int line;
};

/* Reference solver exceeded its iteration cap. */
struct NonConvergence : std::runtime_error {
  explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lisr
