#pragma once

#include <stdexcept>
#include <string>

namespace sdfp {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
public:
  using Error::Error;
};

/// Upper-left block of a Schur complement is not positive definite.
class SingularBlock : public Error {
public:
  using Error::Error;
};

/// Congruence transform matrix is numerically singular.
class SingularTransform : public Error {
public:
  using Error::Error;
};

/// Input to a PSD-only operation has an eigenvalue below tolerance.
class NotPsd : public Error {
public:
  using Error::Error;
};

/// Anchor c is (numerically) zero where a nonzero anchor is required.
class ZeroAnchor : public Error {
public:
  using Error::Error;
};

/// sup lambda_min over the affine set is not finite; the subspace still
/// contains a nonzero PSD direction.
class NotBounded : public Error {
public:
  using Error::Error;
};

class PreconditionViolated : public Error {
public:
  using Error::Error;
};

/// Last subproblem of a hyper feasible partition is infeasible, so no
/// approach sequence exists.
class LastInfeasible : public Error {
public:
  using Error::Error;
};

/// Doubling search exceeded alpha_cap without meeting the distance target.
class EpsNotReached : public Error {
public:
  using Error::Error;
};

/// Requested (status, n, dim_L) combination admits no instance.
class UnsatisfiableRequest : public Error {
public:
  using Error::Error;
};

class MalformedCertificate : public Error {
public:
  using Error::Error;
};

class IncompleteChain : public Error {
public:
  using Error::Error;
};

/// A decision value landed inside the +/- tol_amb band and no witness
/// validates; the instance sits on the classification boundary for the
/// configured tolerances.
class NumericallyAmbiguous : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  ParseError(const std::string& msg, int line, int col)
      : Error(msg + " at line " + std::to_string(line) + ", column " + std::to_string(col)),
        line(line), col(col) {}
  int line = 0;
  int col = 0;
};

} // namespace sdfp
