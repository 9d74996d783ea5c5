#pragma once

#include <stdexcept>
#include <string>

namespace nhbe {

/// Base of every error thrown by the library.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Invalid distribution or ensemble parameter (e.g. beta <= 0).
class ParameterError : public Error
{
  public:
    using Error::Error;
};

/// Vector or band lengths that do not agree with the matrix dimension.
class DimensionError : public Error
{
  public:
    using Error::Error;
};

/// Zero off-diagonal entry where a similarity reduction needs it nonzero.
class DegenerateInputError : public Error
{
  public:
    using Error::Error;
};

/// Input lies outside the domain of the spectral-coordinate bijection
/// (repeated eigenvalue, zero r_j, coordinates not summing to one).
class DomainError : public Error
{
  public:
    using Error::Error;
};

/// Quantity too close to underflow/overflow to be trusted.
class ConditioningError : public Error
{
  public:
    using Error::Error;
};

/// A pivot b_j vanished while running the reconstruction recurrence.
class BreakdownError : public Error
{
  public:
    using Error::Error;
};

/// Two routes that must agree did not.
class InconsistencyError : public Error
{
  public:
    using Error::Error;
};

class UnsupportedSizeError : public Error
{
  public:
    using Error::Error;
};

/// Malformed, truncated or version-mismatched file.
class FormatError : public Error
{
  public:
    using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error
{
  public:
    using Error::Error;
};

/// Monte Carlo run produced too few usable samples.
class CoverageError : public Error
{
  public:
    using Error::Error;
};

}  // namespace nhbe
