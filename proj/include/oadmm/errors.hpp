#pragma once

#include <stdexcept>
#include <string>

namespace oadmm {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Linear algebra / manifold errors.
class RankDeficientError : public Error { public: using Error::Error; };
class ShapeMismatchError : public Error { public: using Error::Error; };
class DimensionMismatchError : public Error { public: using Error::Error; };

// Smoothing / proximal errors.
class SmoothingTooCoarseError : public Error { public: using Error::Error; };
class BetaTooSmallError : public Error { public: using Error::Error; };
class KOutOfRangeError : public Error { public: using Error::Error; };

// Data errors.
class FileNotFoundError : public Error { public: using Error::Error; };
class ParseError : public Error { public: using Error::Error; };
class DegenerateColumnError : public Error { public: using Error::Error; };
class EmptyDataError : public Error { public: using Error::Error; };

// Solver / diagnostics errors.
class ConfigInvalidError : public Error { public: using Error::Error; };
class LineSearchStalledError : public Error { public: using Error::Error; };
class InsufficientHistoryError : public Error { public: using Error::Error; };
class EmptyTraceError : public Error { public: using Error::Error; };
class MissingCanonicalElementError : public Error { public: using Error::Error; };

/// A runtime invariant failed (feasibility drift, dual bound violation, ...).
class NumericalError : public Error { public: using Error::Error; };

}  // namespace oadmm
