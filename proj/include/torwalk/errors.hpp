#pragma once

#include <stdexcept>
#include <string>

namespace torwalk {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Eigenvalue too close to the unit circle to decide hyperbolicity either way.
struct AmbiguousSpectrum : Error { using Error::Error; };

// The map has an eigenvalue of modulus one; stable/unstable splitting undefined.
struct NotHyperbolic : Error { using Error::Error; };

// A state-space or work limit would be exceeded.
struct BudgetExceeded : Error { using Error::Error; };

// Invalid argument value for a numeric routine.
struct DomainError : Error { using Error::Error; };

// Operation requires a full-rank increment subgroup.
struct RankDeficient : Error { using Error::Error; };

// Character-sum sup could not be certified strictly below one.
struct NotContractive : Error { using Error::Error; };

// Two torus points are farther apart than the allowed radius.
struct TooFar : Error { using Error::Error; };

// Consecutive points deviate by more than the declared pseudo-orbit slack.
struct NotPseudoOrbit : Error { using Error::Error; };

// Symbolic word has no decodable point.
struct EmptyIntersection : Error { using Error::Error; };

// Partition cells too large for the requested operation.
struct DiameterTooLarge : Error { using Error::Error; };

// Requested construction is only implemented for d = 2.
struct DimensionUnsupported : Error { using Error::Error; };

// Malformed input file or option value.
struct ParseError : Error { using Error::Error; };

} // namespace torwalk
