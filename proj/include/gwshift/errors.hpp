#pragma once

#include <stdexcept>
#include <string>

namespace gwshift {

/// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// -- special functions ------------------------------------------------------
struct DomainError : Error { using Error::Error; };
struct OverflowError : Error { using Error::Error; };

// -- materials ---------------------------------------------------------------
struct RangeError : Error { using Error::Error; };
struct UnsupportedError : Error { using Error::Error; };

// -- complex-plane numerics --------------------------------------------------
struct NoConvergence : Error { using Error::Error; };
struct DivergedOutOfDomain : Error { using Error::Error; };
struct MultipleSingularities : Error { using Error::Error; };
struct IllConditioned : Error { using Error::Error; };
struct LostTrack : Error { using Error::Error; };

// -- shift prediction ---------------------------------------------------------
struct ZeroValue : Error { using Error::Error; };
struct SimplePoleViolation : Error { using Error::Error; };
struct RealAxisPole : Error { using Error::Error; };

// -- slab ----------------------------------------------------------------------
struct SingularTransfer : Error { using Error::Error; };

// -- configuration / CLI -------------------------------------------------------
struct ConfigError : Error { using Error::Error; };
struct NumericalFailure : Error { using Error::Error; };

}  // namespace gwshift
