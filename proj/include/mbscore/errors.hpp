#pragma once

#include <stdexcept>

namespace mbscore {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// forecast construction / validation
struct NegativeProbability : Error { using Error::Error; };
struct NotNormalized : Error { using Error::Error; };
struct EmptySupport : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };

// scoring
struct IndexOutOfRange : Error { using Error::Error; };
struct RegularityViolated : Error { using Error::Error; };
struct SupportMismatch : Error { using Error::Error; };

// file ingestion
struct MalformedRow : Error { using Error::Error; };
struct UnknownTarget : Error { using Error::Error; };
struct BinGridMismatch : Error { using Error::Error; };

// season evaluation
struct MissingForecast : Error { using Error::Error; };
struct MissingTruth : Error { using Error::Error; };
struct DuplicateForecast : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };

} // namespace mbscore
