#pragma once

#include <stdexcept>
#include <string>

namespace opspectra {

/// Base class of every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// operator_model
struct UndefinedSequenceIndex : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };

// spectral kernels
struct NotHermitian : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct NotPSD : Error { using Error::Error; };

// classification
struct InteriorEmpty : Error { using Error::Error; };
struct Inconsistent : Error { using Error::Error; };

// decomposition
struct NotPositive : Error { using Error::Error; };
struct NoEssentialPoint : Error { using Error::Error; };
struct RankAmbiguity : Error { using Error::Error; };
struct NotQuasinormal : Error { using Error::Error; };
struct EssentialAmbiguity : Error { using Error::Error; };
struct NotHyponormal : Error { using Error::Error; };
struct BlockLeak : Error { using Error::Error; };
struct NotInvertible : Error { using Error::Error; };
struct AlphaZero : Error { using Error::Error; };

// normality checks
struct SpectrumUndeclared : Error { using Error::Error; };

// cli / io
struct ParseError : Error { using Error::Error; };
struct RecipeInfeasible : Error { using Error::Error; };

} // namespace opspectra
