#pragma once

#include <stdexcept>
#include <string>

namespace bcsys {

// Base class for every error the library raises deliberately.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// matrix-core
struct SingularMatrixError : Error { using Error::Error; };
struct NotHermitianError : Error { using Error::Error; };

// system-model / file format
struct SchemaError : Error { using Error::Error; };
struct DimensionError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

// boundary-algebra
struct SingularP2Error : Error { using Error::Error; };
struct SingularSError : Error { using Error::Error; };
struct NotApplicableError : Error { using Error::Error; };
struct NotWellPosedError : Error { using Error::Error; };

// transfer-function
struct OnSpectrumError : Error { using Error::Error; };

// simulator
struct RankDeficientConstraintsError : Error { using Error::Error; };
struct StepSolveFailedError : Error { using Error::Error; };
struct NotSquareError : Error { using Error::Error; };
struct DegenerateDataError : Error { using Error::Error; };

}  // namespace bcsys
