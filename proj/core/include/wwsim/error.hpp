#pragma once

#include <stdexcept>
#include <string>

namespace wwsim {

// Base of every domain error raised by the library. Callers that only care
// about "the inputs were physically/structurally invalid" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define WWSIM_DECLARE_ERROR(Name)            \
  class Name : public Error {                \
   public:                                   \
    using Error::Error;                      \
  }

// tensor core
WWSIM_DECLARE_ERROR(NameCollision);
WWSIM_DECLARE_ERROR(UnknownSubsystem);
WWSIM_DECLARE_ERROR(DimensionMismatch);
WWSIM_DECLARE_ERROR(ZeroNorm);
WWSIM_DECLARE_ERROR(InvalidState);

// collapse engine
WWSIM_DECLARE_ERROR(InvalidSpec);
WWSIM_DECLARE_ERROR(DegenerateOutcome);

// wavepackets
WWSIM_DECLARE_ERROR(GridTooNarrow);
WWSIM_DECLARE_ERROR(ShiftTooLarge);
WWSIM_DECLARE_ERROR(GridMismatch);

#undef WWSIM_DECLARE_ERROR

}  // namespace wwsim
