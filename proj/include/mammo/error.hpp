#pragma once

#include <stdexcept>
#include <string>

namespace mammo {

// Base of every error the library throws. Data errors (bad files, degenerate
// inputs) derive from this so callers can map them to one exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MAMMO_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

// image_core
MAMMO_DEFINE_ERROR(MalformedHeader);
MAMMO_DEFINE_ERROR(TruncatedData);
MAMMO_DEFINE_ERROR(UnsupportedMaxval);
MAMMO_DEFINE_ERROR(InvalidImage);

// enhance
MAMMO_DEFINE_ERROR(NonPositiveSigma);
MAMMO_DEFINE_ERROR(DimensionMismatch);
MAMMO_DEFINE_ERROR(InvalidConfig);

// segment
MAMMO_DEFINE_ERROR(DegenerateHistogram);

// svm
MAMMO_DEFINE_ERROR(SingleClass);
MAMMO_DEFINE_ERROR(EmptyDataset);
MAMMO_DEFINE_ERROR(TooLarge);
MAMMO_DEFINE_ERROR(UnsupportedVersion);
MAMMO_DEFINE_ERROR(SchemaViolation);
MAMMO_DEFINE_ERROR(InvalidKernel);

// pipeline
MAMMO_DEFINE_ERROR(BadTokenCount);
MAMMO_DEFINE_ERROR(UnknownCode);
MAMMO_DEFINE_ERROR(NonNumericCoordinate);
MAMMO_DEFINE_ERROR(MissingCoordinates);

#undef MAMMO_DEFINE_ERROR

}  // namespace mammo
