#ifndef WMARK_ERRORS_HPP
#define WMARK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace wmark {

// Base for every error thrown by the library. CLI maps these to exit code 1
// (InvalidSpec to 2, usage errors to 2).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FileNotFound : Error {
  using Error::Error;
};
struct UnsupportedFormat : Error {
  using Error::Error;
};
struct NotGrayscale : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};
struct NonFiniteValue : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct DimensionNotMultipleOf8 : Error {
  using Error::Error;
};
struct InvalidMask : Error {
  using Error::Error;
};
struct LengthTooSmall : Error {
  using Error::Error;
};
struct DegenerateInput : Error {
  using Error::Error;
};
struct DegenerateReference : Error {
  using Error::Error;
};
struct PayloadTooLarge : Error {
  using Error::Error;
};
struct Unsatisfiable : Error {
  using Error::Error;
};
struct InvalidSpec : Error {
  using Error::Error;
};
struct CodecFailure : Error {
  using Error::Error;
};

}  // namespace wmark

#endif  // WMARK_ERRORS_HPP
