#ifndef UMBRA_ERROR_H_
#define UMBRA_ERROR_H_

#include <stdexcept>
#include <string>

namespace umbra {

enum class ErrorCode {
  kInvalidInput,
  kInvalidParameter,
  kInsufficientStrokes,
  kConflictingStrokes,
  kDegenerateFusion,
  kNoShadow,
  kDegenerateSample,
  kNoValidSamples,
  kNoScales,
  kInvalidPair,
  kShadowFreeCase,
  kEmptyDataset,
  kMalformedCase,
  kIo,
};

const char* ErrorCodeName(ErrorCode code);

// All library failures are reported through this exception type. The code
// lets front ends map failures onto exit statuses and HTTP responses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

  // I/O failures are environmental; everything else is a validation or
  // domain error.
  bool IsIo() const { return code_ == ErrorCode::kIo; }

 private:
  ErrorCode code_;
};

}  // namespace umbra

#endif  // UMBRA_ERROR_H_
