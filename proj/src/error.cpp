#include "aqs/error.hpp"

namespace aqs {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kInvalidConfig: return "invalid-config";
    case ErrorCode::kNoDecoys: return "no-decoys";
    case ErrorCode::kMalformedCiphertext: return "malformed-ciphertext";
    case ErrorCode::kEavesdropDetected: return "eavesdrop-detected";
    case ErrorCode::kInvalidInput: return "invalid-input";
    case ErrorCode::kCannotForge: return "cannot-forge";
  }
  return "unknown";
}

}  // namespace aqs
