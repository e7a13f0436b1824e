// SPDX-License-Identifier: Apache-2.0
#include "cdde/errors.hpp"

namespace cdde {

void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::Unsupported:
      return 2;
    case ErrorKind::NumericFailure:
      return 3;
    case ErrorKind::Capacity:
      return 4;
  }
  return 1;
}

const char* kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::NumericFailure: return "numeric-failure";
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::Unsupported: return "unsupported";
  }
  return "unknown";
}

}  // namespace cdde
