// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace cdde {

enum class ErrorKind { InvalidArgument, NumericFailure, Capacity, Unsupported };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& msg);

inline void require(bool cond, const std::string& msg) {
  if (!cond) fail(ErrorKind::InvalidArgument, msg);
}

// Process exit status for an error kind.
int exit_code(ErrorKind kind) noexcept;

const char* kind_name(ErrorKind kind) noexcept;

}  // namespace cdde
