// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace cdde {

using json = nlohmann::json;

// Pass/fail record with the witness of the worst case.
struct CertReport {
  std::string name;
  bool passed = false;
  double min_value = 0.0;
  std::vector<int> argmin;
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  bool exploratory = false;
  json config_echo = json::object();
  json details = json::object();
  std::vector<std::string> warnings;

  json to_json() const;
};

// Finite doubles pass through; NaN and infinities become strings so the
// output stays valid JSON.
json num(double x);

}  // namespace cdde
