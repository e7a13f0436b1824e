// SPDX-License-Identifier: Apache-2.0
#include "cdde/report.hpp"

#include <cmath>

namespace cdde {

json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

json CertReport::to_json() const {
  json j;
  j["name"] = name;
  j["passed"] = passed;
  j["min_value"] = num(min_value);
  j["argmin"] = argmin;
  j["tolerance"] = num(tolerance);
  j["seed"] = seed;
  j["config_echo"] = config_echo;
  if (exploratory) j["exploratory"] = true;
  if (!details.empty()) j["details"] = details;
  if (!warnings.empty()) j["warnings"] = warnings;
  return j;
}

}  // namespace cdde
