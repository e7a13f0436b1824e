// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cdde/dde_core.hpp"
#include "cdde/report.hpp"

namespace cdde::app {

inline constexpr const char* kVersion = "0.1.0";

// constant | sinusoid (mean + amplitude sin(2 pi frequency t)) | samples file
struct CoefSpec {
  enum class Kind { Constant, Sinusoid, Samples } kind = Kind::Constant;
  double value = 0.0;
  double mean = 0.0, amplitude = 0.0, frequency = 1.0;
  std::string path;
};

struct ExperimentConfig {
  std::string command;
  CoefSpec alpha;
  CoefSpec beta;
  double gamma = 1.0;
  int n_sub = 32;
  int m = 2;
  int k = 3;
  int k_max = 4;
  double eta = 1.0;
  double tau = 0.0;
  double horizon = 5.0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int trials = 100;
  int homotopy_steps = 0;
  std::string probe = "const";
  double window_t0 = 0.0, window_t1 = 3.0;
  std::string matrix;
  int compound = 0;
  std::string initial = "const:1";
  double det_rel_tol = 1e-8;
  std::string out = "out";
  unsigned threads = 1;
  json source = json::object();  // validated JSON form, echoed into reports
};

// Validates a JSON config; errors name the offending field.
ExperimentConfig parse_config(const json& j);
ExperimentConfig load_config(const std::string& path);

PeriodicCoefficient build_coefficient(const CoefSpec& c, const Grid& grid, double gamma);

struct RunRecord {
  json config;
  std::string version = kVersion;
  std::string started, finished;
  std::vector<std::string> files;
  bool passed = true;
  json to_json() const;
};

// Executes the configured command, writing outputs under cfg.out.
RunRecord run(const ExperimentConfig& cfg);

// Full command-line entry point; returns the process exit code.
int cli_main(int argc, char** argv);

}  // namespace cdde::app
