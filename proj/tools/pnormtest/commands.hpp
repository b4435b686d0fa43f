// Copyright 2026 The pnorm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pnorm/manifest.hpp"

namespace pnormtest {

struct PlanOptions {
  std::uint64_t seed = 1;
  std::int64_t reps = 0;
  std::int64_t chunk = 250;
  int workers = 0;
};

struct CalibrateOptions {
  std::int64_t d = 0;
  double alpha = 0.05;
  std::string p;
  std::string preset;
  std::string exponents;
  std::string budget;
  bool minimax = false;
  int pd = 0;
  double rd = 0.0;
  bool asymptotic = false;
  bool enhance = false;
  std::string output = "calibration.txt";
  PlanOptions plan{1, 100000, 250, 0};
};

struct PowerOptions {
  bool figure3 = false;
  std::string scale = "desk";
  std::vector<std::string> artifacts;
  std::vector<std::string> families;
  std::string agrid = "auto";
  std::int64_t d = 0;
  std::int64_t calibration_reps = 0;
  bool svg = true;
  PlanOptions plan{1, 2000, 250, 0};
};

struct ConsistencyOptions {
  std::vector<std::string> families;
  std::string exponents = "2";
  std::string dgrid = "geometric:1e3:1e6";
  bool contour = false;
  bool radius = false;
  bool rewrite = false;
  bool sparsity = false;
  std::string p;
  bool sup = false;
  std::string range = "-4:4";
  int resolution = 161;
  std::int64_t d = 0;
  double delta = 1.0;
};

struct PeOptions {
  std::int64_t d = 50000;
  double alpha2 = 0.025;
  double alpha_inf = 0.025;
  std::int64_t calibration_reps = 50000;
  PlanOptions plan{1, 2000, 250, 0};
};

struct EnhanceOptions {
  std::int64_t d = 0;
  std::string base = "p:2";
  double alpha = 0.05;
  std::int64_t calibration_reps = 10000;
  PlanOptions plan{1, 5000, 250, 0};
};

struct ReduceOptions {
  std::string input;
  std::string output = "reduced.txt";
  double tol = 1e-10;
};

// Each command writes its files under `out` and registers them with the
// manifest; the caller writes the manifest afterwards.
void run_calibrate(const CalibrateOptions& o, const std::string& out, pnorm::RunManifest& manifest);
void run_power(const PowerOptions& o, const std::string& out, pnorm::RunManifest& manifest);
void run_consistency(const ConsistencyOptions& o, const std::string& out, pnorm::RunManifest& manifest);
void run_demo_pe(const PeOptions& o, const std::string& out, pnorm::RunManifest& manifest);
void run_demo_enhance(const EnhanceOptions& o, const std::string& out, pnorm::RunManifest& manifest);
void run_reduce(const ReduceOptions& o, const std::string& out, pnorm::RunManifest& manifest);

}  // namespace pnormtest
