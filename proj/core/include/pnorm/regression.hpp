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

// Reduction of the Gaussian regression z = X beta + u, u ~ N(0, I_n), to the
// sequence model: with M = (X'X)^{1/2}, M beta_hat = M^{-1} X'z is
// distributed as N(M beta, I_d).

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pnorm {

struct DenseMatrix {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::vector<double> data;  // row-major

  double operator()(std::int64_t i, std::int64_t j) const { return data[static_cast<std::size_t>(i * cols + j)]; }
};

// Throws LinearAlgebraError if some eigenvalue of X'X is below
// tol * (largest eigenvalue), i.e. X has (numerically) deficient column
// rank, and DomainError on shape mismatches.
std::vector<double> regression_reduce(const DenseMatrix& X, std::span<const double> z, double tol = 1e-10);

struct RegressionData {
  DenseMatrix X;
  std::vector<double> z;
};

// Whitespace-delimited rows "z x_1 ... x_d"; '#' starts a comment.
RegressionData read_regression_file(const std::string& path);

}  // namespace pnorm
