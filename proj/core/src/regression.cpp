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

#include "pnorm/regression.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pnorm/errors.hpp"
#include "pnorm/keyvalue.hpp"

namespace pnorm {

std::vector<double> regression_reduce(const DenseMatrix& X, std::span<const double> z, double tol) {
  if (X.rows <= 0 || X.cols <= 0 || static_cast<std::int64_t>(X.data.size()) != X.rows * X.cols) {
    throw DomainError("malformed design matrix");
  }
  if (static_cast<std::int64_t>(z.size()) != X.rows) throw DomainError("response length differs from rows of X");
  if (X.cols > X.rows) throw LinearAlgebraError("more regressors than observations");

  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> x(X.data.data(), X.rows, X.cols);
  const Eigen::Map<const Eigen::VectorXd> zz(z.data(), static_cast<Eigen::Index>(z.size()));

  const Eigen::MatrixXd gram = x.transpose() * x;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success) throw LinearAlgebraError("eigendecomposition of X'X failed");
  const Eigen::VectorXd& lambda = eig.eigenvalues();  // ascending
  const double top = lambda(lambda.size() - 1);
  if (!(top > 0.0) || lambda(0) < tol * top) {
    throw LinearAlgebraError("design matrix is rank deficient");
  }
  // M^{-1} X'z with M^{-1} = V diag(lambda^{-1/2}) V'.
  const Eigen::MatrixXd& V = eig.eigenvectors();
  const Eigen::VectorXd xtz = x.transpose() * zz;
  const Eigen::VectorXd w = (V.transpose() * xtz).cwiseQuotient(lambda.cwiseSqrt());
  const Eigen::VectorXd out = V * w;
  return {out.data(), out.data() + out.size()};
}

RegressionData read_regression_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  RegressionData data;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) row.push_back(parse_double(tok));
    if (row.empty()) continue;
    if (row.size() < 2) throw ConfigError("line " + std::to_string(lineno) + ": need z and at least one regressor");
    const auto cols = static_cast<std::int64_t>(row.size() - 1);
    if (data.X.cols == 0) data.X.cols = cols;
    if (cols != data.X.cols) throw ConfigError("line " + std::to_string(lineno) + ": inconsistent column count");
    data.z.push_back(row[0]);
    data.X.data.insert(data.X.data.end(), row.begin() + 1, row.end());
    ++data.X.rows;
  }
  if (data.X.rows == 0) throw ConfigError("'" + path + "' contains no data rows");
  return data;
}

}  // namespace pnorm
