// Copyright 2026 The sgl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "sgl/rng.hpp"

namespace sgl {

/** y = A x on contiguous buffers of length dim. */
using MatVec = std::function<void(const double*, double*)>;

/** In-place projection onto the solver subspace (e.g. removing invariant vectors). */
using Deflation = std::function<void(double*)>;

struct EigenOptions {
  double tol = 1e-8;
  std::size_t max_matvecs = 100000;
  /** Krylov dimension per restart cycle; 0 picks one from the memory budget. */
  std::size_t krylov = 0;
};

struct EigenResult {
  double value = 0.0;
  std::vector<double> vector;
  double residual = 0.0;
  std::size_t matvecs = 0;
  bool converged = false;
};

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

inline void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace detail

/**
 * @brief Extreme eigenvalue of a self-adjoint operator restricted to the
 * range of `deflate`.
 *
 * Explicitly restarted Lanczos with full reorthogonalization. The deflation is
 * applied to the start vector and after every matvec, so Ritz values belong
 * to the restricted operator. Converged when the Ritz residual is below
 * tol * max(1, |value|).
 */
inline EigenResult lanczos_extreme(std::size_t dim, const MatVec& op, bool largest, const Deflation& deflate,
                                   SeededRng& rng, const EigenOptions& opts = {},
                                   const std::vector<double>* start = nullptr) {
  EigenResult res;
  std::size_t m = opts.krylov;
  if (m == 0) {
    std::size_t budget = std::size_t{1} << 26;  // doubles kept in the basis
    m = std::clamp<std::size_t>(budget / std::max<std::size_t>(dim, 1), 12, 80);
  }
  m = std::min(m, dim);

  std::vector<double> x(dim);
  if (start) {
    x = *start;
  } else {
    for (auto& v : x) v = rng.normal();
  }
  if (deflate) deflate(x.data());
  double nx = detail::norm(x);
  if (nx < 1e-300) {
    res.converged = true;
    res.vector.assign(dim, 0.0);
    return res;
  }
  for (auto& v : x) v /= nx;

  std::vector<std::vector<double>> V;
  std::vector<double> w(dim);
  while (res.matvecs < opts.max_matvecs) {
    V.clear();
    V.push_back(x);
    std::vector<double> alpha, beta;
    bool invariant = false;
    for (std::size_t j = 0; j < m; ++j) {
      op(V[j].data(), w.data());
      if (deflate) deflate(w.data());
      ++res.matvecs;
      double a = detail::dot(w, V[j]);
      alpha.push_back(a);
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& q : V) detail::axpy(-detail::dot(w, q), q, w);
      }
      if (deflate) deflate(w.data());
      double b = detail::norm(w);
      if (j + 1 == m || res.matvecs >= opts.max_matvecs) {
        beta.push_back(b);
        break;
      }
      if (b < 1e-13 * std::max(1.0, std::abs(a))) {
        beta.push_back(0.0);
        invariant = true;
        break;
      }
      beta.push_back(b);
      for (auto& v : w) v /= b;
      V.push_back(w);
    }
    const std::size_t k = alpha.size();
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    Eigen::Index pick = largest ? static_cast<Eigen::Index>(k) - 1 : 0;
    double theta = es.eigenvalues()(pick);
    Eigen::VectorXd y = es.eigenvectors().col(pick);
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t i = 0; i < k; ++i) detail::axpy(y(static_cast<Eigen::Index>(i)), V[i], x);
    if (deflate) deflate(x.data());
    double nrm = detail::norm(x);
    for (auto& v : x) v /= nrm;
    double resid = std::abs(beta.back() * y(static_cast<Eigen::Index>(k) - 1));
    if (invariant) resid = 0.0;
    res.value = theta;
    res.residual = resid;
    if (resid <= opts.tol * std::max(1.0, std::abs(theta))) {
      res.converged = true;
      break;
    }
  }
  // Recompute the residual of the returned vector directly.
  op(x.data(), w.data());
  if (deflate) deflate(w.data());
  ++res.matvecs;
  double rq = detail::dot(w, x);
  detail::axpy(-rq, x, w);
  res.value = rq;
  res.residual = detail::norm(w);
  if (res.residual <= opts.tol * std::max(1.0, std::abs(rq))) res.converged = true;
  res.vector = std::move(x);
  return res;
}

/** Dense matrix of a matvec, column by column; for small oracles and reports. */
inline Eigen::MatrixXd to_dense(std::size_t dim, const MatVec& op) {
  Eigen::MatrixXd M(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  std::vector<double> e(dim, 0.0), col(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    e[j] = 1.0;
    op(e.data(), col.data());
    e[j] = 0.0;
    for (std::size_t i = 0; i < dim; ++i) M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
  }
  return M;
}

}  // namespace sgl
