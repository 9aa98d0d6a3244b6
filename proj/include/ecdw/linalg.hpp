// Copyright 2026 The ecdw Authors
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

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <complex>
#include <cstddef>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace ecdw {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

/// Raised when a truncated Fock representation can no longer be trusted.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Largest entrywise modulus of m - m^dagger.
inline double hermitian_residual(const Matrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

struct HermitianEigen {
  RealVector values;  // ascending
  Matrix vectors;
};

/// Eigen-decomposition of a Hermitian matrix. When the complex QR iteration
/// does not converge, falls back to the real symmetric form [[Re, -Im], [Im, Re]],
/// whose spectrum is that of m with every eigenvalue doubled.
inline HermitianEigen hermitian_eigen(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  if (eig.info() == Eigen::Success) return {eig.eigenvalues(), eig.eigenvectors()};
  const Index n = m.rows();
  RealMatrix big(2 * n, 2 * n);
  big << m.real(), -m.imag(), m.imag(), m.real();
  Eigen::SelfAdjointEigenSolver<RealMatrix> real_eig(big);
  if (real_eig.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  HermitianEigen out{RealVector(n), Matrix(n, n)};
  // Pairs (u; v) and (-v; u) share an eigenvalue and both map to u + i v up to
  // a phase, so every other column is enough.
  for (Index k = 0; k < n; ++k) {
    const auto col = real_eig.eigenvectors().col(2 * k);
    out.values(k) = real_eig.eigenvalues()(2 * k);
    out.vectors.col(k) = (col.head(n).cast<cplx>() + kI * col.tail(n).cast<cplx>()).normalized();
  }
  return out;
}

/// Pairwise (cascade) summation; deterministic for a fixed input order.
template <typename T>
T pairwise_sum(std::span<const T> xs) {
  if (xs.empty()) return T{};
  if (xs.size() <= 8) {
    T acc{};
    for (const T& x : xs) acc += x;
    return acc;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Results must be
/// written to per-index slots by the caller so the output is schedule
/// independent. The first exception thrown by any task is rethrown.
inline void parallel_for(std::size_t n, unsigned threads,
                         const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  const unsigned count = std::min<unsigned>(threads, static_cast<unsigned>(n));
  pool.reserve(count);
  for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace ecdw
