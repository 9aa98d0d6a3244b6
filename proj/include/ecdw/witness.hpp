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

#include <limits>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ecdw/phase_space.hpp"
#include "ecdw/symplectic.hpp"

namespace ecdw {

enum class WitnessKind { C, C2 };
enum class EvaluationMode { exact, measured };

inline const char* to_string(WitnessKind k) { return k == WitnessKind::C ? "C" : "C2"; }
inline const char* to_string(EvaluationMode m) { return m == EvaluationMode::exact ? "exact" : "measured"; }

/// Bochner matrix with per-entry error radii (zero in exact mode).
struct WitnessMatrix {
  Matrix entries;
  RealMatrix radii;
  WitnessKind kind = WitnessKind::C;
  EvaluationMode mode = EvaluationMode::exact;

  Index size() const noexcept { return entries.rows(); }
};

struct WitnessResult {
  double lambda_min = 0.0;
  double value = 0.0;
  double delta = 0.0;
  bool certified = false;
  Vector min_eigenvector;
  /// Distance from lambda_min to the next eigenvalue.
  double gap = 0.0;
};

/// delta = max_j sum_{k != j} delta_jk / N.
inline double propagate_error(const RealMatrix& radii) {
  const Index n = radii.rows();
  if (radii.cols() != n) throw std::invalid_argument("radii must be square");
  if (n == 0) return 0.0;
  if (radii.minCoeff() < 0.0) throw std::invalid_argument("negative error radius");
  double worst = 0.0;
  for (Index j = 0; j < n; ++j) {
    double row = 0.0;
    for (Index k = 0; k < n; ++k)
      if (k != j) row += radii(j, k);
    worst = std::max(worst, row / double(n));
  }
  return worst;
}

/// Smallest index among the largest-magnitude components is made real positive.
inline void normalize_eigenvector_phase(Vector& v) {
  const double top = v.cwiseAbs().maxCoeff();
  for (Index k = 0; k < v.size(); ++k)
    if (std::abs(v(k)) >= top * (1.0 - 1e-12)) {
      v *= std::conj(v(k)) / std::abs(v(k));
      v(k) = std::abs(v(k));
      return;
    }
}

inline WitnessResult evaluate(const WitnessMatrix& m) {
  const Index n = m.size();
  if (n == 0 || m.entries.cols() != n) throw std::invalid_argument("witness matrix must be square and nonempty");
  if (hermitian_residual(m.entries) > 1e-10) throw std::invalid_argument("witness matrix is not Hermitian");
  const HermitianEigen eig = hermitian_eigen(m.entries);
  WitnessResult r;
  r.lambda_min = eig.values(0);
  // Eigenvalues closer to zero than the solver's rounding carry no sign.
  const double floor = 16.0 * double(n) * std::numeric_limits<double>::epsilon() * m.entries.norm();
  r.value = -r.lambda_min > floor ? -r.lambda_min : 0.0;
  r.gap = n > 1 ? eig.values(1) - eig.values(0) : 0.0;
  r.min_eigenvector = eig.vectors.col(0);
  normalize_eigenvector_phase(r.min_eigenvector);
  r.delta = m.radii.size() ? propagate_error(m.radii) : 0.0;
  r.certified = r.value > r.delta;
  return r;
}

namespace detail {

inline WitnessMatrix build_from_differences(const CharacteristicFunction& cf, const PointList& joint, WitnessKind kind,
                                            unsigned threads) {
  const Index n = static_cast<Index>(joint.size());
  if (n < 2) throw std::invalid_argument("a witness needs at least two points");
  for (const ModeVector& x : joint)
    if (x.size() != cf.num_modes()) throw std::invalid_argument("point dimension does not match the state");
  std::vector<std::pair<Index, Index>> pairs;
  for (Index j = 0; j < n; ++j)
    for (Index k = j + 1; k < n; ++k) pairs.emplace_back(j, k);
  std::vector<cplx> values(pairs.size());
  parallel_for(pairs.size(), threads, [&](std::size_t p) {
    const auto [j, k] = pairs[p];
    values[p] = cf(joint[static_cast<std::size_t>(j)] - joint[static_cast<std::size_t>(k)]);
  });
  WitnessMatrix m{Matrix(n, n), RealMatrix::Zero(n, n), kind, EvaluationMode::exact};
  const double inv = 1.0 / double(n);
  for (Index j = 0; j < n; ++j) m.entries(j, j) = inv;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [j, k] = pairs[p];
    m.entries(j, k) = values[p] * inv;
    m.entries(k, j) = std::conj(values[p]) * inv;
  }
  return m;
}

inline PointList joint_points(const PhaseSpacePointSet& xi) {
  PointList joint;
  joint.reserve(xi.size());
  for (std::size_t k = 0; k < xi.size(); ++k) joint.push_back(xi.joint(k));
  return joint;
}

}  // namespace detail

/// [C]_{jk} = tr[rho D(xi_j - xi_k)] / N.
inline WitnessMatrix build_C(const CharacteristicFunction& cf, const PointList& xi, unsigned threads = 1) {
  return detail::build_from_differences(cf, xi, WitnessKind::C, threads);
}

/// [C2]_{jk} = tr[rho D_A(xi^A_j - xi^A_k) D_B(xi^B_j - xi^B_k)] / N; A modes
/// precede B modes in the state.
inline WitnessMatrix build_C2(const CharacteristicFunction& cf, const PhaseSpacePointSet& xi, unsigned threads = 1) {
  if (cf.num_modes() != 2 * xi.modes_per_party()) throw std::invalid_argument("state modes must equal A plus B modes");
  return detail::build_from_differences(cf, detail::joint_points(xi), WitnessKind::C2, threads);
}

template <typename State>
WitnessMatrix build_C(const State& rho, const PointList& xi, unsigned threads = 1) {
  return build_C(CharacteristicFunction(rho), xi, threads);
}

template <typename State>
WitnessMatrix build_C2(const State& rho, const PhaseSpacePointSet& xi, unsigned threads = 1) {
  return build_C2(CharacteristicFunction(rho), xi, threads);
}

/// Measured upper-triangle estimates of tr[rho D(...)] keyed by (j, k), j < k.
struct MeasuredEntries {
  Index n = 0;
  std::map<std::pair<Index, Index>, cplx> estimates;
  std::map<std::pair<Index, Index>, double> radii;
};

/// Fills the diagonal with 1/N, divides estimates by N and conjugate-fills the
/// lower triangle; measured values are never symmetrized.
inline WitnessMatrix assemble_measured(const MeasuredEntries& in, WitnessKind kind) {
  const Index n = in.n;
  if (n < 2) throw std::invalid_argument("a witness needs at least two points");
  WitnessMatrix m{Matrix::Zero(n, n), RealMatrix::Zero(n, n), kind, EvaluationMode::measured};
  const double inv = 1.0 / double(n);
  for (Index j = 0; j < n; ++j) m.entries(j, j) = inv;
  for (Index j = 0; j < n; ++j)
    for (Index k = j + 1; k < n; ++k) {
      const auto e = in.estimates.find({j, k});
      const auto r = in.radii.find({j, k});
      if (e == in.estimates.end() || r == in.radii.end())
        throw std::invalid_argument("missing measured entry (" + std::to_string(j) + "," + std::to_string(k) + ")");
      if (r->second < 0.0) throw std::invalid_argument("negative error radius");
      m.entries(j, k) = e->second * inv;
      m.entries(k, j) = std::conj(e->second) * inv;
      m.radii(j, k) = m.radii(k, j) = r->second;
    }
  if (in.estimates.size() != static_cast<std::size_t>(n * (n - 1) / 2))
    throw std::invalid_argument("entry count is inconsistent with N");
  return m;
}

/// Exact certification: steps (1)-(4) with zero radii.
template <typename State>
WitnessResult certify(const State& rho, const PhaseSpacePointSet& xi, unsigned threads = 1) {
  return evaluate(build_C2(rho, xi, threads));
}

inline WitnessResult certify(const MeasuredEntries& measured, WitnessKind kind = WitnessKind::C2) {
  return evaluate(assemble_measured(measured, kind));
}

/// Largest displacement magnitude |xi_j - xi_k| over all pairs and parties.
inline double max_displacement(const PhaseSpacePointSet& xi) {
  double worst = 0.0;
  for (std::size_t j = 0; j < xi.size(); ++j)
    for (std::size_t k = j + 1; k < xi.size(); ++k) {
      worst = std::max(worst, (xi.a(j) - xi.a(k)).cwiseAbs().maxCoeff());
      worst = std::max(worst, (xi.b(j) - xi.b(k)).cwiseAbs().maxCoeff());
    }
  return worst;
}

}  // namespace ecdw
