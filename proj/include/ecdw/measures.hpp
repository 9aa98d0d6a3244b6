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

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/SVD>

#include "ecdw/fock.hpp"
#include "ecdw/phase_space.hpp"
#include "ecdw/states.hpp"

namespace ecdw {

/// Schmidt coefficients p_k, descending, summing to one.
struct SchmidtSpectrum {
  std::vector<double> p;
};

/// Schmidt spectrum of a pure state across (first `modes_a` modes | rest).
inline SchmidtSpectrum schmidt(const PureState& psi, int modes_a = 1) {
  const FockSpace& s = psi.space();
  if (modes_a < 1 || modes_a >= s.num_modes()) throw std::invalid_argument("bipartition must be proper and nonempty");
  Index dim_b = 1;
  for (int m = modes_a; m < s.num_modes(); ++m) dim_b *= s.cutoff(m);
  const Index dim_a = s.dimension() / dim_b;
  // Row-major reshape: flat = i_A * dim_B + i_B.
  const Eigen::Map<const Matrix> t(psi.amplitudes().data(), dim_b, dim_a);
  Eigen::BDCSVD<Matrix> svd(t);
  SchmidtSpectrum out;
  double total = 0.0;
  for (Index k = 0; k < svd.singularValues().size(); ++k) {
    const double p = svd.singularValues()(k) * svd.singularValues()(k);
    out.p.push_back(p);
    total += p;
  }
  for (double& p : out.p) p /= total;
  std::sort(out.p.begin(), out.p.end(), std::greater<>());
  return out;
}

/// Trace distance to the separable set for a pure state: 2 sqrt(1 - max p).
inline double e_sep(const SchmidtSpectrum& s) { return 2.0 * std::sqrt(std::max(0.0, 1.0 - s.p.front())); }
inline double e_sep(const PureState& psi) { return e_sep(schmidt(psi)); }

/// (sum_k sqrt p_k)^2 - 1.
inline double e_ppt(const SchmidtSpectrum& s) {
  double root = 0.0;
  for (double p : s.p) root += std::sqrt(std::max(0.0, p));
  return std::max(0.0, root * root - 1.0);
}
inline double e_ppt(const PureState& psi) { return e_ppt(schmidt(psi)); }

/// PT negativity tr|rho^{T_B}| - 1. For mixed states this is reported as the
/// conjectured value of E_PPT.
inline double pt_negativity(const DensityOperator& rho, std::span<const int> modes_b) {
  const Matrix pt = partial_transpose(rho, modes_b);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (pt + pt.adjoint()));
  return std::max(0.0, eig.eigenvalues().cwiseAbs().sum() - 1.0);
}

inline double pt_negativity(const DensityOperator& rho) {
  const int modes_b[] = {rho.num_modes() - 1};
  if (rho.num_modes() != 2) throw std::invalid_argument("default bipartition needs two modes");
  return pt_negativity(rho, modes_b);
}

/// Trace-distance Wigner negativity of the single-photon family.
inline double n_tr_fock_bounds() { return 1.0; }

/// max[0, -(pi/2) min W] of a single-mode state: a lower bound on the
/// trace-distance Wigner negativity of any state that reduces to it.
inline double ntr_lower_bound(const DensityOperator& single, int points = 201) {
  if (single.num_modes() != 1) throw std::invalid_argument("ntr_lower_bound needs a single-mode state");
  const CharacteristicFunction cf(single);
  const double L = 3.0 + 2.0 * std::sqrt(cf.mean_photons(0));
  const int n = std::max(points, static_cast<int>(std::ceil(2.0 * L / (0.35 / (1.0 + std::sqrt(cf.mean_photons(0)))))) | 1);
  return std::max(0.0, -0.5 * kPi * wigner_minimum(cf, L, n).value);
}

/// Lower bound for |Cat2(beta)> from its single-mode factor |Cat1(sqrt 2 beta)>.
inline double cat_ntr_lower_bound(cplx beta) {
  if (std::abs(beta) == 0.0) return 0.0;
  return ntr_lower_bound(DensityOperator::from_pure(states::cat1(std::sqrt(2.0) * beta)));
}

}  // namespace ecdw
