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

#include <cmath>
#include <vector>

#include "ecdw/fock.hpp"

namespace ecdw {

/// Pure loss with U a U^dagger = sqrt(1 - eta) a + sqrt(eta) b on each listed mode.
struct LossChannel {
  double eta = 0.0;
  std::vector<int> modes;

  LossChannel(double eta_, std::vector<int> modes_) : eta(eta_), modes(std::move(modes_)) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("loss eta must lie in [0, 1]");
  }
};

/// Single-mode Kraus operators <m|K_n|m+n> = sqrt(C(m+n, n) eta^n (1-eta)^m).
inline std::vector<Matrix> loss_kraus(int cutoff, double eta) {
  std::vector<Matrix> ks;
  for (int n = 0; n < cutoff; ++n) {
    Matrix k = Matrix::Zero(cutoff, cutoff);
    for (int m = 0; m + n < cutoff; ++m) {
      const double log_binom = std::lgamma(m + n + 1.0) - std::lgamma(n + 1.0) - std::lgamma(m + 1.0);
      double amp;
      if (eta == 0.0)
        amp = n == 0 ? 1.0 : 0.0;
      else if (eta == 1.0)
        amp = m == 0 ? 1.0 : 0.0;
      else
        amp = std::exp(0.5 * (log_binom + n * std::log(eta) + m * std::log1p(-eta)));
      k(m, m + n) = amp;
    }
    ks.push_back(std::move(k));
  }
  return ks;
}

namespace detail {

// Kraus action on ensemble columns, re-compressed after each mode.
inline Matrix loss_columns(const FockSpace& space, Matrix cols, const LossChannel& ch) {
  for (int mode : ch.modes) {
    detail::check_mode(space, mode);
    std::vector<Matrix> parts;
    Index total = 0;
    for (const Matrix& k : loss_kraus(space.cutoff(mode), ch.eta)) {
      if (k.cwiseAbs().maxCoeff() == 0.0) continue;
      Matrix tmp = cols;
      apply_mode_op(space, mode, k, tmp);
      if (tmp.squaredNorm() < 1e-30) continue;
      total += tmp.cols();
      parts.push_back(std::move(tmp));
    }
    Matrix stacked(space.dimension(), total);
    Index at = 0;
    for (const Matrix& p : parts) {
      stacked.middleCols(at, p.cols()) = p;
      at += p.cols();
    }
    cols = DensityOperator::compress_columns(stacked);
  }
  return cols;
}

}  // namespace detail

inline DensityOperator apply_loss(const DensityOperator& rho, const LossChannel& ch) {
  return DensityOperator::from_columns(rho.space(), detail::loss_columns(rho.space(), ensemble_columns(rho), ch));
}

inline DensityOperator apply_loss(const PureState& psi, const LossChannel& ch) {
  return DensityOperator::from_columns(psi.space(), detail::loss_columns(psi.space(), psi.amplitudes(), ch));
}

}  // namespace ecdw
