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

#include <optional>
#include <utility>
#include <vector>

#include "ecdw/fock.hpp"
#include "ecdw/symplectic.hpp"

namespace ecdw {

/// Realizes a Gaussian transform (Lambda, alpha) on selected modes of a state as
/// U = D(alpha) U_P S(r) U_Q, with the passive and squeezing stages taken from
/// the Bloch-Messiah factorization. Work happens in an enlarged space so that
/// every stage is exact on the input support; weight leaving the output space
/// is reported as truncation failure.
class GaussianUnitary {
 public:
  GaussianUnitary(GaussianTransform transform, std::vector<int> modes)
      : transform_(std::move(transform)), modes_(std::move(modes)), factors_(bloch_messiah(transform_.lambda)) {
    if (static_cast<int>(modes_.size()) != transform_.lambda.modes())
      throw std::invalid_argument("mode list does not match the symplectic map");
    if (modes_.size() == 2 && modes_[0] == modes_[1]) throw std::invalid_argument("modes must be distinct");
  }

  GaussianUnitary(const SymplecticMap& lambda, std::vector<int> modes)
      : GaussianUnitary(GaussianTransform{lambda, ModeVector::Zero(lambda.modes())}, std::move(modes)) {}

  const GaussianTransform& transform() const noexcept { return transform_; }

  Matrix apply_columns(const FockSpace& in, const FockSpace& out, const Matrix& cols, double tolerance) const {
    for (int m : modes_) detail::check_mode(in, m);
    if (in.num_modes() != out.num_modes()) throw std::invalid_argument("mode count mismatch");
    const bool active = factors_.r.cwiseAbs().maxCoeff() > 0.0 || transform_.alpha.cwiseAbs().maxCoeff() > 0.0;
    std::vector<int> work(in.cutoffs().begin(), in.cutoffs().end());
    int total = 0;
    for (int m : modes_) total += in.cutoff(m);
    for (int m : modes_) {
      const int big = std::max(in.cutoff(m), out.cutoff(m));
      int w = std::max(big, total - 1);
      if (active) w = std::max(w, 2 * big + 10);
      work[static_cast<std::size_t>(m)] = w;
    }
    const FockSpace ws(work);
    Matrix c = resize_columns(in, ws, cols, 0.0);
    apply_passive(ws, factors_.q, c);
    for (std::size_t k = 0; k < modes_.size(); ++k) {
      const double r = factors_.r(static_cast<Index>(k));
      if (r != 0.0) {
        const Matrix s = squeeze_working(ws.cutoff(modes_[k]), r).cast<cplx>();
        apply_mode_op(ws, modes_[k], s, c);
      }
    }
    apply_passive(ws, factors_.p, c);
    for (std::size_t k = 0; k < modes_.size(); ++k) {
      const cplx a = transform_.alpha(static_cast<Index>(k));
      if (a != 0.0) apply_mode_op(ws, modes_[k], displacement_1m(ws.cutoff(modes_[k]), a), c);
    }
    return resize_columns(ws, out, c, tolerance);
  }

  PureState apply(const PureState& psi, std::optional<FockSpace> out = std::nullopt, double tolerance = 1e-9) const {
    const FockSpace target = out.value_or(psi.space());
    Matrix cols = apply_columns(psi.space(), target, psi.amplitudes(), tolerance);
    Vector v = cols.col(0);
    v /= v.norm();
    return PureState(target, std::move(v));
  }

  DensityOperator apply(const DensityOperator& rho, std::optional<FockSpace> out = std::nullopt,
                        double tolerance = 1e-9) const {
    const FockSpace target = out.value_or(rho.space());
    const Matrix cols = apply_columns(rho.space(), target, ensemble_columns(rho), tolerance);
    return DensityOperator::from_columns(target, cols, tolerance + 1e-10);
  }

 private:
  void apply_passive(const FockSpace& ws, const Matrix& p, Matrix& cols) const {
    if ((p - Matrix::Identity(p.rows(), p.cols())).cwiseAbs().maxCoeff() == 0.0) return;
    if (modes_.size() == 1) {
      const cplx phase = p(0, 0) / std::abs(p(0, 0));
      const int d = ws.cutoff(modes_[0]);
      Matrix rot = Matrix::Zero(d, d);
      for (int n = 0; n < d; ++n) rot(n, n) = std::pow(phase, n);
      apply_mode_op(ws, modes_[0], rot, cols);
      return;
    }
    TwoModePassive(ws, modes_[0], modes_[1], p).apply(cols);
  }

  GaussianTransform transform_;
  std::vector<int> modes_;
  BlochMessiah factors_;
};

/// U rho U^dagger for the Gaussian unitary realizing Lambda on all modes of rho.
inline DensityOperator mode_rotation_to_collective(const DensityOperator& rho, const SymplecticMap& lambda,
                                                   double tolerance = 1e-9) {
  if (lambda.modes() != rho.num_modes()) throw std::invalid_argument("map must act on every mode of the state");
  std::vector<int> modes(static_cast<std::size_t>(rho.num_modes()));
  std::iota(modes.begin(), modes.end(), 0);
  return GaussianUnitary(lambda, modes).apply(rho, std::nullopt, tolerance);
}

inline PureState mode_rotation_to_collective(const PureState& psi, const SymplecticMap& lambda, double tolerance = 1e-9) {
  if (lambda.modes() != psi.num_modes()) throw std::invalid_argument("map must act on every mode of the state");
  std::vector<int> modes(static_cast<std::size_t>(psi.num_modes()));
  std::iota(modes.begin(), modes.end(), 0);
  return GaussianUnitary(lambda, modes).apply(psi, std::nullopt, tolerance);
}

/// Map sending (a_A, a_B) to the collective pair with U^dagger a_1 U = a_+ and
/// U^dagger a_2 U = a_-.
inline SymplecticMap collective_map() {
  Matrix p(2, 2);
  const double h = 1.0 / std::sqrt(2.0);
  p << h, h, h, -h;
  return passive_map(p);
}

}  // namespace ecdw
