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
#include <stdexcept>
#include <vector>

#include "ecdw/fock.hpp"

namespace ecdw::states {

inline constexpr double kTailTolerance = 1e-18;
inline constexpr int kFloorCutoff = 12;

namespace detail {

// Smallest d >= floor with Poisson(|alpha|^2) weight at n >= d below tol, using
// the geometric bound sum_{k>=d} p_k <= p_d / (1 - mean / (d + 1)) for d > mean.
inline int coherent_cutoff(double mean, double tol = kTailTolerance * 1e-2) {
  double log_p = -mean;  // log p_n
  for (int n = 0; n < 20000; ++n) {
    if (n >= kFloorCutoff && n > mean) {
      const double bound = std::exp(log_p) / (1.0 - mean / (n + 1.0));
      if (bound < tol) return n;
    }
    log_p += std::log(mean) - std::log(n + 1.0);
    if (mean == 0.0) return kFloorCutoff;
  }
  throw std::invalid_argument("coherent amplitude too large");
}

inline Vector coherent_amplitudes(cplx alpha, int cutoff) {
  Vector v(cutoff);
  const double log_norm = -0.5 * std::norm(alpha);
  for (int n = 0; n < cutoff; ++n) {
    if (alpha == 0.0) {
      v(n) = n == 0 ? 1.0 : 0.0;
      continue;
    }
    const double mag = std::exp(log_norm + n * std::log(std::abs(alpha)) - 0.5 * std::lgamma(n + 1.0));
    v(n) = std::polar(mag, n * std::arg(alpha));
  }
  return v;
}

inline Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

}  // namespace detail

inline PureState vacuum(int modes = 1) {
  Vector v = Vector::Zero(FockSpace::uniform(modes, kFloorCutoff).dimension());
  v(0) = 1.0;
  return PureState(FockSpace::uniform(modes, kFloorCutoff), v);
}

inline PureState fock(const std::vector<int>& levels) {
  std::vector<int> cut;
  for (int n : levels) {
    if (n < 0) throw std::invalid_argument("Fock level must be nonnegative");
    cut.push_back(std::max(kFloorCutoff, n + 1));
  }
  const FockSpace space(cut);
  Vector v = Vector::Zero(space.dimension());
  v(space.flat_index(levels)) = 1.0;
  return PureState(space, v);
}

inline PureState coherent(const std::vector<cplx>& alphas) {
  std::vector<int> cut;
  Vector v = Vector::Ones(1);
  for (cplx a : alphas) {
    const int d = detail::coherent_cutoff(std::norm(a));
    cut.push_back(d);
    v = detail::kron(v, detail::coherent_amplitudes(a, d));
  }
  return trim(PureState::normalized(FockSpace(cut), v), kTailTolerance, kFloorCutoff);
}

inline DensityOperator thermal(const std::vector<double>& mean_photons) {
  std::vector<int> cut;
  Vector diag = Vector::Ones(1);
  for (double nbar : mean_photons) {
    if (nbar < 0) throw std::invalid_argument("thermal occupation must be nonnegative");
    const double q = nbar / (1.0 + nbar);
    int d = kFloorCutoff;
    if (q > 0) d = std::max(d, static_cast<int>(std::ceil(std::log(kTailTolerance) / std::log(q))) + 1);
    cut.push_back(d);
    Vector p(d);
    for (int n = 0; n < d; ++n) p(n) = std::pow(q, n) / (1.0 + nbar);
    p /= p.sum();
    diag = detail::kron(diag, p);
  }
  const FockSpace space(cut);
  return DensityOperator(space, Matrix(diag.asDiagonal()));
}

/// cos(theta)|1,0> + sin(theta)|0,1>.
inline PureState fock_bell(double theta) {
  const FockSpace space = FockSpace::uniform(2, kFloorCutoff);
  Vector v = Vector::Zero(space.dimension());
  v(space.flat_index(std::vector<int>{1, 0})) = std::cos(theta);
  v(space.flat_index(std::vector<int>{0, 1})) = std::sin(theta);
  return PureState::normalized(space, v);
}

namespace detail {

inline int tmsv_cutoff(double r, int extra = 0) {
  const double t = std::tanh(std::abs(r));
  if (t == 0.0) return kFloorCutoff;
  int d = static_cast<int>(std::ceil(std::log(kTailTolerance * 1e-2) / (2.0 * std::log(t)))) + 1 + extra;
  // sqrt(n) growth of photon-subtracted amplitudes
  d += static_cast<int>(std::ceil(std::log(double(d)) / (-2.0 * std::log(t))));
  return std::max(kFloorCutoff, d);
}

}  // namespace detail

/// Truncated two-mode squeezed vacuum, sum_n tanh^n(r) |n,n>, renormalized.
inline PureState tmsv(double r) {
  const int d = detail::tmsv_cutoff(r);
  const FockSpace space = FockSpace::uniform(2, d);
  Vector v = Vector::Zero(space.dimension());
  const double t = std::tanh(r);
  for (int n = 0; n < d; ++n) v(space.flat_index(std::vector<int>{n, n})) = std::pow(t, n);
  return trim(PureState::normalized(space, v), kTailTolerance, kFloorCutoff);
}

/// Photon-subtracted two-mode squeezed vacuum, (a_1 + a_2)|TMSV(r)>.
/// Written as sum_{n>=1} tanh^{n-1}(r) sqrt(n) (|n-1,n> + |n,n-1>) so that
/// r = 0 gives the normalized limit (|0,1> + |1,0>)/sqrt 2.
inline PureState ps_tmsv(double r) {
  const int d = detail::tmsv_cutoff(r, 2);
  const FockSpace space = FockSpace::uniform(2, d);
  Vector v = Vector::Zero(space.dimension());
  const double t = std::tanh(r);
  for (int n = 1; n < d; ++n) {
    const double c = (n == 1 ? 1.0 : std::pow(t, n - 1)) * std::sqrt(double(n));
    v(space.flat_index(std::vector<int>{n - 1, n})) += c;
    v(space.flat_index(std::vector<int>{n, n - 1})) += c;
  }
  return trim(PureState::normalized(space, v), kTailTolerance, kFloorCutoff);
}

/// Single-mode cat |gamma> + |-gamma>, normalized.
inline PureState cat1(cplx gamma) {
  const int d = detail::coherent_cutoff(std::norm(gamma));
  const Vector v = detail::coherent_amplitudes(gamma, d) + detail::coherent_amplitudes(-gamma, d);
  return trim(PureState::normalized(FockSpace({d}), v), kTailTolerance, kFloorCutoff);
}

/// |beta, beta> + |-beta, -beta>, normalized; beta = 0 gives the vacuum.
inline PureState cat2(cplx beta) {
  const int d = detail::coherent_cutoff(std::norm(beta));
  const Vector plus = detail::coherent_amplitudes(beta, d), minus = detail::coherent_amplitudes(-beta, d);
  const Vector v = detail::kron(plus, plus) + detail::kron(minus, minus);
  return trim(PureState::normalized(FockSpace::uniform(2, d), v), kTailTolerance, kFloorCutoff);
}

/// Single-mode squeezed vacuum S(r)|0>.
inline PureState squeezed_vacuum(double r) {
  const double t = std::tanh(std::abs(r));
  int d = kFloorCutoff;
  if (t > 0) d = std::max(d, 2 * static_cast<int>(std::ceil(std::log(kTailTolerance * 1e-2) / (2.0 * std::log(t)))) + 2);
  Vector v = Vector::Zero(d);
  // <2n|S(r)|0> = (-tanh r)^n sqrt((2n)!) / (2^n n!) / sqrt(cosh r)
  for (int n = 0; 2 * n < d; ++n)
    v(2 * n) = std::pow(-std::tanh(r), n) *
               std::exp(0.5 * std::lgamma(2.0 * n + 1.0) - n * std::log(2.0) - std::lgamma(n + 1.0)) /
               std::sqrt(std::cosh(r));
  return trim(PureState::normalized(FockSpace({d}), v), kTailTolerance, kFloorCutoff);
}

}  // namespace ecdw::states
