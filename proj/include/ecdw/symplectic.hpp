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
#include <utility>
#include <vector>

#include <Eigen/SVD>

#include "ecdw/linalg.hpp"

namespace ecdw {

/// One complex amplitude per mode.
using ModeVector = Vector;
using PointList = std::vector<ModeVector>;

struct SymplecticCheck {
  bool valid = false;
  double residual = 0.0;
};

/// Residual of Lambda^dagger K Lambda = K with K = diag(1, -1), plus the
/// violation of the (a, a^dagger) block-conjugate layout.
inline SymplecticCheck validate(const Matrix& lambda) {
  if (lambda.rows() != lambda.cols() || lambda.rows() % 2 != 0 || lambda.rows() == 0) return {false, 1.0 / 0.0};
  const Index m = lambda.rows() / 2;
  Vector k(2 * m);
  k.head(m).setOnes();
  k.tail(m).setConstant(-1.0);
  const Matrix kk = k.asDiagonal();
  double residual = (lambda.adjoint() * kk * lambda - kk).cwiseAbs().maxCoeff();
  residual = std::max(residual, (lambda.bottomRightCorner(m, m) - lambda.topLeftCorner(m, m).conjugate()).cwiseAbs().maxCoeff());
  residual = std::max(residual, (lambda.bottomLeftCorner(m, m) - lambda.topRightCorner(m, m).conjugate()).cwiseAbs().maxCoeff());
  return {residual < 1e-10, residual};
}

/// Linear map on (a, a^dagger) acting on m modes: Lambda = [[X, Y], [Y*, X*]].
class SymplecticMap {
 public:
  explicit SymplecticMap(Matrix lambda) : lambda_(std::move(lambda)) {
    const SymplecticCheck check = validate(lambda_);
    if (!check.valid) throw std::invalid_argument("matrix is not symplectic (residual " + std::to_string(check.residual) + ")");
  }

  static SymplecticMap identity(int modes) { return SymplecticMap(Matrix::Identity(2 * modes, 2 * modes)); }

  static SymplecticMap from_blocks(const Matrix& x, const Matrix& y) {
    const Index m = x.rows();
    Matrix l(2 * m, 2 * m);
    l << x, y, y.conjugate(), x.conjugate();
    return SymplecticMap(std::move(l));
  }

  int modes() const noexcept { return static_cast<int>(lambda_.rows() / 2); }
  const Matrix& matrix() const noexcept { return lambda_; }
  Matrix x() const { return lambda_.topLeftCorner(modes(), modes()); }
  Matrix y() const { return lambda_.topRightCorner(modes(), modes()); }

  /// K Lambda^dagger K, exact for symplectic matrices.
  SymplecticMap inverse() const {
    const Index m = modes();
    Matrix inv = lambda_.adjoint();
    inv.topRightCorner(m, m) *= -1.0;
    inv.bottomLeftCorner(m, m) *= -1.0;
    return SymplecticMap(std::move(inv));
  }

  /// First half of Lambda (z, z*).
  ModeVector apply(const ModeVector& z) const {
    if (z.size() != modes()) throw std::invalid_argument("vector length does not match map");
    return x() * z + y() * z.conjugate();
  }

  bool is_passive(double tol = 1e-12) const { return y().cwiseAbs().maxCoeff() < tol; }

  friend SymplecticMap operator*(const SymplecticMap& a, const SymplecticMap& b) {
    if (a.modes() != b.modes()) throw std::invalid_argument("mode count mismatch in composition");
    return SymplecticMap(a.lambda_ * b.lambda_);
  }

 private:
  Matrix lambda_;
};

// ---------------------------------------------------------------------------
// Standard maps. Each is the Lambda with U^dagger a U = X a + Y a^dagger for the
// named unitary U.

inline SymplecticMap passive_map(const Matrix& p) { return SymplecticMap::from_blocks(p, Matrix::Zero(p.rows(), p.cols())); }

inline SymplecticMap phase_map(double phi) {
  Matrix p(1, 1);
  p(0, 0) = std::polar(1.0, phi);
  return passive_map(p);
}

/// Map of S(r) = exp[(r/2)(a^2 - a^dagger^2)]: S^dagger a S = a cosh r - a^dagger sinh r.
inline SymplecticMap squeezing_map(double r) {
  Matrix x(1, 1), y(1, 1);
  x(0, 0) = std::cosh(r);
  y(0, 0) = -std::sinh(r);
  return SymplecticMap::from_blocks(x, y);
}

/// Map of the beamsplitter B(theta) with B|1,0> = cos|1,0> + sin|0,1>.
inline SymplecticMap beamsplitter_map(double theta) {
  Matrix p(2, 2);
  p << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return passive_map(p);
}

/// Block-diagonal map acting on the modes of `a` followed by those of `b`.
inline SymplecticMap direct_sum(const SymplecticMap& a, const SymplecticMap& b) {
  const Index ma = a.modes(), mb = b.modes(), m = ma + mb;
  Matrix x = Matrix::Zero(m, m), y = Matrix::Zero(m, m);
  x.topLeftCorner(ma, ma) = a.x();
  x.bottomRightCorner(mb, mb) = b.x();
  y.topLeftCorner(ma, ma) = a.y();
  y.bottomRightCorner(mb, mb) = b.y();
  return SymplecticMap::from_blocks(x, y);
}

/// Real (q, p) form of a map, q = (a + a^dagger)/sqrt 2, p = (a - a^dagger)/(i sqrt 2).
/// For debugging; everything else works in (a, a^dagger) ordering.
inline RealMatrix to_quadrature(const SymplecticMap& lambda) {
  const Index m = lambda.modes();
  Matrix t(2 * m, 2 * m);
  const Matrix id = Matrix::Identity(m, m) / std::sqrt(2.0);
  t << id, id, -kI * id, kI * id;
  const Matrix out = t * lambda.matrix() * t.adjoint();
  if (out.imag().cwiseAbs().maxCoeff() > 1e-10) throw std::logic_error("quadrature form is not real");
  return out.real();
}

/// Symplectic form x ^ y = sum_m (x_m y_m* - y_m x_m*), purely imaginary.
inline cplx wedge(const ModeVector& x, const ModeVector& y) {
  if (x.size() != y.size()) throw std::invalid_argument("wedge needs equal lengths");
  cplx s = 0.0;
  for (Index k = 0; k < x.size(); ++k) s += x(k) * std::conj(y(k)) - y(k) * std::conj(x(k));
  return s;
}

// ---------------------------------------------------------------------------
// Point sets

/// N pairs (xi^A, xi^B) with (xi^B, xi^B*) = Lambda^{-1} (xi^A, xi^A*).
class PhaseSpacePointSet {
 public:
  PhaseSpacePointSet(PointList a, PointList b, SymplecticMap pairing)
      : a_(std::move(a)), b_(std::move(b)), pairing_(std::move(pairing)) {
    if (a_.size() != b_.size()) throw std::invalid_argument("A and B point counts differ");
    const SymplecticMap inv = pairing_.inverse();
    for (std::size_t k = 0; k < a_.size(); ++k) {
      if (a_[k].size() != pairing_.modes() || b_[k].size() != pairing_.modes())
        throw std::invalid_argument("point dimension does not match pairing");
      if ((inv.apply(a_[k]) - b_[k]).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + a_[k].cwiseAbs().maxCoeff()))
        throw std::invalid_argument("point pair violates the pairing map");
    }
  }

  std::size_t size() const noexcept { return a_.size(); }
  int modes_per_party() const noexcept { return pairing_.modes(); }
  const ModeVector& a(std::size_t k) const { return a_.at(k); }
  const ModeVector& b(std::size_t k) const { return b_.at(k); }
  const PointList& a_points() const noexcept { return a_; }
  const PointList& b_points() const noexcept { return b_; }
  const SymplecticMap& pairing() const noexcept { return pairing_; }

  /// (xi^A, xi^B) concatenated in mode order.
  ModeVector joint(std::size_t k) const {
    ModeVector v(2 * modes_per_party());
    v << a_.at(k), b_.at(k);
    return v;
  }

 private:
  PointList a_;
  PointList b_;
  SymplecticMap pairing_;
};

inline PhaseSpacePointSet pair_points(const PointList& xi_a, const SymplecticMap& lambda) {
  const SymplecticMap inv = lambda.inverse();
  PointList b;
  b.reserve(xi_a.size());
  for (const ModeVector& x : xi_a) b.push_back(inv.apply(x));
  return PhaseSpacePointSet(xi_a, std::move(b), lambda);
}

/// Gaussian unitary data in the form U^dagger a U = Lambda (a, a^dagger) + alpha.
struct GaussianTransform {
  SymplecticMap lambda;
  ModeVector alpha;

  GaussianTransform inverse() const {
    SymplecticMap inv = lambda.inverse();
    ModeVector shift = -inv.apply(alpha);
    return {std::move(inv), std::move(shift)};
  }

  /// Transform of U1 U2 from those of U1 (this) and U2 (inner).
  GaussianTransform then_inner(const GaussianTransform& inner) const {
    return {lambda * inner.lambda, lambda.apply(inner.alpha) + alpha};
  }
};

/// Local frames U_A, U_B followed by a collective U_+ on a_+ = (a_A + a_B)/sqrt 2.
/// alpha0_plus is the shift U_+ induces on each of a_A and a_B.
struct GaussianFrame {
  SymplecticMap lambda_a;
  SymplecticMap lambda_b;
  SymplecticMap lambda_plus;
  ModeVector alpha0_a;
  ModeVector alpha0_b;
  ModeVector alpha0_plus;

  static GaussianFrame identity(int modes) {
    const ModeVector zero = ModeVector::Zero(modes);
    return {SymplecticMap::identity(modes), SymplecticMap::identity(modes), SymplecticMap::identity(modes), zero, zero, zero};
  }

  int modes() const noexcept { return lambda_a.modes(); }

  /// The frame as one transform of U = U_+ (U_A x U_B) on all 2m modes.
  GaussianTransform as_transform() const {
    const int m = modes();
    if (lambda_b.modes() != m || lambda_plus.modes() != m || alpha0_a.size() != m || alpha0_b.size() != m ||
        alpha0_plus.size() != m)
      throw std::invalid_argument("frame dimensions are inconsistent");
    ModeVector local_alpha(2 * m);
    local_alpha << alpha0_a, alpha0_b;
    const GaussianTransform local{direct_sum(lambda_a, lambda_b), local_alpha};
    // Rotate to (+, -), act on +, rotate back.
    Matrix t = Matrix::Zero(2 * m, 2 * m);
    const double h = 1.0 / std::sqrt(2.0);
    for (int k = 0; k < m; ++k) {
      t(k, k) = h;
      t(k, m + k) = h;
      t(m + k, k) = h;
      t(m + k, m + k) = -h;
    }
    const SymplecticMap rot = passive_map(t);
    const SymplecticMap coll = rot * direct_sum(lambda_plus, SymplecticMap::identity(m)) * rot;
    ModeVector coll_alpha(2 * m);
    coll_alpha << alpha0_plus, alpha0_plus;
    return GaussianTransform{coll, coll_alpha}.then_inner(local);
  }
};

struct TransformedPoints {
  PhaseSpacePointSet points;
  /// phases(j, k) with [C2(rho, Xi)]_{jk} = phases(j, k) [C2(rho~, Xi~)]_{jk},
  /// rho~ = U rho U^dagger.
  Matrix phases;
};

/// Transformed joint points zeta_k = Lambda xi_k and per-entry phases.
inline std::pair<PointList, Matrix> transform_joint(const PointList& joint, const GaussianTransform& u) {
  PointList out;
  out.reserve(joint.size());
  for (const ModeVector& x : joint) out.push_back(u.lambda.apply(x));
  const std::size_t n = out.size();
  Matrix phases(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) phases(j, k) = std::exp(wedge(u.alpha, out[j] - out[k]));
  return {std::move(out), std::move(phases)};
}

inline TransformedPoints transform_point_set(const PhaseSpacePointSet& xi, const GaussianFrame& frame) {
  const int m = xi.modes_per_party();
  if (frame.modes() != m) throw std::invalid_argument("frame mode count does not match point set");
  PointList joint;
  for (std::size_t k = 0; k < xi.size(); ++k) joint.push_back(xi.joint(k));
  auto [moved, phases] = transform_joint(joint, frame.as_transform());
  PointList a, b;
  for (const ModeVector& z : moved) {
    a.push_back(z.head(m));
    b.push_back(z.tail(m));
  }
  // Pairing of the transformed set: local part is Lambda_A Lambda Lambda_B^{-1};
  // a nontrivial collective stage keeps pairs related only when they coincide.
  SymplecticMap pairing = frame.lambda_a * xi.pairing() * frame.lambda_b.inverse();
  const bool collective_identity =
      (frame.lambda_plus.matrix() - Matrix::Identity(2 * m, 2 * m)).cwiseAbs().maxCoeff() < 1e-14;
  if (!collective_identity) {
    if ((pairing.matrix() - Matrix::Identity(2 * m, 2 * m)).cwiseAbs().maxCoeff() > 1e-10)
      throw std::invalid_argument("collective frame needs locally aligned pairs");
    pairing = SymplecticMap::identity(m);
  }
  return {PhaseSpacePointSet(std::move(a), std::move(b), pairing), std::move(phases)};
}

// ---------------------------------------------------------------------------
// Bloch-Messiah factorization for one or two modes

/// Lambda = diag(P, P*) Lambda_S(r) diag(Q, Q*) with Lambda_S the map of the
/// product of single-mode squeezers S(r_k).
struct BlochMessiah {
  Matrix p;
  RealVector r;
  Matrix q;

  SymplecticMap compose() const {
    const Index m = r.size();
    Matrix c = Matrix::Zero(m, m), s = Matrix::Zero(m, m);
    for (Index k = 0; k < m; ++k) {
      c(k, k) = std::cosh(r(k));
      s(k, k) = -std::sinh(r(k));
    }
    return passive_map(p) * SymplecticMap::from_blocks(c, s) * passive_map(q);
  }
};

namespace detail {

// Complex symmetric A = T diag(s) T^T with T unitary, s >= 0 (m <= 2).
inline std::pair<Matrix, RealVector> takagi(const Matrix& a) {
  const Index m = a.rows();
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector sv = svd.singularValues();
  const double scale = std::max(1.0, sv.size() ? sv(0) : 0.0);
  bool distinct = true;
  for (Index k = 1; k < m; ++k)
    if (sv(k - 1) - sv(k) < 1e-9 * scale) distinct = false;
  if (distinct) {
    const Matrix u = svd.matrixU();
    const Matrix d = u.adjoint() * svd.matrixV().conjugate();
    Matrix t = u;
    for (Index k = 0; k < m; ++k) t.col(k) *= std::polar(1.0, 0.5 * std::arg(d(k, k)));
    return {t, sv};
  }
  if (sv(0) < 1e-14) return {Matrix::Identity(m, m), RealVector::Zero(m)};
  // All singular values equal: A / s is a symmetric unitary whose real and
  // imaginary parts commute and share a real orthogonal eigenbasis.
  const double s = sv.mean();
  const Matrix v = a / s;
  const RealMatrix mix = v.real() + 0.6180339887498949 * v.imag();
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(0.5 * (mix + mix.transpose()));
  const Matrix o = eig.eigenvectors().cast<cplx>();
  const Matrix diag = o.transpose() * v * o;
  Matrix t = o;
  for (Index k = 0; k < m; ++k) t.col(k) *= std::polar(1.0, 0.5 * std::arg(diag(k, k)));
  return {t, RealVector::Constant(m, s)};
}

}  // namespace detail

inline BlochMessiah bloch_messiah(const SymplecticMap& lambda) {
  const int m = lambda.modes();
  if (m > 2) throw std::invalid_argument("Bloch-Messiah factorization is implemented for at most two modes");
  Eigen::JacobiSVD<Matrix> svd(lambda.x(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix w = svd.matrixU();
  const Matrix v = svd.matrixV();
  const Matrix s_tilde = -w.adjoint() * lambda.y() * v.conjugate();
  auto [t, s] = detail::takagi(0.5 * (s_tilde + s_tilde.transpose()));
  BlochMessiah bm{w * t, RealVector(m), t.adjoint() * v.adjoint()};
  for (int k = 0; k < m; ++k) bm.r(k) = std::asinh(s(k));
  const double err = (bm.compose().matrix() - lambda.matrix()).cwiseAbs().maxCoeff();
  if (err > 1e-8 * (1.0 + lambda.matrix().cwiseAbs().maxCoeff()))
    throw std::runtime_error("Bloch-Messiah reconstruction failed (error " + std::to_string(err) + ")");
  return bm;
}

}  // namespace ecdw
