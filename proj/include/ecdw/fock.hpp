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
#include <cstdio>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "ecdw/linalg.hpp"

namespace ecdw {

/// Truncated multimode Fock space. Mode 0 is the most significant index, so
/// the flat index of |n_0, ..., n_{M-1}> is sum_m n_m * stride(m).
class FockSpace {
 public:
  explicit FockSpace(std::vector<int> cutoffs) : cutoffs_(std::move(cutoffs)) {
    if (cutoffs_.empty()) throw std::invalid_argument("FockSpace needs at least one mode");
    strides_.assign(cutoffs_.size(), 1);
    dimension_ = 1;
    for (std::size_t m = cutoffs_.size(); m-- > 0;) {
      if (cutoffs_[m] < 1) throw std::invalid_argument("Fock cutoff must be positive");
      strides_[m] = dimension_;
      dimension_ *= cutoffs_[m];
    }
  }

  static FockSpace uniform(int modes, int cutoff) {
    return FockSpace(std::vector<int>(static_cast<std::size_t>(modes), cutoff));
  }

  int num_modes() const noexcept { return static_cast<int>(cutoffs_.size()); }
  int cutoff(int mode) const { return cutoffs_.at(static_cast<std::size_t>(mode)); }
  std::span<const int> cutoffs() const noexcept { return cutoffs_; }
  Index dimension() const noexcept { return dimension_; }
  Index stride(int mode) const { return strides_.at(static_cast<std::size_t>(mode)); }

  int level(Index flat, int mode) const {
    return static_cast<int>((flat / stride(mode)) % cutoff(mode));
  }

  Index flat_index(std::span<const int> levels) const {
    if (levels.size() != cutoffs_.size()) throw std::invalid_argument("level count mismatch");
    Index flat = 0;
    for (std::size_t m = 0; m < levels.size(); ++m) {
      if (levels[m] < 0 || levels[m] >= cutoffs_[m]) throw std::out_of_range("Fock level out of range");
      flat += levels[m] * strides_[m];
    }
    return flat;
  }

  friend bool operator==(const FockSpace& a, const FockSpace& b) { return a.cutoffs_ == b.cutoffs_; }

 private:
  std::vector<int> cutoffs_;
  std::vector<Index> strides_;
  Index dimension_ = 1;
};

namespace detail {

inline void check_mode(const FockSpace& space, int mode) {
  if (mode < 0 || mode >= space.num_modes()) throw std::out_of_range("mode index out of range");
}

// Probability of each level of `mode` given flat-basis populations.
inline RealVector level_distribution(const FockSpace& space, int mode, const RealVector& populations) {
  RealVector dist = RealVector::Zero(space.cutoff(mode));
  for (Index k = 0; k < space.dimension(); ++k) dist(space.level(k, mode)) += populations(k);
  return dist;
}

inline double tail_mass_from(const FockSpace& space, const RealVector& populations) {
  double tail = 0.0;
  for (int m = 0; m < space.num_modes(); ++m) {
    const RealVector dist = level_distribution(space, m, populations);
    tail = std::max(tail, dist(dist.size() - 1));
  }
  return tail;
}

// Makes the largest-magnitude amplitude real positive (first index on ties).
inline void fix_global_phase(Vector& v) {
  Index best = 0;
  double best_abs = -1.0;
  for (Index k = 0; k < v.size(); ++k) {
    const double a = std::abs(v(k));
    if (a > best_abs * (1.0 + 1e-12)) {
      best_abs = a;
      best = k;
    }
  }
  if (best_abs > 0.0) v *= std::conj(v(best)) / best_abs;
}

}  // namespace detail

class PureState {
 public:
  PureState(FockSpace space, Vector amplitudes) : space_(std::move(space)), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != space_.dimension()) throw std::invalid_argument("amplitude length does not match space");
    if (std::abs(amplitudes_.norm() - 1.0) > 1e-12) throw std::invalid_argument("pure state is not normalized");
  }

  /// Normalizes and fixes the global phase. Rejects the zero vector.
  static PureState normalized(FockSpace space, Vector amplitudes) {
    const double norm = amplitudes.norm();
    if (!(norm > 1e-300) || !std::isfinite(norm)) throw std::invalid_argument("state has zero norm");
    amplitudes /= norm;
    detail::fix_global_phase(amplitudes);
    return PureState(std::move(space), std::move(amplitudes));
  }

  const FockSpace& space() const noexcept { return space_; }
  const Vector& amplitudes() const noexcept { return amplitudes_; }
  int num_modes() const noexcept { return space_.num_modes(); }

  double tail_mass() const { return detail::tail_mass_from(space_, amplitudes_.cwiseAbs2()); }

 private:
  FockSpace space_;
  Vector amplitudes_;
};

/// Density operator with its spectral decomposition cached at construction.
class DensityOperator {
 public:
  DensityOperator(FockSpace space, Matrix matrix) : space_(std::move(space)), matrix_(std::move(matrix)) {
    const Index dim = space_.dimension();
    if (matrix_.rows() != dim || matrix_.cols() != dim) throw std::invalid_argument("matrix does not match space");
    if (hermitian_residual(matrix_) > 1e-12) throw std::invalid_argument("density operator is not Hermitian");
    if (std::abs(matrix_.trace() - cplx(1.0)) > 1e-10) throw std::invalid_argument("density operator trace is not 1");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(matrix_);
    if (eig.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
    if (eig.eigenvalues().minCoeff() < -1e-10) throw std::invalid_argument("density operator is not positive");
    spectrum_ = eig.eigenvalues();
    eigenvectors_ = eig.eigenvectors();
  }

  static DensityOperator from_pure(const PureState& psi) {
    const Vector& v = psi.amplitudes();
    return DensityOperator(psi.space(), v * v.adjoint());
  }

  /// Symmetrizes and renormalizes a matrix produced by a trace-preserving map.
  /// Trace drift beyond `trace_tolerance` is reported as truncation failure.
  static DensityOperator from_channel_output(FockSpace space, Matrix m, double trace_tolerance = 1e-6) {
    const double tr = m.trace().real();
    if (std::abs(tr - 1.0) > trace_tolerance)
      throw TruncationError("trace drifted to " + std::to_string(tr) + "; cutoff too small");
    Matrix h = 0.5 * (m + m.adjoint()) / tr;
    return DensityOperator(std::move(space), std::move(h));
  }

  /// rho = C C^dagger normalized; only the support of C is diagonalized, so
  /// spectrum() then lists the nonzero eigenvalues only.
  static DensityOperator from_columns(FockSpace space, const Matrix& cols, double trace_tolerance = 1e-6) {
    if (cols.rows() != space.dimension()) throw std::invalid_argument("columns do not match space");
    const double tr = cols.squaredNorm();
    if (std::abs(tr - 1.0) > trace_tolerance)
      throw TruncationError("trace drifted to " + std::to_string(tr) + "; cutoff too small");
    const Matrix c = compress_columns(cols) / std::sqrt(tr);
    RealVector spectrum(c.cols());
    Matrix vectors(c.rows(), c.cols());
    // Ascending, like the dense path.
    for (Index k = 0; k < c.cols(); ++k) {
      const Index src = c.cols() - 1 - k;
      const double w = c.col(src).norm();
      spectrum(k) = w * w;
      vectors.col(k) = c.col(src) / w;
    }
    Matrix m = c * c.adjoint();
    return DensityOperator(std::move(space), std::move(m), std::move(spectrum), std::move(vectors));
  }

  /// Orthogonal columns U sqrt(p) with C C^dagger = U p U^dagger, descending p,
  /// down to `cut` relative weight. The Gram route's columns C v already carry
  /// norm sqrt(p).
  static Matrix compress_columns(const Matrix& cols, double cut = 1e-14) {
    if (cols.cols() == 0) return cols;
    RealVector p;
    Matrix u;
    if (cols.cols() <= cols.rows()) {
      Eigen::SelfAdjointEigenSolver<Matrix> eig(cols.adjoint() * cols);
      if (eig.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
      p = eig.eigenvalues();
      u = cols * eig.eigenvectors();
    } else {
      Eigen::SelfAdjointEigenSolver<Matrix> eig(cols * cols.adjoint());
      if (eig.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
      p = eig.eigenvalues();
      u = eig.eigenvectors() * p.cwiseMax(0.0).cwiseSqrt().asDiagonal();
    }
    const double pmax = p.maxCoeff();
    std::vector<Index> keep;
    for (Index k = p.size(); k-- > 0;)
      if (p(k) > cut * pmax) keep.push_back(k);
    Matrix out(cols.rows(), static_cast<Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) out.col(static_cast<Index>(c)) = u.col(keep[c]);
    return out;
  }

  const FockSpace& space() const noexcept { return space_; }
  const Matrix& matrix() const noexcept { return matrix_; }
  int num_modes() const noexcept { return space_.num_modes(); }
  const RealVector& spectrum() const noexcept { return spectrum_; }
  const Matrix& eigenvectors() const noexcept { return eigenvectors_; }

  double tail_mass() const { return detail::tail_mass_from(space_, matrix_.diagonal().real()); }

  double purity() const { return (matrix_ * matrix_).trace().real(); }

 private:
  DensityOperator(FockSpace space, Matrix m, RealVector spectrum, Matrix vectors)
      : space_(std::move(space)), matrix_(std::move(m)), spectrum_(std::move(spectrum)), eigenvectors_(std::move(vectors)) {}

  FockSpace space_;
  Matrix matrix_;
  RealVector spectrum_;
  Matrix eigenvectors_;
};

/// Columns sqrt(p_k) |psi_k> whose outer-product sum reproduces the state.
/// Eigenvalues below `cut` times the largest are dropped.
inline Matrix ensemble_columns(const DensityOperator& rho, double cut = 1e-14) {
  const RealVector& p = rho.spectrum();
  const double pmax = p.maxCoeff();
  std::vector<Index> keep;
  for (Index k = p.size(); k-- > 0;)
    if (p(k) > cut * pmax) keep.push_back(k);
  Matrix cols(rho.space().dimension(), static_cast<Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c)
    cols.col(static_cast<Index>(c)) = std::sqrt(p(keep[c])) * rho.eigenvectors().col(keep[c]);
  return cols;
}

inline Matrix ensemble_columns(const PureState& psi) { return psi.amplitudes(); }

// ---------------------------------------------------------------------------
// Single-mode operators

inline Matrix annihilation(int cutoff) {
  Matrix a = Matrix::Zero(cutoff, cutoff);
  for (int n = 1; n < cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

namespace detail {

inline long double log_factorial(int n) {
  static const std::vector<long double> table = [] {
    std::vector<long double> t(8192);
    t[0] = 0.0L;
    for (std::size_t k = 1; k < t.size(); ++k) t[k] = t[k - 1] + std::log(static_cast<long double>(k));
    return t;
  }();
  if (n < static_cast<int>(table.size())) return table[static_cast<std::size_t>(n)];
  return std::lgamma(n + 1.0L);
}

}  // namespace detail

/// <m|D(xi)|n> from the associated-Laguerre closed form, evaluated in long
/// double along each diagonal k = m - n with the three-term recurrence in n.
inline Matrix displacement_1m(int cutoff, cplx xi) {
  if (!std::isfinite(xi.real()) || !std::isfinite(xi.imag())) throw std::invalid_argument("non-finite displacement");
  Matrix d(cutoff, cutoff);
  const long double x = static_cast<long double>(std::norm(xi));
  const long double r = std::sqrt(x);
  const long double log_r = r > 0 ? std::log(r) : 0.0L;
  const double phase = std::arg(xi);
  std::vector<long double> lag(static_cast<std::size_t>(cutoff));
  for (int k = 0; k < cutoff; ++k) {
    const int len = cutoff - k;
    lag[0] = 1.0L;
    if (len > 1) lag[1] = 1.0L + k - x;
    for (int n = 1; n + 1 < len; ++n)
      lag[n + 1] = ((2.0L * n + 1.0L + k - x) * lag[n] - (n + k) * lag[n - 1]) / (n + 1.0L);
    const cplx up = std::polar(1.0, k * phase);
    const cplx down = (k % 2 == 0 ? 1.0 : -1.0) * std::conj(up);
    // sqrt(n!/m!) r^k exp(-x/2), advanced along the diagonal
    long double pref = (r == 0) ? (k == 0 ? 1.0L : 0.0L)
                                : std::exp(k * log_r - 0.5L * x - 0.5L * detail::log_factorial(k));
    for (int n = 0; n < len; ++n) {
      const int m = n + k;
      const double mag = static_cast<double>(pref * lag[n]);
      pref *= std::sqrt(static_cast<long double>(n + 1) / static_cast<long double>(m + 1));
      d(m, n) = mag * up;
      if (k > 0) d(n, m) = mag * down;
    }
  }
  return d;
}

/// Largest deviation from 1 of column norms in the block that sits at
/// least `guard` levels below the cutoff.
inline double displacement_column_deviation(const Matrix& d1, int guard = 5) {
  const Index safe = d1.cols() - guard;
  double worst = 0.0;
  for (Index c = 0; c < safe; ++c) worst = std::max(worst, std::abs(d1.col(c).norm() - 1.0));
  return worst;
}

/// Diagonal of the total parity operator.
inline RealVector parity_diagonal(const FockSpace& space) {
  RealVector diag(space.dimension());
  for (Index k = 0; k < space.dimension(); ++k) {
    int total = 0;
    for (int m = 0; m < space.num_modes(); ++m) total += space.level(k, m);
    diag(k) = (total % 2 == 0) ? 1.0 : -1.0;
  }
  return diag;
}

/// Single-mode squeezer S(r) = exp[(r/2)(a^2 - a^dagger^2)], exponentiated at
/// working cutoff `working` and projected to `cutoff` levels.
inline Eigen::MatrixXd squeeze_working(int working, double r) {
  Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(working, working);
  for (int n = 2; n < working; ++n) {
    const double v = 0.5 * r * std::sqrt(static_cast<double>(n) * (n - 1));
    gen(n - 2, n) = v;
    gen(n, n - 2) = -v;
  }
  return gen.exp();
}

struct SqueezeOptions {
  double r_max = 2.0;
  double tail_tolerance = 1e-8;
  bool strict = true;
};

inline Matrix squeeze_1m(int cutoff, double r, const SqueezeOptions& opts = {}) {
  if (std::abs(r) > opts.r_max) throw std::invalid_argument("squeezing exceeds r_max");
  const int working = 2 * cutoff + 10;
  const Eigen::MatrixXd full = squeeze_working(working, r);
  const double tail = full.col(0).tail(working - cutoff).squaredNorm();
  if (opts.strict && tail > opts.tail_tolerance)
    throw TruncationError("squeezed vacuum tail mass " + std::to_string(tail) + " exceeds tolerance");
  return full.topLeftCorner(cutoff, cutoff).cast<cplx>();
}

// ---------------------------------------------------------------------------
// Embedding into the multimode space

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Matrix embed_mode_operator(const FockSpace& space, int mode, const Matrix& op) {
  detail::check_mode(space, mode);
  const Index right = space.stride(mode);
  const Index left = space.dimension() / (right * space.cutoff(mode));
  return kron(kron(Matrix::Identity(left, left), op), Matrix::Identity(right, right));
}

/// cols <- (1 x op x 1) cols, acting on `mode` of every column.
inline void apply_mode_op(const FockSpace& space, int mode, const Matrix& op, Matrix& cols) {
  detail::check_mode(space, mode);
  const Index d = space.cutoff(mode);
  const Index right = space.stride(mode);
  const Index left = space.dimension() / (d * right);
  const Matrix op_t = op.transpose();
  Matrix tmp(right, d);
  for (Index c = 0; c < cols.cols(); ++c) {
    cplx* base = cols.col(c).data();
    for (Index l = 0; l < left; ++l) {
      Eigen::Map<Matrix> block(base + l * d * right, right, d);
      tmp.noalias() = block * op_t;
      block = tmp;
    }
  }
}

inline Matrix displacement_matrix(const FockSpace& space, int mode, cplx xi) {
  detail::check_mode(space, mode);
  return embed_mode_operator(space, mode, displacement_1m(space.cutoff(mode), xi));
}

inline Matrix multimode_displacement(const FockSpace& space, std::span<const cplx> xis) {
  if (static_cast<int>(xis.size()) != space.num_modes()) throw std::invalid_argument("one displacement per mode required");
  Matrix out = displacement_1m(space.cutoff(0), xis[0]);
  for (int m = 1; m < space.num_modes(); ++m) out = kron(out, displacement_1m(space.cutoff(m), xis[static_cast<std::size_t>(m)]));
  return out;
}

inline Matrix squeeze(const FockSpace& space, int mode, double r, const SqueezeOptions& opts = {}) {
  detail::check_mode(space, mode);
  return embed_mode_operator(space, mode, squeeze_1m(space.cutoff(mode), r, opts));
}

// ---------------------------------------------------------------------------
// Passive two-mode unitaries

/// The passive unitary U on modes (i, j) with U^dagger (a_i, a_j)^T U = P (a_i, a_j)^T.
/// U preserves total photon number; each block is built exactly from the
/// previous one through U a_i^dagger U^dagger = sum_j P_ji a_j^dagger.
class TwoModePassive {
 public:
  TwoModePassive(FockSpace space, int i, int j, const Eigen::Matrix2cd& p) : space_(std::move(space)), i_(i), j_(j) {
    detail::check_mode(space_, i);
    detail::check_mode(space_, j);
    if (i == j) throw std::invalid_argument("passive two-mode gate needs distinct modes");
    if ((p.adjoint() * p - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() > 1e-10)
      throw std::invalid_argument("passive transformation must be unitary");
    const int di = space_.cutoff(i), dj = space_.cutoff(j);
    // full(k', k) = <k', N-k'| U |k, N-k> for the current N.
    Matrix full = Matrix::Ones(1, 1);
    for (int total = 0; total <= di + dj - 2; ++total) {
      if (total > 0) {
        Matrix next = Matrix::Zero(total + 1, total + 1);
        const auto raise = [&](Index from_col, Index to_col, cplx ci, cplx cj, double weight) {
          for (Index k = 0; k < total; ++k) {
            const cplx v = weight * full(k, from_col);
            next(k + 1, to_col) += ci * std::sqrt(double(k + 1)) * v;
            next(k, to_col) += cj * std::sqrt(double(total - k)) * v;
          }
        };
        // N |k, N-k> = sqrt(k) a_i^dagger |k-1, N-k> + sqrt(N-k) a_j^dagger |k, N-k-1>;
        // averaging both parents keeps the recursion stable at large N.
        for (Index k = 0; k <= total; ++k) {
          if (k > 0) raise(k - 1, k, p(0, 0), p(1, 0), std::sqrt(double(k)) / total);
          if (k < total) raise(k, k, p(0, 1), p(1, 1), std::sqrt(double(total - k)) / total);
        }
        full = std::move(next);
      }
      const int lo = std::max(0, total - (dj - 1));
      const int hi = std::min(total, di - 1);
      blocks_.push_back({lo, full.block(lo, lo, hi - lo + 1, hi - lo + 1)});
    }
  }

  const FockSpace& space() const noexcept { return space_; }

  /// cols <- U cols.
  void apply(Matrix& cols) const {
    if (cols.rows() != space_.dimension()) throw std::invalid_argument("column length does not match space");
    const Index si = space_.stride(i_), sj = space_.stride(j_);
    std::vector<Index> bases;
    for (Index k = 0; k < space_.dimension(); ++k)
      if (space_.level(k, i_) == 0 && space_.level(k, j_) == 0) bases.push_back(k);
    Vector buf;
    for (Index c = 0; c < cols.cols(); ++c) {
      for (Index base : bases) {
        for (std::size_t total = 0; total < blocks_.size(); ++total) {
          const Block& b = blocks_[total];
          const Index size = b.u.rows();
          buf.resize(size);
          for (Index t = 0; t < size; ++t) buf(t) = cols(base + (b.lo + t) * si + (Index(total) - b.lo - t) * sj, c);
          buf = b.u * buf;
          for (Index t = 0; t < size; ++t) cols(base + (b.lo + t) * si + (Index(total) - b.lo - t) * sj, c) = buf(t);
        }
      }
    }
  }

  Matrix dense() const {
    Matrix u = Matrix::Identity(space_.dimension(), space_.dimension());
    apply(u);
    return u;
  }

 private:
  struct Block {
    int lo;
    Matrix u;
  };
  FockSpace space_;
  int i_, j_;
  std::vector<Block> blocks_;
};

/// P of the beamsplitter B(theta), which sends |1,0> to cos|1,0> + sin|0,1>.
inline Eigen::Matrix2cd beamsplitter_transform(double theta) {
  Eigen::Matrix2cd p;
  p << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return p;
}

inline Matrix beamsplitter(const FockSpace& space, int i, int j, double theta) {
  return TwoModePassive(space, i, j, beamsplitter_transform(theta)).dense();
}

// ---------------------------------------------------------------------------
// State-level helpers

/// Copies amplitudes into a space with different cutoffs. Weight dropped by
/// shrinking must stay below `tolerance`.
inline Matrix resize_columns(const FockSpace& from, const FockSpace& to, const Matrix& cols, double tolerance = 1e-10) {
  if (from.num_modes() != to.num_modes()) throw std::invalid_argument("mode count mismatch");
  Matrix out = Matrix::Zero(to.dimension(), cols.cols());
  std::vector<int> levels(static_cast<std::size_t>(from.num_modes()));
  double dropped = 0.0;
  for (Index k = 0; k < from.dimension(); ++k) {
    bool inside = true;
    for (int m = 0; m < from.num_modes(); ++m) {
      levels[static_cast<std::size_t>(m)] = from.level(k, m);
      if (levels[static_cast<std::size_t>(m)] >= to.cutoff(m)) inside = false;
    }
    if (inside)
      out.row(to.flat_index(levels)) = cols.row(k);
    else
      dropped += cols.row(k).squaredNorm();
  }
  if (dropped > tolerance) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "resizing drops weight %.3e", dropped);
    throw TruncationError(buf);
  }
  return out;
}

inline PureState resize(const PureState& psi, const FockSpace& to, double tolerance = 1e-10) {
  Matrix cols = resize_columns(psi.space(), to, psi.amplitudes(), tolerance);
  return PureState::normalized(to, cols.col(0));
}

inline DensityOperator resize(const DensityOperator& rho, const FockSpace& to, double tolerance = 1e-10) {
  Matrix cols = resize_columns(rho.space(), to, ensemble_columns(rho), tolerance);
  return DensityOperator::from_columns(to, cols, tolerance + 1e-12);
}

/// Drops top Fock levels per mode while the discarded weight stays below
/// `tolerance`, never going below `floor` levels, then renormalizes.
inline PureState trim(const PureState& psi, double tolerance = 1e-10, int floor = 12) {
  const FockSpace& space = psi.space();
  const RealVector pop = psi.amplitudes().cwiseAbs2();
  std::vector<int> cut(space.cutoffs().begin(), space.cutoffs().end());
  double budget = tolerance;
  for (int m = 0; m < space.num_modes(); ++m) {
    const RealVector dist = detail::level_distribution(space, m, pop);
    double dropped = 0.0;
    int c = space.cutoff(m);
    while (c > floor && dropped + dist(c - 1) < budget / space.num_modes()) dropped += dist(--c);
    cut[static_cast<std::size_t>(m)] = c;
    budget -= dropped;
  }
  const FockSpace to(cut);
  Matrix cols = resize_columns(space, to, psi.amplitudes(), tolerance);
  return PureState::normalized(to, cols.col(0));
}

inline double mean_photon_number(const FockSpace& space, const RealVector& populations, int mode) {
  const RealVector dist = detail::level_distribution(space, mode, populations);
  double n = 0.0;
  for (Index k = 0; k < dist.size(); ++k) n += double(k) * dist(k);
  return n;
}

inline double mean_photon_number(const PureState& psi, int mode) {
  return mean_photon_number(psi.space(), psi.amplitudes().cwiseAbs2(), mode);
}

inline double mean_photon_number(const DensityOperator& rho, int mode) {
  return mean_photon_number(rho.space(), rho.matrix().diagonal().real(), mode);
}

/// Traces out `modes_out`; the remaining modes keep their order.
inline DensityOperator partial_trace(const DensityOperator& rho, std::span<const int> modes_out) {
  const FockSpace& space = rho.space();
  const int modes = space.num_modes();
  std::vector<bool> out(static_cast<std::size_t>(modes), false);
  for (int m : modes_out) {
    detail::check_mode(space, m);
    out[static_cast<std::size_t>(m)] = true;
  }
  std::vector<int> keep_cut;
  std::vector<int> keep_modes;
  for (int m = 0; m < modes; ++m)
    if (!out[static_cast<std::size_t>(m)]) {
      keep_cut.push_back(space.cutoff(m));
      keep_modes.push_back(m);
    }
  if (modes_out.empty() || keep_modes.empty()) throw std::invalid_argument("partial trace needs a proper nonempty subset");
  const FockSpace kept(keep_cut);
  Matrix red = Matrix::Zero(kept.dimension(), kept.dimension());
  std::vector<Index> kept_index(static_cast<std::size_t>(space.dimension()));
  std::vector<Index> traced_index(static_cast<std::size_t>(space.dimension()));
  for (Index k = 0; k < space.dimension(); ++k) {
    Index ki = 0, ti = 0;
    for (int m = 0; m < modes; ++m) {
      const int lv = space.level(k, m);
      if (out[static_cast<std::size_t>(m)])
        ti = ti * space.cutoff(m) + lv;
      else
        ki = ki * space.cutoff(m) + lv;
    }
    kept_index[static_cast<std::size_t>(k)] = ki;
    traced_index[static_cast<std::size_t>(k)] = ti;
  }
  const Matrix& mat = rho.matrix();
  for (Index r = 0; r < space.dimension(); ++r)
    for (Index c = 0; c < space.dimension(); ++c)
      if (traced_index[static_cast<std::size_t>(r)] == traced_index[static_cast<std::size_t>(c)])
        red(kept_index[static_cast<std::size_t>(r)], kept_index[static_cast<std::size_t>(c)]) += mat(r, c);
  return DensityOperator::from_channel_output(kept, red, 1e-10);
}

inline DensityOperator partial_trace(const DensityOperator& rho, std::initializer_list<int> modes_out) {
  return partial_trace(rho, std::span<const int>(modes_out.begin(), modes_out.size()));
}

/// Tensor product of operators on disjoint mode groups (a's modes first).
inline DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  std::vector<int> cut(a.space().cutoffs().begin(), a.space().cutoffs().end());
  cut.insert(cut.end(), b.space().cutoffs().begin(), b.space().cutoffs().end());
  return DensityOperator::from_channel_output(FockSpace(cut), kron(a.matrix(), b.matrix()), 1e-10);
}

inline PureState tensor(const PureState& a, const PureState& b) {
  std::vector<int> cut(a.space().cutoffs().begin(), a.space().cutoffs().end());
  cut.insert(cut.end(), b.space().cutoffs().begin(), b.space().cutoffs().end());
  Vector v(a.amplitudes().size() * b.amplitudes().size());
  for (Index i = 0; i < a.amplitudes().size(); ++i)
    v.segment(i * b.amplitudes().size(), b.amplitudes().size()) = a.amplitudes()(i) * b.amplitudes();
  return PureState::normalized(FockSpace(cut), v);
}

}  // namespace ecdw
