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
#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ecdw/fock.hpp"
#include "ecdw/gaussian.hpp"
#include "ecdw/symplectic.hpp"

namespace ecdw {

/// tr[rho D(xi)] for a fixed state, evaluated on the state's pure-state
/// ensemble so that D(xi) is never formed on the full space. The space gets one
/// extra level per mode so that a^dagger in the derivatives is exact.
class CharacteristicFunction {
 public:
  explicit CharacteristicFunction(const PureState& psi) : CharacteristicFunction(psi.space(), psi.amplitudes()) {}
  explicit CharacteristicFunction(const DensityOperator& rho)
      : CharacteristicFunction(rho.space(), ensemble_columns(rho)) {}

  const FockSpace& space() const noexcept { return space_; }
  int num_modes() const noexcept { return space_.num_modes(); }

  cplx operator()(const ModeVector& xi) const {
    const Matrix moved = displaced(xi);
    return (cols_.conjugate().cwiseProduct(moved)).sum();
  }

  /// Value and Wirtinger derivatives d/dxi_m and d/dxi_m*.
  struct Derivatives {
    cplx value;
    ModeVector d_xi;
    ModeVector d_xi_conj;
  };

  Derivatives with_derivatives(const ModeVector& xi) const {
    const Matrix moved = displaced(xi);
    Derivatives out{(cols_.conjugate().cwiseProduct(moved)).sum(), ModeVector(num_modes()), ModeVector(num_modes())};
    for (int m = 0; m < num_modes(); ++m) {
      // d/dxi   D = (a^dagger - xi*/2) D ;  d/dxi* D = (xi/2 - a) D
      const cplx raise = (lowered_[static_cast<std::size_t>(m)].conjugate().cwiseProduct(moved)).sum();
      const cplx lower = (raised_[static_cast<std::size_t>(m)].conjugate().cwiseProduct(moved)).sum();
      out.d_xi(m) = raise - 0.5 * std::conj(xi(m)) * out.value;
      out.d_xi_conj(m) = 0.5 * xi(m) * out.value - lower;
    }
    return out;
  }

  /// (2/pi)^M tr[rho D(2 alpha) Pi]; imaginary residue above 1e-8 is a
  /// truncation failure.
  double wigner(const ModeVector& alpha) const {
    const Matrix moved = displaced(2.0 * alpha, &parity_cols_);
    const cplx v = (cols_.conjugate().cwiseProduct(moved)).sum();
    if (std::abs(v.imag()) > 1e-8) throw TruncationError("Wigner function has imaginary residue");
    return std::pow(2.0 / kPi, num_modes()) * v.real();
  }

  double mean_photons(int mode) const {
    return mean_photon_number(space_, cols_.cwiseAbs2().rowwise().sum(), mode);
  }

 private:
  static FockSpace padded(const FockSpace& s) {
    std::vector<int> c(s.cutoffs().begin(), s.cutoffs().end());
    for (int& x : c) ++x;
    return FockSpace(c);
  }

  CharacteristicFunction(const FockSpace& space, const Matrix& cols)
      : space_(padded(space)), cols_(resize_columns(space, space_, cols, 0.0)) {
    prepare();
  }

  void prepare() {
    parity_cols_ = parity_diagonal(space_).cast<cplx>().asDiagonal() * cols_;
    for (int m = 0; m < num_modes(); ++m) {
      const Matrix a = annihilation(space_.cutoff(m));
      Matrix lo = cols_, hi = cols_;
      apply_mode_op(space_, m, a, lo);
      apply_mode_op(space_, m, a.adjoint(), hi);
      lowered_.push_back(std::move(lo));
      raised_.push_back(std::move(hi));
    }
  }

  Matrix displaced(const ModeVector& xi, const Matrix* source = nullptr) const {
    if (xi.size() != num_modes()) throw std::invalid_argument("displacement length does not match mode count");
    Matrix moved = source ? *source : cols_;
    for (int m = 0; m < num_modes(); ++m)
      if (xi(m) != 0.0) apply_mode_op(space_, m, displacement_1m(space_.cutoff(m), xi(m)), moved);
    return moved;
  }

  FockSpace space_;
  Matrix cols_;
  Matrix parity_cols_;
  std::vector<Matrix> lowered_;
  std::vector<Matrix> raised_;
};

template <typename State>
cplx char_fn(const State& rho, const ModeVector& xi) {
  return CharacteristicFunction(rho)(xi);
}

template <typename State>
double wigner(const State& rho, const ModeVector& alpha) {
  return CharacteristicFunction(rho).wigner(alpha);
}

/// rho^{T_B}: <i_A i_B| rho^{T_B} |j_A j_B> = <i_A j_B| rho |j_A i_B>.
inline Matrix partial_transpose(const FockSpace& space, const Matrix& rho, std::span<const int> modes_b) {
  std::vector<bool> in_b(static_cast<std::size_t>(space.num_modes()), false);
  for (int m : modes_b) {
    detail::check_mode(space, m);
    in_b[static_cast<std::size_t>(m)] = true;
  }
  const auto count = std::count(in_b.begin(), in_b.end(), true);
  if (count == 0 || count == space.num_modes()) throw std::invalid_argument("partial transpose needs a proper nonempty subset");
  const Index dim = space.dimension();
  // Split each flat index into its A part and B part offsets.
  std::vector<Index> part_a(static_cast<std::size_t>(dim)), part_b(static_cast<std::size_t>(dim));
  for (Index k = 0; k < dim; ++k) {
    Index a = 0, b = 0;
    for (int m = 0; m < space.num_modes(); ++m) {
      const Index off = space.level(k, m) * space.stride(m);
      (in_b[static_cast<std::size_t>(m)] ? b : a) += off;
    }
    part_a[static_cast<std::size_t>(k)] = a;
    part_b[static_cast<std::size_t>(k)] = b;
  }
  Matrix out(dim, dim);
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < dim; ++j) {
      const Index row = part_a[static_cast<std::size_t>(i)] + part_b[static_cast<std::size_t>(j)];
      const Index col = part_a[static_cast<std::size_t>(j)] + part_b[static_cast<std::size_t>(i)];
      out(i, j) = rho(row, col);
    }
  return out;
}

inline Matrix partial_transpose(const DensityOperator& rho, std::span<const int> modes_b) {
  return partial_transpose(rho.space(), rho.matrix(), modes_b);
}

inline Matrix partial_transpose(const DensityOperator& rho, std::initializer_list<int> modes_b) {
  return partial_transpose(rho.space(), rho.matrix(), std::span<const int>(modes_b.begin(), modes_b.size()));
}

// ---------------------------------------------------------------------------
// Reductions to fewer modes

/// State of the first mode after the Gaussian unitary `u` acts on two-mode
/// ensemble columns, returned together with the discarded-mode state.
struct SplitState {
  DensityOperator first;
  DensityOperator second;
  /// S(first) + S(second) - S(joint); zero iff the output is a product.
  double mutual_information;
};

namespace detail {

inline double von_neumann(const RealVector& spectrum) {
  double s = 0.0;
  for (Index k = 0; k < spectrum.size(); ++k)
    if (spectrum(k) > 1e-300) s -= spectrum(k) * std::log(spectrum(k));
  return s;
}

// Dropped coherences scale with the square root of the dropped mass.
inline DensityOperator trim_single_mode(const Matrix& m, double tolerance = 1e-18, int floor = 12) {
  const Index d = m.rows();
  Index c = d;
  double dropped = 0.0;
  while (c > floor && dropped + m(c - 1, c - 1).real() < tolerance) {
    --c;
    dropped += m(c, c).real();
  }
  Matrix kept = m.topLeftCorner(c, c);
  return DensityOperator::from_channel_output(FockSpace({static_cast<int>(c)}), kept, 1e-8);
}

}  // namespace detail

inline SplitState split_two_mode(const FockSpace& space, const Matrix& cols, const RealVector& joint_spectrum) {
  if (space.num_modes() != 2) throw std::invalid_argument("split_two_mode needs a two-mode space");
  const Index d0 = space.cutoff(0), d1 = space.cutoff(1);
  Matrix first = Matrix::Zero(d0, d0), second = Matrix::Zero(d1, d1);
  for (Index c = 0; c < cols.cols(); ++c) {
    // Row-major reshape: amplitude (n0, n1) sits at n0 * d1 + n1.
    const Eigen::Map<const Matrix> psi(cols.col(c).data(), d1, d0);
    first.noalias() += (psi.transpose() * psi.conjugate());
    second.noalias() += (psi * psi.adjoint());
  }
  DensityOperator a = detail::trim_single_mode(first);
  DensityOperator b = detail::trim_single_mode(second);
  const double mi = detail::von_neumann(a.spectrum()) + detail::von_neumann(b.spectrum()) -
                    detail::von_neumann(joint_spectrum);
  return {std::move(a), std::move(b), mi};
}

namespace detail {

inline FockSpace rotation_output_space(const FockSpace& in, bool active) {
  int c = in.cutoff(0) + in.cutoff(1) - 1;
  if (active) c += std::max(in.cutoff(0), in.cutoff(1)) + 10;
  return FockSpace({c, c});
}

inline RealVector ensemble_spectrum(const Matrix& cols) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cols.adjoint() * cols);
  return eig.eigenvalues().cwiseMax(0.0);
}

}  // namespace detail

/// Applies a two-mode Gaussian unitary and splits the result into modes.
template <typename State>
SplitState rotate_and_split(const State& rho, const GaussianTransform& u, double tolerance = 1e-9,
                            int output_cutoff = 0) {
  if (rho.num_modes() != 2) throw std::invalid_argument("rotate_and_split needs a two-mode state");
  const bool active = !u.lambda.is_passive() || u.alpha.cwiseAbs().maxCoeff() > 0.0;
  const GaussianUnitary g(u, {0, 1});
  const Matrix in = ensemble_columns(rho);
  if (output_cutoff > 0) {
    const FockSpace out = FockSpace::uniform(2, output_cutoff);
    const Matrix cols = g.apply_columns(rho.space(), out, in, tolerance);
    return split_two_mode(out, cols, detail::ensemble_spectrum(cols));
  }
  // Strong squeezing can outgrow the first guess; widen until the tail fits.
  int c = detail::rotation_output_space(rho.space(), active).cutoff(0);
  for (;;) {
    const FockSpace out = FockSpace::uniform(2, c);
    try {
      const Matrix cols = g.apply_columns(rho.space(), out, in, tolerance);
      return split_two_mode(out, cols, detail::ensemble_spectrum(cols));
    } catch (const TruncationError&) {
      if (c >= 160) throw;
      c = std::min(160, c + c / 2);
    }
  }
}

/// State of the collective mode a_+ after the pairing map acts on mode B.
template <typename State>
DensityOperator reduced_collective_state(const State& rho, const SymplecticMap& pairing, double tolerance = 1e-14) {
  if (rho.num_modes() != 2 || pairing.modes() != 1)
    throw std::invalid_argument("reduced collective state is implemented for one mode per party");
  const SymplecticMap total = collective_map() * direct_sum(SymplecticMap::identity(1), pairing);
  return rotate_and_split(rho, GaussianTransform{total, ModeVector::Zero(2)}, tolerance).first;
}

template <typename State>
double reduced_collective_wigner(const State& rho, const SymplecticMap& pairing, cplx alpha_plus) {
  const DensityOperator plus = reduced_collective_state(rho, pairing);
  ModeVector a(1);
  a(0) = alpha_plus;
  return CharacteristicFunction(plus).wigner(a);
}

// ---------------------------------------------------------------------------
// Grids and the negativity volume

struct WignerGrid {
  double half_width = 0.0;
  int points = 0;
  int modes = 0;
  /// Row-major over axes (re a_0, im a_0, re a_1, ...).
  std::vector<double> values;

  double coordinate(int i) const { return -half_width + 2.0 * half_width * i / (points - 1); }
  double spacing() const { return 2.0 * half_width / (points - 1); }
};

inline void write_csv(std::ostream& os, const WignerGrid& g) {
  for (int m = 0; m < g.modes; ++m) os << "re_a" << m << ",im_a" << m << ",";
  os << "W\n";
  const int axes = 2 * g.modes;
  std::vector<int> idx(static_cast<std::size_t>(axes), 0);
  char buf[32];
  for (std::size_t flat = 0; flat < g.values.size(); ++flat) {
    std::size_t rem = flat;
    for (int a = axes; a-- > 0;) {
      idx[static_cast<std::size_t>(a)] = static_cast<int>(rem % static_cast<std::size_t>(g.points));
      rem /= static_cast<std::size_t>(g.points);
    }
    for (int a = 0; a < axes; ++a) {
      std::snprintf(buf, sizeof buf, "%.12e", g.coordinate(idx[static_cast<std::size_t>(a)]));
      os << buf << ",";
    }
    std::snprintf(buf, sizeof buf, "%.12e", g.values[flat]);
    os << buf << "\n";
  }
}

/// Single-mode Wigner grid over [-L, L]^2 (re, im).
inline WignerGrid wigner_grid(const CharacteristicFunction& cf, double half_width, int points, unsigned threads = 1) {
  if (cf.num_modes() != 1) throw std::invalid_argument("wigner_grid is single-mode");
  if (points < 3 || points % 2 == 0 || !(half_width > 0)) throw std::invalid_argument("grid needs odd points >= 3 and L > 0");
  WignerGrid g{half_width, points, 1, std::vector<double>(static_cast<std::size_t>(points) * points)};
  parallel_for(static_cast<std::size_t>(points), threads, [&](std::size_t i) {
    ModeVector a(1);
    for (int j = 0; j < points; ++j) {
      a(0) = cplx(g.coordinate(static_cast<int>(i)), g.coordinate(j));
      g.values[i * static_cast<std::size_t>(points) + static_cast<std::size_t>(j)] = cf.wigner(a);
    }
  });
  return g;
}

/// Composite Simpson integral of a single-mode grid.
inline double simpson_integral(const WignerGrid& g) {
  const int n = g.points;
  auto weight = [n](int i) { return (i == 0 || i == n - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0); };
  std::vector<double> rows(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += weight(j) * g.values[static_cast<std::size_t>(i * n + j)];
    rows[static_cast<std::size_t>(i)] = weight(i) * s;
  }
  const double h = g.spacing();
  return pairwise_sum<double>(rows) * h * h / 9.0;
}

struct GridConfig {
  /// Per-axis half-width; 0 selects 3 + 2 sqrt(<n>).
  double half_width = 0.0;
  /// Coarse points per axis (odd).
  int points = 161;
  /// Sub-samples per axis inside cells that touch the negative region.
  int refine = 8;
  double tolerance = 1e-4;
  /// Enlarge `points` so the coarse spacing resolves interference fringes.
  bool resolve_fringes = true;
  unsigned threads = 1;
};

struct NegativityVolume {
  double value = 0.0;
  double error_estimate = 0.0;
  bool within_tolerance = true;
  double half_width = 0.0;
  int points = 0;
};

namespace detail {

// Sum over flagged cells of the midpoint rule with k x k samples of max(0, -W).
inline double refined_negative_part(const CharacteristicFunction& cf, const std::vector<std::pair<int, int>>& cells,
                                    double x0, double h, int k, unsigned threads) {
  std::vector<double> per_cell(cells.size());
  parallel_for(cells.size(), threads, [&](std::size_t c) {
    const auto [i, j] = cells[c];
    ModeVector a(1);
    std::vector<double> parts(static_cast<std::size_t>(k) * k);
    for (int u = 0; u < k; ++u)
      for (int v = 0; v < k; ++v) {
        a(0) = cplx(x0 + h * (i + (u + 0.5) / k), x0 + h * (j + (v + 0.5) / k));
        parts[static_cast<std::size_t>(u * k + v)] = std::max(0.0, -cf.wigner(a));
      }
    per_cell[c] = pairwise_sum<double>(parts) * h * h / (double(k) * k);
  });
  return pairwise_sum<double>(per_cell);
}

}  // namespace detail

/// Negativity volume (1/2) int (|W| - W) of a single-mode state. The coarse
/// grid locates the negative region; cells touching it (dilated by one cell)
/// are integrated with k x k midpoint sub-sampling. The error estimate is the
/// change from k/2 to k sub-samples.
inline NegativityVolume negativity_volume_1m(const CharacteristicFunction& cf, const GridConfig& cfg = {}) {
  if (cf.num_modes() != 1) throw std::invalid_argument("negativity_volume_1m needs a single-mode state");
  if (cfg.points < 3 || cfg.points % 2 == 0) throw std::invalid_argument("grid points must be odd and >= 3");
  if (cfg.refine < 2 || cfg.refine % 2) throw std::invalid_argument("refine must be even and >= 2");
  const double nbar = cf.mean_photons(0);
  const double L = cfg.half_width > 0 ? cfg.half_width : 3.0 + 2.0 * std::sqrt(nbar);
  int n = cfg.points;
  if (cfg.resolve_fringes) {
    const double h_max = 0.35 / (1.0 + std::sqrt(nbar));
    const int needed = static_cast<int>(std::ceil(2.0 * L / h_max)) + 1;
    if (needed > n) n = needed + (needed % 2 == 0 ? 1 : 0);
  }
  const WignerGrid g = wigner_grid(cf, L, n, cfg.threads);
  const int cells_per_axis = n - 1;
  std::vector<char> negative(static_cast<std::size_t>(cells_per_axis) * cells_per_axis, 0);
  for (int i = 0; i < cells_per_axis; ++i)
    for (int j = 0; j < cells_per_axis; ++j) {
      const auto at = [&](int a, int b) { return g.values[static_cast<std::size_t>(a * n + b)]; };
      if (std::min({at(i, j), at(i + 1, j), at(i, j + 1), at(i + 1, j + 1)}) < 0.0)
        negative[static_cast<std::size_t>(i * cells_per_axis + j)] = 1;
    }
  std::vector<std::pair<int, int>> cells;
  for (int i = 0; i < cells_per_axis; ++i)
    for (int j = 0; j < cells_per_axis; ++j) {
      bool flag = false;
      for (int di = -1; di <= 1 && !flag; ++di)
        for (int dj = -1; dj <= 1 && !flag; ++dj) {
          const int a = i + di, b = j + dj;
          if (a >= 0 && b >= 0 && a < cells_per_axis && b < cells_per_axis &&
              negative[static_cast<std::size_t>(a * cells_per_axis + b)])
            flag = true;
        }
      if (flag) cells.emplace_back(i, j);
    }
  NegativityVolume out;
  out.half_width = L;
  out.points = n;
  if (cells.empty()) return out;
  const double h = g.spacing();
  const double fine = detail::refined_negative_part(cf, cells, -L, h, cfg.refine, cfg.threads);
  const double half = detail::refined_negative_part(cf, cells, -L, h, cfg.refine / 2, cfg.threads);
  out.value = fine;
  out.error_estimate = std::abs(fine - half);
  out.within_tolerance = out.error_estimate <= cfg.tolerance;
  return out;
}

/// A Gaussian unitary that turns a two-mode state into a product whose second
/// factor has a nonnegative Wigner function; the negativity volume of the
/// first factor then equals that of the state.
struct NegativityReduction {
  std::string name;
  GaussianTransform transform;
  /// Per-mode cutoff of the rotated state; 0 picks one that holds any output.
  int output_cutoff = 0;
};

struct ReductionCheck {
  double mutual_information = 0.0;
  double second_min_wigner = 0.0;
};

/// Verifies a registered reduction and returns the single-mode factor.
template <typename State>
std::pair<DensityOperator, ReductionCheck> apply_reduction(const State& rho, const NegativityReduction& red) {
  SplitState split = rotate_and_split(rho, red.transform, 1e-9, red.output_cutoff);
  if (split.mutual_information > 1e-8)
    throw std::runtime_error("reduction '" + red.name + "' did not produce a product state");
  const CharacteristicFunction second(split.second);
  const double L = 3.0 + 2.0 * std::sqrt(second.mean_photons(0));
  const WignerGrid g = wigner_grid(second, L, 41);
  const double wmin = *std::min_element(g.values.begin(), g.values.end());
  if (wmin < -1e-10) throw std::runtime_error("reduction '" + red.name + "' left a Wigner-negative factor");
  return {std::move(split.first), ReductionCheck{split.mutual_information, wmin}};
}

/// Four-dimensional fallback for two-mode states without a reduction. Slow:
/// cost grows as points^4.
inline NegativityVolume negativity_volume_2m(const CharacteristicFunction& cf, double half_width, int points, int refine,
                                             unsigned threads = 1) {
  if (cf.num_modes() != 2) throw std::invalid_argument("negativity_volume_2m needs a two-mode state");
  const int n = points, c = n - 1;
  const double L = half_width, h = 2.0 * L / c;
  std::vector<double> w(static_cast<std::size_t>(n) * n * n * n);
  auto flat = [n](int a, int b, int e, int f) {
    return ((static_cast<std::size_t>(a) * n + b) * n + e) * static_cast<std::size_t>(n) + f;
  };
  parallel_for(static_cast<std::size_t>(n) * n, threads, [&](std::size_t ab) {
    const int a = static_cast<int>(ab / n), b = static_cast<int>(ab % n);
    ModeVector al(2);
    for (int e = 0; e < n; ++e)
      for (int f = 0; f < n; ++f) {
        al << cplx(-L + h * a, -L + h * b), cplx(-L + h * e, -L + h * f);
        w[flat(a, b, e, f)] = cf.wigner(al);
      }
  });
  auto cell_flat = [c](int a, int b, int e, int f) {
    return ((static_cast<std::size_t>(a) * c + b) * c + e) * static_cast<std::size_t>(c) + f;
  };
  std::vector<char> neg(static_cast<std::size_t>(c) * c * c * c, 0);
  for (int a = 0; a < c; ++a)
    for (int b = 0; b < c; ++b)
      for (int e = 0; e < c; ++e)
        for (int f = 0; f < c; ++f) {
          double mn = 0.0;
          for (int corner = 0; corner < 16; ++corner)
            mn = std::min(mn, w[flat(a + (corner & 1), b + ((corner >> 1) & 1), e + ((corner >> 2) & 1),
                                     f + ((corner >> 3) & 1))]);
          if (mn < 0.0) neg[cell_flat(a, b, e, f)] = 1;
        }
  std::vector<std::array<int, 4>> cells;
  for (int a = 0; a < c; ++a)
    for (int b = 0; b < c; ++b)
      for (int e = 0; e < c; ++e)
        for (int f = 0; f < c; ++f) {
          bool flag = false;
          for (int s = 0; s < 81 && !flag; ++s) {
            const int da = s % 3 - 1, db = (s / 3) % 3 - 1, de = (s / 9) % 3 - 1, df = s / 27 - 1;
            const int A = a + da, B = b + db, E = e + de, F = f + df;
            if (A >= 0 && B >= 0 && E >= 0 && F >= 0 && A < c && B < c && E < c && F < c && neg[cell_flat(A, B, E, F)])
              flag = true;
          }
          if (flag) cells.push_back({a, b, e, f});
        }
  auto integrate = [&](int k) {
    std::vector<double> per(cells.size());
    parallel_for(cells.size(), threads, [&](std::size_t idx) {
      const auto& cell = cells[idx];
      ModeVector al(2);
      std::vector<double> parts;
      parts.reserve(static_cast<std::size_t>(k) * k * k * k);
      for (int u = 0; u < k * k * k * k; ++u) {
        const int s0 = u % k, s1 = (u / k) % k, s2 = (u / (k * k)) % k, s3 = u / (k * k * k);
        al << cplx(-L + h * (cell[0] + (s0 + 0.5) / k), -L + h * (cell[1] + (s1 + 0.5) / k)),
            cplx(-L + h * (cell[2] + (s2 + 0.5) / k), -L + h * (cell[3] + (s3 + 0.5) / k));
        parts.push_back(std::max(0.0, -cf.wigner(al)));
      }
      per[idx] = pairwise_sum<double>(parts) * std::pow(h, 4) / std::pow(double(k), 4);
    });
    return pairwise_sum<double>(per);
  };
  NegativityVolume out;
  out.half_width = L;
  out.points = n;
  if (cells.empty()) return out;
  out.value = integrate(refine);
  out.error_estimate = std::abs(out.value - integrate(refine / 2));
  return out;
}

/// Negativity volume of a one- or two-mode state. Two-mode states use the
/// given reduction when present and the 4D fallback otherwise.
template <typename State>
NegativityVolume negativity_volume(const State& rho, const GridConfig& cfg = {},
                                   const std::optional<NegativityReduction>& reduction = std::nullopt) {
  if (rho.num_modes() == 1) return negativity_volume_1m(CharacteristicFunction(rho), cfg);
  if (rho.num_modes() != 2) throw std::invalid_argument("negativity volume supports one or two modes");
  if (reduction) {
    const auto [single, check] = apply_reduction(rho, *reduction);
    (void)check;
    return negativity_volume_1m(CharacteristicFunction(single), cfg);
  }
  const CharacteristicFunction cf(rho);
  const double nbar = std::max(cf.mean_photons(0), cf.mean_photons(1));
  const double L = cfg.half_width > 0 ? cfg.half_width : 3.0 + 2.0 * std::sqrt(nbar);
  NegativityVolume v = negativity_volume_2m(cf, L, 31, 4, cfg.threads);
  v.within_tolerance = v.error_estimate <= cfg.tolerance;
  return v;
}

// ---------------------------------------------------------------------------
// Minimum of a single-mode Wigner function

struct WignerMinimum {
  double value = 0.0;
  cplx location = 0.0;
};

/// Grid search followed by compass-search polishing.
inline WignerMinimum wigner_minimum(const CharacteristicFunction& cf, double half_width, int points, unsigned threads = 1) {
  const WignerGrid g = wigner_grid(cf, half_width, points, threads);
  const auto it = std::min_element(g.values.begin(), g.values.end());
  const auto flat = static_cast<int>(it - g.values.begin());
  cplx at(g.coordinate(flat / points), g.coordinate(flat % points));
  double best = *it;
  double step = g.spacing() / 2.0;
  ModeVector a(1);
  const cplx dirs[4] = {1.0, -1.0, kI, -kI};
  while (step > 1e-10) {
    bool moved = false;
    for (const cplx& d : dirs) {
      a(0) = at + step * d;
      const double w = cf.wigner(a);
      if (w < best) {
        best = w;
        at = a(0);
        moved = true;
        break;
      }
    }
    if (!moved) step /= 2.0;
  }
  return {best, at};
}

}  // namespace ecdw
