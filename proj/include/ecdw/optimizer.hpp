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

#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <vector>

#include "ecdw/witness.hpp"

namespace ecdw {

struct OptimizerConfig {
  double gamma = 0.05;
  int max_iters = 2000;
  double grad_norm_threshold = 1e-7;
  /// Step shrink factor in (0, 1]; 1 gives the plain fixed-step update.
  double backtracking = 0.5;
  int restarts = 8;
  std::uint64_t seed = 0;
  double jitter = 0.1;
  /// Upper bound on the adaptive step; 0 selects 100 * gamma.
  double max_step = 0.0;
  unsigned threads = 1;
};

struct OptimizerStep {
  int iter = 0;
  double lambda_min = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
  bool degenerate = false;
};

struct OptimizerTrace {
  std::vector<OptimizerStep> steps;
  bool converged = false;
  int restart = 0;
  int degenerate_steps = 0;
};

inline void write_csv(std::ostream& os, const OptimizerTrace& t) {
  os << "iter,lambda_min,grad_norm,step\n";
  char buf[128];
  for (const OptimizerStep& s : t.steps) {
    std::snprintf(buf, sizeof buf, "%d,%.12e,%.12e,%.12e\n", s.iter, s.lambda_min, s.grad_norm, s.step);
    os << buf;
  }
}

struct Gradient {
  double lambda_min = 0.0;
  /// d lambda_min / d xi_k^{A*} per point.
  PointList grad;
  bool degenerate = false;
  double gap = 0.0;

  double norm2() const {
    double s = 0.0;
    for (const ModeVector& g : grad) s += g.squaredNorm();
    return s;
  }
};

/// lambda_min of C (no pairing) or C2 (pairing held fixed) as a function of
/// the A points.
class WitnessObjective {
 public:
  /// Two-party objective; state modes are A followed by B.
  WitnessObjective(const CharacteristicFunction& cf, SymplecticMap pairing)
      : cf_(&cf), pairing_(std::move(pairing)), inverse_(pairing_->inverse()) {
    if (cf.num_modes() != 2 * pairing_->modes()) throw std::invalid_argument("state modes must equal A plus B modes");
  }

  /// Single-list objective for C.
  explicit WitnessObjective(const CharacteristicFunction& cf) : cf_(&cf) {}

  bool paired() const noexcept { return pairing_.has_value(); }
  int point_modes() const noexcept { return paired() ? pairing_->modes() : cf_->num_modes(); }

  PointList joint(const PointList& a) const {
    if (!paired()) return a;
    PointList out;
    out.reserve(a.size());
    for (const ModeVector& x : a) {
      ModeVector v(2 * x.size());
      v << x, inverse_->apply(x);
      out.push_back(std::move(v));
    }
    return out;
  }

  WitnessMatrix matrix(const PointList& a, unsigned threads = 1) const {
    return detail::build_from_differences(*cf_, joint(a), paired() ? WitnessKind::C2 : WitnessKind::C, threads);
  }

  double lambda(const PointList& a, unsigned threads = 1) const { return evaluate(matrix(a, threads)).lambda_min; }

  Gradient gradient(const PointList& a, unsigned threads = 1) const {
    const std::size_t n = a.size();
    const PointList pts = joint(a);
    const int m = point_modes();
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) pairs.emplace_back(j, k);
    std::vector<CharacteristicFunction::Derivatives> der(pairs.size());
    parallel_for(pairs.size(), threads,
                 [&](std::size_t p) { der[p] = cf_->with_derivatives(pts[pairs[p].first] - pts[pairs[p].second]); });
    const double inv_n = 1.0 / double(n);
    WitnessMatrix wm{Matrix(n, n), RealMatrix::Zero(n, n), paired() ? WitnessKind::C2 : WitnessKind::C,
                     EvaluationMode::exact};
    for (std::size_t j = 0; j < n; ++j) wm.entries(Index(j), Index(j)) = inv_n;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      wm.entries(Index(pairs[p].first), Index(pairs[p].second)) = der[p].value * inv_n;
      wm.entries(Index(pairs[p].second), Index(pairs[p].first)) = std::conj(der[p].value) * inv_n;
    }
    const WitnessResult res = evaluate(wm);
    Gradient g;
    g.lambda_min = res.lambda_min;
    g.gap = res.gap;
    g.degenerate = n > 1 && res.gap < 1e-10;
    g.grad.assign(n, ModeVector::Zero(m));
    const Vector& v = res.min_eigenvector;
    Matrix xp, yp;
    if (paired()) {
      xp = inverse_->x();
      yp = inverse_->y();
    }
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto [j, k] = pairs[p];
      const auto& d = der[p];
      ModeVector d_conj = d.d_xi_conj.head(m);
      ModeVector d_plain = d.d_xi.head(m);
      if (paired()) {
        // xi^B = X' xi^A + Y' xi^A*, with Lambda^{-1} = [[X', Y'], [Y'*, X'*]].
        const ModeVector gb = d.d_xi.tail(m), hb = d.d_xi_conj.tail(m);
        d_conj += yp.transpose() * gb + xp.adjoint() * hb;
        d_plain += xp.transpose() * gb + yp.adjoint() * hb;
      }
      const cplx c = std::conj(v(Index(j))) * v(Index(k));
      const ModeVector contrib = (c * d_conj + std::conj(c) * d_plain.conjugate()) * inv_n;
      g.grad[j] += contrib;
      g.grad[k] -= contrib;
    }
    return g;
  }

  PhaseSpacePointSet point_set(const PointList& a) const {
    if (paired()) return pair_points(a, *pairing_);
    return PhaseSpacePointSet(a, a, SymplecticMap::identity(static_cast<int>(a.front().size())));
  }

 private:
  const CharacteristicFunction* cf_;
  std::optional<SymplecticMap> pairing_;
  std::optional<SymplecticMap> inverse_;
};

struct OptimizeResult {
  PointList points;
  WitnessResult result;
  OptimizerTrace trace;
};

namespace detail {

inline PointList step_points(const PointList& x, const PointList& g, double t) {
  PointList out = x;
  for (std::size_t k = 0; k < x.size(); ++k) out[k] -= t * g[k];
  return out;
}

inline OptimizeResult descend(const WitnessObjective& obj, PointList x, const OptimizerConfig& cfg, int restart) {
  OptimizerTrace trace;
  trace.restart = restart;
  Gradient g = obj.gradient(x);
  trace.steps.push_back({0, g.lambda_min, g.norm2(), 0.0, g.degenerate});
  if (g.degenerate) ++trace.degenerate_steps;
  const double max_step = cfg.max_step > 0 ? cfg.max_step : 100.0 * cfg.gamma;
  const bool plain = cfg.backtracking >= 1.0;
  double last = cfg.gamma;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    if (g.norm2() < cfg.grad_norm_threshold) {
      trace.converged = true;
      break;
    }
    double t = plain ? cfg.gamma : std::min(last / cfg.backtracking, max_step);
    PointList trial = step_points(x, g.grad, t);
    if (!plain) {
      double lam = obj.lambda(trial);
      while (!(lam < g.lambda_min) && t > 1e-14) {
        t *= cfg.backtracking;
        trial = step_points(x, g.grad, t);
        lam = obj.lambda(trial);
      }
      if (!(lam < g.lambda_min)) break;  // no descent at machine precision
    }
    x = std::move(trial);
    last = t;
    const double before = g.lambda_min;
    g = obj.gradient(x);
    if (!plain && g.lambda_min > before) throw std::logic_error("accepted step increased lambda_min");
    trace.steps.push_back({it, g.lambda_min, g.norm2(), t, g.degenerate});
    if (g.degenerate) ++trace.degenerate_steps;
  }
  if (!trace.converged && g.norm2() < cfg.grad_norm_threshold) trace.converged = true;
  WitnessResult res = evaluate(obj.matrix(x));
  return {std::move(x), std::move(res), std::move(trace)};
}

inline PointList jittered(const PointList& x, const OptimizerConfig& cfg, int restart) {
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(restart)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, cfg.jitter);
  PointList out = x;
  for (ModeVector& v : out)
    for (Index m = 0; m < v.size(); ++m) v(m) += cplx(normal(rng), normal(rng));
  return out;
}

}  // namespace detail

/// Gradient descent on lambda_min over the A points with the pairing fixed.
/// Restart 0 starts from `init`; restart r > 0 starts from a seeded jitter of
/// it. The best result wins, ties going to the lower restart index.
inline OptimizeResult optimize(const WitnessObjective& obj, const PointList& init, const OptimizerConfig& cfg) {
  if (init.size() < 2) throw std::invalid_argument("optimizer needs at least two points");
  if (!(cfg.gamma > 0) || cfg.max_iters < 0 || !(cfg.backtracking > 0) || cfg.backtracking > 1 || cfg.restarts < 1)
    throw std::invalid_argument("invalid optimizer configuration");
  if (cfg.max_iters == 0) {
    OptimizeResult r{init, evaluate(obj.matrix(init)), {}};
    r.trace.steps.push_back({0, r.result.lambda_min, obj.gradient(init).norm2(), 0.0, false});
    return r;
  }
  std::vector<std::optional<OptimizeResult>> runs(static_cast<std::size_t>(cfg.restarts));
  parallel_for(runs.size(), cfg.threads, [&](std::size_t r) {
    const int restart = static_cast<int>(r);
    PointList start = restart == 0 ? init : detail::jittered(init, cfg, restart);
    runs[r] = detail::descend(obj, std::move(start), cfg, restart);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r]->result.lambda_min < runs[best]->result.lambda_min) best = r;
  return std::move(*runs[best]);
}

// ---------------------------------------------------------------------------
// Initial point sets

enum class Family { fock, cat, squeezed, generic, lattice };

struct InitParams {
  double theta = kPi / 4.0;
  cplx beta = 2.0;
  double r = 0.0;
  /// Mean photon number used by the generic ring.
  double mean_photons = 0.0;
  /// Lattice spacing.
  double spacing = 1.0;
};

/// Closed-form seed xi_0(theta) for the single-photon family.
inline cplx fock_xi0(double theta) {
  const double u = kPi / 4.0 - theta;
  const double im = 813.0 / 1217.0 + std::cos(1249.0 / 171.0 * u + 2179.0 / 215.0 * std::pow(u, 4)) / 1313.0;
  const double re = 2531.0 / 2745.0 + 453.0 / 2083.0 * u * u;
  return {re, im};
}

inline PointList fock_points(double theta) {
  const cplx x = fock_xi0(theta);
  return {ModeVector::Constant(1, x.real()), ModeVector::Constant(1, -x.real()), ModeVector::Constant(1, kI * x.imag()),
          ModeVector::Constant(1, -kI * x.imag())};
}

/// {xi_+0, -xi_+0, xi_-0, -xi_-0} with xi_{+-0} = beta +- i pi / (8 beta*).
inline PointList cat_points(cplx beta) {
  if (std::abs(beta) == 0.0) throw std::invalid_argument("cat points need beta != 0");
  const cplx shift = kI * kPi / (8.0 * std::conj(beta));
  const cplx p = beta + shift, m = beta - shift;
  return {ModeVector::Constant(1, p), ModeVector::Constant(1, -p), ModeVector::Constant(1, m),
          ModeVector::Constant(1, -m)};
}

/// Cat seed extended to N points: +-(beta +- i (2k+1) pi / (8 beta*)) for
/// k = 0, 1, ..., truncated to N; k = 0 reproduces cat_points.
inline PointList cat_ladder_points(cplx beta, int n) {
  if (std::abs(beta) == 0.0) throw std::invalid_argument("cat points need beta != 0");
  PointList pts;
  for (int k = 0; static_cast<int>(pts.size()) < n; ++k) {
    const cplx shift = kI * kPi * (2.0 * k + 1.0) / (8.0 * std::conj(beta));
    for (cplx v : {beta + shift, -(beta + shift), beta - shift, -(beta - shift)})
      if (static_cast<int>(pts.size()) < n) pts.push_back(ModeVector::Constant(1, v));
  }
  return pts;
}

/// Fock points carried into the frame of the photon-subtracted squeezed state:
/// Re[xi] e^{r} + i Im[xi] e^{-r}.
inline PointList squeezed_points(double theta, double r) {
  PointList pts = fock_points(theta);
  for (ModeVector& v : pts) v(0) = cplx(v(0).real() * std::exp(r), v(0).imag() * std::exp(-r));
  return pts;
}

/// Origin plus N-1 points on a ring of radius 1/sqrt(<n> + 1).
inline PointList ring_points(int n, double mean_photons, int modes = 1) {
  const double radius = 1.0 / std::sqrt(mean_photons + 1.0);
  PointList pts{ModeVector::Zero(modes)};
  for (int k = 0; k < n - 1; ++k) pts.push_back(ModeVector::Constant(modes, std::polar(radius, 2.0 * kPi * k / (n - 1))));
  return pts;
}

/// First N nodes (row-major) of a centered square lattice.
inline PointList lattice_points(int n, double spacing, int modes = 1) {
  const int side = static_cast<int>(std::ceil(std::sqrt(double(n))));
  const double offset = 0.5 * (side - 1);
  PointList pts;
  for (int i = 0; i < side && static_cast<int>(pts.size()) < n; ++i)
    for (int j = 0; j < side && static_cast<int>(pts.size()) < n; ++j)
      pts.push_back(ModeVector::Constant(modes, cplx((i - offset) * spacing, (j - offset) * spacing)));
  return pts;
}

/// Family seeds: the closed forms for N = 4 where they exist, otherwise the
/// generic ring (or lattice).
inline PointList heuristic_init(Family family, int n, const InitParams& p = {}, int modes = 1) {
  if (n < 2) throw std::invalid_argument("heuristic_init needs N >= 2");
  switch (family) {
    case Family::fock:
      if (n == 4 && modes == 1) return fock_points(p.theta);
      break;
    case Family::cat:
      if (modes == 1) return cat_ladder_points(p.beta, n);
      break;
    case Family::squeezed:
      if (n == 4 && modes == 1) return squeezed_points(p.theta, p.r);
      break;
    case Family::lattice:
      return lattice_points(n, p.spacing, modes);
    case Family::generic:
      break;
  }
  return ring_points(n, p.mean_photons, modes);
}

/// Lattice seed whose spacing minimizes lambda_min over `spacings`.
inline PointList best_lattice_init(const WitnessObjective& obj, int n, const std::vector<double>& spacings) {
  PointList best;
  double best_lambda = std::numeric_limits<double>::infinity();
  for (double s : spacings) {
    PointList pts = lattice_points(n, s, obj.point_modes());
    const double lam = obj.lambda(pts);
    if (lam < best_lambda) {
      best_lambda = lam;
      best = std::move(pts);
    }
  }
  return best;
}

}  // namespace ecdw
