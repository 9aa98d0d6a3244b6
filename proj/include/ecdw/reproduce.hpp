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
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "ecdw/families.hpp"

namespace ecdw {

/// Rows of one figure panel; NaN marks a cell that was not computed.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

inline void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
  os << '\n';
  char buf[32];
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.12e", row[c]);
      os << (c ? "," : "") << buf;
    }
    os << '\n';
  }
}

struct ReproduceConfig {
  /// Sweep points; 0 selects the figure default.
  int points = 0;
  bool negativity_volume = true;
  GridConfig grid{};
  /// Large-N column of the Fock sweep: N, optimizer budget and the stride of
  /// sweep rows on which it is computed (0 disables it).
  int large_n = 100;
  int large_n_stride = 5;
  OptimizerConfig large_n_optimizer{.gamma = 0.05, .max_iters = 100, .grad_norm_threshold = 1e-16, .restarts = 1};
  /// Loss sweep.
  std::vector<double> etas{};
  int naive_n_fock = 16;
  int naive_n_cat = 8;
  /// Point count of the re-optimized loss column.
  int reopt_n_fock = 36;
  int reopt_n_cat = 8;
  double cat_beta = 2.0;
  OptimizerConfig optimizer{.gamma = 0.05, .max_iters = 400, .restarts = 1};
  /// Near the detection edge the witness gradient is tiny, so the stopping
  /// threshold has to sit far below the default.
  OptimizerConfig reopt_optimizer{.gamma = 0.05, .max_iters = 600, .grad_norm_threshold = 1e-16, .restarts = 1};
  std::vector<double> lattice_spacings{0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 1.0, 1.2};
  unsigned threads = 1;
};

namespace detail {

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out;
  for (int k = 0; k < n; ++k) out.push_back(n == 1 ? lo : lo + (hi - lo) * k / (n - 1));
  return out;
}

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline PhaseSpacePointSet unpaired(const PointList& pts) { return pair_points(pts, SymplecticMap::identity(1)); }

// Columns shared by the lossless sweeps.
inline std::vector<double> member_row(const FamilyMember& m, const ReproduceConfig& cfg) {
  const PhaseSpacePointSet xi = unpaired(m.points);
  const double ec = certify(m.psi, xi).value;
  double nv = kNaN;
  if (cfg.negativity_volume) {
    GridConfig g = cfg.grid;
    g.threads = 1;
    nv = negativity_volume(m.psi, g, m.reduction).value;
  }
  double ntr = n_tr_fock_bounds();
  if (m.family == StateFamily::cat2) ntr = cat_ntr_lower_bound(m.parameter);
  const SchmidtSpectrum s = schmidt(m.psi);
  return {m.parameter, ec, nv, ntr, e_sep(s), e_ppt(s), max_displacement(xi)};
}

inline Table lossless_sweep(StateFamily f, const std::vector<double>& params, const ReproduceConfig& cfg,
                            const std::string& name) {
  Table t{{name, "E_C_N4", "N_V", f == StateFamily::cat2 ? "N_tr_lower" : "N_tr", "E_SEP", "E_PPT", "max_displacement"},
          std::vector<std::vector<double>>(params.size())};
  parallel_for(params.size(), cfg.threads, [&](std::size_t k) { t.rows[k] = member_row(make_member(f, params[k]), cfg); });
  return t;
}

}  // namespace detail

/// Entangled single-photon states over theta in [0, pi/2]. The large-N column
/// is optimized from the best square-lattice seed and warm-started along the
/// sweep.
inline Table reproduce_fig2(const ReproduceConfig& cfg = {}) {
  const auto thetas = detail::linspace(0.0, kPi / 2.0, cfg.points > 0 ? cfg.points : 51);
  Table t = detail::lossless_sweep(StateFamily::fock_bell, thetas, cfg, "theta");
  t.columns.insert(t.columns.begin() + 2, "E_C_N" + std::to_string(cfg.large_n));
  for (auto& row : t.rows) row.insert(row.begin() + 2, detail::kNaN);
  if (cfg.large_n_stride <= 0 || cfg.large_n < 2) return t;
  std::optional<PointList> warm;
  for (std::size_t k = 0; k < thetas.size(); k += static_cast<std::size_t>(cfg.large_n_stride)) {
    const PureState psi = states::fock_bell(thetas[k]);
    const CharacteristicFunction cf(psi);
    const WitnessObjective obj(cf, SymplecticMap::identity(1));
    OptimizerConfig oc = cfg.large_n_optimizer;
    oc.threads = cfg.threads;
    OptimizeResult best = optimize(obj, best_lattice_init(obj, cfg.large_n, cfg.lattice_spacings), oc);
    if (warm) {
      OptimizeResult w = optimize(obj, *warm, oc);
      if (w.result.lambda_min < best.result.lambda_min) best = std::move(w);
    }
    warm = best.points;
    t.rows[k][2] = best.result.value;
  }
  return t;
}

/// Photon-subtracted two-mode squeezed vacua over r in [0, 1.5].
inline Table reproduce_fig3(const ReproduceConfig& cfg = {}) {
  return detail::lossless_sweep(StateFamily::ps_tmsv, detail::linspace(0.0, 1.5, cfg.points > 0 ? cfg.points : 16), cfg,
                                "r");
}

/// Entangled cats over |beta| in [0.1, 4].
inline Table reproduce_fig4(const ReproduceConfig& cfg = {}) {
  return detail::lossless_sweep(StateFamily::cat2, detail::linspace(0.1, 4.0, cfg.points > 0 ? cfg.points : 40), cfg,
                                "beta");
}

/// Naive point set of a loss panel: optimized once for the lossless state.
inline PointList naive_points(StateFamily f, const ReproduceConfig& cfg) {
  const bool fock = f == StateFamily::fock_bell;
  const PureState psi = fock ? states::fock_bell(kPi / 4.0) : states::cat2(cfg.cat_beta);
  const CharacteristicFunction cf(psi);
  const WitnessObjective obj(cf, SymplecticMap::identity(1));
  std::vector<PointList> seeds;
  if (fock) {
    seeds.push_back(best_lattice_init(obj, cfg.naive_n_fock, cfg.lattice_spacings));
    seeds.push_back(ring_points(cfg.naive_n_fock, cf.mean_photons(0)));
  } else {
    seeds.push_back(cat_ladder_points(cfg.cat_beta, cfg.naive_n_cat));
  }
  std::optional<OptimizeResult> best;
  for (const PointList& s : seeds) {
    OptimizeResult r = optimize(obj, s, cfg.optimizer);
    if (!best || r.result.lambda_min < best->result.lambda_min) best = std::move(r);
  }
  return best->points;
}

/// Photon loss on |theta = pi/4> (fock-bell) or |Cat2(beta)> (cat2). The naive
/// columns keep the lossless optimum; the re-optimized columns start from it
/// (when the point counts agree), from the previous eta's optimum and from
/// lattice seeds.
inline Table reproduce_fig5(StateFamily f, const ReproduceConfig& cfg = {}) {
  if (f == StateFamily::ps_tmsv) throw std::invalid_argument("loss panels exist for fock-bell and cat2");
  const bool fock = f == StateFamily::fock_bell;
  std::vector<double> etas = cfg.etas;
  if (etas.empty()) etas = detail::linspace(0.0, 0.5, cfg.points > 0 ? cfg.points : 11);
  const PureState psi = fock ? states::fock_bell(kPi / 4.0) : states::cat2(cfg.cat_beta);
  const FamilyMember member = make_member(f, fock ? kPi / 4.0 : cfg.cat_beta);
  const PointList naive = naive_points(f, cfg);
  const int n = fock ? cfg.reopt_n_fock : cfg.reopt_n_cat;
  Table t{{"eta", "E_C_naive", "E_C_reoptimized", "N_V", "N_tr_lower", "PT_negativity_conjectured_E_PPT",
           "max_displacement_naive", "max_displacement_reoptimized"},
          {}};
  std::optional<PointList> previous;
  for (double eta : etas) {
    const DensityOperator rho = apply_loss(psi, LossChannel(eta, {0, 1}));
    const CharacteristicFunction cf(rho);
    const WitnessObjective obj(cf, SymplecticMap::identity(1));
    const WitnessResult naive_res = evaluate(obj.matrix(naive));
    std::vector<PointList> seeds;
    if (static_cast<int>(naive.size()) == n) seeds.push_back(naive);
    if (previous) seeds.push_back(*previous);
    seeds.push_back(best_lattice_init(obj, n, cfg.lattice_spacings));
    if (!fock) seeds.push_back(cat_ladder_points(cfg.cat_beta, n));
    OptimizerConfig oc = cfg.reopt_optimizer;
    oc.threads = cfg.threads;
    std::optional<OptimizeResult> best;
    for (const PointList& s : seeds) {
      OptimizeResult r = optimize(obj, s, oc);
      if (!best || r.result.lambda_min < best->result.lambda_min) best = std::move(r);
    }
    previous = best->points;
    double nv = detail::kNaN, ntr = detail::kNaN;
    if (cfg.negativity_volume) {
      const auto [single, check] = apply_reduction(rho, member.reduction);
      (void)check;
      GridConfig g = cfg.grid;
      g.threads = cfg.threads;
      nv = negativity_volume_1m(CharacteristicFunction(single), g).value;
      ntr = ntr_lower_bound(single);
    }
    t.rows.push_back({eta, naive_res.value, best->result.value, nv, ntr, pt_negativity(rho),
                      max_displacement(detail::unpaired(naive)), max_displacement(detail::unpaired(best->points))});
  }
  return t;
}

}  // namespace ecdw
