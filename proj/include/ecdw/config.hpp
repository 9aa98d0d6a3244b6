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
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "ecdw/io.hpp"
#include "ecdw/reproduce.hpp"

namespace ecdw {

inline constexpr int kSchemaVersion = 1;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StateSpec {
  /// vacuum, fock, coherent, thermal, squeezed-vacuum, tmsv, cat1, fock-bell,
  /// ps-tmsv or cat2.
  std::string kind = "fock-bell";
  double theta = kPi / 4.0;
  double r = 0.0;
  cplx beta = 2.0;
  std::vector<int> levels{};
  std::vector<cplx> alphas{};
  std::vector<double> mean_photons{};
  /// Per-mode cutoff override; 0 keeps the automatic choice.
  int cutoff = 0;
};

struct PointSpec {
  /// paper, file or optimize.
  std::string source = "paper";
  std::string path{};
  /// Point count for source = optimize with a non-paper seed.
  int n = 4;
  /// Seed for source = optimize: paper, lattice, ring or generic.
  std::string init = "paper";
  double spacing = 1.0;
};

struct MeasurementSpec {
  long shots = 10000;
  double confidence = 0.95;
  int layout = 1;
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  StateSpec state{};
  double eta = 0.0;
  PointSpec points{};
  /// Tail weight above which a state is rejected as badly truncated.
  double truncation_tolerance = 1e-8;
  OptimizerConfig optimizer{.restarts = 1};
  GridConfig grid{};
  MeasurementSpec measurement{};
  std::string figure = "fig2";
  /// Loss-panel family for fig5.
  std::string family = "fock-bell";
  ReproduceConfig reproduce{};
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

namespace detail {

// Rejects keys outside `allowed` so typos fail loudly.
inline void check_keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items())
    if (!ok.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <typename T>
void read(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

inline void read_complex(const Json& j, const char* key, cplx& out) {
  if (!j.contains(key)) return;
  const Json& v = j.at(key);
  out = v.is_number() ? cplx(v.get<double>(), 0.0) : complex_from_json(v);
}

inline Json optimizer_json(const OptimizerConfig& c) {
  return Json{{"gamma", c.gamma},         {"max_iters", c.max_iters}, {"grad_norm_threshold", c.grad_norm_threshold},
              {"backtracking", c.backtracking}, {"restarts", c.restarts}, {"jitter", c.jitter},
              {"max_step", c.max_step}};
}

inline void read_optimizer(const Json& j, OptimizerConfig& c, const std::string& where) {
  check_keys(j, where, {"gamma", "max_iters", "grad_norm_threshold", "backtracking", "restarts", "jitter", "max_step"});
  read(j, "gamma", c.gamma);
  read(j, "max_iters", c.max_iters);
  read(j, "grad_norm_threshold", c.grad_norm_threshold);
  read(j, "backtracking", c.backtracking);
  read(j, "restarts", c.restarts);
  read(j, "jitter", c.jitter);
  read(j, "max_step", c.max_step);
  if (!(c.gamma > 0.0) || c.max_iters < 0 || c.restarts < 1 || !(c.backtracking > 0.0 && c.backtracking <= 1.0) ||
      c.grad_norm_threshold < 0.0 || c.jitter < 0.0 || c.max_step < 0.0)
    throw ConfigError("invalid " + where);
}

}  // namespace detail

/// Every field, defaults included.
inline Json to_json(const RunConfig& c) {
  Json alphas = Json::array();
  for (cplx a : c.state.alphas) alphas.push_back(to_json(a));
  const ReproduceConfig& rp = c.reproduce;
  return Json{
      {"schema_version", c.schema_version},
      {"state",
       {{"kind", c.state.kind},
        {"theta", c.state.theta},
        {"r", c.state.r},
        {"beta", to_json(c.state.beta)},
        {"levels", c.state.levels},
        {"alphas", alphas},
        {"mean_photons", c.state.mean_photons},
        {"cutoff", c.state.cutoff}}},
      {"eta", c.eta},
      {"points",
       {{"source", c.points.source},
        {"path", c.points.path},
        {"n", c.points.n},
        {"init", c.points.init},
        {"spacing", c.points.spacing}}},
      {"truncation_tolerance", c.truncation_tolerance},
      {"optimizer", detail::optimizer_json(c.optimizer)},
      {"grid",
       {{"half_width", c.grid.half_width},
        {"points", c.grid.points},
        {"refine", c.grid.refine},
        {"tolerance", c.grid.tolerance},
        {"resolve_fringes", c.grid.resolve_fringes}}},
      {"measurement",
       {{"shots", c.measurement.shots}, {"confidence", c.measurement.confidence}, {"layout", c.measurement.layout}}},
      {"figure", c.figure},
      {"family", c.family},
      {"reproduce",
       {{"points", rp.points},
        {"negativity_volume", rp.negativity_volume},
        {"large_n", rp.large_n},
        {"large_n_stride", rp.large_n_stride},
        {"large_n_optimizer", detail::optimizer_json(rp.large_n_optimizer)},
        {"etas", rp.etas},
        {"naive_n_fock", rp.naive_n_fock},
        {"naive_n_cat", rp.naive_n_cat},
        {"reopt_n_fock", rp.reopt_n_fock},
        {"reopt_n_cat", rp.reopt_n_cat},
        {"cat_beta", rp.cat_beta},
        {"optimizer", detail::optimizer_json(rp.optimizer)},
        {"reopt_optimizer", detail::optimizer_json(rp.reopt_optimizer)},
        {"lattice_spacings", rp.lattice_spacings}}},
      {"seed", c.seed},
      {"threads", c.threads}};
}

inline RunConfig parse_config(const Json& j) {
  RunConfig c;
  try {
    detail::check_keys(j, "config",
                       {"schema_version", "state", "eta", "points", "truncation_tolerance", "optimizer", "grid",
                        "measurement", "figure", "family", "reproduce", "seed", "threads"});
    if (!j.contains("schema_version")) throw ConfigError("schema_version is required");
    c.schema_version = j.at("schema_version").get<int>();
    if (c.schema_version != kSchemaVersion)
      throw ConfigError("unsupported schema_version " + std::to_string(c.schema_version));
    if (j.contains("state")) {
      const Json& s = j.at("state");
      detail::check_keys(s, "state", {"kind", "theta", "r", "beta", "levels", "alphas", "mean_photons", "cutoff"});
      detail::read(s, "kind", c.state.kind);
      detail::read(s, "theta", c.state.theta);
      detail::read(s, "r", c.state.r);
      detail::read_complex(s, "beta", c.state.beta);
      detail::read(s, "levels", c.state.levels);
      detail::read(s, "mean_photons", c.state.mean_photons);
      detail::read(s, "cutoff", c.state.cutoff);
      if (s.contains("alphas"))
        for (const Json& a : s.at("alphas")) c.state.alphas.push_back(a.is_number() ? cplx(a.get<double>()) : complex_from_json(a));
      if (c.state.cutoff < 0) throw ConfigError("state.cutoff must be non-negative");
    }
    detail::read(j, "eta", c.eta);
    if (!(c.eta >= 0.0 && c.eta <= 1.0)) throw ConfigError("eta must lie in [0, 1]");
    if (j.contains("points")) {
      const Json& p = j.at("points");
      detail::check_keys(p, "points", {"source", "path", "n", "init", "spacing"});
      detail::read(p, "source", c.points.source);
      detail::read(p, "path", c.points.path);
      detail::read(p, "n", c.points.n);
      detail::read(p, "init", c.points.init);
      detail::read(p, "spacing", c.points.spacing);
    }
    if (c.points.source != "paper" && c.points.source != "file" && c.points.source != "optimize")
      throw ConfigError("points.source must be paper, file or optimize");
    if (c.points.source == "file" && c.points.path.empty()) throw ConfigError("points.path is required for source = file");
    if (c.points.n < 2) throw ConfigError("points.n must be at least 2");
    detail::read(j, "truncation_tolerance", c.truncation_tolerance);
    if (!(c.truncation_tolerance > 0.0)) throw ConfigError("truncation_tolerance must be positive");
    if (j.contains("optimizer")) detail::read_optimizer(j.at("optimizer"), c.optimizer, "optimizer");
    if (j.contains("grid")) {
      const Json& g = j.at("grid");
      detail::check_keys(g, "grid", {"half_width", "points", "refine", "tolerance", "resolve_fringes"});
      detail::read(g, "half_width", c.grid.half_width);
      detail::read(g, "points", c.grid.points);
      detail::read(g, "refine", c.grid.refine);
      detail::read(g, "tolerance", c.grid.tolerance);
      detail::read(g, "resolve_fringes", c.grid.resolve_fringes);
      if (c.grid.half_width < 0.0 || c.grid.points < 3 || c.grid.points % 2 == 0 || c.grid.refine < 1)
        throw ConfigError("invalid grid");
    }
    if (j.contains("measurement")) {
      const Json& m = j.at("measurement");
      detail::check_keys(m, "measurement", {"shots", "confidence", "layout"});
      detail::read(m, "shots", c.measurement.shots);
      detail::read(m, "confidence", c.measurement.confidence);
      detail::read(m, "layout", c.measurement.layout);
    }
    if (c.measurement.shots < 1 || !(c.measurement.confidence > 0.0 && c.measurement.confidence < 1.0) ||
        (c.measurement.layout != 1 && c.measurement.layout != 2))
      throw ConfigError("invalid measurement");
    detail::read(j, "figure", c.figure);
    if (c.figure != "fig2" && c.figure != "fig3" && c.figure != "fig4" && c.figure != "fig5")
      throw ConfigError("figure must be fig2, fig3, fig4 or fig5");
    detail::read(j, "family", c.family);
    if (j.contains("reproduce")) {
      const Json& r = j.at("reproduce");
      ReproduceConfig& rp = c.reproduce;
      detail::check_keys(r, "reproduce",
                         {"points", "negativity_volume", "large_n", "large_n_stride", "large_n_optimizer", "etas",
                          "naive_n_fock", "naive_n_cat", "reopt_n_fock", "reopt_n_cat", "cat_beta", "optimizer",
                          "reopt_optimizer", "lattice_spacings"});
      detail::read(r, "points", rp.points);
      detail::read(r, "negativity_volume", rp.negativity_volume);
      detail::read(r, "large_n", rp.large_n);
      detail::read(r, "large_n_stride", rp.large_n_stride);
      detail::read(r, "etas", rp.etas);
      detail::read(r, "naive_n_fock", rp.naive_n_fock);
      detail::read(r, "naive_n_cat", rp.naive_n_cat);
      detail::read(r, "reopt_n_fock", rp.reopt_n_fock);
      detail::read(r, "reopt_n_cat", rp.reopt_n_cat);
      detail::read(r, "cat_beta", rp.cat_beta);
      detail::read(r, "lattice_spacings", rp.lattice_spacings);
      if (r.contains("large_n_optimizer")) detail::read_optimizer(r.at("large_n_optimizer"), rp.large_n_optimizer, "reproduce.large_n_optimizer");
      if (r.contains("optimizer")) detail::read_optimizer(r.at("optimizer"), rp.optimizer, "reproduce.optimizer");
      if (r.contains("reopt_optimizer")) detail::read_optimizer(r.at("reopt_optimizer"), rp.reopt_optimizer, "reproduce.reopt_optimizer");
      for (double e : rp.etas)
        if (!(e >= 0.0 && e <= 1.0)) throw ConfigError("reproduce.etas must lie in [0, 1]");
      if (rp.points < 0 || rp.large_n < 0 || rp.large_n_stride < 0 || rp.naive_n_fock < 2 || rp.naive_n_cat < 2 ||
          rp.reopt_n_fock < 2 || rp.reopt_n_cat < 2 || rp.lattice_spacings.empty())
        throw ConfigError("invalid reproduce settings");
    }
    detail::read(j, "seed", c.seed);
    detail::read(j, "threads", c.threads);
    if (c.threads < 1) throw ConfigError("threads must be at least 1");
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  c.optimizer.seed = c.seed;
  c.optimizer.threads = c.threads;
  c.grid.threads = c.threads;
  c.reproduce.threads = c.threads;
  c.reproduce.grid = c.grid;
  return c;
}

inline RunConfig load_config(const std::string& path) {
  Json j;
  try {
    j = read_json_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return parse_config(j);
}

using AnyState = std::variant<PureState, DensityOperator>;

inline int state_modes(const AnyState& s) {
  return std::visit([](const auto& x) { return x.num_modes(); }, s);
}

inline double state_tail_mass(const AnyState& s) {
  return std::visit([](const auto& x) { return x.tail_mass(); }, s);
}

inline CharacteristicFunction make_cf(const AnyState& s) {
  return std::visit([](const auto& x) { return CharacteristicFunction(x); }, s);
}

/// Builds the configured state, applies loss and the cutoff override.
inline AnyState make_state(const RunConfig& c) {
  const StateSpec& s = c.state;
  std::optional<PureState> psi;
  std::optional<DensityOperator> rho;
  try {
    if (s.kind == "vacuum") psi = states::vacuum(s.levels.empty() ? 1 : static_cast<int>(s.levels.size()));
    else if (s.kind == "fock") psi = states::fock(s.levels.empty() ? std::vector<int>{1} : s.levels);
    else if (s.kind == "coherent") psi = states::coherent(s.alphas.empty() ? std::vector<cplx>{s.beta} : s.alphas);
    else if (s.kind == "thermal") rho = states::thermal(s.mean_photons.empty() ? std::vector<double>{1.0} : s.mean_photons);
    else if (s.kind == "squeezed-vacuum") psi = states::squeezed_vacuum(s.r);
    else if (s.kind == "tmsv") psi = states::tmsv(s.r);
    else if (s.kind == "cat1") psi = states::cat1(s.beta);
    else if (s.kind == "fock-bell") psi = states::fock_bell(s.theta);
    else if (s.kind == "ps-tmsv") psi = states::ps_tmsv(s.r);
    else if (s.kind == "cat2") psi = states::cat2(s.beta);
    else throw ConfigError("unknown state kind '" + s.kind + "'");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("state: ") + e.what());
  }
  if (s.cutoff > 0) {
    const int modes = psi ? psi->num_modes() : rho->num_modes();
    const FockSpace to(std::vector<int>(static_cast<std::size_t>(modes), s.cutoff));
    if (psi) psi = resize(*psi, to, c.truncation_tolerance);
    else rho = resize(*rho, to, c.truncation_tolerance);
  }
  AnyState out = psi ? AnyState(*psi) : AnyState(*rho);
  const double tail = state_tail_mass(out);
  if (tail > c.truncation_tolerance) throw TruncationError("state tail mass " + std::to_string(tail) + " exceeds tolerance");
  if (c.eta > 0.0) {
    std::vector<int> modes;
    for (int m = 0; m < state_modes(out); ++m) modes.push_back(m);
    out = std::visit([&](const auto& x) { return apply_loss(x, LossChannel(c.eta, modes)); }, out);
  }
  return out;
}

/// Closed-form point sets for the families that have one.
inline PointList paper_points(const StateSpec& s) {
  if (s.kind == "fock-bell") return fock_points(s.theta);
  if (s.kind == "cat2") return cat_points(s.beta);
  if (s.kind == "ps-tmsv") return squeezed_points(kPi / 4.0, s.r);
  throw ConfigError("no closed-form points for state kind '" + s.kind + "'");
}

/// Points for the witness and optimize commands; `cf` scores lattice seeds.
inline PointList seed_points(const RunConfig& c, const CharacteristicFunction& cf) {
  const PointSpec& p = c.points;
  const int party_modes = cf.num_modes() == 1 ? 1 : cf.num_modes() / 2;
  if (p.source == "file") {
    Json j;
    try {
      j = read_json_file(p.path);
      return points_from_json(j.is_object() ? j.at("points") : j);
    } catch (const std::exception& e) {
      throw ConfigError("points file: " + std::string(e.what()));
    }
  }
  if (p.source == "paper" || p.init == "paper") return paper_points(c.state);
  InitParams ip;
  ip.theta = c.state.theta;
  ip.beta = c.state.beta;
  ip.r = c.state.r;
  ip.spacing = p.spacing;
  ip.mean_photons = cf.mean_photons(0);
  if (p.init == "lattice") return heuristic_init(Family::lattice, p.n, ip, party_modes);
  if (p.init == "ring" || p.init == "generic") return heuristic_init(Family::generic, p.n, ip, party_modes);
  throw ConfigError("points.init must be paper, lattice, ring or generic");
}

}  // namespace ecdw
