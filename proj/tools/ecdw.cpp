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


// ecdw command-line driver. Exit codes: 0 ran (whatever the certification
// outcome), 1 internal error, 2 configuration error, 3 truncation failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ecdw/config.hpp"

namespace fs = std::filesystem;
using namespace ecdw;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Common {
  std::string config_path;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

RunConfig resolve(const Common& c) {
  Json j = c.config_path.empty() ? Json{{"schema_version", kSchemaVersion}} : Json();
  if (!c.config_path.empty()) {
    try {
      j = read_json_file(c.config_path);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (c.seed) j["seed"] = *c.seed;
  if (c.threads) j["threads"] = *c.threads;
  return parse_config(j);
}

fs::path out_dir(const Common& c) {
  fs::path dir(c.out);
  fs::create_directories(dir);
  return dir;
}

Json metadata(const char* command, const RunConfig& cfg) {
  return Json{{"tool", "ecdw"}, {"version", kVersion}, {"command", command}, {"config", to_json(cfg)}};
}

Json state_summary(const AnyState& s) {
  const CharacteristicFunction cf = make_cf(s);
  const FockSpace space = std::visit([](const auto& x) { return x.space(); }, s);
  Json mean = Json::array();
  for (int m = 0; m < space.num_modes(); ++m) mean.push_back(cf.mean_photons(m));
  Json out{{"modes", space.num_modes()},
           {"cutoffs", std::vector<int>(space.cutoffs().begin(), space.cutoffs().end())},
           {"dimension", space.dimension()},
           {"tail_mass", state_tail_mass(s)},
           {"pure", std::holds_alternative<PureState>(s)},
           {"mean_photons", mean}};
  if (const auto* rho = std::get_if<DensityOperator>(&s)) out["purity"] = rho->purity();
  if (space.num_modes() == 2) {
    if (const auto* psi = std::get_if<PureState>(&s)) {
      const SchmidtSpectrum sp = schmidt(*psi);
      std::vector<double> p;
      for (double v : sp.p)
        if (v > 1e-14) p.push_back(v);
      out["schmidt"] = p;
      out["E_SEP"] = e_sep(sp);
      out["E_PPT"] = e_ppt(sp);
    } else {
      out["PT_negativity_conjectured_E_PPT"] = pt_negativity(std::get<DensityOperator>(s));
    }
  }
  return out;
}

// Optimizer objective: C for one-mode states, C2 with identity pairing otherwise.
WitnessObjective objective_for(const CharacteristicFunction& cf) {
  if (cf.num_modes() == 1) return WitnessObjective(cf);
  if (cf.num_modes() % 2 != 0) throw ConfigError("two-party witness needs an even mode count");
  return WitnessObjective(cf, SymplecticMap::identity(cf.num_modes() / 2));
}

void check_point_modes(const PointList& pts, const CharacteristicFunction& cf) {
  const Index want = cf.num_modes() == 1 ? 1 : cf.num_modes() / 2;
  for (const ModeVector& p : pts)
    if (p.size() != want) throw ConfigError("points have " + std::to_string(p.size()) + " modes, expected " + std::to_string(want));
  if (pts.size() < 2) throw ConfigError("at least two points are required");
}

int cmd_witness(const Common& c) {
  const RunConfig cfg = resolve(c);
  const AnyState state = make_state(cfg);
  const CharacteristicFunction cf = make_cf(state);
  PointList pts = seed_points(cfg, cf);
  check_point_modes(pts, cf);
  const WitnessObjective obj = objective_for(cf);
  if (cfg.points.source == "optimize") pts = optimize(obj, pts, cfg.optimizer).points;
  const WitnessMatrix m = obj.matrix(pts);
  const WitnessResult r = evaluate(m);
  const fs::path dir = out_dir(c);
  Json doc = metadata("witness", cfg);
  doc["state"] = state_summary(state);
  doc["points"] = to_json(pts);
  doc["result"] = to_json(r);
  doc["matrix"] = to_json(m);
  write_json_file((dir / "witness.json").string(), doc);
  std::printf("kind=%s N=%zu lambda_min=%.12e value=%.12e certified=%s\n", to_string(m.kind), pts.size(),
              r.lambda_min, r.value, r.certified ? "true" : "false");
  return 0;
}

int cmd_reproduce(const Common& c, const std::string& figure, const std::string& family) {
  Common cc = c;
  RunConfig cfg = resolve(cc);
  if (!figure.empty()) cfg.figure = figure;
  if (!family.empty()) cfg.family = family;
  if (cfg.figure != "fig2" && cfg.figure != "fig3" && cfg.figure != "fig4" && cfg.figure != "fig5")
    throw ConfigError("figure must be fig2, fig3, fig4 or fig5");
  const fs::path dir = out_dir(c);
  std::vector<std::pair<std::string, Table>> panels;
  if (cfg.figure == "fig2") panels.emplace_back("fig2.csv", reproduce_fig2(cfg.reproduce));
  if (cfg.figure == "fig3") panels.emplace_back("fig3.csv", reproduce_fig3(cfg.reproduce));
  if (cfg.figure == "fig4") panels.emplace_back("fig4.csv", reproduce_fig4(cfg.reproduce));
  if (cfg.figure == "fig5") {
    StateFamily f;
    try {
      f = parse_family(cfg.family);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    if (f == StateFamily::ps_tmsv) throw ConfigError("fig5 covers fock-bell and cat2");
    panels.emplace_back("fig5_" + cfg.family + ".csv", reproduce_fig5(f, cfg.reproduce));
  }
  Json doc = metadata("reproduce", cfg);
  Json files = Json::array();
  for (const auto& [name, table] : panels) {
    std::ofstream os(dir / name);
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
    write_csv(os, table);
    files.push_back(name);
    std::printf("wrote %s (%zu rows)\n", (dir / name).string().c_str(), table.rows.size());
  }
  doc["files"] = files;
  write_json_file((dir / (cfg.figure + "_metadata.json")).string(), doc);
  return 0;
}

int cmd_optimize(const Common& c) {
  RunConfig cfg = resolve(c);
  const AnyState state = make_state(cfg);
  const CharacteristicFunction cf = make_cf(state);
  const PointList init = seed_points(cfg, cf);
  check_point_modes(init, cf);
  const WitnessObjective obj = objective_for(cf);
  const OptimizeResult r = optimize(obj, init, cfg.optimizer);
  const fs::path dir = out_dir(c);
  Json doc = metadata("optimize", cfg);
  doc["initial_points"] = to_json(init);
  doc["points"] = to_json(r.points);
  doc["result"] = to_json(r.result);
  doc["converged"] = r.trace.converged;
  doc["restart"] = r.trace.restart;
  write_json_file((dir / "points.json").string(), doc);
  std::ofstream trace(dir / "trace.csv");
  write_csv(trace, r.trace);
  std::printf("N=%zu lambda_min=%.12e value=%.12e iterations=%zu\n", r.points.size(), r.result.lambda_min,
              r.result.value, r.trace.steps.size());
  return 0;
}

int cmd_measure(const Common& c) {
  const RunConfig cfg = resolve(c);
  const AnyState state = make_state(cfg);
  const CharacteristicFunction cf = make_cf(state);
  if (cf.num_modes() != 2) throw ConfigError("measure needs a two-mode state");
  PointList pts = seed_points(cfg, cf);
  check_point_modes(pts, cf);
  if (cfg.points.source == "optimize") pts = optimize(objective_for(cf), pts, cfg.optimizer).points;
  const PhaseSpacePointSet xi = pair_points(pts, SymplecticMap::identity(1));
  const auto layout = cfg.measurement.layout == 1 ? QubitLayout::one_qubit : QubitLayout::two_qubit;
  const MeasurementPlan plan = make_plan(xi, layout, cfg.measurement.shots, cfg.measurement.confidence, cfg.seed);
  const auto records = sample(plan, cf, cfg.threads);
  const WitnessMatrix m = assemble_measured_witness(records, plan);
  const WitnessResult r = evaluate(m);
  const fs::path dir = out_dir(c);
  std::ofstream jl(dir / "records.jsonl");
  write_jsonl(jl, records);
  Json doc = metadata("measure", cfg);
  doc["points"] = to_json(pts);
  doc["settings_raw"] = plan.raw_setting_count();
  doc["settings_dedup"] = plan.dedup_setting_count();
  doc["exact"] = to_json(evaluate(build_C2(cf, xi)));
  doc["result"] = to_json(r);
  doc["matrix"] = to_json(m);
  write_json_file((dir / "measure.json").string(), doc);
  std::printf("records=%zu lambda_min=%.12e delta=%.12e value=%.12e certified=%s\n", records.size(), r.lambda_min,
              r.delta, r.value, r.certified ? "true" : "false");
  return 0;
}

int cmd_state_info(const Common& c) {
  const RunConfig cfg = resolve(c);
  const AnyState state = make_state(cfg);
  Json doc = metadata("state-info", cfg);
  doc["state"] = state_summary(state);
  write_json_file((out_dir(c) / "state.json").string(), doc);
  std::cout << doc["state"].dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ECD witness of non-Gaussian entanglement"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Common common;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string figure, family;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", common.out, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "random seed (overrides the config)");
    sub->add_option("--threads", threads, "worker threads (overrides the config)")->check(CLI::PositiveNumber);
  };
  auto* witness = app.add_subcommand("witness", "evaluate the witness on a configured state");
  auto* reproduce = app.add_subcommand("reproduce", "write sweep tables for a figure");
  auto* optimize_cmd = app.add_subcommand("optimize", "optimize the phase-space points");
  auto* measure = app.add_subcommand("measure", "simulate finite-shot ECD readout and certify");
  auto* state_info = app.add_subcommand("state-info", "summarize a configured state");
  for (auto* s : {witness, reproduce, optimize_cmd, measure, state_info}) add_common(s);
  reproduce->add_option("--figure", figure, "fig2, fig3, fig4 or fig5");
  reproduce->add_option("--family", family, "fig5 family: fock-bell or cat2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  for (auto* s : app.get_subcommands()) {
    if (s->count("--seed")) common.seed = seed;
    if (s->count("--threads")) common.threads = threads;
  }

  try {
    if (*witness) return cmd_witness(common);
    if (*reproduce) return cmd_reproduce(common, figure, family);
    if (*optimize_cmd) return cmd_optimize(common);
    if (*measure) return cmd_measure(common);
    if (*state_info) return cmd_state_info(common);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const TruncationError& e) {
    std::fprintf(stderr, "truncation failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
