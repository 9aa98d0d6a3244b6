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


#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "ecdw/config.hpp"
#include "ecdw/io.hpp"
#include "ecdw/shot_sim.hpp"

namespace ecdw {
namespace {

ModeVector mv(cplx a) { return ModeVector::Constant(1, a); }

ModeVector cat(const ModeVector& a, const ModeVector& b) {
  ModeVector v(a.size() + b.size());
  v << a, b;
  return v;
}

PhaseSpacePointSet unpaired(const PointList& pts) { return pair_points(pts, SymplecticMap::identity(1)); }

PointList line_points(int n, double spacing) {
  PointList pts;
  for (int k = 0; k < n; ++k) pts.push_back(mv(spacing * k));
  return pts;
}

// ---------------------------------------------------------------------------
// Circuit expectations

TEST(Ecd, ZeroDisplacementReadsOne) {
  const CharacteristicFunction cf(apply_loss(states::fock_bell(0.7), LossChannel(0.2, {0, 1})));
  for (QubitLayout l : {QubitLayout::one_qubit, QubitLayout::two_qubit}) {
    const cplx v = reconstruct(ecd_expectations(cf, mv(0.0), mv(0.0), l), l);
    EXPECT_NEAR(std::abs(v - 1.0), 0.0, 1e-14);
  }
}

TEST(Ecd, VacuumExpectations) {
  const CharacteristicFunction cf(states::vacuum(2));
  const cplx a(0.4, -0.2), b(-0.3, 0.6);
  const double expected = std::exp(-0.5 * (std::norm(a) + std::norm(b)));
  for (QubitLayout l : {QubitLayout::one_qubit, QubitLayout::two_qubit}) {
    const auto e = ecd_expectations(cf, mv(a), mv(b), l);
    for (double x : e) EXPECT_LE(std::abs(x), 1.0 + 1e-12);
    EXPECT_NEAR(std::abs(reconstruct(e, l) - expected), 0.0, 1e-13);
  }
}

TEST(Ecd, LayoutsAgreeWithTheCharacteristicFunction) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g(0.0, 0.8);
  const CharacteristicFunction cf(apply_loss(states::cat2(cplx(1.0, 0.5)), LossChannel(0.15, {0, 1})));
  for (int t = 0; t < 10; ++t) {
    const ModeVector a = mv(cplx(g(rng), g(rng))), b = mv(cplx(g(rng), g(rng)));
    const cplx exact = cf(cat(a, b));
    const cplx one = reconstruct(ecd_expectations(cf, a, b, QubitLayout::one_qubit), QubitLayout::one_qubit);
    const cplx two = reconstruct(ecd_expectations(cf, a, b, QubitLayout::two_qubit), QubitLayout::two_qubit);
    EXPECT_NEAR(std::abs(one - exact), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(two - exact), 0.0, 1e-12);
  }
}

// ---------------------------------------------------------------------------
// Plans and sampling

TEST(Plan, SettingCountsWithAndWithoutSymmetry) {
  const MeasurementPlan line = make_plan(unpaired(line_points(4, 0.5)), QubitLayout::two_qubit, 100, 0.95, 1);
  EXPECT_EQ(line.raw_setting_count(), 2 * 4 * 3);
  EXPECT_EQ(line.settings.size(), 3u);
  EXPECT_EQ(line.dedup_setting_count(), 3 * 4);
  const MeasurementPlan fock = make_plan(unpaired(fock_points(kPi / 4.0)), QubitLayout::one_qubit, 100, 0.95, 1);
  EXPECT_EQ(fock.raw_setting_count(), 1 * 4 * 3);
  EXPECT_EQ(fock.pair_setting.size(), 6u);
  EXPECT_LE(fock.settings.size(), 6u);
}

TEST(Plan, RejectsBadArguments) {
  const auto xi = unpaired(fock_points(0.5));
  EXPECT_THROW(make_plan(xi, QubitLayout::one_qubit, 0, 0.95, 1), std::invalid_argument);
  EXPECT_THROW(make_plan(xi, QubitLayout::one_qubit, 10, 1.0, 1), std::invalid_argument);
}

TEST(Sample, HoeffdingRadius) {
  EXPECT_NEAR(hoeffding_radius(5000, 0.95), 0.0384128, 1e-6);
  EXPECT_NEAR(hoeffding_radius(20000, 0.95), 0.5 * hoeffding_radius(5000, 0.95), 1e-15);
}

TEST(Sample, IdealRecordsReproduceTheExactMatrix) {
  const PureState psi = states::fock_bell(0.3 * kPi);
  const PhaseSpacePointSet xi = unpaired(fock_points(0.3 * kPi));
  const CharacteristicFunction cf(psi);
  for (QubitLayout l : {QubitLayout::one_qubit, QubitLayout::two_qubit}) {
    const MeasurementPlan plan = make_plan(xi, l, 1, 0.95, 0);
    const WitnessMatrix m = assemble_measured_witness(ideal_records(plan, cf), plan);
    EXPECT_LT((m.entries - build_C2(psi, xi).entries).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(m.radii.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_NEAR(evaluate(m).value, certify(psi, xi).value, 1e-12);
  }
}

TEST(Sample, SingleShotsAreSigns) {
  const CharacteristicFunction cf(states::fock_bell(0.4));
  const MeasurementPlan plan = make_plan(unpaired(fock_points(0.4)), QubitLayout::two_qubit, 1, 0.95, 3);
  for (const auto& r : sample(plan, cf)) EXPECT_TRUE(r.estimator == 1.0 || r.estimator == -1.0);
}

TEST(Sample, SeededAndThreadIndependent) {
  const CharacteristicFunction cf(states::cat2(1.5));
  const MeasurementPlan plan = make_plan(unpaired(cat_points(1.5)), QubitLayout::one_qubit, 1000, 0.95, 42);
  const auto a = sample(plan, cf, 1);
  const auto b = sample(plan, cf, 3);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].plus_count, b[k].plus_count);
  MeasurementPlan other = plan;
  other.seed = 43;
  const auto c = sample(other, cf);
  bool differs = false;
  for (std::size_t k = 0; k < a.size(); ++k) differs |= a[k].plus_count != c[k].plus_count;
  EXPECT_TRUE(differs);
}

TEST(Sample, ManyShotsConverge) {
  const CharacteristicFunction cf(states::vacuum(2));
  const MeasurementPlan plan = make_plan(unpaired(line_points(4, 0.6)), QubitLayout::two_qubit, 1000000, 0.95, 5);
  const auto ideal = ideal_records(plan, cf);
  const auto got = sample(plan, cf);
  for (std::size_t k = 0; k < got.size(); ++k) EXPECT_LE(std::abs(got[k].estimator - ideal[k].estimator), got[k].radius);
}

TEST(Sample, IntervalsCoverAtTheNominalRate) {
  const CharacteristicFunction cf(states::fock_bell(kPi / 4.0));
  const MeasurementPlan base = make_plan(unpaired(fock_points(kPi / 4.0)), QubitLayout::two_qubit, 2000, 0.95, 0);
  const auto ideal = ideal_records(base, cf);
  long covered = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    MeasurementPlan plan = base;
    plan.seed = seed;
    const auto got = sample(plan, cf);
    for (std::size_t k = 0; k < got.size(); ++k, ++total)
      covered += std::abs(got[k].estimator - ideal[k].estimator) <= got[k].radius;
  }
  EXPECT_GE(double(covered) / double(total), 0.95);
}

TEST(Sample, CertificationNeedsEnoughShots) {
  const PhaseSpacePointSet xi = unpaired(fock_points(kPi / 4.0));
  const CharacteristicFunction cf(states::fock_bell(kPi / 4.0));
  MeasurementPlan plan = make_plan(xi, QubitLayout::one_qubit, 100, 0.95, 11);
  EXPECT_FALSE(evaluate(assemble_measured_witness(sample(plan, cf), plan)).certified);
  plan.shots = 10000000;
  EXPECT_TRUE(evaluate(assemble_measured_witness(sample(plan, cf), plan)).certified);
}

TEST(Sample, CatCertifiesAtTenThousandShots) {
  const CharacteristicFunction cf(states::cat2(2.0));
  MeasurementPlan plan = make_plan(unpaired(cat_points(2.0)), QubitLayout::one_qubit, 10000, 0.95, 7);
  int certified = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    plan.seed = seed;
    certified += evaluate(assemble_measured_witness(sample(plan, cf), plan)).certified;
  }
  EXPECT_GE(certified, 95);
}

TEST(Sample, MissingRecordsAreRejected) {
  const CharacteristicFunction cf(states::fock_bell(0.4));
  const MeasurementPlan plan = make_plan(unpaired(fock_points(0.4)), QubitLayout::one_qubit, 10, 0.95, 0);
  auto records = ideal_records(plan, cf);
  records.pop_back();
  EXPECT_THROW(assemble_measured_witness(records, plan), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Serialization

TEST(Io, RecordsRoundTrip) {
  const CharacteristicFunction cf(states::fock_bell(0.4));
  const MeasurementPlan plan = make_plan(unpaired(fock_points(0.4)), QubitLayout::two_qubit, 500, 0.9, 8);
  const auto records = sample(plan, cf);
  std::stringstream ss;
  write_jsonl(ss, records);
  const auto back = read_jsonl(ss);
  ASSERT_EQ(back.size(), records.size());
  for (std::size_t k = 0; k < back.size(); ++k) {
    EXPECT_EQ(back[k].setting, records[k].setting);
    EXPECT_EQ(back[k].basis, records[k].basis);
    EXPECT_EQ(back[k].plus_count, records[k].plus_count);
    EXPECT_EQ(back[k].estimator, records[k].estimator);
    EXPECT_EQ(back[k].radius, records[k].radius);
  }
}

TEST(Io, RejectsOutOfRangeRecords) {
  Json j = to_json(MeasurementRecord{0, "x", 10, 5, 0.0, 0.1});
  EXPECT_NO_THROW(record_from_json(j));
  j["estimator"] = 1.5;
  EXPECT_THROW(record_from_json(j), std::invalid_argument);
  j["estimator"] = 0.0;
  j["radius"] = -0.1;
  EXPECT_THROW(record_from_json(j), std::invalid_argument);
}

TEST(Io, NumericRoundTrips) {
  const PointList pts = cat_points(cplx(1.2, -0.4));
  const PointList back = points_from_json(Json::parse(to_json(pts).dump()));
  ASSERT_EQ(back.size(), pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) EXPECT_EQ(back[k], pts[k]);
  const SymplecticMap s = squeezing_map(0.3) * phase_map(0.7);
  EXPECT_EQ(symplectic_from_json(Json::parse(to_json(s).dump())).matrix(), s.matrix());
  const Matrix m = build_C(states::fock({1}), line_points(3, 0.7)).entries;
  EXPECT_EQ(matrix_from_json(Json::parse(to_json(m).dump())), m);
}

// ---------------------------------------------------------------------------
// Configuration

TEST(Config, DefaultsRoundTrip) {
  const RunConfig c = parse_config(Json{{"schema_version", 1}});
  EXPECT_EQ(c.state.kind, "fock-bell");
  EXPECT_EQ(c.measurement.shots, 10000);
  EXPECT_EQ(to_json(parse_config(to_json(c))).dump(), to_json(c).dump());
}

TEST(Config, SeedAndThreadsPropagate) {
  const RunConfig c = parse_config(Json{{"schema_version", 1}, {"seed", 17}, {"threads", 2}});
  EXPECT_EQ(c.optimizer.seed, 17u);
  EXPECT_EQ(c.optimizer.threads, 2u);
  EXPECT_EQ(c.reproduce.threads, 2u);
}

TEST(Config, RejectsInvalidInput) {
  EXPECT_THROW(parse_config(Json::object()), ConfigError);
  EXPECT_THROW(parse_config(Json{{"schema_version", 2}}), ConfigError);
  EXPECT_THROW(parse_config(Json{{"schema_version", 1}, {"etta", 0.1}}), ConfigError);
  EXPECT_THROW(parse_config(Json{{"schema_version", 1}, {"eta", 1.5}}), ConfigError);
  EXPECT_THROW(parse_config(Json{{"schema_version", 1}, {"eta", "x"}}), ConfigError);
  EXPECT_THROW(parse_config(Json{{"schema_version", 1}, {"state", {{"kind", "fock"}, {"cuttof", 4}}}}), ConfigError);
  EXPECT_THROW(parse_config(Json{{"schema_version", 1}, {"measurement", {{"layout", 3}}}}), ConfigError);
  EXPECT_THROW(parse_config(Json{{"schema_version", 1}, {"points", {{"source", "file"}}}}), ConfigError);
  EXPECT_THROW(parse_config(Json{{"schema_version", 1}, {"grid", {{"points", 100}}}}), ConfigError);
}

TEST(Config, MakeState) {
  RunConfig c = parse_config(Json{{"schema_version", 1}, {"eta", 0.1}});
  const AnyState lossy = make_state(c);
  ASSERT_TRUE(std::holds_alternative<DensityOperator>(lossy));
  EXPECT_NEAR(std::get<DensityOperator>(lossy).matrix().trace().real(), 1.0, 1e-12);
  c = parse_config(Json{{"schema_version", 1}, {"state", {{"kind", "coherent"}, {"beta", 2.0}, {"cutoff", 8}}}});
  EXPECT_THROW(make_state(c), TruncationError);
  c = parse_config(Json{{"schema_version", 1}, {"state", {{"kind", "squid"}}}});
  EXPECT_THROW(make_state(c), ConfigError);
  c = parse_config(Json{{"schema_version", 1}, {"state", {{"kind", "cat2"}, {"beta", {1.0, 0.5}}}}});
  EXPECT_EQ(paper_points(c.state), cat_points(cplx(1.0, 0.5)));
}

}  // namespace
}  // namespace ecdw
