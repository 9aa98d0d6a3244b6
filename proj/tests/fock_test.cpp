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
#include <unsupported/Eigen/MatrixFunctions>

#include "ecdw/gaussian.hpp"
#include "ecdw/measures.hpp"
#include "ecdw/noise.hpp"
#include "ecdw/optimizer.hpp"
#include "ecdw/states.hpp"

namespace ecdw {
namespace {

Matrix dense_expm_displacement(int cutoff, cplx xi) {
  const Matrix a = annihilation(cutoff);
  return (xi * a.adjoint() - std::conj(xi) * a).exp();
}

Vector random_vector(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector v(n);
  for (Index k = 0; k < n; ++k) v(k) = cplx(g(rng), g(rng));
  return v.normalized();
}

// Random vector supported on states with fewer than `below` photons in total.
Vector random_vector_below(const FockSpace& space, int below, std::mt19937_64& rng) {
  Vector v = random_vector(space.dimension(), rng);
  for (Index k = 0; k < v.size(); ++k) {
    int total = 0;
    for (int m = 0; m < space.num_modes(); ++m) total += space.level(k, m);
    if (total >= below) v(k) = 0.0;
  }
  return v.normalized();
}

DensityOperator random_mixed(const FockSpace& space, int rank, std::mt19937_64& rng, int below = 1 << 20) {
  Matrix cols(space.dimension(), rank);
  for (int k = 0; k < rank; ++k) cols.col(k) = random_vector_below(space, below, rng);
  cols /= cols.norm();
  return DensityOperator::from_columns(space, cols);
}

double fidelity(const PureState& a, const PureState& b) { return std::norm(a.amplitudes().dot(b.amplitudes())); }

double min_eigenvalue(const Matrix& m) { return Eigen::SelfAdjointEigenSolver<Matrix>(m).eigenvalues().minCoeff(); }

// ---------------------------------------------------------------------------
// Displacement

TEST(Displacement, ZeroIsIdentity) {
  EXPECT_LT((displacement_1m(20, 0.0) - Matrix::Identity(20, 20)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Displacement, VacuumOverlapMatchesClosedForm) {
  const Matrix d = displacement_1m(40, cplx(1.0, 0.5));
  EXPECT_NEAR(d(0, 0).real(), std::exp(-0.625), 1e-14);
  EXPECT_NEAR(d(0, 0).imag(), 0.0, 1e-15);
  EXPECT_NEAR(std::exp(-0.625), 0.535261, 1e-6);
}

TEST(Displacement, FirstExcitedOverlap) {
  const Matrix d = displacement_1m(20, 0.3);
  EXPECT_NEAR(std::abs(d(1, 0) - cplx(0.3 * std::exp(-0.045))), 0.0, 1e-15);
}

TEST(Displacement, AgreesWithDenseExponential) {
  // The exponential at a generous cutoff is exact in the low block.
  for (cplx xi : {cplx(0.4, -0.2), cplx(1.0, 0.5), cplx(-1.5, 1.1)}) {
    const Matrix ref = dense_expm_displacement(120, xi).topLeftCorner(40, 40);
    EXPECT_LT((displacement_1m(40, xi) - ref).cwiseAbs().maxCoeff(), 1e-12) << xi;
  }
}

TEST(Displacement, CompositionLaw) {
  const cplx a(0.7, -0.3), b(-0.2, 0.9);
  const Matrix lhs = (displacement_1m(200, a) * displacement_1m(200, b)).topLeftCorner(30, 30);
  const cplx phase = std::exp(0.5 * (a * std::conj(b) - std::conj(a) * b));
  const Matrix rhs = phase * displacement_1m(30, a + b);
  EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Displacement, LowBlockStaysAccurateAtLargeAmplitude) {
  const cplx xi(15.0, 4.5);
  const Matrix half = displacement_1m(700, xi / 2.0);
  const Matrix ref = (half * half).topLeftCorner(60, 60);
  EXPECT_LT((displacement_1m(60, xi) - ref).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Displacement, ColumnNormsFlagTruncation) {
  EXPECT_LT(displacement_column_deviation(displacement_1m(60, 1.0), 30), 1e-12);
  EXPECT_GT(displacement_column_deviation(displacement_1m(12, 3.0)), 1e-3);
}

TEST(Displacement, MultimodeFactorizes) {
  const FockSpace space = FockSpace::uniform(2, 10);
  const std::vector<cplx> xi{cplx(0.3, 0.1), 0.0};
  const Matrix d = multimode_displacement(space, xi);
  EXPECT_LT((d - kron(displacement_1m(10, xi[0]), Matrix::Identity(10, 10))).cwiseAbs().maxCoeff(), 1e-15);
  const std::vector<cplx> both{cplx(0.3, 0.1), cplx(-0.5, 0.2)};
  const cplx vac = multimode_displacement(space, both)(0, 0);
  EXPECT_NEAR(vac.real(), std::exp(-0.5 * (std::norm(both[0]) + std::norm(both[1]))), 1e-14);
  const std::vector<cplx> zero{0.0, 0.0};
  EXPECT_LT((multimode_displacement(space, zero) - Matrix::Identity(100, 100)).cwiseAbs().maxCoeff(), 1e-15);
}

// ---------------------------------------------------------------------------
// Squeezing and passive gates

TEST(Squeeze, VacuumOverlaps) {
  const Matrix s = squeeze_1m(40, 0.5);
  EXPECT_NEAR(s(0, 0).real(), 1.0 / std::sqrt(std::cosh(0.5)), 1e-12);
  EXPECT_NEAR(s(0, 0).real(), 0.941, 1e-3);
  EXPECT_NEAR((s(2, 0) / s(0, 0)).real(), -std::tanh(0.5) / std::sqrt(2.0), 1e-12);
  EXPECT_LT((squeeze_1m(10, 0.0) - Matrix::Identity(10, 10)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Squeeze, StateMatchesOperatorOnVacuum) {
  const PureState sv = states::squeezed_vacuum(0.8);
  const Index d = sv.space().dimension();
  const Matrix s = squeeze_1m(static_cast<int>(d), 0.8);
  EXPECT_LT((s.col(0) - sv.amplitudes()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Beamsplitter, QuarterTurnOnSinglePhoton) {
  const FockSpace space = FockSpace::uniform(2, 4);
  const Matrix b = beamsplitter(space, 0, 1, kPi / 4.0);
  const Vector out = b.col(space.flat_index(std::vector<int>{1, 0}));
  const double h = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(out(space.flat_index(std::vector<int>{1, 0})) - h), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(out(space.flat_index(std::vector<int>{0, 1})) - h), 0.0, 1e-14);
  EXPECT_NEAR(out.norm(), 1.0, 1e-14);
}

TEST(Beamsplitter, IdentityAndInverse) {
  const int d = 8;
  const FockSpace space = FockSpace::uniform(2, d);
  const Index n = space.dimension();
  EXPECT_LT((beamsplitter(space, 0, 1, 0.0) - Matrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-14);
  const Matrix prod = beamsplitter(space, 0, 1, 0.37) * beamsplitter(space, 0, 1, -0.37);
  // Photon-number blocks with fewer than d photons are untruncated.
  double worst = 0.0;
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c)
      if (space.level(r, 0) + space.level(r, 1) < d && space.level(c, 0) + space.level(c, 1) < d)
        worst = std::max(worst, std::abs(prod(r, c) - (r == c ? 1.0 : 0.0)));
  EXPECT_LT(worst, 1e-12);
}

TEST(TwoModePassive, MatchesGeneratorExponential) {
  // U = exp(theta (a b^dagger - a^dagger b)) realizes B(theta).
  const int d = 9;
  const FockSpace space = FockSpace::uniform(2, d);
  const Matrix a = embed_mode_operator(space, 0, annihilation(d));
  const Matrix b = embed_mode_operator(space, 1, annihilation(d));
  const double theta = 0.61;
  const Matrix gen = theta * (a * b.adjoint() - a.adjoint() * b);
  const Matrix ref = gen.exp();
  // Rows and columns with at most d-1 photons in total are free of truncation.
  double worst = 0.0;
  for (Index r = 0; r < space.dimension(); ++r)
    for (Index c = 0; c < space.dimension(); ++c)
      if (space.level(r, 0) + space.level(r, 1) < d && space.level(c, 0) + space.level(c, 1) < d)
        worst = std::max(worst, std::abs(beamsplitter(space, 0, 1, theta)(r, c) - ref(r, c)));
  EXPECT_LT(worst, 1e-12);
}

TEST(TwoModePassive, HeisenbergRelationForGeneralUnitary) {
  const int d = 8;
  const FockSpace space = FockSpace::uniform(2, d);
  Eigen::Matrix2cd p;
  const cplx e1 = std::polar(1.0, 0.3), e2 = std::polar(1.0, -1.1);
  p << e1 * std::cos(0.8), -e2 * std::sin(0.8), std::conj(e2) * std::sin(0.8), std::conj(e1) * std::cos(0.8);
  const Matrix u = TwoModePassive(space, 0, 1, p).dense();
  const Matrix a = embed_mode_operator(space, 0, annihilation(d));
  const Matrix b = embed_mode_operator(space, 1, annihilation(d));
  const Matrix lhs = u.adjoint() * a * u;
  const Matrix rhs = p(0, 0) * a + p(0, 1) * b;
  double worst = 0.0;
  for (Index r = 0; r < space.dimension(); ++r)
    for (Index c = 0; c < space.dimension(); ++c)
      if (space.level(c, 0) + space.level(c, 1) < d - 1 && space.level(r, 0) + space.level(r, 1) < d - 1)
        worst = std::max(worst, std::abs(lhs(r, c) - rhs(r, c)));
  EXPECT_LT(worst, 1e-12);
}

TEST(TwoModePassive, PreservesNormAtLargeCutoff) {
  std::mt19937_64 rng(11);
  const FockSpace space = FockSpace::uniform(2, 160);
  Matrix cols(space.dimension(), 1);
  cols.col(0) = random_vector_below(space, 160, rng);
  Eigen::Matrix2cd p;
  p << std::cos(1.1), -std::sin(1.1), std::sin(1.1), std::cos(1.1);
  TwoModePassive(space, 0, 1, p).apply(cols);
  EXPECT_NEAR(cols.col(0).norm(), 1.0, 1e-11);
}

// ---------------------------------------------------------------------------
// States

TEST(States, FockProduct) {
  const PureState s = states::fock({1, 0});
  EXPECT_NEAR(std::abs(s.amplitudes()(s.space().flat_index(std::vector<int>{1, 0}))), 1.0, 1e-15);
}

TEST(States, CoherentMatchesDisplacedVacuum) {
  const cplx alpha(1.2, -0.7);
  const PureState c = states::coherent({alpha});
  const int d = c.space().cutoff(0);
  const Vector ref = displacement_1m(d, alpha).col(0);
  EXPECT_NEAR(std::norm(ref.dot(c.amplitudes())), 1.0, 1e-12);
}

TEST(States, CatOverlapWithCoherentPair) {
  const cplx beta = 2.0;
  const PureState cat = states::cat2(beta);
  const int d = cat.space().cutoff(0);
  Vector c1 = displacement_1m(d, beta).col(0);
  const Vector pair = states::detail::kron(c1, c1);
  const double expected_norm = 1.0 / std::sqrt(2.0 * (1.0 + std::exp(-4.0 * std::norm(beta))));
  const cplx overlap = pair.dot(cat.amplitudes());
  EXPECT_NEAR(std::abs(overlap), expected_norm * (1.0 + std::exp(-4.0 * std::norm(beta))), 1e-12);
  // For beta = 2 the cross term is negligible and the overlap is 1/sqrt 2.
  EXPECT_NEAR(std::abs(overlap), 1.0 / std::sqrt(2.0), 1e-6);
}

TEST(States, PhotonSubtractedAtZeroSqueezingIsQuarterTurnState) {
  EXPECT_NEAR(fidelity(states::ps_tmsv(0.0), states::fock_bell(kPi / 4.0)), 1.0, 1e-14);
}

TEST(States, TmsvSchmidtSpectrumIsGeometric) {
  const double r = 0.7, t2 = std::pow(std::tanh(r), 2);
  const SchmidtSpectrum s = schmidt(states::tmsv(r));
  for (int n = 0; n < 6; ++n) EXPECT_NEAR(s.p[static_cast<std::size_t>(n)], (1.0 - t2) * std::pow(t2, n), 1e-12);
}

TEST(States, TruncationTailIsNegligible) {
  for (double r : {0.25, 0.5, 1.0, 1.5}) EXPECT_LT(states::ps_tmsv(r).tail_mass(), 1e-12) << r;
  for (double b : {0.5, 2.0, 4.0}) EXPECT_LT(states::cat2(b).tail_mass(), 1e-12) << b;
}

TEST(PartialTrace, QuarterTurnStateMarginal) {
  const double theta = 0.3;
  const DensityOperator rho = DensityOperator::from_pure(states::fock_bell(theta));
  const DensityOperator a = partial_trace(rho, {1});
  EXPECT_NEAR(a.matrix()(0, 0).real(), std::pow(std::sin(theta), 2), 1e-14);
  EXPECT_NEAR(a.matrix()(1, 1).real(), std::pow(std::cos(theta), 2), 1e-14);
  EXPECT_NEAR(std::abs(a.matrix()(0, 1)), 0.0, 1e-15);
}

TEST(PartialTrace, ProductStateReturnsFactor) {
  std::mt19937_64 rng(3);
  const DensityOperator x = random_mixed(FockSpace({5}), 2, rng), y = random_mixed(FockSpace({4}), 3, rng);
  const DensityOperator xy = tensor(x, y);
  EXPECT_LT((partial_trace(xy, {1}).matrix() - x.matrix()).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT((partial_trace(xy, {0}).matrix() - y.matrix()).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(DensityOperator, ColumnConstructionMatchesDense) {
  std::mt19937_64 rng(5);
  const FockSpace space = FockSpace::uniform(2, 5);
  const DensityOperator rho = random_mixed(space, 3, rng);
  const DensityOperator dense(space, rho.matrix());
  EXPECT_NEAR(rho.purity(), dense.purity(), 1e-13);
  RealVector top(3);
  for (int k = 0; k < 3; ++k) top(k) = dense.spectrum()(dense.spectrum().size() - 3 + k);
  EXPECT_LT((rho.spectrum() - top).cwiseAbs().maxCoeff(), 1e-13);
}

// ---------------------------------------------------------------------------
// Symplectic maps and Gaussian unitaries

TEST(Symplectic, Validation) {
  EXPECT_TRUE(validate(Matrix::Identity(2, 2)).valid);
  EXPECT_NEAR(validate(Matrix::Identity(2, 2)).residual, 0.0, 0.0);
  EXPECT_TRUE(validate(phase_map(0.4).matrix()).valid);
  EXPECT_TRUE(validate(squeezing_map(0.9).matrix()).valid);
  EXPECT_TRUE(validate(beamsplitter_map(0.3).matrix()).valid);
  Matrix twice = 2.0 * Matrix::Identity(2, 2);
  EXPECT_FALSE(validate(twice).valid);
}

TEST(Symplectic, InverseAndComposition) {
  const SymplecticMap m = direct_sum(squeezing_map(0.4), phase_map(1.2)) * beamsplitter_map(0.7);
  EXPECT_LT(((m * m.inverse()).matrix() - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Symplectic, QuadratureFormIsRealSymplectic) {
  const SymplecticMap m = direct_sum(squeezing_map(0.4), phase_map(1.2)) * beamsplitter_map(0.7);
  const RealMatrix s = to_quadrature(m);
  RealMatrix j = RealMatrix::Zero(4, 4);
  for (int k = 0; k < 2; ++k) {
    j(2 * k, 2 * k + 1) = 1.0;
    j(2 * k + 1, 2 * k) = -1.0;
  }
  // Either quadrature ordering convention gives S J S^T = J for one of two forms.
  RealMatrix j2 = RealMatrix::Zero(4, 4);
  j2.topRightCorner(2, 2) = RealMatrix::Identity(2, 2);
  j2.bottomLeftCorner(2, 2) = -RealMatrix::Identity(2, 2);
  const double r1 = (s * j * s.transpose() - j).cwiseAbs().maxCoeff();
  const double r2 = (s * j2 * s.transpose() - j2).cwiseAbs().maxCoeff();
  EXPECT_LT(std::min(r1, r2), 1e-12);
}

TEST(Symplectic, BlochMessiahReassembles) {
  const SymplecticMap m = beamsplitter_map(0.3) * direct_sum(squeezing_map(0.8), squeezing_map(-0.2)) *
                          direct_sum(phase_map(0.5), phase_map(-1.0)) * beamsplitter_map(1.1);
  EXPECT_LT((bloch_messiah(m).compose().matrix() - m.matrix()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(PointSets, PairingMaps) {
  const PointList a{ModeVector::Constant(1, 1.0), ModeVector::Constant(1, cplx(0.0, 0.5))};
  const PhaseSpacePointSet same = pair_points(a, SymplecticMap::identity(1));
  EXPECT_EQ(same.b(0)(0), a[0](0));
  const double r = 0.6;
  const PhaseSpacePointSet sq = pair_points(a, squeezing_map(r));
  EXPECT_NEAR(std::abs(sq.b(0)(0) - cplx(std::cosh(r) + std::sinh(r))), 0.0, 1e-14);
  EXPECT_EQ(pair_points({}, SymplecticMap::identity(1)).size(), 0u);
}

TEST(PointSets, IdentityFrameLeavesPointsAndPhases) {
  const PhaseSpacePointSet xi = pair_points(fock_points(kPi / 4.0), SymplecticMap::identity(1));
  const TransformedPoints t = transform_point_set(xi, GaussianFrame::identity(1));
  for (std::size_t k = 0; k < xi.size(); ++k) EXPECT_LT((t.points.joint(k) - xi.joint(k)).norm(), 1e-15);
  EXPECT_LT((t.phases - Matrix::Ones(4, 4)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(PointSets, DisplacementFrameAddsUnimodularPhases) {
  const PhaseSpacePointSet xi = pair_points(fock_points(kPi / 4.0), SymplecticMap::identity(1));
  GaussianFrame f = GaussianFrame::identity(1);
  f.alpha0_a(0) = cplx(0.3, -0.2);
  f.alpha0_b(0) = cplx(-0.1, 0.4);
  const TransformedPoints t = transform_point_set(xi, f);
  for (std::size_t k = 0; k < xi.size(); ++k) EXPECT_LT((t.points.joint(k) - xi.joint(k)).norm(), 1e-15);
  EXPECT_LT((t.phases.cwiseAbs() - RealMatrix::Ones(4, 4).cast<cplx>()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_GT((t.phases - Matrix::Ones(4, 4)).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(GaussianUnitary, SqueezerOnVacuum) {
  const PureState vac = states::vacuum(1);
  const FockSpace out({60});
  const PureState s = GaussianUnitary(squeezing_map(0.5), {0}).apply(vac, out);
  const PureState ref = states::squeezed_vacuum(0.5);
  const Vector padded = resize(ref, out).amplitudes();
  EXPECT_NEAR(std::norm(padded.dot(s.amplitudes())), 1.0, 1e-10);
}

TEST(GaussianUnitary, CollectiveRotationOfSinglePhoton) {
  const PureState one = states::fock({1, 0});
  EXPECT_NEAR(fidelity(mode_rotation_to_collective(one, beamsplitter_map(kPi / 4.0)), states::fock_bell(kPi / 4.0)),
              1.0, 1e-13);
  EXPECT_NEAR(fidelity(mode_rotation_to_collective(one, SymplecticMap::identity(2)), one), 1.0, 1e-15);
}

TEST(GaussianUnitary, MapThenInverseRestoresState) {
  std::mt19937_64 rng(9);
  const FockSpace space = FockSpace::uniform(2, 6);
  const DensityOperator rho = random_mixed(space, 2, rng, 6);
  const SymplecticMap lambda = beamsplitter_map(0.4) * direct_sum(phase_map(0.3), phase_map(1.0));
  const DensityOperator back =
      mode_rotation_to_collective(mode_rotation_to_collective(rho, lambda), lambda.inverse());
  EXPECT_LT((back.matrix() - rho.matrix()).cwiseAbs().maxCoeff(), 1e-9);
}

// ---------------------------------------------------------------------------
// Photon loss

TEST(Loss, Endpoints) {
  const PureState cat = states::cat2(1.0);
  const DensityOperator rho = DensityOperator::from_pure(cat);
  EXPECT_LT((apply_loss(cat, LossChannel(0.0, {0, 1})).matrix() - rho.matrix()).cwiseAbs().maxCoeff(), 1e-13);
  const DensityOperator gone = apply_loss(cat, LossChannel(1.0, {0, 1}));
  EXPECT_NEAR(gone.matrix()(0, 0).real(), 1.0, 1e-13);
}

TEST(Loss, CoherentStaysCoherent) {
  const cplx beta(1.3, 0.4);
  const double eta = 0.27;
  const DensityOperator out = apply_loss(states::coherent({beta}), LossChannel(eta, {0}));
  const PureState target = resize(states::coherent({std::sqrt(1.0 - eta) * beta}), out.space());
  const Vector& v = target.amplitudes();
  EXPECT_NEAR((v.adjoint() * out.matrix() * v)(0, 0).real(), 1.0, 1e-8);
}

TEST(Loss, ChannelComposition) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const DensityOperator rho = random_mixed(FockSpace::uniform(2, 6), 3, rng);
    const double e1 = 0.1 + 0.1 * trial, e2 = 0.35;
    const DensityOperator twice = apply_loss(apply_loss(rho, LossChannel(e1, {0, 1})), LossChannel(e2, {0, 1}));
    const DensityOperator once = apply_loss(rho, LossChannel(1.0 - (1.0 - e1) * (1.0 - e2), {0, 1}));
    EXPECT_LT((twice.matrix() - once.matrix()).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Loss, OutputIsPositiveForRandomInputs) {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0, drift = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const DensityOperator rho = random_mixed(FockSpace({7}), 1 + trial % 4, rng);
    const DensityOperator out = apply_loss(rho, LossChannel(u(rng), {0}));
    worst = std::min(worst, min_eigenvalue(out.matrix()));
    drift = std::max(drift, std::abs(out.matrix().trace().real() - 1.0));
  }
  EXPECT_GE(worst, -1e-10);
  EXPECT_LT(drift, 1e-9);
}

TEST(Loss, ThermalMeanScales) {
  const double nbar = 1.5, eta = 0.3;
  const DensityOperator out = apply_loss(states::thermal({nbar}), LossChannel(eta, {0}));
  EXPECT_NEAR(mean_photon_number(out, 0), (1.0 - eta) * nbar, 1e-9);
  // Still thermal: geometric populations.
  const double q = (1.0 - eta) * nbar / (1.0 + (1.0 - eta) * nbar);
  for (int n = 0; n < 5; ++n) EXPECT_NEAR(out.matrix()(n, n).real(), (1.0 - q) * std::pow(q, n), 1e-9);
}

TEST(Loss, KrausRouteMatchesBeamsplitterDilation) {
  // System mode 0 with a vacuum environment mode 1, mixed by cos^2 = 1 - eta.
  std::mt19937_64 rng(41);
  const int d = 8;
  const double eta = 0.37;
  const PureState sys(FockSpace({d}), random_vector(d, rng));
  const PureState env = states::vacuum(1);
  const FockSpace joint = FockSpace::uniform(2, d);
  const Vector in = states::detail::kron(sys.amplitudes(), resize(env, FockSpace({d})).amplitudes());
  const Vector out = beamsplitter(joint, 0, 1, std::acos(std::sqrt(1.0 - eta))) * in;
  const DensityOperator dilated = partial_trace(DensityOperator::from_pure(PureState(joint, out)), {1});
  const DensityOperator kraus = apply_loss(sys, LossChannel(eta, {0}));
  EXPECT_LT((dilated.matrix() - kraus.matrix()).cwiseAbs().maxCoeff(), 1e-12);
}

}  // namespace
}  // namespace ecdw
