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

#include <array>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "ecdw/witness.hpp"

namespace ecdw {

/// (a) one qubit driving ECD(-xi^A) on A then ECD(xi^B) on B;
/// (b) one qubit per party, each driving its own ECD gate.
enum class QubitLayout { one_qubit = 1, two_qubit = 2 };

inline int qubit_count(QubitLayout l) { return static_cast<int>(l); }

/// Pauli product measured on the qubits, one letter per qubit ('x' or 'y').
using Basis = std::string;

inline std::vector<Basis> bases_for(QubitLayout l) {
  if (l == QubitLayout::one_qubit) return {"x", "y"};
  return {"xx", "xy", "yx", "yy"};
}

/// ECD gate on one qubit: D(xi/2)|e><g| + D(-xi/2)|g><e|, xi over all modes.
struct EcdGate {
  int qubit;
  ModeVector xi;
};

namespace detail {

struct Branch {
  unsigned qubits;
  cplx coeff;
  ModeVector disp;
};

// Follows one computational-basis input of the qubits through the gates.
inline Branch propagate(unsigned input, const std::vector<EcdGate>& gates, Index modes) {
  Branch b{input, 1.0, ModeVector::Zero(modes)};
  for (const EcdGate& g : gates) {
    const bool excited = (b.qubits >> g.qubit) & 1u;
    const ModeVector step = (excited ? -0.5 : 0.5) * g.xi;
    // D(s) D(d) = exp[(s.d* - s*.d)/2] D(s + d)
    b.coeff *= std::exp(0.5 * (step.dot(b.disp) - b.disp.dot(step)));
    b.disp += step;
    b.qubits ^= (1u << g.qubit);
  }
  return b;
}

inline cplx pauli_element(char p, unsigned row, unsigned col) {
  if (row == col) return 0.0;
  if (p == 'x') return 1.0;
  // sigma_y = -i|g><e| + i|e><g| with g = 0, e = 1
  return row == 0 ? cplx(0, -1) : cplx(0, 1);
}

}  // namespace detail

/// Ideal <P> for Pauli product `basis` after the gates act on |+>^n x rho.
inline double pauli_expectation(const CharacteristicFunction& cf, const std::vector<EcdGate>& gates, int qubits,
                                const Basis& basis) {
  if (static_cast<int>(basis.size()) != qubits) throw std::invalid_argument("basis length must match qubit count");
  const unsigned states = 1u << qubits;
  std::vector<detail::Branch> branches;
  for (unsigned x = 0; x < states; ++x) branches.push_back(detail::propagate(x, gates, cf.num_modes()));
  cplx total = 0.0;
  for (const auto& bx : branches)
    for (const auto& by : branches) {
      cplx element = 1.0;
      for (int q = 0; q < qubits; ++q)
        element *= detail::pauli_element(basis[static_cast<std::size_t>(q)], (by.qubits >> q) & 1u, (bx.qubits >> q) & 1u);
      if (element == 0.0) continue;
      // tr[rho O_y^dagger O_x], O = c D(d)
      const cplx phase = std::exp(0.5 * (by.disp.dot(bx.disp) - bx.disp.dot(by.disp)));
      total += element * std::conj(by.coeff) * bx.coeff * phase * cf(bx.disp - by.disp);
    }
  total /= double(states);
  if (std::abs(total.imag()) > 1e-9) throw std::logic_error("Pauli expectation is not real");
  return total.real();
}

inline std::vector<EcdGate> layout_gates(QubitLayout layout, const ModeVector& xi_a, const ModeVector& xi_b) {
  const Index ma = xi_a.size(), mb = xi_b.size();
  ModeVector ga = ModeVector::Zero(ma + mb), gb = ModeVector::Zero(ma + mb);
  gb.tail(mb) = xi_b;
  if (layout == QubitLayout::one_qubit) {
    ga.head(ma) = -xi_a;
    return {{0, ga}, {0, gb}};
  }
  ga.head(ma) = xi_a;
  return {{0, ga}, {1, gb}};
}

/// Expectations of every basis of the layout, in bases_for() order.
inline std::vector<double> ecd_expectations(const CharacteristicFunction& cf, const ModeVector& xi_a,
                                            const ModeVector& xi_b, QubitLayout layout) {
  const auto gates = layout_gates(layout, xi_a, xi_b);
  std::vector<double> out;
  for (const Basis& b : bases_for(layout)) out.push_back(pauli_expectation(cf, gates, qubit_count(layout), b));
  return out;
}

/// The complex readout <sx> + i<sy> (one qubit) or <XX> - <YY> + i(<XY> + <YX>).
inline cplx reconstruct(const std::vector<double>& e, QubitLayout layout) {
  if (layout == QubitLayout::one_qubit) return {e.at(0), e.at(1)};
  return {e.at(0) - e.at(3), e.at(1) + e.at(2)};
}

// ---------------------------------------------------------------------------
// Plans and sampling

struct MeasurementSetting {
  int id = 0;
  ModeVector xi_a;
  ModeVector xi_b;
};

struct MeasurementPlan {
  QubitLayout layout = QubitLayout::one_qubit;
  std::vector<MeasurementSetting> settings;
  /// For each pair j < k (row-major): setting index and whether the pair reads
  /// the conjugate of that setting.
  std::vector<std::pair<int, bool>> pair_setting;
  Index n_points = 0;
  long shots = 1000;
  double confidence = 0.95;
  std::uint64_t seed = 0;

  /// n_q N (N - 1): the setting count before symmetry deduplication.
  long raw_setting_count() const { return long(qubit_count(layout)) * long(n_points) * long(n_points - 1); }
  long dedup_setting_count() const { return long(settings.size()) * long(bases_for(layout).size()); }
};

/// One setting per distinct displacement difference up to sign.
inline MeasurementPlan make_plan(const PhaseSpacePointSet& xi, QubitLayout layout, long shots, double confidence,
                                 std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("shots must be positive");
  if (!(confidence > 0.0 && confidence < 1.0)) throw std::invalid_argument("confidence must lie in (0, 1)");
  MeasurementPlan plan;
  plan.layout = layout;
  plan.n_points = static_cast<Index>(xi.size());
  plan.shots = shots;
  plan.confidence = confidence;
  plan.seed = seed;
  std::vector<ModeVector> seen;
  for (std::size_t j = 0; j < xi.size(); ++j)
    for (std::size_t k = j + 1; k < xi.size(); ++k) {
      const ModeVector d = xi.joint(j) - xi.joint(k);
      int found = -1;
      bool conj = false;
      for (std::size_t s = 0; s < seen.size() && found < 0; ++s) {
        if ((seen[s] - d).cwiseAbs().maxCoeff() < 1e-12) found = static_cast<int>(s);
        else if ((seen[s] + d).cwiseAbs().maxCoeff() < 1e-12) {
          found = static_cast<int>(s);
          conj = true;
        }
      }
      if (found < 0) {
        found = static_cast<int>(seen.size());
        seen.push_back(d);
        const Index m = xi.modes_per_party();
        plan.settings.push_back({found, d.head(m), d.tail(m)});
      }
      plan.pair_setting.emplace_back(found, conj);
    }
  return plan;
}

struct MeasurementRecord {
  int setting = 0;
  Basis basis;
  long shots = 0;
  long plus_count = 0;
  double estimator = 0.0;
  double radius = 0.0;
};

/// Hoeffding half-width for the mean of `shots` outcomes in [-1, 1].
inline double hoeffding_radius(long shots, double confidence) {
  return std::sqrt(2.0 * std::log(2.0 / (1.0 - confidence)) / double(shots));
}

/// Seeded finite-shot sampling; each (setting, basis) has its own stream.
inline std::vector<MeasurementRecord> sample(const MeasurementPlan& plan, const CharacteristicFunction& cf,
                                             unsigned threads = 1) {
  const auto bases = bases_for(plan.layout);
  std::vector<MeasurementRecord> records(plan.settings.size() * bases.size());
  parallel_for(plan.settings.size(), threads, [&](std::size_t s) {
    const auto& st = plan.settings[s];
    const auto expect = ecd_expectations(cf, st.xi_a, st.xi_b, plan.layout);
    for (std::size_t b = 0; b < bases.size(); ++b) {
      std::seed_seq seq{static_cast<std::uint32_t>(plan.seed), static_cast<std::uint32_t>(plan.seed >> 32),
                        static_cast<std::uint32_t>(st.id), static_cast<std::uint32_t>(b)};
      std::mt19937_64 rng(seq);
      const double p = std::clamp(0.5 * (1.0 + expect[b]), 0.0, 1.0);
      std::binomial_distribution<long> dist(plan.shots, p);
      const long plus = dist(rng);
      records[s * bases.size() + b] = {st.id, bases[b], plan.shots, plus, 2.0 * double(plus) / double(plan.shots) - 1.0,
                                       hoeffding_radius(plan.shots, plan.confidence)};
    }
  });
  return records;
}

/// Infinite-shot records: exact expectations with zero radius.
inline std::vector<MeasurementRecord> ideal_records(const MeasurementPlan& plan, const CharacteristicFunction& cf) {
  const auto bases = bases_for(plan.layout);
  std::vector<MeasurementRecord> records;
  for (const auto& st : plan.settings) {
    const auto expect = ecd_expectations(cf, st.xi_a, st.xi_b, plan.layout);
    for (std::size_t b = 0; b < bases.size(); ++b) records.push_back({st.id, bases[b], 0, 0, expect[b], 0.0});
  }
  return records;
}

/// Measured-mode C2 from records covering every pair j < k of the plan.
inline WitnessMatrix assemble_measured_witness(const std::vector<MeasurementRecord>& records,
                                               const MeasurementPlan& plan) {
  const auto bases = bases_for(plan.layout);
  std::vector<std::vector<const MeasurementRecord*>> by_setting(plan.settings.size(),
                                                                std::vector<const MeasurementRecord*>(bases.size()));
  for (const auto& r : records) {
    if (r.setting < 0 || static_cast<std::size_t>(r.setting) >= plan.settings.size())
      throw std::invalid_argument("record refers to an unknown setting");
    const auto it = std::find(bases.begin(), bases.end(), r.basis);
    if (it == bases.end()) throw std::invalid_argument("record basis does not match the layout");
    by_setting[static_cast<std::size_t>(r.setting)][static_cast<std::size_t>(it - bases.begin())] = &r;
  }
  MeasuredEntries in;
  in.n = plan.n_points;
  std::size_t p = 0;
  for (Index j = 0; j < plan.n_points; ++j)
    for (Index k = j + 1; k < plan.n_points; ++k, ++p) {
      const auto [s, conj] = plan.pair_setting[p];
      const auto& recs = by_setting[static_cast<std::size_t>(s)];
      for (const auto* r : recs)
        if (!r) throw std::invalid_argument("missing record for setting " + std::to_string(s));
      std::vector<double> est;
      for (const auto* r : recs) est.push_back(r->estimator);
      cplx d = reconstruct(est, plan.layout);
      double radius;
      if (plan.layout == QubitLayout::one_qubit) {
        radius = std::hypot(recs[0]->radius, recs[1]->radius);
      } else {
        radius = std::hypot(recs[0]->radius + recs[3]->radius, recs[1]->radius + recs[2]->radius);
      }
      in.estimates[{j, k}] = conj ? std::conj(d) : d;
      in.radii[{j, k}] = radius;
    }
  return assemble_measured(in, WitnessKind::C2);
}

}  // namespace ecdw
