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

#include <optional>
#include <string>

#include "ecdw/measures.hpp"
#include "ecdw/noise.hpp"
#include "ecdw/optimizer.hpp"
#include "ecdw/states.hpp"

namespace ecdw {

/// The three two-mode example families.
enum class StateFamily { fock_bell, ps_tmsv, cat2 };

inline const char* to_string(StateFamily f) {
  switch (f) {
    case StateFamily::fock_bell:
      return "fock-bell";
    case StateFamily::ps_tmsv:
      return "ps-tmsv";
    case StateFamily::cat2:
      return "cat2";
  }
  return "?";
}

inline StateFamily parse_family(const std::string& s) {
  if (s == "fock-bell") return StateFamily::fock_bell;
  if (s == "ps-tmsv") return StateFamily::ps_tmsv;
  if (s == "cat2") return StateFamily::cat2;
  throw std::invalid_argument("unknown state family '" + s + "'");
}

/// A member of a family: the pure state, the Gaussian rotation that splits it
/// into a single-mode factor and a Gaussian (or vacuum) partner, and the N = 4
/// point set with identity pairing.
struct FamilyMember {
  StateFamily family;
  double parameter;
  PureState psi;
  NegativityReduction reduction;
  PointList points;
};

inline NegativityReduction beamsplitter_reduction(double theta, std::string name) {
  return {std::move(name), GaussianTransform{beamsplitter_map(-theta), ModeVector::Zero(2)}};
}

/// Undoes the two-mode squeeze and the 50:50 rotation of a photon-subtracted
/// TMSV, leaving |1> x |0>.
inline NegativityReduction unsqueeze_reduction(double r) {
  Matrix x = Matrix::Identity(2, 2) * std::cosh(r), y = Matrix::Zero(2, 2);
  y(0, 1) = y(1, 0) = -std::sinh(r);
  return {"B(-pi/4) S2(-r)", GaussianTransform{beamsplitter_map(-kPi / 4.0) * SymplecticMap::from_blocks(x, y),
                                                ModeVector::Zero(2)},
          16};
}

/// theta for fock-bell, r for ps-tmsv, |beta| (real) for cat2.
inline FamilyMember make_member(StateFamily f, double parameter) {
  switch (f) {
    case StateFamily::fock_bell:
      return {f, parameter, states::fock_bell(parameter), beamsplitter_reduction(parameter, "B(-theta)"),
              fock_points(parameter)};
    case StateFamily::ps_tmsv:
      return {f, parameter, states::ps_tmsv(parameter), unsqueeze_reduction(parameter),
              squeezed_points(kPi / 4.0, parameter)};
    case StateFamily::cat2:
      return {f, parameter, states::cat2(parameter), beamsplitter_reduction(kPi / 4.0, "B(-pi/4)"),
              cat_points(parameter)};
  }
  throw std::invalid_argument("unknown state family");
}

inline Family init_family(StateFamily f) {
  switch (f) {
    case StateFamily::fock_bell:
      return Family::fock;
    case StateFamily::ps_tmsv:
      return Family::squeezed;
    case StateFamily::cat2:
      return Family::cat;
  }
  return Family::generic;
}

}  // namespace ecdw
