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

#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "ecdw/shot_sim.hpp"
#include "json.hpp"

namespace ecdw {

using Json = nlohmann::ordered_json;

// Complex numbers are written as [re, im] pairs.

inline Json to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw std::invalid_argument("complex value must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json to_json(const RealMatrix& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw std::invalid_argument("matrix must be a list of rows");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j[0].size());
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) throw std::invalid_argument("ragged matrix");
    for (Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

/// Points as a list of points, each a list of per-mode [re, im] pairs.
inline Json to_json(const PointList& pts) {
  Json out = Json::array();
  for (const ModeVector& p : pts) {
    Json modes = Json::array();
    for (Index m = 0; m < p.size(); ++m) modes.push_back(to_json(p(m)));
    out.push_back(std::move(modes));
  }
  return out;
}

inline PointList points_from_json(const Json& j) {
  if (!j.is_array()) throw std::invalid_argument("points must be a list");
  PointList pts;
  for (const Json& p : j) {
    if (!p.is_array() || p.empty()) throw std::invalid_argument("each point needs at least one mode");
    ModeVector v(static_cast<Index>(p.size()));
    for (std::size_t m = 0; m < p.size(); ++m) v(static_cast<Index>(m)) = complex_from_json(p[m]);
    if (!pts.empty() && v.size() != pts.front().size()) throw std::invalid_argument("points differ in mode count");
    pts.push_back(std::move(v));
  }
  return pts;
}

inline Json to_json(const SymplecticMap& lambda) {
  return Json{{"modes", lambda.modes()}, {"lambda", to_json(lambda.matrix())}};
}

inline SymplecticMap symplectic_from_json(const Json& j) { return SymplecticMap(matrix_from_json(j.at("lambda"))); }

inline Json to_json(const PhaseSpacePointSet& xi) {
  return Json{{"N", xi.size()}, {"a", to_json(xi.a_points())}, {"b", to_json(xi.b_points())},
              {"pairing", to_json(xi.pairing())}};
}

inline Json to_json(const WitnessMatrix& m) {
  return Json{{"N", m.size()},
              {"kind", to_string(m.kind)},
              {"mode", to_string(m.mode)},
              {"entries", to_json(m.entries)},
              {"radii", to_json(m.radii)}};
}

inline Json to_json(const WitnessResult& r) {
  Json eig = Json::array();
  for (Index k = 0; k < r.min_eigenvector.size(); ++k) eig.push_back(to_json(r.min_eigenvector(k)));
  return Json{{"lambda_min", r.lambda_min}, {"value", r.value},  {"delta", r.delta},
              {"certified", r.certified},   {"gap", r.gap},      {"min_eigenvector", std::move(eig)}};
}

inline Json to_json(const MeasurementRecord& r) {
  return Json{{"setting", r.setting}, {"basis", r.basis},         {"shots", r.shots},
              {"plus_count", r.plus_count}, {"estimator", r.estimator}, {"radius", r.radius}};
}

inline MeasurementRecord record_from_json(const Json& j) {
  MeasurementRecord r;
  r.setting = j.at("setting").get<int>();
  r.basis = j.at("basis").get<std::string>();
  r.shots = j.at("shots").get<long>();
  r.plus_count = j.at("plus_count").get<long>();
  r.estimator = j.at("estimator").get<double>();
  r.radius = j.at("radius").get<double>();
  if (std::abs(r.estimator) > 1.0 + 1e-12 || r.radius < 0.0) throw std::invalid_argument("record out of range");
  return r;
}

/// One JSON object per line.
inline void write_jsonl(std::ostream& os, const std::vector<MeasurementRecord>& records) {
  for (const auto& r : records) os << to_json(r).dump() << '\n';
}

inline std::vector<MeasurementRecord> read_jsonl(std::istream& is) {
  std::vector<MeasurementRecord> out;
  std::string line;
  while (std::getline(is, line))
    if (line.find_first_not_of(" \t\r") != std::string::npos) out.push_back(record_from_json(Json::parse(line)));
  return out;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return Json::parse(in);
}

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace ecdw
