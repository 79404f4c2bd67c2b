//
// Copyright 2026 The LLQFP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "llqfp/errors.hpp"
#include "llqfp/format.hpp"

namespace llqfp {

// Weighted undirected interaction graph. Weights are stored densely; row i
// lists player i's links g_ij, the diagonal is zero and the matrix is
// symmetric. Player indices are 0-based in this API and 1-based in files and
// reports.
class Network {
 public:
  Network() = default;

  static Network from_weights(Eigen::MatrixXd weights) {
    if (weights.rows() != weights.cols()) {
      throw ParameterError("weight matrix must be square");
    }
    const auto n = static_cast<std::size_t>(weights.rows());
    for (Eigen::Index i = 0; i < weights.rows(); ++i) {
      if (weights(i, i) != 0.0) {
        throw ParameterError("self-loop at player " + std::to_string(i + 1));
      }
      for (Eigen::Index j = 0; j < weights.cols(); ++j) {
        if (!std::isfinite(weights(i, j))) throw ParameterError("non-finite weight");
        if (weights(i, j) != weights(j, i)) {
          throw ParameterError("weights must be symmetric: g(" + std::to_string(i + 1) + "," +
                               std::to_string(j + 1) + ") != g(" + std::to_string(j + 1) + "," +
                               std::to_string(i + 1) + ")");
        }
      }
    }
    Network net;
    net.weights_ = std::move(weights);
    net.neighbors_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (net.weights_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != 0.0) {
          net.neighbors_[i].push_back(j);
        }
      }
    }
    return net;
  }

  static Network edgeless(std::size_t n) {
    return from_weights(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n)));
  }

  std::size_t size() const { return neighbors_.size(); }
  const Eigen::MatrixXd& weights() const { return weights_; }

  double weight(std::size_t i, std::size_t j) const {
    return weights_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  // Ascending neighbor list O_i (0-based).
  std::span<const std::size_t> neighbors(std::size_t i) const { return neighbors_.at(i); }

  // 1-based variant: player in [1, n], result 1-based.
  std::vector<std::size_t> neighbors_of(std::size_t player) const {
    if (player == 0 || player > size()) {
      throw DomainError("player index " + std::to_string(player) + " outside [1, " +
                        std::to_string(size()) + "]");
    }
    std::vector<std::size_t> out;
    for (auto j : neighbors_[player - 1]) out.push_back(j + 1);
    return out;
  }

  std::size_t degree(std::size_t i) const { return neighbors_.at(i).size(); }

  std::size_t max_degree() const {
    std::size_t d = 0;
    for (const auto& row : neighbors_) d = std::max(d, row.size());
    return d;
  }

  // p = 1 + max_i |N_i|: how many mechanism coordinates one player's data
  // can touch.
  std::size_t group_factor() const { return 1 + max_degree(); }

  std::size_t edge_count() const {
    std::size_t total = 0;
    for (const auto& row : neighbors_) total += row.size();
    return total / 2;
  }

  bool same_structure(const Network& other) const { return neighbors_ == other.neighbors_; }

  friend bool operator==(const Network& x, const Network& y) {
    return x.weights_.rows() == y.weights_.rows() && x.weights_ == y.weights_;
  }

 private:
  Eigen::MatrixXd weights_;
  std::vector<std::vector<std::size_t>> neighbors_;
};

// Each player linked to the k/2 nearest players on either side of a ring,
// every link with weight w.
inline Network ring_lattice(std::size_t n, std::size_t k, double w) {
  if (n < 3) throw ParameterError("ring_lattice: n must be >= 3");
  if (k == 0 || k >= n || k % 2 != 0) {
    throw ParameterError("ring_lattice: k must be even with 0 < k < n, got k=" +
                         std::to_string(k));
  }
  if (!(std::isfinite(w) && w != 0.0)) throw ParameterError("ring_lattice: weight must be nonzero");
  const auto size = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(size, size);
  for (Eigen::Index i = 0; i < size; ++i) {
    for (Eigen::Index s = 1; s <= static_cast<Eigen::Index>(k / 2); ++s) {
      g(i, (i + s) % size) = w;
      g(i, (i - s + size) % size) = w;
    }
  }
  return Network::from_weights(std::move(g));
}

// Edge list CSV: header "i,j,w", one undirected edge per row, 1-based
// indices. Lines starting with '#' are comments, except "# n=<count>" which
// fixes the player count (to keep trailing isolated players).
inline Network parse_edge_list(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  std::size_t n = 0;
  std::map<std::pair<std::size_t, std::size_t>, double> edges;
  auto fail = [&](const std::string& what) {
    throw FormatError("edge list line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line.rfind("# n=", 0) == 0) n = std::max(n, parse_size(line.substr(4), "n"));
      continue;
    }
    if (!seen_header) {
      if (line != "i,j,w") fail("expected header \"i,j,w\"");
      seen_header = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 3) fail("expected 3 fields");
    std::size_t i = 0;
    std::size_t j = 0;
    double w = 0.0;
    try {
      i = parse_size(fields[0], "i");
      j = parse_size(fields[1], "j");
      w = parse_double(fields[2], "w");
    } catch (const FormatError& e) {
      fail(e.what());
    }
    if (i == 0 || j == 0) fail("indices are 1-based");
    if (i == j) fail("self-loop at player " + std::to_string(i));
    if (w == 0.0 || !std::isfinite(w)) fail("weight must be finite and nonzero");
    const auto key = std::minmax(i, j);
    if (auto it = edges.find(key); it != edges.end()) {
      if (it->second != w) fail("asymmetric duplicate weights for edge " + fields[0] + "," + fields[1]);
      fail("duplicate edge " + fields[0] + "," + fields[1]);
    }
    edges.emplace(key, w);
    n = std::max({n, i, j});
  }
  if (!seen_header) throw FormatError("edge list: missing header \"i,j,w\"");
  const auto size = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(size, size);
  for (const auto& [key, w] : edges) {
    const auto i = static_cast<Eigen::Index>(key.first - 1);
    const auto j = static_cast<Eigen::Index>(key.second - 1);
    g(i, j) = w;
    g(j, i) = w;
  }
  return Network::from_weights(std::move(g));
}

inline Network load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open edge list " + path);
  return parse_edge_list(in);
}

inline void write_edge_list(std::ostream& out, const Network& net) {
  out << "# n=" << net.size() << '\n' << "i,j,w\n";
  for (std::size_t i = 0; i < net.size(); ++i) {
    for (auto j : net.neighbors(i)) {
      if (j > i) out << i + 1 << ',' << j + 1 << ',' << format_double(net.weight(i, j)) << '\n';
    }
  }
}

inline void save_edge_list(const std::string& path, const Network& net) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write edge list " + path);
  write_edge_list(out, net);
}

}  // namespace llqfp
