// Copyright 2026 The mfmsbm Authors
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

// Text formats. All node ids and labels are 1-based on disk.
//
//   edge list   one "i j" pair per line, each undirected edge once. Blank
//               lines and '#' comments are skipped; a "# nodes: N" comment
//               fixes the node count so trailing isolated nodes survive.
//   adjacency   n rows of n comma-separated 0/1 values.
//   labeling    one integer per line.

#include <algorithm>
#include <fstream>
#include <iosfwd>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mfmsbm/graph.hpp"

namespace mfmsbm {

class ParseError : public std::invalid_argument {
 public:
  ParseError(const std::string& source, int line, const std::string& what)
      : std::invalid_argument(source + ":" + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path + " for reading");
  return in;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

}  // namespace detail

inline AdjacencyMatrix read_edge_list(std::istream& in, const std::string& source = "<edges>") {
  std::vector<std::pair<int, int>> edges;
  std::set<std::pair<int, int>> seen;
  int declared_n = 0;
  int max_id = 0;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = detail::trim(raw);
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string key;
      hs >> key;
      if (key == "nodes:") {
        if (!(hs >> declared_n) || declared_n < 2) {
          throw ParseError(source, line_no, "malformed node-count header");
        }
      }
      continue;
    }
    std::istringstream ls(line);
    long long i = 0, j = 0;
    std::string extra;
    if (!(ls >> i >> j) || (ls >> extra)) {
      throw ParseError(source, line_no, "expected two node ids");
    }
    if (i < 1 || j < 1 || i > 1'000'000'000 || j > 1'000'000'000) {
      throw ParseError(source, line_no, "node ids must be positive");
    }
    if (i == j) throw ParseError(source, line_no, "self-loop " + std::to_string(i));
    const std::pair<int, int> key{static_cast<int>(std::min(i, j)), static_cast<int>(std::max(i, j))};
    if (!seen.insert(key).second) {
      throw ParseError(source, line_no,
                       "duplicate edge " + std::to_string(i) + " " + std::to_string(j));
    }
    edges.push_back(key);
    max_id = std::max(max_id, key.second);
  }
  if (declared_n > 0 && max_id > declared_n) {
    throw ParseError(source, line_no, "node id exceeds declared node count");
  }
  const int n = std::max(declared_n, max_id);
  if (n < 2) throw ParseError(source, line_no, "graph needs at least 2 nodes");
  AdjacencyMatrix a(n);
  for (auto [i, j] : edges) a.set_edge(i - 1, j - 1);
  return a;
}

inline AdjacencyMatrix read_edge_list_file(const std::string& path) {
  auto in = detail::open_in(path);
  return read_edge_list(in, path);
}

inline void write_edge_list(std::ostream& out, const AdjacencyMatrix& a) {
  out << "# nodes: " << a.size() << '\n';
  for (int i = 0; i < a.size(); ++i) {
    for (int j = i + 1; j < a.size(); ++j) {
      if (a.has_edge(i, j)) out << i + 1 << ' ' << j + 1 << '\n';
    }
  }
}

inline void write_edge_list_file(const std::string& path, const AdjacencyMatrix& a) {
  auto out = detail::open_out(path);
  write_edge_list(out, a);
}

inline AdjacencyMatrix read_adjacency_csv(std::istream& in, const std::string& source = "<csv>") {
  std::vector<std::vector<int>> rows;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = detail::trim(raw);
    if (line.empty()) continue;
    std::vector<int> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      cell = detail::trim(cell);
      if (cell == "0") {
        row.push_back(0);
      } else if (cell == "1") {
        row.push_back(1);
      } else {
        throw ParseError(source, line_no, "adjacency entries must be 0 or 1");
      }
    }
    rows.push_back(std::move(row));
    if (rows.back().size() != rows.front().size()) {
      throw ParseError(source, line_no, "ragged adjacency row");
    }
  }
  const int n = static_cast<int>(rows.size());
  if (n < 2) throw ParseError(source, line_no, "graph needs at least 2 nodes");
  if (static_cast<int>(rows.front().size()) != n) {
    throw ParseError(source, 1, "adjacency matrix is not square");
  }
  AdjacencyMatrix a(n);
  for (int i = 0; i < n; ++i) {
    if (rows[i][i] != 0) throw ParseError(source, i + 1, "nonzero diagonal (self-loop)");
    for (int j = i + 1; j < n; ++j) {
      if (rows[i][j] != rows[j][i]) throw ParseError(source, i + 1, "adjacency is not symmetric");
      if (rows[i][j]) a.set_edge(i, j);
    }
  }
  return a;
}

inline AdjacencyMatrix read_adjacency_csv_file(const std::string& path) {
  auto in = detail::open_in(path);
  return read_adjacency_csv(in, path);
}

inline void write_adjacency_csv(std::ostream& out, const AdjacencyMatrix& a) {
  for (int i = 0; i < a.size(); ++i) {
    for (int j = 0; j < a.size(); ++j) {
      if (j) out << ',';
      out << (a.has_edge(i, j) ? 1 : 0);
    }
    out << '\n';
  }
}

// Dispatches on extension: ".csv" is a dense adjacency matrix, anything else
// an edge list.
inline AdjacencyMatrix read_graph_file(const std::string& path) {
  const bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
  return csv ? read_adjacency_csv_file(path) : read_edge_list_file(path);
}

inline Labeling read_labeling(std::istream& in, const std::string& source = "<labels>") {
  std::vector<int> raw_labels;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = detail::trim(raw);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    long long v = 0;
    std::string extra;
    if (!(ls >> v) || (ls >> extra)) throw ParseError(source, line_no, "expected one integer label");
    if (v < 1 || v > 1'000'000'000) throw ParseError(source, line_no, "labels are 1-based");
    raw_labels.push_back(static_cast<int>(v));
  }
  try {
    return Labeling::from_one_based(raw_labels);
  } catch (const std::invalid_argument& e) {
    throw ParseError(source, line_no, e.what());
  }
}

inline Labeling read_labeling_file(const std::string& path) {
  auto in = detail::open_in(path);
  return read_labeling(in, path);
}

inline void write_labeling(std::ostream& out, const Labeling& z) {
  for (int v : z.one_based()) out << v << '\n';
}

inline void write_labeling_file(const std::string& path, const Labeling& z) {
  auto out = detail::open_out(path);
  write_labeling(out, z);
}

}  // namespace mfmsbm
