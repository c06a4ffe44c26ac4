#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "xpert/diagram.hpp"
#include "xpert/linalg.hpp"

namespace xpert {

/// Simple undirected graph. Edges are stored with i < j, sorted, unique.
class Graph {
 public:
  Graph() = default;
  /// Throws std::invalid_argument on self-loops, duplicates or out-of-range
  /// vertices.
  Graph(std::size_t num_vertices, std::vector<std::pair<std::size_t, std::size_t>> edges);

  std::size_t num_vertices() const { return num_vertices_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const { return edges_; }
  std::size_t num_components() const;

 private:
  std::size_t num_vertices_ = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
};

using VertexFunction = std::vector<double>;

/// I - D^{-1/2} A D^{-1/2}; rows of isolated vertices are identity rows.
SquareMatrix normalized_laplacian(const Graph& g);

inline constexpr double kDefaultDiffusionTime = 1.0;

/// Heat kernel signature sum_i exp(-lambda_i t) phi_i(v)^2. Requires t > 0.
VertexFunction hks(const Graph& g, double t);

enum class Pass { ascending, descending };

struct FiltrationStep {
  std::vector<std::size_t> simplex;  // 1 or 2 sorted vertex ids
  double value = 0.0;
  Pass pass = Pass::ascending;
};

/// Vertices at f(v), edges at max(f(u), f(v)); sorted by (value, dim, lex).
std::vector<FiltrationStep> sublevel_filtration(const Graph& g, const VertexFunction& f);

/// Ascending pass followed by the descending (superlevel) pass: vertices at
/// f(v), edges at min(f(u), f(v)), sorted by (-value, dim, lex). Descending
/// steps stand for cones over the apex in the extended complex.
std::vector<FiltrationStep> extended_filtration(const Graph& g, const VertexFunction& f);

/// Extended persistence by Z/2 reduction of the coned complex. Zero-length
/// pairs are dropped from Ord0 and Rel1; Ext0+ and Ext1- keep every class so
/// their sizes equal the Betti numbers of the graph.
ExtendedPersistenceDiagram extended_persistence(const Graph& g, const VertexFunction& f);

/// Reads the "n m" + m lines "i j" edge-list format.
Graph read_graph(const std::string& path);
Graph parse_graph(const std::string& text, const std::string& origin);

}  // namespace xpert
