#include "xpert/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "xpert/reduction.hpp"

namespace xpert {

Graph::Graph(std::size_t num_vertices, std::vector<std::pair<std::size_t, std::size_t>> edges)
    : num_vertices_(num_vertices) {
  for (auto& [i, j] : edges) {
    if (i >= num_vertices || j >= num_vertices) {
      throw std::invalid_argument("graph: edge (" + std::to_string(i) + ", " + std::to_string(j) +
                                  ") references a vertex outside [0, " +
                                  std::to_string(num_vertices) + ")");
    }
    if (i == j) throw std::invalid_argument("graph: self-loop at vertex " + std::to_string(i));
    if (i > j) std::swap(i, j);
  }
  std::sort(edges.begin(), edges.end());
  const auto dup = std::adjacent_find(edges.begin(), edges.end());
  if (dup != edges.end()) {
    throw std::invalid_argument("graph: duplicate edge (" + std::to_string(dup->first) + ", " +
                                std::to_string(dup->second) + ")");
  }
  edges_ = std::move(edges);
}

std::size_t Graph::num_components() const {
  std::vector<std::size_t> parent(num_vertices_);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = num_vertices_;
  for (const auto& [i, j] : edges_) {
    const auto a = find(i);
    const auto b = find(j);
    if (a != b) {
      parent[std::max(a, b)] = std::min(a, b);
      --components;
    }
  }
  return components;
}

SquareMatrix normalized_laplacian(const Graph& g) {
  const std::size_t n = g.num_vertices();
  std::vector<double> degree(n, 0.0);
  for (const auto& [i, j] : g.edges()) {
    degree[i] += 1.0;
    degree[j] += 1.0;
  }
  SquareMatrix lap = SquareMatrix::identity(n);
  for (const auto& [i, j] : g.edges()) {
    const double w = -1.0 / std::sqrt(degree[i] * degree[j]);
    lap(i, j) = w;
    lap(j, i) = w;
  }
  return lap;
}

VertexFunction hks(const Graph& g, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("hks: diffusion time must be positive");
  const auto eig = symmetric_eigen(normalized_laplacian(g));
  const std::size_t n = g.num_vertices();
  VertexFunction out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double weight = std::exp(-eig.values[i] * t);
    for (std::size_t v = 0; v < n; ++v) {
      const double phi = eig.vectors(v, i);
      out[v] += weight * phi * phi;
    }
  }
  return out;
}

namespace {

void check_function(const Graph& g, const VertexFunction& f) {
  if (f.size() != g.num_vertices()) {
    throw std::invalid_argument("vertex function has " + std::to_string(f.size()) +
                                " values for a graph with " + std::to_string(g.num_vertices()) +
                                " vertices");
  }
  for (double x : f) {
    if (!std::isfinite(x)) throw std::invalid_argument("vertex function has a non-finite value");
  }
}

std::vector<FiltrationStep> pass_steps(const Graph& g, const VertexFunction& f, Pass pass) {
  std::vector<FiltrationStep> steps;
  steps.reserve(g.num_vertices() + g.edges().size());
  for (std::size_t v = 0; v < g.num_vertices(); ++v) steps.push_back({{v}, f[v], pass});
  for (const auto& [i, j] : g.edges()) {
    const double value =
        pass == Pass::ascending ? std::max(f[i], f[j]) : std::min(f[i], f[j]);
    steps.push_back({{i, j}, value, pass});
  }
  const bool descending = pass == Pass::descending;
  std::stable_sort(steps.begin(), steps.end(), [&](const FiltrationStep& a, const FiltrationStep& b) {
    if (a.value != b.value) return descending ? a.value > b.value : a.value < b.value;
    if (a.simplex.size() != b.simplex.size()) return a.simplex.size() < b.simplex.size();
    return a.simplex < b.simplex;
  });
  return steps;
}

}  // namespace

std::vector<FiltrationStep> sublevel_filtration(const Graph& g, const VertexFunction& f) {
  check_function(g, f);
  return pass_steps(g, f, Pass::ascending);
}

std::vector<FiltrationStep> extended_filtration(const Graph& g, const VertexFunction& f) {
  check_function(g, f);
  auto steps = pass_steps(g, f, Pass::ascending);
  auto down = pass_steps(g, f, Pass::descending);
  steps.insert(steps.end(), down.begin(), down.end());
  return steps;
}

ExtendedPersistenceDiagram extended_persistence(const Graph& g, const VertexFunction& f) {
  if (g.num_vertices() == 0) throw std::invalid_argument("extended_persistence: empty graph");
  const auto steps = extended_filtration(g, f);
  const std::size_t n = g.num_vertices();

  // Cell 0 is the cone apex. It is the oldest cell, so the component it
  // represents is the one class that never dies.
  FilteredComplex complex;
  complex.boundary.reserve(steps.size() + 1);
  std::vector<double> value{0.0};
  std::vector<Pass> pass{Pass::ascending};
  complex.boundary.push_back({});
  complex.dims.push_back(0);

  std::vector<std::size_t> vertex_index(n), vertex_cone_index(n);
  std::vector<std::size_t> edge_index;
  auto edge_id = [&](std::size_t i, std::size_t j) {
    const auto& edges = g.edges();
    const auto it = std::lower_bound(edges.begin(), edges.end(), std::make_pair(i, j));
    return static_cast<std::size_t>(it - edges.begin());
  };
  edge_index.resize(g.edges().size());

  for (const auto& step : steps) {
    const std::size_t cell = complex.size();
    std::vector<std::size_t> faces;
    int dim = 0;
    if (step.pass == Pass::ascending) {
      if (step.simplex.size() == 1) {
        vertex_index[step.simplex[0]] = cell;
      } else {
        dim = 1;
        faces = {vertex_index[step.simplex[0]], vertex_index[step.simplex[1]]};
        edge_index[edge_id(step.simplex[0], step.simplex[1])] = cell;
      }
    } else if (step.simplex.size() == 1) {
      dim = 1;
      faces = {0, vertex_index[step.simplex[0]]};
      vertex_cone_index[step.simplex[0]] = cell;
    } else {
      dim = 2;
      faces = {edge_index[edge_id(step.simplex[0], step.simplex[1])],
               vertex_cone_index[step.simplex[0]], vertex_cone_index[step.simplex[1]]};
    }
    std::sort(faces.begin(), faces.end());
    complex.boundary.push_back(std::move(faces));
    complex.dims.push_back(dim);
    value.push_back(step.value);
    pass.push_back(step.pass);
  }

  const auto pairing = reduce(complex);
  ExtendedPersistenceDiagram out;
  for (const auto& [b, d] : pairing.pairs) {
    const DiagramPoint pt{value[b], value[d]};
    if (pass[b] == Pass::ascending && pass[d] == Pass::ascending) {
      if (pt.birth != pt.death) out.ord0.points.push_back(pt);
    } else if (pass[b] == Pass::descending) {
      if (pt.birth != pt.death) out.rel1.points.push_back(pt);
    } else if (complex.dims[b] == 0) {
      out.ext0_plus.points.push_back(pt);
    } else {
      out.ext1_minus.points.push_back(pt);
    }
  }
  return out;
}

Graph parse_graph(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  auto fail = [&](const std::string& what) {
    throw std::invalid_argument(origin + ": " + what);
  };
  std::size_t line_no = 0;
  auto next_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++line_no;
      if (out.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line(line)) fail("missing header line \"n m\"");
  long long n = -1, m = -1;
  {
    std::istringstream header(line);
    std::string extra;
    if (!(header >> n >> m) || (header >> extra) || n < 0 || m < 0) {
      fail("line " + std::to_string(line_no) + ": malformed header \"" + line + "\"");
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long k = 0; k < m; ++k) {
    if (!next_line(line)) fail("expected " + std::to_string(m) + " edges, found " + std::to_string(k));
    std::istringstream row(line);
    long long i = -1, j = -1;
    std::string extra;
    if (!(row >> i >> j) || (row >> extra)) {
      fail("line " + std::to_string(line_no) + ": malformed edge line \"" + line + "\"");
    }
    if (i < 0 || j < 0 || i >= n || j >= n) {
      fail("line " + std::to_string(line_no) + ": edge (" + std::to_string(i) + ", " +
           std::to_string(j) + ") references a vertex outside [0, " + std::to_string(n) + ")");
    }
    edges.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }
  if (next_line(line)) fail("line " + std::to_string(line_no) + ": trailing content after edges");
  try {
    return Graph(static_cast<std::size_t>(n), std::move(edges));
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  return {};
}

Graph read_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open graph file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_graph(buffer.str(), path);
}

}  // namespace xpert
