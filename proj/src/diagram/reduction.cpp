#include "xpert/reduction.hpp"

#include <algorithm>
#include <iterator>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace xpert {
namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

void add_column(std::vector<std::size_t>& target, const std::vector<std::size_t>& source,
                std::vector<std::size_t>& scratch) {
  scratch.clear();
  std::set_symmetric_difference(target.begin(), target.end(), source.begin(), source.end(),
                                std::back_inserter(scratch));
  target.swap(scratch);
}

}  // namespace

void validate_face_order(const FilteredComplex& complex) {
  if (complex.boundary.size() != complex.dims.size()) {
    throw std::invalid_argument("filtration: boundary and dimension arrays differ in length");
  }
  for (std::size_t j = 0; j < complex.size(); ++j) {
    const auto& col = complex.boundary[j];
    if (complex.dims[j] < 0) {
      throw std::invalid_argument("filtration: cell " + std::to_string(j) + " has negative dimension");
    }
    if (col.size() != (complex.dims[j] == 0 ? 0u : static_cast<std::size_t>(complex.dims[j]) + 1)) {
      throw std::invalid_argument("filtration: cell " + std::to_string(j) + " of dimension " +
                                  std::to_string(complex.dims[j]) + " has " +
                                  std::to_string(col.size()) + " faces");
    }
    for (std::size_t k = 0; k < col.size(); ++k) {
      const std::size_t face = col[k];
      if (face >= j) {
        throw std::invalid_argument("filtration: cell " + std::to_string(j) +
                                    " appears before its face " + std::to_string(face));
      }
      if (complex.dims[face] != complex.dims[j] - 1) {
        throw std::invalid_argument("filtration: face " + std::to_string(face) + " of cell " +
                                    std::to_string(j) + " has the wrong dimension");
      }
      if (k > 0 && col[k - 1] >= face) {
        throw std::invalid_argument("filtration: boundary of cell " + std::to_string(j) +
                                    " is not strictly sorted");
      }
    }
  }
}

PairingResult reduce(const FilteredComplex& complex) {
  validate_face_order(complex);
  const std::size_t n = complex.size();
  std::vector<std::vector<std::size_t>> columns = complex.boundary;
  std::vector<std::size_t> pivot_owner(n, kNone);
  std::vector<bool> paired(n, false);
  std::vector<std::size_t> scratch;

  const int max_dim = n == 0 ? 0 : *std::max_element(complex.dims.begin(), complex.dims.end());
  PairingResult result;
  for (int dim = max_dim; dim >= 1; --dim) {
    for (std::size_t j = 0; j < n; ++j) {
      if (complex.dims[j] != dim) continue;
      auto& col = columns[j];
      if (paired[j]) {
        col.clear();  // cleared: j already creates a class killed in dim + 1
        continue;
      }
      while (!col.empty() && pivot_owner[col.back()] != kNone) {
        add_column(col, columns[pivot_owner[col.back()]], scratch);
      }
      if (!col.empty()) {
        const std::size_t low = col.back();
        pivot_owner[low] = j;
        paired[low] = true;
        paired[j] = true;
        result.pairs.push_back({low, j});
      }
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!paired[j] && columns[j].empty()) result.essential.push_back(j);
  }
  std::sort(result.pairs.begin(), result.pairs.end());
  return result;
}

PairingResult union_find_pairs(const FilteredComplex& complex) {
  const std::size_t n = complex.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  // Each root is the oldest vertex of its component, so the root index is the
  // component's birth index.
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };

  PairingResult result;
  std::vector<bool> is_vertex(n, false);
  std::vector<bool> alive(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    if (complex.dims[j] == 0) {
      is_vertex[j] = true;
      alive[j] = true;
    } else if (complex.dims[j] == 1) {
      const auto& col = complex.boundary[j];
      if (col.size() != 2) throw std::invalid_argument("union_find_pairs: edge needs two faces");
      std::size_t ra = find(col[0]);
      std::size_t rb = find(col[1]);
      if (ra == rb) continue;
      if (ra > rb) std::swap(ra, rb);  // rb is younger and dies
      parent[rb] = ra;
      alive[rb] = false;
      result.pairs.push_back({rb, j});
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (is_vertex[j] && alive[j]) result.essential.push_back(j);
  }
  std::sort(result.pairs.begin(), result.pairs.end());
  return result;
}

}  // namespace xpert
