#pragma once

#include <cstddef>
#include <vector>

namespace xpert {

/// A filtered cell complex given by its boundary matrix over Z/2. Column j
/// lists the filtration indices of the codimension-one faces of cell j in
/// ascending order; every face index must be smaller than j.
struct FilteredComplex {
  std::vector<std::vector<std::size_t>> boundary;
  std::vector<int> dims;

  std::size_t size() const { return dims.size(); }
};

/// Pair of filtration indices (creator, destroyer).
struct IndexPair {
  std::size_t birth;
  std::size_t death;

  friend bool operator==(const IndexPair&, const IndexPair&) = default;
  friend auto operator<=>(const IndexPair&, const IndexPair&) = default;
};

struct PairingResult {
  std::vector<IndexPair> pairs;
  std::vector<std::size_t> essential;  // unpaired creators
};

/// Throws std::invalid_argument if a face does not precede its coface, has
/// the wrong dimension, or a k-cell does not have exactly k + 1 faces.
void validate_face_order(const FilteredComplex& complex);

/// Standard column reduction with the clearing optimisation: dimensions are
/// processed from the top down and columns of known creators are zeroed.
/// Pairs are returned sorted by birth index. Validates the face order first.
PairingResult reduce(const FilteredComplex& complex);

/// Zero-dimensional pairing by union-find with the elder rule on filtration
/// indices. Only cells of dimension 0 and 1 are read.
PairingResult union_find_pairs(const FilteredComplex& complex);

}  // namespace xpert
