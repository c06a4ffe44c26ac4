#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "xpert/diagram.hpp"

namespace xpert {

/// Pixelized persistence diagram: an H x H grid of point counts, row-major,
/// with rows indexing birth bins and columns indexing persistence bins.
class Ppd {
 public:
  Ppd() = default;
  explicit Ppd(int resolution);

  int resolution() const { return resolution_; }
  std::uint32_t at(int row, int col) const { return counts_[index(row, col)]; }
  std::uint32_t& at(int row, int col) { return counts_[index(row, col)]; }
  const std::vector<std::uint32_t>& counts() const { return counts_; }
  std::uint64_t total() const;
  bool is_zero() const { return total() == 0; }

  friend bool operator==(const Ppd&, const Ppd&) = default;

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(resolution_) +
           static_cast<std::size_t>(col);
  }

  int resolution_ = 0;
  std::vector<std::uint32_t> counts_;
};

/// Channel order: Ord0, Rel1 transposed, Ext0+, Ext1- transposed.
struct ExtendedPpd {
  std::array<Ppd, 4> channels;
  double b_max = 1.0;
  double p_max = 1.0;

  friend bool operator==(const ExtendedPpd&, const ExtendedPpd&) = default;
};

struct NormalizedDiagram {
  RotatedDiagram diagram;
  double b_max = 1.0;
  double p_max = 1.0;
};

/// Divides by the largest birth and persistence; a maximum of zero (or an
/// empty diagram) is replaced by 1.
NormalizedDiagram instance_normalize(const RotatedDiagram& dr);
RotatedDiagram scale_diagram(const RotatedDiagram& dr, double b_max, double p_max);

/// Maps each point to the centre of its half-open delta-cell. Rejects
/// delta <= 0 and negative coordinates.
RotatedDiagram project(const RotatedDiagram& dr, double delta);

/// Counts normalized points per cell. Coordinates equal to 1 are clamped into
/// the last cell (and negative ones into the first).
Ppd count_cells(const RotatedDiagram& normalized, int resolution);

/// rotate -> instance_normalize -> count_cells.
Ppd pixelize(const PersistenceDiagram& d, int resolution);

/// Transposes the relative and Ext1- parts, normalizes all four with one
/// shared (b_max, p_max) and pixelizes each.
ExtendedPpd pixelize_extended(const ExtendedPersistenceDiagram& e, int resolution);

struct Patch {
  int grid_row = 0;
  int grid_col = 0;
  std::vector<double> values;  // channel-major, then row-major inside the patch
};

struct PatchSequence {
  int patch_size = 0;
  int channels = 0;
  int grid = 0;  // patches per side, H / P
  std::vector<Patch> patches;

  std::size_t patch_length() const {
    return static_cast<std::size_t>(channels) * static_cast<std::size_t>(patch_size) *
           static_cast<std::size_t>(patch_size);
  }
};

/// Splits stacked channels into P x P patches in row-major patch order and
/// drops patches that are zero in every channel. Rejects P not dividing H.
PatchSequence patchify(std::span<const Ppd> channels, int patch_size);
PatchSequence patchify(const ExtendedPpd& x, int patch_size);

}  // namespace xpert
