#include "xpert/ppd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace xpert {

Ppd::Ppd(int resolution) : resolution_(resolution) {
  if (resolution <= 0) throw std::invalid_argument("ppd: resolution must be positive");
  counts_.assign(static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution), 0);
}

std::uint64_t Ppd::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

namespace {

double guarded(double m) { return m == 0.0 ? 1.0 : m; }

int cell_of(double coord, int resolution) {
  const double scaled = std::floor(coord * resolution);
  if (!(scaled >= 0.0)) return 0;
  if (scaled >= resolution) return resolution - 1;
  return static_cast<int>(scaled);
}

}  // namespace

RotatedDiagram scale_diagram(const RotatedDiagram& dr, double b_max, double p_max) {
  RotatedDiagram out;
  out.points.reserve(dr.size());
  for (const auto& pt : dr.points) out.points.push_back({pt.birth / b_max, pt.persistence / p_max});
  return out;
}

NormalizedDiagram instance_normalize(const RotatedDiagram& dr) {
  double b_max = 0.0;
  double p_max = 0.0;
  for (const auto& pt : dr.points) {
    b_max = std::max(b_max, pt.birth);
    p_max = std::max(p_max, pt.persistence);
  }
  b_max = guarded(b_max);
  p_max = guarded(p_max);
  return {scale_diagram(dr, b_max, p_max), b_max, p_max};
}

RotatedDiagram project(const RotatedDiagram& dr, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("project: grid size must be positive");
  RotatedDiagram out;
  out.points.reserve(dr.size());
  for (const auto& pt : dr.points) {
    if (pt.birth < 0.0 || pt.persistence < 0.0) {
      throw std::invalid_argument("project: coordinates must be non-negative");
    }
    const double k = std::floor(pt.birth / delta);
    const double l = std::floor(pt.persistence / delta);
    out.points.push_back({(k + 0.5) * delta, (l + 0.5) * delta});
  }
  return out;
}

Ppd count_cells(const RotatedDiagram& normalized, int resolution) {
  Ppd grid(resolution);
  for (const auto& pt : normalized.points) {
    ++grid.at(cell_of(pt.birth, resolution), cell_of(pt.persistence, resolution));
  }
  return grid;
}

Ppd pixelize(const PersistenceDiagram& d, int resolution) {
  return count_cells(instance_normalize(rotate(d)).diagram, resolution);
}

ExtendedPpd pixelize_extended(const ExtendedPersistenceDiagram& e, int resolution) {
  const std::array<RotatedDiagram, 4> rotated{rotate(e.ord0), rotate(transpose(e.rel1)),
                                              rotate(e.ext0_plus), rotate(transpose(e.ext1_minus))};
  double b_max = 0.0;
  double p_max = 0.0;
  for (const auto& r : rotated) {
    for (const auto& pt : r.points) {
      b_max = std::max(b_max, pt.birth);
      p_max = std::max(p_max, pt.persistence);
    }
  }
  ExtendedPpd out;
  out.b_max = guarded(b_max);
  out.p_max = guarded(p_max);
  for (std::size_t c = 0; c < 4; ++c) {
    out.channels[c] = count_cells(scale_diagram(rotated[c], out.b_max, out.p_max), resolution);
  }
  return out;
}

PatchSequence patchify(std::span<const Ppd> channels, int patch_size) {
  if (channels.empty()) throw std::invalid_argument("patchify: no channels");
  const int h = channels.front().resolution();
  for (const auto& c : channels) {
    if (c.resolution() != h) throw std::invalid_argument("patchify: channels differ in resolution");
  }
  if (patch_size <= 0 || h % patch_size != 0) {
    throw std::invalid_argument("patchify: patch size " + std::to_string(patch_size) +
                                " does not divide resolution " + std::to_string(h));
  }
  PatchSequence seq;
  seq.patch_size = patch_size;
  seq.channels = static_cast<int>(channels.size());
  seq.grid = h / patch_size;
  const std::size_t area = static_cast<std::size_t>(patch_size) * patch_size;
  for (int gr = 0; gr < seq.grid; ++gr) {
    for (int gc = 0; gc < seq.grid; ++gc) {
      Patch patch{gr, gc, std::vector<double>(seq.patch_length(), 0.0)};
      bool nonzero = false;
      for (std::size_t c = 0; c < channels.size(); ++c) {
        for (int r = 0; r < patch_size; ++r) {
          for (int k = 0; k < patch_size; ++k) {
            const auto v = channels[c].at(gr * patch_size + r, gc * patch_size + k);
            if (v != 0) nonzero = true;
            patch.values[c * area + static_cast<std::size_t>(r) * patch_size + k] = v;
          }
        }
      }
      if (nonzero) seq.patches.push_back(std::move(patch));
    }
  }
  return seq;
}

PatchSequence patchify(const ExtendedPpd& x, int patch_size) {
  return patchify(std::span<const Ppd>(x.channels), patch_size);
}

}  // namespace xpert
