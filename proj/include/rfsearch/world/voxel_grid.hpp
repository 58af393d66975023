#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rfsearch/common.hpp"

namespace rfsearch::world {

enum class CellState : std::uint8_t { Unknown = 0, Free = 1, Occupied = 2 };

// Tri-state workspace map. A voxel counts as observed exactly when its state
// is no longer Unknown, so the observed flag is derived rather than stored.
class VoxelGrid {
 public:
  VoxelGrid() = default;

  VoxelGrid(const Vec3& origin, double resolution, std::array<int, 3> dims)
      : origin_(origin), resolution_(resolution), dims_(dims) {
    if (resolution <= 0.0) throw Error("voxel resolution must be positive");
    std::int64_t n = std::int64_t(dims[0]) * dims[1] * dims[2];
    if (n <= 0 || n > (std::int64_t(1) << 24))
      throw Error("voxel count out of range");
    cells_.assign(static_cast<size_t>(n), CellState::Unknown);
  }

  static VoxelGrid for_workspace(const Aabb& box, double resolution) {
    std::array<int, 3> dims;
    for (int a = 0; a < 3; ++a)
      dims[a] = std::max(1, int(std::ceil((box.max[a] - box.min[a]) / resolution - 1e-9)));
    return VoxelGrid(box.min, resolution, dims);
  }

  const Vec3& origin() const { return origin_; }
  double resolution() const { return resolution_; }
  const std::array<int, 3>& dims() const { return dims_; }
  size_t size() const { return cells_.size(); }

  Aabb bounds() const {
    Vec3 ext(dims_[0] * resolution_, dims_[1] * resolution_, dims_[2] * resolution_);
    return {origin_, origin_ + ext};
  }

  size_t index(int x, int y, int z) const {
    return size_t(x) + size_t(dims_[0]) * (size_t(y) + size_t(dims_[1]) * size_t(z));
  }

  std::array<int, 3> coords(size_t idx) const {
    int x = int(idx % dims_[0]);
    int y = int((idx / dims_[0]) % dims_[1]);
    int z = int(idx / (size_t(dims_[0]) * dims_[1]));
    return {x, y, z};
  }

  bool in_bounds(int x, int y, int z) const {
    return x >= 0 && y >= 0 && z >= 0 && x < dims_[0] && y < dims_[1] && z < dims_[2];
  }

  Vec3 center(int x, int y, int z) const {
    return origin_ + resolution_ * Vec3(x + 0.5, y + 0.5, z + 0.5);
  }

  Vec3 center(size_t idx) const {
    auto c = coords(idx);
    return center(c[0], c[1], c[2]);
  }

  // Voxel coordinates containing a world point; nullopt outside the grid.
  std::optional<std::array<int, 3>> locate(const Vec3& p) const {
    Vec3 rel = (p - origin_) / resolution_;
    int x = int(std::floor(rel.x()));
    int y = int(std::floor(rel.y()));
    int z = int(std::floor(rel.z()));
    if (!in_bounds(x, y, z)) return std::nullopt;
    return std::array<int, 3>{x, y, z};
  }

  CellState state(size_t idx) const { return cells_[idx]; }
  CellState state(int x, int y, int z) const { return cells_[index(x, y, z)]; }
  void set_state(size_t idx, CellState s) { cells_[idx] = s; }

  bool observed(size_t idx) const { return cells_[idx] != CellState::Unknown; }

  double observed_fraction() const {
    size_t n = 0;
    for (auto c : cells_)
      if (c != CellState::Unknown) ++n;
    return double(n) / double(cells_.size());
  }

  size_t count(CellState s) const {
    size_t n = 0;
    for (auto c : cells_)
      if (c == s) ++n;
    return n;
  }

  const std::vector<CellState>& cells() const { return cells_; }

 private:
  Vec3 origin_ = Vec3::Zero();
  double resolution_ = 0.02;
  std::array<int, 3> dims_ = {1, 1, 1};
  std::vector<CellState> cells_;
};

}  // namespace rfsearch::world
