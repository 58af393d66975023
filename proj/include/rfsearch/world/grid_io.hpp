#pragma once

#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>
#include <string>

#include "rfsearch/world/voxel_grid.hpp"

namespace rfsearch::world {

inline constexpr char kGridMagic[4] = {'R', 'F', 'V', 'G'};

// Snapshot layout: 32-byte header (magic, dims as u32[3], resolution f32,
// origin f32[3], all little-endian) followed by one byte per cell, plus a
// JSON sidecar at <path>.json.
inline void save_grid_snapshot(const VoxelGrid& grid, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open grid snapshot for writing: " + path);
  char header[32];
  std::memcpy(header, kGridMagic, 4);
  std::uint32_t dims[3] = {std::uint32_t(grid.dims()[0]), std::uint32_t(grid.dims()[1]),
                           std::uint32_t(grid.dims()[2])};
  std::memcpy(header + 4, dims, 12);
  float res = float(grid.resolution());
  std::memcpy(header + 16, &res, 4);
  float origin[3] = {float(grid.origin().x()), float(grid.origin().y()),
                     float(grid.origin().z())};
  std::memcpy(header + 20, origin, 12);
  out.write(header, sizeof(header));
  out.write(reinterpret_cast<const char*>(grid.cells().data()),
            std::streamsize(grid.size()));

  nlohmann::json sidecar;
  sidecar["dims"] = {grid.dims()[0], grid.dims()[1], grid.dims()[2]};
  sidecar["resolution"] = grid.resolution();
  sidecar["origin"] = {grid.origin().x(), grid.origin().y(), grid.origin().z()};
  sidecar["counts"] = {{"unknown", grid.count(CellState::Unknown)},
                       {"free", grid.count(CellState::Free)},
                       {"occupied", grid.count(CellState::Occupied)}};
  std::ofstream side(path + ".json");
  side << sidecar.dump(2) << "\n";
}

inline VoxelGrid load_grid_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open grid snapshot: " + path);
  char header[32];
  in.read(header, sizeof(header));
  if (!in || std::memcmp(header, kGridMagic, 4) != 0)
    throw Error("bad grid snapshot header: " + path);
  std::uint32_t dims[3];
  std::memcpy(dims, header + 4, 12);
  float res;
  std::memcpy(&res, header + 16, 4);
  float origin[3];
  std::memcpy(origin, header + 20, 12);
  VoxelGrid grid(Vec3(origin[0], origin[1], origin[2]), double(res),
                 {int(dims[0]), int(dims[1]), int(dims[2])});
  std::vector<char> cells(grid.size());
  in.read(cells.data(), std::streamsize(cells.size()));
  if (!in) throw Error("truncated grid snapshot: " + path);
  for (size_t i = 0; i < cells.size(); ++i)
    grid.set_state(i, CellState(std::uint8_t(cells[i])));
  return grid;
}

}  // namespace rfsearch::world
