#include <catch2/catch_amalgamated.hpp>

#include "rfsearch/world/grid_io.hpp"
#include "rfsearch/world/integrate.hpp"
#include "rfsearch/world/occlusion.hpp"
#include "rfsearch/world/visibility.hpp"

using namespace rfsearch;
using namespace rfsearch::world;

namespace {

// Independent per-voxel classifier: Liang-Barsky segment clipping against
// each object box, applied with the same classification rules. Used to
// cross-check the production raycaster on small grids.
std::optional<double> oracle_entry(const Vec3& origin, const Vec3& dir, const Aabb& box) {
  double t0 = 0.0, t1 = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    double p = -dir[a], q0 = origin[a] - box.min[a];
    double pq[2][2] = {{p, q0}, {-p, box.max[a] - origin[a]}};
    for (auto& e : pq) {
      if (std::abs(e[0]) < 1e-15) {
        if (e[1] < 0.0) return std::nullopt;
      } else {
        double r = e[1] / e[0];
        if (e[0] < 0.0) {
          if (r > t1) return std::nullopt;
          if (r > t0) t0 = r;
        } else {
          if (r < t0) return std::nullopt;
          if (r < t1) t1 = r;
        }
      }
    }
  }
  return t0;
}

VoxelGrid oracle_integrate(VoxelGrid grid, const CameraPose& pose, const Scene& scene) {
  const double nudge = grid.resolution() * 1e-6;
  for (size_t idx = 0; idx < grid.size(); ++idx) {
    const Vec3 v = grid.center(idx);
    if (!pose.contains(v)) continue;
    Vec3 dir = v - pose.position;
    double t_v = dir.norm();
    if (t_v < 1e-12) continue;
    dir /= t_v;
    std::optional<double> t_hit;
    for (const auto& obj : scene.objects()) {
      auto t = oracle_entry(pose.position, dir, obj.aabb);
      if (t && (!t_hit || *t < *t_hit)) t_hit = t;
    }
    if (t_hit) {
      auto hv = grid.locate(pose.position + (*t_hit + nudge) * dir);
      if (hv && grid.index((*hv)[0], (*hv)[1], (*hv)[2]) == idx) {
        grid.set_state(idx, CellState::Occupied);
        continue;
      }
    }
    if (!t_hit || t_v < *t_hit) {
      if (grid.state(idx) != CellState::Occupied) grid.set_state(idx, CellState::Free);
    }
  }
  return grid;
}

// Downward-looking sensor that covers the whole (flat) grid.
CameraPose overhead_camera(const VoxelGrid& grid) {
  CameraPose pose;
  Aabb b = grid.bounds();
  pose.position = Vec3(b.center().x(), b.center().y(), b.max.z() + 0.09);
  pose.orientation = look_at(-Vec3::UnitZ());
  pose.fov_h = 2.9;
  pose.fov_v = 2.9;
  pose.near = 0.01;
  pose.far = 2.0;
  return pose;
}

}  // namespace

TEST_CASE("integrate_observation: empty scene fully observed") {
  VoxelGrid grid(Vec3::Zero(), 0.05, {10, 10, 2});
  Scene scene;
  integrate_observation(grid, overhead_camera(grid), scene);
  CHECK(grid.observed_fraction() == 1.0);
  CHECK(grid.count(CellState::Free) == grid.size());
}

TEST_CASE("integrate_observation: voxels behind a box stay unknown") {
  VoxelGrid grid(Vec3::Zero(), 0.05, {10, 10, 6});
  Scene scene;
  scene.add({0, ObjectKind::Obstacle, {Vec3(0.1, 0.1, 0.0), Vec3(0.4, 0.4, 0.2)}, {}, ColorClass::Distractor});
  CameraPose pose = overhead_camera(grid);
  integrate_observation(grid, pose, scene);

  // Directly under the box's interior nothing is observed.
  auto below = grid.locate(Vec3(0.25, 0.25, 0.05));
  REQUIRE(below);
  CHECK(grid.state((*below)[0], (*below)[1], (*below)[2]) == CellState::Unknown);
  CHECK(grid.count(CellState::Unknown) > 0);

  // And the result matches the independent oracle exactly.
  VoxelGrid fresh(Vec3::Zero(), 0.05, {10, 10, 6});
  VoxelGrid expect = oracle_integrate(fresh, pose, scene);
  for (size_t i = 0; i < grid.size(); ++i) CHECK(grid.state(i) == expect.state(i));
}

TEST_CASE("integrate_observation: idempotent for a static scene") {
  VoxelGrid grid(Vec3::Zero(), 0.05, {10, 10, 6});
  Scene scene;
  scene.add({0, ObjectKind::Block, {Vec3(0.2, 0.2, 0.0), Vec3(0.3, 0.3, 0.1)}, {}, ColorClass::Distractor});
  CameraPose pose = overhead_camera(grid);
  integrate_observation(grid, pose, scene);
  auto snapshot = grid.cells();
  integrate_observation(grid, pose, scene);
  CHECK(grid.cells() == snapshot);
}

TEST_CASE("integrate_observation: observed set never shrinks") {
  VoxelGrid grid(Vec3::Zero(), 0.05, {12, 12, 6});
  Scene scene;
  scene.add({0, ObjectKind::Obstacle, {Vec3(0.15, 0.15, 0.0), Vec3(0.35, 0.35, 0.25)}, {}, ColorClass::Distractor});
  Rng rng(7);
  std::vector<std::uint8_t> seen(grid.size(), 0);
  for (int k = 0; k < 5; ++k) {
    CameraPose pose;
    pose.position = Vec3(draw_uniform(rng, 0.1, 0.5), draw_uniform(rng, 0.1, 0.5),
                         draw_uniform(rng, 0.35, 0.39));
    pose.orientation = look_at(Vec3(draw_uniform(rng, -0.3, 0.3),
                                    draw_uniform(rng, -0.3, 0.3), -1.0));
    pose.fov_h = 1.6;
    pose.fov_v = 1.4;
    pose.near = 0.01;
    integrate_observation(grid, pose, scene);
    for (size_t i = 0; i < grid.size(); ++i) {
      if (seen[i]) CHECK(grid.observed(i));
      if (grid.observed(i)) seen[i] = 1;
    }
  }
}

TEST_CASE("integrate_observation: rejects a pose far outside the workspace") {
  VoxelGrid grid(Vec3::Zero(), 0.05, {10, 10, 2});
  Scene scene;
  CameraPose pose = overhead_camera(grid);
  pose.position = Vec3(5.0, 5.0, 5.0);
  CHECK_THROWS_AS(integrate_observation(grid, pose, scene), PoseOutOfBounds);
}

TEST_CASE("fit_gaussian basics") {
  CHECK_THROWS_AS(fit_gaussian({}), EmptyRegion);

  auto [m1, c1] = fit_gaussian({Vec3(1.0, 2.0, 3.0)});
  CHECK(m1.isApprox(Vec3(1.0, 2.0, 3.0)));
  CHECK(c1.norm() == 0.0);

  auto [m2, c2] = fit_gaussian({Vec3::Zero(), Vec3(1.0, 0.0, 0.0)});
  CHECK(m2.isApprox(Vec3(0.5, 0.0, 0.0)));
  CHECK(c2(0, 0) == Catch::Approx(0.25).margin(1e-15));
  CHECK(std::abs(c2(1, 1)) < 1e-15);
  CHECK(std::abs(c2(2, 2)) < 1e-15);
}

TEST_CASE("fit_gaussian covariance stays symmetric PSD on random sets") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vec3> pts;
    int n = 1 + int(draw_uniform(rng, 0.0, 40.0));
    for (int i = 0; i < n; ++i)
      pts.push_back(Vec3(draw_normal(rng), draw_normal(rng), draw_normal(rng)));
    auto [mean, cov] = fit_gaussian(pts);
    CHECK((cov - cov.transpose()).norm() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-9);
  }
}

TEST_CASE("extract_occluded_regions: fully observed grid yields none") {
  VoxelGrid grid(Vec3::Zero(), 0.05, {10, 10, 2});
  Scene scene;
  integrate_observation(grid, overhead_camera(grid), scene);
  CHECK(extract_occluded_regions(grid, 3).empty());
}

TEST_CASE("extract_occluded_regions: uniform cube moments") {
  // 12^3 grid, all Free except a 10^3 unknown cube at indices 1..10.
  VoxelGrid grid(Vec3::Zero(), 0.02, {12, 12, 12});
  for (size_t i = 0; i < grid.size(); ++i) grid.set_state(i, CellState::Free);
  for (int z = 1; z <= 10; ++z)
    for (int y = 1; y <= 10; ++y)
      for (int x = 1; x <= 10; ++x)
        grid.set_state(grid.index(x, y, z), CellState::Unknown);

  auto regions = extract_occluded_regions(grid, 4);
  REQUIRE(regions.size() == 1);
  CHECK(regions[0].voxel_ids.size() == 1000);

  // Closed-form moments of voxel centers on a uniform 10-point lattice:
  // mean at the cube center, variance res^2 (n^2 - 1) / 12 per axis.
  Vec3 expected_mean = grid.center(1, 1, 1) + 0.5 * Vec3::Constant(9 * 0.02);
  CHECK((regions[0].mean - expected_mean).norm() < 1e-6);
  double expected_var = 0.02 * 0.02 * (100.0 - 1.0) / 12.0;
  for (int a = 0; a < 3; ++a)
    CHECK(regions[0].cov_seed(a, a) == Catch::Approx(expected_var).epsilon(1e-9));
  CHECK(regions[0].cov_seed(0, 1) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("extract_occluded_regions: largest-first truncation") {
  VoxelGrid grid(Vec3::Zero(), 0.02, {20, 20, 10});
  for (size_t i = 0; i < grid.size(); ++i) grid.set_state(i, CellState::Free);
  // 500-voxel blob: 10 x 10 x 5, and a 100-voxel blob: 5 x 5 x 4.
  for (int z = 1; z <= 5; ++z)
    for (int y = 0; y < 10; ++y)
      for (int x = 0; x < 10; ++x) grid.set_state(grid.index(x, y, z), CellState::Unknown);
  for (int z = 1; z <= 4; ++z)
    for (int y = 14; y < 19; ++y)
      for (int x = 14; x < 19; ++x) grid.set_state(grid.index(x, y, z), CellState::Unknown);

  auto one = extract_occluded_regions(grid, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].voxel_ids.size() == 500);

  auto both = extract_occluded_regions(grid, 5);
  REQUIRE(both.size() == 2);
  CHECK(both[0].voxel_ids.size() == 500);
  CHECK(both[1].voxel_ids.size() == 100);

  // Regions partition the unknown set above the table layer.
  size_t unknown_above = 0;
  for (size_t i = 0; i < grid.size(); ++i)
    if (grid.state(i) == CellState::Unknown && grid.coords(i)[2] >= 1) ++unknown_above;
  CHECK(both[0].voxel_ids.size() + both[1].voxel_ids.size() == unknown_above);

  // RF association pulls the smaller-but-nearer region to the front.
  Vec3 near_small = both[1].mean;
  auto assoc = extract_occluded_regions(grid, 5, near_small);
  REQUIRE(assoc.size() == 2);
  CHECK(assoc[0].voxel_ids.size() == 100);
}

TEST_CASE("visible_fraction thresholds") {
  VoxelGrid grid(Vec3::Zero(), 0.02, {20, 20, 10});
  Vec3 p(0.2, 0.2, 0.1);
  Vec3 vicinity(0.05, 0.05, 0.10);

  CHECK(visible_fraction(grid, p, vicinity) == 0.0);

  for (size_t i = 0; i < grid.size(); ++i) grid.set_state(i, CellState::Free);
  CHECK(visible_fraction(grid, p, vicinity) == 1.0);

  // Enumerate the vicinity set directly and knock out exactly half.
  Aabb box{p - 0.5 * vicinity, p + 0.5 * vicinity};
  std::vector<size_t> members;
  for (size_t i = 0; i < grid.size(); ++i)
    if (box.contains(grid.center(i))) members.push_back(i);
  REQUIRE(members.size() % 2 == 0);
  for (size_t k = 0; k < members.size() / 2; ++k)
    grid.set_state(members[k], CellState::Unknown);
  CHECK(visible_fraction(grid, p, vicinity) == 0.5);

  CHECK_THROWS_AS(visible_fraction(grid, Vec3(50.0, 50.0, 50.0), vicinity), EmptyVicinity);
}

TEST_CASE("signed distance to the bare frustum") {
  CameraPose pose;
  pose.position = Vec3(0.0, 0.0, 0.0);
  pose.orientation = Eigen::Quaterniond::Identity();  // looking along +Z

  Vec3 centroid = Vec3(0.0, 0.0, 0.5 * (pose.near + pose.far));
  CHECK(signed_distance_to_fov(centroid, pose) > 0.0);

  CHECK(signed_distance_to_fov(Vec3(0.0, 0.0, -0.5), pose) < 0.0);

  // A point on the near plane, inside the cone, sits on the boundary.
  Vec3 on_face(0.0, 0.0, pose.near);
  CHECK(std::abs(signed_distance_to_fov(on_face, pose)) < 1e-6);

  // Exterior distance to the far plane is the gap beyond it.
  Vec3 beyond(0.0, 0.0, pose.far + 0.25);
  CHECK(signed_distance_to_fov(beyond, pose) == Catch::Approx(-0.25).margin(1e-6));
}

TEST_CASE("frontier patch shadows flip the sign of sd") {
  CameraPose pose;
  pose.position = Vec3(0.0, 0.0, 0.0);
  pose.orientation = Eigen::Quaterniond::Identity();

  // A small square patch at z=0.5 facing the camera.
  FrontierPatch patch;
  patch.center = Vec3(0.0, 0.0, 0.5);
  patch.axis_u = Vec3::UnitX();
  patch.axis_v = Vec3::UnitY();
  patch.half_u = 0.1;
  patch.half_v = 0.1;
  patch.normal = -Vec3::UnitZ();  // free side toward the camera

  Vec3 hidden(0.0, 0.0, 0.8);  // straight behind the patch
  CHECK(signed_distance_to_fov(hidden, pose, {patch}) < 0.0);
  CHECK(signed_distance_to_fov(hidden, pose) > 0.0);

  Vec3 visible(0.4, 0.0, 0.9);  // inside the frustum, well off the shadow
  CHECK(signed_distance_to_fov(visible, pose, {patch}) > 0.0);

  // Moving the camera sideways restores line of sight to the shadow point.
  CameraPose side = pose;
  side.position = Vec3(0.6, 0.0, 0.2);
  side.orientation = look_at((hidden - side.position).normalized());
  CHECK(signed_distance_to_fov(hidden, side, {patch}) > 0.0);
}

TEST_CASE("fit_frontier_patch orients toward free space") {
  // Unknown slab at x >= 10 observed from the -x side.
  VoxelGrid grid(Vec3::Zero(), 0.02, {20, 12, 8});
  for (size_t i = 0; i < grid.size(); ++i) {
    auto c = grid.coords(i);
    grid.set_state(i, c[0] >= 10 ? CellState::Unknown : CellState::Free);
  }
  auto regions = extract_occluded_regions(grid, 2);
  REQUIRE(regions.size() == 1);
  auto patch = fit_frontier_patch(grid, regions[0]);
  REQUIRE(patch);
  CHECK(patch->normal.dot(Vec3::UnitX()) < -0.9);  // free side is -x
  CHECK(std::abs(patch->center.x() - grid.center(10, 0, 0).x()) < 0.02);
}

TEST_CASE("grid snapshot round-trips") {
  VoxelGrid grid(Vec3(0.1, -0.2, 0.0), 0.02, {8, 6, 4});
  Rng rng(3);
  for (size_t i = 0; i < grid.size(); ++i)
    grid.set_state(i, CellState(int(draw_uniform(rng, 0.0, 2.999))));
  std::string path = "test_grid_snapshot.bin";
  save_grid_snapshot(grid, path);
  VoxelGrid loaded = load_grid_snapshot(path);
  CHECK(loaded.dims() == grid.dims());
  CHECK(loaded.resolution() == Catch::Approx(grid.resolution()).epsilon(1e-6));
  CHECK(loaded.cells() == grid.cells());
  std::remove(path.c_str());
  std::remove((path + ".json").c_str());
}
