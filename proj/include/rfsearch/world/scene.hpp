#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <vector>

#include "rfsearch/common.hpp"

namespace rfsearch::world {

enum class ObjectKind { Block, Obstacle, Cover, Bin };
enum class ColorClass { Target, Distractor };

struct SceneObject {
  int id = 0;
  ObjectKind kind = ObjectKind::Block;
  Aabb aabb;
  std::optional<int> tag;  // RFID id, at most one object per id
  ColorClass color_class = ColorClass::Distractor;
};

// Entry distance of a ray into an AABB (slab method). Returns nullopt when
// the ray misses or the box lies entirely behind the origin.
inline std::optional<double> ray_aabb_entry(const Vec3& origin, const Vec3& dir,
                                            const Aabb& box) {
  double t_near = -std::numeric_limits<double>::infinity();
  double t_far = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (std::abs(dir[a]) < 1e-15) {
      if (origin[a] < box.min[a] || origin[a] > box.max[a]) return std::nullopt;
      continue;
    }
    double inv = 1.0 / dir[a];
    double t0 = (box.min[a] - origin[a]) * inv;
    double t1 = (box.max[a] - origin[a]) * inv;
    if (t0 > t1) std::swap(t0, t1);
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
  }
  if (t_near > t_far || t_far < 0.0) return std::nullopt;
  return std::max(t_near, 0.0);
}

struct RayHit {
  double t;
  int object_index;
};

class Scene {
 public:
  Scene() = default;
  explicit Scene(std::vector<SceneObject> objects) : objects_(std::move(objects)) {}

  std::vector<SceneObject>& objects() { return objects_; }
  const std::vector<SceneObject>& objects() const { return objects_; }

  void add(SceneObject obj) { objects_.push_back(std::move(obj)); }

  const SceneObject* find_by_tag(int tag_id) const {
    for (const auto& o : objects_)
      if (o.tag && *o.tag == tag_id) return &o;
    return nullptr;
  }

  SceneObject* find_by_tag(int tag_id) {
    for (auto& o : objects_)
      if (o.tag && *o.tag == tag_id) return &o;
    return nullptr;
  }

  const SceneObject* find_by_id(int id) const {
    for (const auto& o : objects_)
      if (o.id == id) return &o;
    return nullptr;
  }

  SceneObject* find_by_id(int id) {
    for (auto& o : objects_)
      if (o.id == id) return &o;
    return nullptr;
  }

  void remove_by_id(int id) {
    objects_.erase(std::remove_if(objects_.begin(), objects_.end(),
                                  [&](const SceneObject& o) { return o.id == id; }),
                   objects_.end());
  }

  // Nearest intersection along the ray, over all objects.
  std::optional<RayHit> first_hit(const Vec3& origin, const Vec3& dir) const {
    std::optional<RayHit> best;
    for (size_t i = 0; i < objects_.size(); ++i) {
      auto t = ray_aabb_entry(origin, dir, objects_[i].aabb);
      if (t && (!best || *t < best->t)) best = RayHit{*t, static_cast<int>(i)};
    }
    return best;
  }

 private:
  std::vector<SceneObject> objects_;
};

}  // namespace rfsearch::world
