#pragma once

#include <optional>
#include <string>
#include <vector>

#include "clutter/geometry.hpp"
#include "clutter/handrig.hpp"

namespace clutter::world {

struct SceneObject {
    std::string id;
    std::vector<geom::ShapePart> parts;  // at least one
    geom::Pose pose;
    double footprint_radius = 0.025;
    double mass = 0.1;
    double friction_static = 1.0;
    double friction_dynamic = 1.0;
    bool is_target = false;
    bool attached = false;
    geom::Pose attach_rel;  // object pose in TCP frame, valid while attached

    geom::Vec3 centroid() const { return pose.position; }
};

struct SceneState {
    std::vector<SceneObject> objects;
    rig::HandState hand;
    double workspace_halfwidth = 0.30;
    long tick = 0;

    const SceneObject* find(const std::string& id) const;
    SceneObject* find(const std::string& id);
    const SceneObject* target() const;
};

struct SettleResult {
    SceneState scene;
    double max_displacement = 0.0;
};

inline constexpr double kPenetrationTol = 1e-4;
inline constexpr double kDefaultCorridorHalfwidth = 0.04;

/// Two-phase overlap relaxation: 30 resolution iterations, then 60
/// iterations recording the maximum per-object displacement. Throws if
/// overlaps remain unresolved after phase 1.
SettleResult settle(const SceneState& scene);

struct DisplaceResult {
    SceneState scene;
    std::vector<std::string> contacts;
};

/// Translate an object in 5mm increments; footprint collisions push
/// neighbors by minimum translation (single-level propagation).
DisplaceResult displace_object(const SceneState& scene, const std::string& id,
                               double dir_x, double dir_y, double dist);

/// Obstacles whose footprint intersects the vertical approach cylinder
/// around the target, nearest first.
std::vector<std::string> approach_clearance(
    const SceneState& scene, const std::string& target_id,
    double corridor_halfwidth = kDefaultCorridorHalfwidth);

/// Objects strictly outside the workspace square.
std::vector<std::string> escaped_objects(const SceneState& scene);

/// Attached objects follow the TCP frame rigidly.
SceneState tick_attached(const SceneState& scene);

}  // namespace clutter::world
