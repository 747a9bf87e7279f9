#pragma once

#include <optional>
#include <string>
#include <vector>

#include "clutter/geograsp.hpp"
#include "clutter/simworld.hpp"
#include "json.hpp"

namespace clutter::skills {

inline constexpr double kDefaultPushDist = 0.08;
inline constexpr double kMaxPushDist = 0.15;
inline constexpr double kDefaultLiftHeight = 0.20;
inline constexpr double kMaxTcpHeight = 0.50;
inline constexpr double kHoverOffset = 0.15;
inline constexpr double kGraspReach = 0.25;
inline constexpr double kStuckFraction = 0.10;

inline const geom::Pose kHomePose{{0.0, -0.25, 0.30}, 0.0, 0.0, 0.0};

/// Failure messages come from this closed vocabulary.
namespace msg {
inline const std::string collision = "collision detected";
inline const std::string not_found = "target not found";
inline const std::string not_reached = "target not reached";
inline const std::string escaped = "object escaped";
inline const std::string no_obstacle = "no obstacle";
inline const std::string stuck = "stuck detected";
}  // namespace msg

enum class Side { Left, Center, Right };

Side side_from_string(const std::string& s);          // throws on unknown
std::string side_to_string(Side s);
double side_yaw_offset(Side s);                       // left:+pi/6 center:0 right:-pi/6

struct SkillRequest {
    std::string name;
    nlohmann::json args = nlohmann::json::object();
};

struct SkillResult {
    bool success = true;
    std::string message;   // closed vocabulary on failure, free-form note on success
    std::string detail;
    nlohmann::json observation;  // object poses, blocking ids, escaped ids

    nlohmann::json to_json() const;
};

struct SkillOutcome {
    world::SceneState scene;
    SkillResult result;
    std::optional<grasp::GraspOutcome> grasp;
};

SkillOutcome skill_push(const world::SceneState& scene, Side side, double dist);
SkillOutcome skill_pull(const world::SceneState& scene, Side side, double dist);
SkillOutcome skill_move_to(const world::SceneState& scene, const std::string& target);
SkillOutcome skill_lift(const world::SceneState& scene, double height = kDefaultLiftHeight);
SkillOutcome skill_lower(const world::SceneState& scene, double height = kDefaultLiftHeight);
SkillOutcome skill_grasp(const world::SceneState& scene,
                         const grasp::EpisodeConfig& cfg = {});
SkillOutcome skill_initarm(const world::SceneState& scene);
SkillOutcome skill_inithand(const world::SceneState& scene);

/// Machine-readable tool manifest consumed by tools/list.
nlohmann::json tool_manifest();
std::vector<std::string> tool_names();

/// Validate arguments against the manifest schema; returns an error
/// description or nullopt when valid.
std::optional<std::string> validate_args(const std::string& name,
                                         const nlohmann::json& args);

/// Dispatch a validated request. Throws std::invalid_argument for unknown
/// tools or invalid arguments; skill failures are in-band.
SkillOutcome execute(const world::SceneState& scene, const SkillRequest& request);

}  // namespace clutter::skills
