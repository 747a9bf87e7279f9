#include "clutter/skills.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace clutter::skills {

Side side_from_string(const std::string& s) {
    if (s == "left") return Side::Left;
    if (s == "center") return Side::Center;
    if (s == "right") return Side::Right;
    throw std::invalid_argument("unknown side: " + s);
}

std::string side_to_string(Side s) {
    switch (s) {
        case Side::Left: return "left";
        case Side::Center: return "center";
        case Side::Right: return "right";
    }
    return "?";
}

double side_yaw_offset(Side s) {
    switch (s) {
        case Side::Left: return M_PI / 6.0;
        case Side::Center: return 0.0;
        case Side::Right: return -M_PI / 6.0;
    }
    return 0.0;
}

nlohmann::json SkillResult::to_json() const {
    return {{"success", success},
            {"message", message},
            {"detail", detail},
            {"observation", observation}};
}

namespace {

nlohmann::json scene_observation(const world::SceneState& scene) {
    nlohmann::json objects = nlohmann::json::array();
    for (const auto& o : scene.objects)
        objects.push_back({{"id", o.id},
                           {"x", o.pose.position.x},
                           {"y", o.pose.position.y},
                           {"z", o.pose.position.z},
                           {"theta", o.pose.yaw},
                           {"is_target", o.is_target},
                           {"attached", o.attached}});
    nlohmann::json blocking = nlohmann::json::array();
    if (const auto* t = scene.target())
        for (const auto& id : world::approach_clearance(scene, t->id)) blocking.push_back(id);
    nlohmann::json escaped = nlohmann::json::array();
    for (const auto& id : world::escaped_objects(scene)) escaped.push_back(id);
    return {{"objects", objects},
            {"blocking", blocking},
            {"escaped", escaped},
            {"tcp",
             {{"x", scene.hand.tcp_pose.position.x},
              {"y", scene.hand.tcp_pose.position.y},
              {"z", scene.hand.tcp_pose.position.z},
              {"yaw", scene.hand.tcp_pose.yaw}}}};
}

SkillOutcome finish(world::SceneState scene, bool success, std::string message,
                    std::string detail = "") {
    SkillOutcome out{std::move(scene), {}, std::nullopt};
    out.result.success = success;
    out.result.message = std::move(message);
    out.result.detail = std::move(detail);
    out.result.observation = scene_observation(out.scene);
    return out;
}

// Nearest blocking obstacle; if nothing blocks, the nearest obstacle overall.
const world::SceneObject* select_obstacle(const world::SceneState& scene) {
    const auto* target = scene.target();
    if (!target) return nullptr;
    auto blocking = world::approach_clearance(scene, target->id);
    if (!blocking.empty()) return scene.find(blocking.front());
    const world::SceneObject* best = nullptr;
    double best_d = 1e18;
    for (const auto& o : scene.objects) {
        if (o.is_target) continue;
        double d = std::hypot(o.pose.position.x - target->pose.position.x,
                              o.pose.position.y - target->pose.position.y);
        if (d < best_d) {
            best_d = d;
            best = &o;
        }
    }
    return best;
}

SkillOutcome clearing_skill(const world::SceneState& scene, Side side, double dist,
                            bool pull) {
    if (!(dist > 0.0) || dist > kMaxPushDist)
        throw std::invalid_argument("dist must be in (0, 0.15]");
    const auto* target = scene.target();
    if (!target) return finish(scene, false, msg::not_found, "scene has no target");
    const auto* obstacle = select_obstacle(scene);
    if (!obstacle) return finish(scene, false, msg::no_obstacle);
    std::string obstacle_id = obstacle->id;

    world::SceneState s = scene;
    s.hand.tcp_pose.yaw = geom::wrap_angle(side_yaw_offset(side));

    double dir_x, dir_y;
    if (pull) {
        dir_x = 0.0;
        dir_y = -1.0;  // toward the robot base
    } else {
        dir_x = obstacle->pose.position.x - target->pose.position.x;
        dir_y = obstacle->pose.position.y - target->pose.position.y;
        double n = std::hypot(dir_x, dir_y);
        if (n < 1e-9) {
            dir_x = 0.0;
            dir_y = 1.0;
        } else {
            dir_x /= n;
            dir_y /= n;
        }
    }

    geom::Vec3 before = s.find(obstacle_id)->pose.position;
    auto displaced = world::displace_object(s, obstacle_id, dir_x, dir_y, dist);

    if (std::find(displaced.contacts.begin(), displaced.contacts.end(), target->id) !=
        displaced.contacts.end())
        return finish(scene, false, msg::collision,
                      (pull ? "pull" : "push") + std::string(" would contact the target"));

    double moved = (displaced.scene.find(obstacle_id)->pose.position - before).norm();
    if (moved < kStuckFraction * dist)
        return finish(std::move(displaced.scene), false, msg::stuck,
                      "obstacle " + obstacle_id + " barely moved");

    auto escaped = world::escaped_objects(displaced.scene);
    if (!escaped.empty())
        return finish(std::move(displaced.scene), false, msg::escaped,
                      "escaped: " + escaped.front());

    auto out = finish(std::move(displaced.scene), true,
                      std::string(pull ? "pulled " : "pushed ") + obstacle_id);
    return out;
}

}  // namespace

SkillOutcome skill_push(const world::SceneState& scene, Side side, double dist) {
    return clearing_skill(scene, side, dist, false);
}

SkillOutcome skill_pull(const world::SceneState& scene, Side side, double dist) {
    return clearing_skill(scene, side, dist, true);
}

SkillOutcome skill_move_to(const world::SceneState& scene, const std::string& target) {
    const auto* obj = scene.find(target);
    if (!obj) return finish(scene, false, msg::not_found, "no object named " + target);
    world::SceneState s = scene;
    s.hand.tcp_pose.position = obj->centroid() + geom::Vec3{0.0, 0.0, kHoverOffset};
    s = world::tick_attached(s);
    return finish(std::move(s), true, "hovering over " + target);
}

SkillOutcome skill_lift(const world::SceneState& scene, double height) {
    if (!(height > 0.0)) throw std::invalid_argument("lift height must be positive");
    world::SceneState s = scene;
    double want = s.hand.tcp_pose.position.z + height;
    bool clamped = want > kMaxTcpHeight;
    s.hand.tcp_pose.position.z = std::min(want, kMaxTcpHeight);
    s = world::tick_attached(s);
    return finish(std::move(s), true, clamped ? "lifted (clamped to workspace ceiling)" : "lifted");
}

SkillOutcome skill_lower(const world::SceneState& scene, double height) {
    if (!(height > 0.0)) throw std::invalid_argument("lower height must be positive");
    world::SceneState s = scene;
    double want = s.hand.tcp_pose.position.z - height;
    bool clamped = want < 0.0;
    s.hand.tcp_pose.position.z = std::max(want, 0.0);
    s = world::tick_attached(s);
    return finish(std::move(s), true, clamped ? "lowered (clamped at table)" : "lowered");
}

SkillOutcome skill_grasp(const world::SceneState& scene, const grasp::EpisodeConfig& cfg) {
    const auto* target = scene.target();
    if (!target) return finish(scene, false, msg::not_found, "scene has no target");
    double reach = (scene.hand.tcp_pose.position - target->centroid()).norm();
    if (reach > kGraspReach)
        return finish(scene, false, msg::not_reached,
                      "hand is " + std::to_string(reach) + " m from the target");
    auto blocking = world::approach_clearance(scene, target->id);
    if (!blocking.empty())
        return finish(scene, false, msg::collision,
                      "approach corridor blocked by " + blocking.front());

    world::SceneState s = scene;
    auto outcome = grasp::run_grasp_episode(s, target->id, grasp::geo_controller, cfg);
    auto out = outcome.success
                   ? finish(std::move(s), true, "target grasped and lifted")
                   : finish(std::move(s), false, msg::stuck, "grasp did not lift the target");
    out.grasp = outcome;
    return out;
}

SkillOutcome skill_initarm(const world::SceneState& scene) {
    world::SceneState s = scene;
    s.hand.tcp_pose = kHomePose;
    s = world::tick_attached(s);
    return finish(std::move(s), true, "arm at home");
}

SkillOutcome skill_inithand(const world::SceneState& scene) {
    world::SceneState s = scene;
    s.hand.finger_joints.fill(0.0);
    return finish(std::move(s), true, "hand open");
}

nlohmann::json tool_manifest() {
    auto side_arg = nlohmann::json{
        {"type", "string"}, {"enum", {"left", "center", "right"}}};
    auto dist_arg = nlohmann::json{{"type", "number"},
                                   {"exclusiveMinimum", 0.0},
                                   {"maximum", kMaxPushDist},
                                   {"default", kDefaultPushDist}};
    auto height_arg = nlohmann::json{{"type", "number"},
                                     {"exclusiveMinimum", 0.0},
                                     {"maximum", kMaxTcpHeight},
                                     {"default", kDefaultLiftHeight}};
    nlohmann::json tools = nlohmann::json::array();
    auto add = [&](const std::string& name, const std::string& desc,
                   nlohmann::json props, std::vector<std::string> required) {
        tools.push_back({{"name", name},
                         {"description", desc},
                         {"inputSchema",
                          {{"type", "object"},
                           {"properties", std::move(props)},
                           {"required", required}}}});
    };
    add("push", "Approach the nearest obstacle relative to the target and push it away to clear a path.",
        {{"side", side_arg}, {"dist", dist_arg}}, {"side"});
    add("pull", "Hook the nearest obstacle and pull it closer to the robot base to remove occlusion.",
        {{"side", side_arg}, {"dist", dist_arg}}, {"side"});
    add("move_to", "Move the end-effector to a pre-grasp hover position above the named object.",
        {{"target", {{"type", "string"}}}}, {"target"});
    add("lift", "Lift the end-effector vertically.", {{"height", height_arg}}, {});
    add("lower", "Lower the end-effector vertically.", {{"height", height_arg}}, {});
    add("grasp", "Run the geometry-driven grasp controller on the target object.",
        nlohmann::json::object(), {});
    add("initarm", "Reset the arm to the home configuration.", nlohmann::json::object(), {});
    add("inithand", "Open the hand to the zero configuration.", nlohmann::json::object(), {});
    return tools;
}

std::vector<std::string> tool_names() {
    return {"push", "pull", "move_to", "lift", "lower", "grasp", "initarm", "inithand"};
}

std::optional<std::string> validate_args(const std::string& name,
                                         const nlohmann::json& args) {
    auto names = tool_names();
    if (std::find(names.begin(), names.end(), name) == names.end())
        return "unknown tool: " + name;
    if (!args.is_object()) return "arguments must be an object";

    if (name == "push" || name == "pull") {
        if (!args.contains("side") || !args["side"].is_string())
            return "missing string argument: side";
        std::string side = args["side"].get<std::string>();
        if (side != "left" && side != "center" && side != "right")
            return "side must be one of left, center, right";
        if (args.contains("dist")) {
            if (!args["dist"].is_number()) return "dist must be a number";
            double d = args["dist"].get<double>();
            if (!(d > 0.0) || d > kMaxPushDist)
                return "dist must be in (0, 0.15]";
        }
        for (auto& [k, v] : args.items())
            if (k != "side" && k != "dist") return "unexpected argument: " + k;
    } else if (name == "move_to") {
        if (!args.contains("target") || !args["target"].is_string())
            return "missing string argument: target";
        for (auto& [k, v] : args.items())
            if (k != "target") return "unexpected argument: " + k;
    } else if (name == "lift" || name == "lower") {
        if (args.contains("height")) {
            if (!args["height"].is_number()) return "height must be a number";
            double h = args["height"].get<double>();
            if (!(h > 0.0) || h > kMaxTcpHeight) return "height must be in (0, 0.5]";
        }
        for (auto& [k, v] : args.items())
            if (k != "height") return "unexpected argument: " + k;
    } else {
        if (!args.empty()) return name + " takes no arguments";
    }
    return std::nullopt;
}

SkillOutcome execute(const world::SceneState& scene, const SkillRequest& request) {
    if (auto err = validate_args(request.name, request.args))
        throw std::invalid_argument(*err);
    const auto& a = request.args;
    if (request.name == "push")
        return skill_push(scene, side_from_string(a.at("side").get<std::string>()),
                          a.value("dist", kDefaultPushDist));
    if (request.name == "pull")
        return skill_pull(scene, side_from_string(a.at("side").get<std::string>()),
                          a.value("dist", kDefaultPushDist));
    if (request.name == "move_to")
        return skill_move_to(scene, a.at("target").get<std::string>());
    if (request.name == "lift") return skill_lift(scene, a.value("height", kDefaultLiftHeight));
    if (request.name == "lower") return skill_lower(scene, a.value("height", kDefaultLiftHeight));
    if (request.name == "grasp") return skill_grasp(scene);
    if (request.name == "initarm") return skill_initarm(scene);
    if (request.name == "inithand") return skill_inithand(scene);
    throw std::invalid_argument("unknown tool: " + request.name);
}

}  // namespace clutter::skills
