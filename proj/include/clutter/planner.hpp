#pragma once

#include <optional>
#include <string>
#include <vector>

#include "clutter/skills.hpp"
#include "json.hpp"

namespace clutter::plan {

struct PlanAction {
    std::string action;
    nlohmann::json args = nlohmann::json::object();
    std::string reason;

    nlohmann::json to_json() const;
    std::string serialize() const;
};

struct ObjectSummary {
    std::string id;
    double x = 0.0, y = 0.0, z = 0.0, theta = 0.0;
    bool is_target = false;
};

struct AttemptRecord {
    std::string action;       // skill name
    std::string obstacle_id;  // obstacle acted on, empty when n/a
    bool success = true;
};

struct PlannerContext {
    std::string target_name;
    std::vector<ObjectSummary> objects;
    std::vector<std::string> blocking;
    std::optional<skills::SkillResult> last_feedback;
    std::vector<AttemptRecord> recent;  // most recent last
    int step_index = 0;                 // <= 40
    geom::Pose tcp_pose;
    std::optional<std::string> render;  // optional rendered snapshot (SVG/base64)
};

/// Three-section prompt: system (role, tools, output format), task
/// (objective, target, object list), dynamic (observation + feedback).
std::string build_prompt(const PlannerContext& ctx);

/// Extract the first top-level JSON object from free text and validate it
/// as a PlanAction. Throws std::runtime_error on parse/validation failure.
PlanAction parse_plan_action(const std::string& text);

/// Deterministic oracle: hover, clear blockers (push, then pull on repeat
/// failure, then initarm), grasp.
PlanAction scripted_plan(const PlannerContext& ctx);

/// Grasp-only baseline: hover then grasp, no clearing.
PlanAction grasp_only_plan(const PlannerContext& ctx);

struct EndpointConfig {
    std::string base_url;   // e.g. http://127.0.0.1:8080
    std::string path = "/v1/chat/completions";
    std::string model = "default";
    std::string api_key;    // optional bearer token
    int timeout_seconds = 60;

    static EndpointConfig from_environment();  // CLUTTER_LLM_URL/MODEL/API_KEY
};

struct LlmPlanResult {
    PlanAction action;
    bool fallback = false;  // true when the scripted oracle answered instead
};

/// Query an external chat-style inference service; one retry with an
/// error-explaining suffix, then scripted fallback.
LlmPlanResult llm_plan(const PlannerContext& ctx, const EndpointConfig& endpoint);

}  // namespace clutter::plan
