#include "clutter/planner.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "httplib.h"

namespace clutter::plan {

nlohmann::json PlanAction::to_json() const {
    return {{"action", action}, {"args", args}, {"reason", reason}};
}

std::string PlanAction::serialize() const { return to_json().dump(); }

std::string build_prompt(const PlannerContext& ctx) {
    std::ostringstream out;
    out << "## System\n"
        << "You are a careful and disciplined robot manipulation planner. "
        << "Your goal is to clear obstacles and grasp the target object.\n"
        << "Available tools:\n";
    for (const auto& tool : skills::tool_manifest())
        out << "- " << tool["name"].get<std::string>() << ": "
            << tool["description"].get<std::string>() << "\n";
    out << "Output format: Return a strictly valid JSON object: "
        << R"({ "action": "...", "args": {...}, "reason": "..." })" << "\n";

    out << "\n## Task\n"
        << "Objective: Clear clutter around the target object to enable a successful grasp.\n"
        << "The target object is a " << ctx.target_name << ".\n"
        << "Available objects: [";
    for (std::size_t i = 0; i < ctx.objects.size(); ++i) {
        if (i) out << ", ";
        out << ctx.objects[i].id;
    }
    out << "]\n";

    out << "\n## Dynamic\n";
    out << "Observation:\n";
    for (const auto& o : ctx.objects)
        out << "- " << o.id << (o.is_target ? " (target)" : "") << " at (" << o.x << ", "
            << o.y << "), yaw " << o.theta << "\n";
    if (!ctx.blocking.empty()) {
        out << "Blocking obstacles: [";
        for (std::size_t i = 0; i < ctx.blocking.size(); ++i) {
            if (i) out << ", ";
            out << ctx.blocking[i];
        }
        out << "]\n";
    }
    if (ctx.render) out << "Visual observation: " << *ctx.render << "\n";
    if (ctx.last_feedback) {
        out << "Execution Feedback (from Step " << (ctx.step_index - 1) << "):\n"
            << ctx.last_feedback->to_json().dump() << "\n"
            << "Instruction: Analyze the feedback. If the previous action failed, "
               "propose an alternative strategy. Output the next action in JSON.\n";
    } else {
        out << "Instruction: Output the next action in JSON.\n";
    }
    return out.str();
}

namespace {

// First balanced top-level {...} span, string-aware.
std::optional<std::string> extract_json_object(const std::string& text) {
    std::size_t start = text.find('{');
    while (start != std::string::npos) {
        int depth = 0;
        bool in_string = false;
        for (std::size_t i = start; i < text.size(); ++i) {
            char c = text[i];
            if (in_string) {
                if (c == '\\') ++i;
                else if (c == '"') in_string = false;
            } else if (c == '"') {
                in_string = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                if (--depth == 0) return text.substr(start, i - start + 1);
            }
        }
        start = text.find('{', start + 1);
    }
    return std::nullopt;
}

std::string registered_actions_text() {
    std::string out;
    for (const auto& n : skills::tool_names()) {
        if (!out.empty()) out += ", ";
        out += n;
    }
    return out;
}

}  // namespace

PlanAction parse_plan_action(const std::string& text) {
    auto span = extract_json_object(text);
    if (!span) throw std::runtime_error("no JSON object found in planner output");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(*span);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("planner output is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("action") || !doc["action"].is_string())
        throw std::runtime_error("planner output lacks a string \"action\" field");
    PlanAction action;
    action.action = doc["action"].get<std::string>();
    action.args = doc.value("args", nlohmann::json::object());
    action.reason = doc.value("reason", std::string{});
    if (auto err = skills::validate_args(action.action, action.args))
        throw std::runtime_error("invalid action: " + *err +
                                 " (registered actions: " + registered_actions_text() + ")");
    return action;
}

namespace {

const ObjectSummary* find_object(const PlannerContext& ctx, const std::string& id) {
    for (const auto& o : ctx.objects)
        if (o.id == id) return &o;
    return nullptr;
}

bool hovering_over_target(const PlannerContext& ctx) {
    const ObjectSummary* target = nullptr;
    for (const auto& o : ctx.objects)
        if (o.is_target) target = &o;
    if (!target) return false;
    double dx = ctx.tcp_pose.position.x - target->x;
    double dy = ctx.tcp_pose.position.y - target->y;
    double dz = ctx.tcp_pose.position.z - (target->z + skills::kHoverOffset);
    return std::hypot(dx, dy) < 1e-6 && std::abs(dz) < 1e-6;
}

std::string side_for_blocker(const PlannerContext& ctx, const ObjectSummary& blocker) {
    const ObjectSummary* target = nullptr;
    for (const auto& o : ctx.objects)
        if (o.is_target) target = &o;
    double lateral = target ? blocker.x - target->x : blocker.x;
    if (lateral < -0.02) return "left";
    if (lateral > 0.02) return "right";
    return "center";
}

}  // namespace

PlanAction scripted_plan(const PlannerContext& ctx) {
    PlanAction out;
    if (!hovering_over_target(ctx)) {
        out.action = "move_to";
        out.args = {{"target", ctx.target_name}};
        out.reason = "position the hand above the target";
        return out;
    }
    if (!ctx.blocking.empty()) {
        const std::string& blocker = ctx.blocking.front();
        const ObjectSummary* obj = find_object(ctx, blocker);
        std::string side = obj ? side_for_blocker(ctx, *obj) : "center";

        // push -> pull -> initarm escalation on repeated failures against
        // the same blocker
        bool push_failed = false, pull_failed = false;
        for (const auto& a : ctx.recent) {
            if (a.obstacle_id != blocker || a.success) continue;
            if (a.action == "push") push_failed = true;
            if (a.action == "pull") pull_failed = true;
        }
        if (push_failed && pull_failed) {
            out.action = "initarm";
            out.reason = "both push and pull failed on " + blocker + "; reset and retry";
            return out;
        }
        if (push_failed) {
            out.action = "pull";
            out.args = {{"side", side}, {"dist", skills::kDefaultPushDist}};
            out.reason = "push failed on " + blocker + "; switch to pull";
            return out;
        }
        out.action = "push";
        out.args = {{"side", side}, {"dist", skills::kDefaultPushDist}};
        out.reason = "clear blocker " + blocker;
        return out;
    }
    out.action = "grasp";
    out.reason = "approach corridor is clear";
    return out;
}

PlanAction grasp_only_plan(const PlannerContext& ctx) {
    PlanAction out;
    if (!hovering_over_target(ctx)) {
        out.action = "move_to";
        out.args = {{"target", ctx.target_name}};
        out.reason = "position the hand above the target";
        return out;
    }
    out.action = "grasp";
    out.reason = "attempt a direct grasp";
    return out;
}

EndpointConfig EndpointConfig::from_environment() {
    EndpointConfig cfg;
    if (const char* url = std::getenv("CLUTTER_LLM_URL")) cfg.base_url = url;
    if (const char* model = std::getenv("CLUTTER_LLM_MODEL")) cfg.model = model;
    if (const char* key = std::getenv("CLUTTER_LLM_API_KEY")) cfg.api_key = key;
    return cfg;
}

namespace {

std::optional<std::string> query_service(const PlannerContext& ctx,
                                         const EndpointConfig& endpoint,
                                         const std::string& prompt) {
    httplib::Client client(endpoint.base_url);
    client.set_connection_timeout(endpoint.timeout_seconds, 0);
    client.set_read_timeout(endpoint.timeout_seconds, 0);
    httplib::Headers headers;
    if (!endpoint.api_key.empty())
        headers.emplace("Authorization", "Bearer " + endpoint.api_key);

    nlohmann::json user_content;
    if (ctx.render) {
        user_content = nlohmann::json::array(
            {{{"type", "text"}, {"text", prompt}},
             {{"type", "image"}, {"image", *ctx.render}}});
    } else {
        user_content = prompt;
    }
    nlohmann::json body = {
        {"model", endpoint.model},
        {"messages",
         {{{"role", "user"}, {"content", user_content}}}}};

    auto res = client.Post(endpoint.path, headers, body.dump(), "application/json");
    if (!res || res->status != 200) return std::nullopt;
    try {
        auto doc = nlohmann::json::parse(res->body);
        return doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
}

}  // namespace

LlmPlanResult llm_plan(const PlannerContext& ctx, const EndpointConfig& endpoint) {
    std::string prompt = build_prompt(ctx);
    std::string parse_error;
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::string query = prompt;
        if (attempt == 1)
            query += "\nYour previous reply could not be used: " + parse_error +
                     "\nReply with exactly one valid JSON action object.";
        auto reply = query_service(ctx, endpoint, query);
        if (!reply) break;  // transport error / timeout: fall back
        try {
            return {parse_plan_action(*reply), false};
        } catch (const std::exception& e) {
            parse_error = e.what();
        }
    }
    return {scripted_plan(ctx), true};
}

}  // namespace clutter::plan
