#include "clutter/execloop.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <sstream>

namespace clutter::exec {

std::string outcome_name(Outcome o) {
    switch (o) {
        case Outcome::Success: return "success";
        case Outcome::FailSteps: return "fail_steps";
        case Outcome::FailEscape: return "fail_escape";
        case Outcome::FailGrasp: return "fail_grasp";
    }
    return "?";
}

namespace {

plan::PlannerContext make_context(const world::SceneState& scene,
                                  const std::string& target_name, int step_index,
                                  const std::optional<skills::SkillResult>& feedback,
                                  const std::vector<plan::AttemptRecord>& recent) {
    plan::PlannerContext ctx;
    ctx.target_name = target_name;
    for (const auto& o : scene.objects)
        ctx.objects.push_back({o.id, o.pose.position.x, o.pose.position.y,
                               o.pose.position.z, o.pose.yaw, o.is_target});
    if (const auto* t = scene.target())
        ctx.blocking = world::approach_clearance(scene, t->id);
    ctx.last_feedback = feedback;
    ctx.recent = recent;
    ctx.step_index = step_index;
    ctx.tcp_pose = scene.hand.tcp_pose;
    return ctx;
}

// The obstacle a clearing action acted on, recovered from the result detail.
std::string acted_obstacle(const plan::PlanAction& action,
                           const world::SceneState& scene_before) {
    if (action.action != "push" && action.action != "pull") return "";
    if (const auto* t = scene_before.target()) {
        auto blocking = world::approach_clearance(scene_before, t->id);
        if (!blocking.empty()) return blocking.front();
        const world::SceneObject* best = nullptr;
        double best_d = 1e18;
        for (const auto& o : scene_before.objects) {
            if (o.is_target) continue;
            double d = std::hypot(o.pose.position.x - t->pose.position.x,
                                  o.pose.position.y - t->pose.position.y);
            if (d < best_d) {
                best_d = d;
                best = &o;
            }
        }
        if (best) return best->id;
    }
    return "";
}

}  // namespace

EpisodeReport run_episode(const scenegen::ScenarioConfig& scenario,
                          const Planner& planner, const Limits& limits,
                          const scenegen::ObjectRoster& roster) {
    EpisodeReport report;
    report.scenario_id = scenario.scenario_id();
    report.target = scenario.target.name;
    report.level = scenario.level;
    report.scenario_seed = scenario.seed;

    world::SceneState scene = scenegen::instantiate(scenario, roster);
    scene = world::settle(scene).scene;

    std::optional<skills::SkillResult> feedback;
    std::vector<plan::AttemptRecord> recent;
    bool grasp_episode_failed = false;

    for (int step = 1; step <= limits.max_steps; ++step) {
        plan::PlanAction action;
        try {
            action = planner(make_context(scene, scenario.target.name, step, feedback, recent));
        } catch (const std::exception& e) {
            report.flags.push_back("planner_error");
            report.outcome = Outcome::FailSteps;
            return report;
        }

        std::string obstacle = acted_obstacle(action, scene);
        skills::SkillOutcome outcome;
        try {
            outcome = skills::execute(scene, {action.action, action.args});
        } catch (const std::exception& e) {
            // invalid action slipped past the planner: in-band failure
            outcome.scene = scene;
            outcome.result.success = false;
            outcome.result.message = "target not found";
            outcome.result.detail = e.what();
        }
        scene = outcome.scene;
        report.trace.push_back({action, outcome.result});
        report.steps_used = step;

        if (!outcome.result.success && report.replans_used < limits.replan_limit)
            ++report.replans_used;
        recent.push_back({action.action, obstacle, outcome.result.success});
        feedback = outcome.result;

        if (outcome.grasp && outcome.grasp->success) {
            report.outcome = Outcome::Success;
            return report;
        }
        if (outcome.grasp && !outcome.grasp->success) grasp_episode_failed = true;

        if (!world::escaped_objects(scene).empty()) {
            report.outcome = Outcome::FailEscape;
            return report;
        }
    }
    report.outcome = grasp_episode_failed ? Outcome::FailGrasp : Outcome::FailSteps;
    return report;
}

double BenchmarkTable::level_rate(int level) const {
    int episodes = 0, successes = 0;
    for (const auto& c : cells)
        if (c.level == level) {
            episodes += c.episodes;
            successes += c.successes;
        }
    return episodes ? double(successes) / episodes : 0.0;
}

double BenchmarkTable::overall_rate() const {
    int episodes = 0, successes = 0;
    for (const auto& c : cells) {
        episodes += c.episodes;
        successes += c.successes;
    }
    return episodes ? double(successes) / episodes : 0.0;
}

std::string BenchmarkTable::to_csv() const {
    std::string out = "target,level,scenario_seed,outcome,steps,replans\n";
    for (const auto& r : reports) {
        out += r.target + "," + std::to_string(r.level) + "," +
               std::to_string(r.scenario_seed) + "," + outcome_name(r.outcome) + "," +
               std::to_string(r.steps_used) + "," + std::to_string(r.replans_used) + "\n";
    }
    return out;
}

std::string BenchmarkTable::format_table() const {
    std::vector<std::string> targets;
    for (const auto& c : cells)
        if (std::find(targets.begin(), targets.end(), c.target) == targets.end())
            targets.push_back(c.target);

    std::ostringstream out;
    char line[128];
    std::snprintf(line, sizeof line, "%-10s %8s %8s %8s\n", "target", "L1", "L2", "L3");
    out << line;
    for (const auto& t : targets) {
        double rates[3] = {0, 0, 0};
        for (const auto& c : cells)
            if (c.target == t && c.level >= 1 && c.level <= 3) rates[c.level - 1] = c.rate();
        std::snprintf(line, sizeof line, "%-10s %8.2f %8.2f %8.2f\n", t.c_str(), rates[0],
                      rates[1], rates[2]);
        out << line;
    }
    std::snprintf(line, sizeof line, "%-10s %8.2f %8.2f %8.2f   overall %.2f\n", "average",
                  level_rate(1), level_rate(2), level_rate(3), overall_rate());
    out << line;
    return out.str();
}

BenchmarkTable run_benchmark(const std::vector<scenegen::ScenarioConfig>& scenarios,
                             const Planner& planner, int parallelism,
                             const Limits& limits, const scenegen::ObjectRoster& roster) {
    std::vector<scenegen::ScenarioConfig> ordered = scenarios;
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) { return a.scenario_id() < b.scenario_id(); });

    BenchmarkTable table;
    table.reports.resize(ordered.size());

    if (parallelism <= 1) {
        for (std::size_t i = 0; i < ordered.size(); ++i)
            table.reports[i] = run_episode(ordered[i], planner, limits, roster);
    } else {
        std::vector<std::future<void>> jobs;
        std::atomic<std::size_t> next{0};
        for (int w = 0; w < parallelism; ++w)
            jobs.push_back(std::async(std::launch::async, [&] {
                for (;;) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= ordered.size()) return;
                    table.reports[i] = run_episode(ordered[i], planner, limits, roster);
                }
            }));
        for (auto& j : jobs) j.get();
    }

    for (const auto& r : table.reports) {
        BenchmarkCell* cell = nullptr;
        for (auto& c : table.cells)
            if (c.target == r.target && c.level == r.level) cell = &c;
        if (!cell) {
            table.cells.push_back({r.target, r.level, 0, 0});
            cell = &table.cells.back();
        }
        cell->episodes += 1;
        cell->successes += r.outcome == Outcome::Success ? 1 : 0;
    }
    return table;
}

namespace {

// world meters -> SVG user units (pixels), y flipped
struct SvgMapper {
    double scale = 600.0;
    double half = 0.35;
    double px(double x) const { return (x + half) * scale; }
    double py(double y) const { return (half - y) * scale; }
};

}  // namespace

std::string render_scene(const world::SceneState& scene) {
    SvgMapper m;
    double size = 2 * m.half * m.scale;
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\""
        << size << "\" viewBox=\"0 0 " << size << " " << size << "\">\n";

    // workspace bounds
    double w = scene.workspace_halfwidth;
    out << "  <rect x=\"" << m.px(-w) << "\" y=\"" << m.py(w) << "\" width=\""
        << 2 * w * m.scale << "\" height=\"" << 2 * w * m.scale
        << "\" fill=\"#fafafa\" stroke=\"#333\" stroke-dasharray=\"6 4\"/>\n";

    // approach corridor around the target
    if (const auto* t = scene.target()) {
        double r = (t->footprint_radius + world::kDefaultCorridorHalfwidth) * m.scale;
        out << "  <circle cx=\"" << m.px(t->pose.position.x) << "\" cy=\""
            << m.py(t->pose.position.y) << "\" r=\"" << r
            << "\" fill=\"none\" stroke=\"#8a2be2\" stroke-dasharray=\"3 3\"/>\n";
    }

    for (const auto& o : scene.objects) {
        const char* fill = o.is_target ? "#ffb347" : "#9ec9e2";
        const char* stroke = o.is_target ? "#b05c00" : "#35607a";
        out << "  <circle cx=\"" << m.px(o.pose.position.x) << "\" cy=\""
            << m.py(o.pose.position.y) << "\" r=\"" << o.footprint_radius * m.scale
            << "\" fill=\"" << fill << "\" stroke=\"" << stroke << "\"/>\n";
        out << "  <text x=\"" << m.px(o.pose.position.x) << "\" y=\""
            << m.py(o.pose.position.y) - o.footprint_radius * m.scale - 4
            << "\" font-size=\"11\" text-anchor=\"middle\">" << o.id << "</text>\n";
    }

    // TCP marker
    const auto& tcp = scene.hand.tcp_pose.position;
    out << "  <g stroke=\"#c0392b\" stroke-width=\"2\">\n"
        << "    <line x1=\"" << m.px(tcp.x) - 8 << "\" y1=\"" << m.py(tcp.y) << "\" x2=\""
        << m.px(tcp.x) + 8 << "\" y2=\"" << m.py(tcp.y) << "\"/>\n"
        << "    <line x1=\"" << m.px(tcp.x) << "\" y1=\"" << m.py(tcp.y) - 8 << "\" x2=\""
        << m.px(tcp.x) << "\" y2=\"" << m.py(tcp.y) + 8 << "\"/>\n"
        << "  </g>\n";
    out << "</svg>\n";
    return out.str();
}

std::string render_scenario(const scenegen::ScenarioConfig& config,
                            const scenegen::ObjectRoster& roster) {
    return render_scene(scenegen::instantiate(config, roster));
}

}  // namespace clutter::exec
