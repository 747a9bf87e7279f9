#pragma once

#include <functional>
#include <string>
#include <vector>

#include "clutter/planner.hpp"
#include "clutter/scenegen.hpp"
#include "clutter/skills.hpp"

namespace clutter::exec {

enum class Outcome { Success, FailSteps, FailEscape, FailGrasp };

std::string outcome_name(Outcome o);

struct Limits {
    int max_steps = 40;
    int replan_limit = 5;
};

struct TraceEntry {
    plan::PlanAction action;
    skills::SkillResult result;
};

struct EpisodeReport {
    std::string scenario_id;
    std::string target;
    int level = 1;
    std::uint64_t scenario_seed = 0;
    Outcome outcome = Outcome::FailSteps;
    int steps_used = 0;
    int replans_used = 0;
    std::vector<TraceEntry> trace;
    std::vector<std::string> flags;
};

using Planner = std::function<plan::PlanAction(const plan::PlannerContext&)>;

/// Closed planning loop: plan, dispatch, feed the result back. Failed
/// skill results consume the replan budget (saturating at the limit);
/// success requires the grasp skill to report a held lift.
EpisodeReport run_episode(const scenegen::ScenarioConfig& scenario,
                          const Planner& planner, const Limits& limits = {},
                          const scenegen::ObjectRoster& roster = scenegen::default_roster());

struct BenchmarkCell {
    std::string target;
    int level = 1;
    int episodes = 0;
    int successes = 0;

    double rate() const { return episodes ? double(successes) / episodes : 0.0; }
};

struct BenchmarkTable {
    std::vector<BenchmarkCell> cells;  // target-major, level-minor
    std::vector<EpisodeReport> reports;

    double level_rate(int level) const;
    double overall_rate() const;
    std::string to_csv() const;        // target,level,scenario_seed,outcome,steps,replans
    std::string format_table() const;  // object x level grid
};

/// Deterministic with a pure planner; reports are ordered by scenario id.
BenchmarkTable run_benchmark(const std::vector<scenegen::ScenarioConfig>& scenarios,
                             const Planner& planner, int parallelism = 1,
                             const Limits& limits = {},
                             const scenegen::ObjectRoster& roster = scenegen::default_roster());

/// Top-down orthographic SVG: workspace bounds, footprints, approach
/// corridor, TCP marker; the target is styled distinctly.
std::string render_scene(const world::SceneState& scene);
std::string render_scenario(const scenegen::ScenarioConfig& config,
                            const scenegen::ObjectRoster& roster = scenegen::default_roster());

}  // namespace clutter::exec
