#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clutter/geometry.hpp"
#include "clutter/simworld.hpp"

namespace clutter::scenegen {

inline constexpr double kRegionHalfwidth = 0.10;
inline constexpr double kMinCenterDistance = 0.06;
inline constexpr double kMaxSettleDisplacement = 0.01;
inline constexpr int kMaxRejections = 1000;
inline const std::string kSchemaVersion = "1";

struct PlacedObject {
    std::string name;
    double x = 0.0, y = 0.0, theta = 0.0;

    bool operator==(const PlacedObject&) const = default;
};

struct ScenarioConfig {
    std::string schema_version = kSchemaVersion;
    std::uint64_t seed = 0;
    int level = 1;
    PlacedObject target;
    std::vector<PlacedObject> obstacles;

    std::string scenario_id() const;  // "<target>_L<level>_<seed>"
    bool operator==(const ScenarioConfig&) const = default;
};

/// Physical model behind a roster name: shape parts, footprint, mass,
/// friction. Desk-scale stand-ins for the YCB assets.
struct ObjectModel {
    std::string name;
    std::vector<geom::ShapePart> parts;
    double footprint_radius = 0.025;
    double mass = 0.1;
    double friction = 1.0;
};

struct RosterEntry {
    ObjectModel target;
    std::vector<std::string> pool;  // exactly 6 obstacle names, in order
};

struct ObjectRoster {
    std::vector<RosterEntry> entries;
    std::vector<ObjectModel> catalog;  // obstacle models by name

    const RosterEntry* entry(const std::string& target_name) const;
    const ObjectModel* model(const std::string& name) const;
    std::vector<std::string> target_names() const;
};

/// The seven benchmark targets and their obstacle pools.
const ObjectRoster& default_roster();

/// Rejection-sampled stable layout; deterministic per seed. Throws after
/// 1000 consecutive rejections.
ScenarioConfig generate_scenario(const std::string& target_name, int level,
                                 std::uint64_t seed, const ObjectRoster& roster);

/// 7 targets x 3 levels x 10 configs; per-scenario seeds derived via
/// FNV-1a over "<master>|<target>|<level>|<index>".
std::vector<ScenarioConfig> generate_benchmark(std::uint64_t master_seed,
                                               const ObjectRoster& roster);

std::uint64_t derive_seed(std::uint64_t master_seed, const std::string& target,
                          int level, int index);

std::uint64_t fnv1a64(const std::string& text);

/// Canonical key order, 6-decimal fixed formatting, one line.
std::string serialize(const ScenarioConfig& config);

/// Throws std::runtime_error with a descriptive message on malformed
/// documents, unknown schema versions, or constraint violations.
ScenarioConfig parse(const std::string& bytes);

/// Instantiate the live scene: objects on the table at rest, hand at home.
world::SceneState instantiate(const ScenarioConfig& config,
                              const ObjectRoster& roster);

}  // namespace clutter::scenegen
