#include "clutter/scenegen.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "json.hpp"

namespace clutter::scenegen {

using geom::ShapeDescriptor;
using geom::ShapeKind;
using geom::ShapePart;

std::string ScenarioConfig::scenario_id() const {
    return target.name + "_L" + std::to_string(level) + "_" + std::to_string(seed);
}

const RosterEntry* ObjectRoster::entry(const std::string& target_name) const {
    for (const auto& e : entries)
        if (e.target.name == target_name) return &e;
    return nullptr;
}

const ObjectModel* ObjectRoster::model(const std::string& name) const {
    for (const auto& e : entries)
        if (e.target.name == name) return &e.target;
    for (const auto& m : catalog)
        if (m.name == name) return &m;
    return nullptr;
}

std::vector<std::string> ObjectRoster::target_names() const {
    std::vector<std::string> out;
    for (const auto& e : entries) out.push_back(e.target.name);
    return out;
}

namespace {

ObjectModel box_model(const std::string& name, double ex, double ey, double ez,
                      double mass) {
    ObjectModel m;
    m.name = name;
    m.parts = {{ShapeDescriptor{ShapeKind::Box, {ex, ey, ez}}, {}}};
    m.footprint_radius = 0.5 * std::hypot(ex, ey);
    m.mass = mass;
    return m;
}

ObjectModel cylinder_model(const std::string& name, double r, double h, double mass) {
    ObjectModel m;
    m.name = name;
    m.parts = {{ShapeDescriptor{ShapeKind::Cylinder, {r, h, 0.0}}, {}}};
    m.footprint_radius = r;
    m.mass = mass;
    return m;
}

ObjectModel sphere_model(const std::string& name, double r, double mass) {
    ObjectModel m;
    m.name = name;
    m.parts = {{ShapeDescriptor{ShapeKind::Sphere, {r, 0.0, 0.0}}, {}}};
    m.footprint_radius = r;
    m.mass = mass;
    return m;
}

ObjectRoster build_default_roster() {
    ObjectRoster r;

    // Irregular objects as unions of two primitives.
    ObjectModel pear = sphere_model("pear", 0.026, 0.10);
    pear.parts.push_back({ShapeDescriptor{ShapeKind::Sphere, {0.018, 0.0, 0.0}},
                          {0.0, 0.0, 0.028}});
    ObjectModel lego = box_model("lego", 0.04, 0.03, 0.025, 0.06);
    lego.parts.push_back({ShapeDescriptor{ShapeKind::Box, {0.02, 0.03, 0.025}},
                          {0.01, 0.0, 0.025}});

    ObjectModel cube = box_model("cube", 0.04, 0.04, 0.04, 0.10);
    ObjectModel can = cylinder_model("can", 0.026, 0.07, 0.12);
    ObjectModel apple = sphere_model("apple", 0.028, 0.10);
    ObjectModel mug = cylinder_model("mug", 0.030, 0.05, 0.12);
    ObjectModel ball = sphere_model("ball", 0.027, 0.05);

    r.catalog = {
        sphere_model("orange", 0.028, 0.10),
        box_model("foam_brick", 0.05, 0.03, 0.03, 0.05),
        cylinder_model("fish_can", 0.028, 0.035, 0.09),
        cube, can, apple, mug, ball, pear,
    };

    // Benchmark order follows increasing grasping difficulty.
    r.entries = {
        {cube, {"can", "foam_brick", "mug", "apple", "ball", "orange"}},
        {can, {"foam_brick", "mug", "apple", "ball", "orange", "pear"}},
        {pear, {"can", "foam_brick", "mug", "apple", "ball", "cube"}},
        {apple, {"orange", "foam_brick", "mug", "pear", "ball", "cube"}},
        {mug, {"can", "foam_brick", "apple", "ball", "orange", "cube"}},
        {lego, {"fish_can", "foam_brick", "mug", "apple", "ball", "orange"}},
        {ball, {"can", "foam_brick", "mug", "apple", "pear", "cube"}},
    };
    return r;
}

double quantize6(double v) { return std::round(v * 1e6) / 1e6; }

double object_rest_height(const ObjectModel& m) {
    return m.parts.front().shape.half_height();
}

}  // namespace

const ObjectRoster& default_roster() {
    static const ObjectRoster roster = build_default_roster();
    return roster;
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t master_seed, const std::string& target,
                          int level, int index) {
    return fnv1a64(std::to_string(master_seed) + "|" + target + "|" +
                   std::to_string(level) + "|" + std::to_string(index));
}

ScenarioConfig generate_scenario(const std::string& target_name, int level,
                                 std::uint64_t seed, const ObjectRoster& roster) {
    const RosterEntry* entry = roster.entry(target_name);
    if (!entry) throw std::invalid_argument("generate_scenario: unknown target " + target_name);
    if (level < 1 || level > 3)
        throw std::invalid_argument("generate_scenario: level must be 1..3");

    const int n_obstacles = 2 * level;
    std::mt19937_64 gen(seed);
    auto unit = [&] { return geom::u64_to_unit(gen()); };

    for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
        std::vector<PlacedObject> placed;
        placed.reserve(1 + n_obstacles);
        placed.push_back({target_name, 0, 0, 0});
        for (int i = 0; i < n_obstacles; ++i) placed.push_back({entry->pool[i], 0, 0, 0});
        for (auto& p : placed) {
            p.x = quantize6(-kRegionHalfwidth + 2.0 * kRegionHalfwidth * unit());
            p.y = quantize6(-kRegionHalfwidth + 2.0 * kRegionHalfwidth * unit());
            p.theta = quantize6(-M_PI + 2.0 * M_PI * unit());
        }

        bool ok = true;
        for (std::size_t i = 0; ok && i < placed.size(); ++i)
            for (std::size_t j = i + 1; ok && j < placed.size(); ++j)
                if (std::hypot(placed[i].x - placed[j].x, placed[i].y - placed[j].y) <
                    kMinCenterDistance)
                    ok = false;
        if (!ok) continue;

        ScenarioConfig cfg;
        cfg.seed = seed;
        cfg.level = level;
        cfg.target = placed[0];
        cfg.obstacles.assign(placed.begin() + 1, placed.end());

        auto settled = world::settle(instantiate(cfg, roster));
        if (settled.max_displacement > kMaxSettleDisplacement) continue;
        return cfg;
    }
    throw std::runtime_error("generate_scenario: " + std::to_string(kMaxRejections) +
                             " consecutive rejections for " + target_name + " level " +
                             std::to_string(level) + " seed " + std::to_string(seed));
}

std::vector<ScenarioConfig> generate_benchmark(std::uint64_t master_seed,
                                               const ObjectRoster& roster) {
    std::vector<ScenarioConfig> out;
    out.reserve(210);
    for (const auto& name : roster.target_names())
        for (int level = 1; level <= 3; ++level)
            for (int index = 0; index < 10; ++index)
                out.push_back(generate_scenario(
                    name, level, derive_seed(master_seed, name, level, index), roster));
    return out;
}

namespace {

void append_fixed(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    out += buf;
}

void append_placed(std::string& out, const PlacedObject& p) {
    out += "{\"name\":\"" + p.name + "\",\"x\":";
    append_fixed(out, p.x);
    out += ",\"y\":";
    append_fixed(out, p.y);
    out += ",\"theta\":";
    append_fixed(out, p.theta);
    out += "}";
}

}  // namespace

std::string serialize(const ScenarioConfig& config) {
    std::string out = "{\"schema_version\":\"" + config.schema_version + "\",\"seed\":" +
                      std::to_string(config.seed) + ",\"level\":" +
                      std::to_string(config.level) + ",\"target\":";
    append_placed(out, config.target);
    out += ",\"obstacles\":[";
    for (std::size_t i = 0; i < config.obstacles.size(); ++i) {
        if (i) out += ",";
        append_placed(out, config.obstacles[i]);
    }
    out += "]}\n";
    return out;
}

ScenarioConfig parse(const std::string& bytes) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("scenario parse error: ") + e.what());
    }
    auto read_placed = [](const nlohmann::json& j) {
        PlacedObject p;
        p.name = j.at("name").get<std::string>();
        p.x = j.at("x").get<double>();
        p.y = j.at("y").get<double>();
        p.theta = j.at("theta").get<double>();
        if (std::abs(p.x) > kRegionHalfwidth + 1e-9 || std::abs(p.y) > kRegionHalfwidth + 1e-9)
            throw std::runtime_error("scenario constraint violation: pose out of region for " +
                                     p.name);
        return p;
    };
    try {
        ScenarioConfig cfg;
        cfg.schema_version = doc.at("schema_version").get<std::string>();
        if (cfg.schema_version != kSchemaVersion)
            throw std::runtime_error("unknown scenario schema version " + cfg.schema_version);
        cfg.seed = doc.at("seed").get<std::uint64_t>();
        cfg.level = doc.at("level").get<int>();
        if (cfg.level < 1 || cfg.level > 3)
            throw std::runtime_error("scenario constraint violation: level out of range");
        cfg.target = read_placed(doc.at("target"));
        for (const auto& o : doc.at("obstacles")) cfg.obstacles.push_back(read_placed(o));
        if (static_cast<int>(cfg.obstacles.size()) != 2 * cfg.level)
            throw std::runtime_error(
                "scenario constraint violation: expected " + std::to_string(2 * cfg.level) +
                " obstacles at level " + std::to_string(cfg.level) + ", got " +
                std::to_string(cfg.obstacles.size()));
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("scenario parse error: ") + e.what());
    }
}

world::SceneState instantiate(const ScenarioConfig& config, const ObjectRoster& roster) {
    world::SceneState scene;
    auto add = [&](const PlacedObject& p, bool is_target) {
        const ObjectModel* m = roster.model(p.name);
        if (!m) throw std::invalid_argument("instantiate: unknown object " + p.name);
        world::SceneObject obj;
        obj.id = p.name;
        obj.parts = m->parts;
        obj.pose.position = {p.x, p.y, object_rest_height(*m)};
        obj.pose.yaw = p.theta;
        obj.footprint_radius = m->footprint_radius;
        obj.mass = m->mass;
        obj.friction_static = is_target ? 2.0 : 1.0;
        obj.friction_dynamic = is_target ? 2.0 : 1.0;
        obj.is_target = is_target;
        scene.objects.push_back(std::move(obj));
    };
    add(config.target, true);
    for (const auto& o : config.obstacles) add(o, false);
    // hand home configuration
    scene.hand.tcp_pose.position = {0.0, -0.25, 0.30};
    return scene;
}

}  // namespace clutter::scenegen
