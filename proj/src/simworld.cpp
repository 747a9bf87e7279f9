#include "clutter/simworld.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace clutter::world {

const SceneObject* SceneState::find(const std::string& id) const {
    for (const auto& o : objects)
        if (o.id == id) return &o;
    return nullptr;
}

SceneObject* SceneState::find(const std::string& id) {
    for (auto& o : objects)
        if (o.id == id) return &o;
    return nullptr;
}

const SceneObject* SceneState::target() const {
    for (const auto& o : objects)
        if (o.is_target) return &o;
    return nullptr;
}

namespace {

double overlap_depth(const SceneObject& a, const SceneObject& b) {
    double dx = b.pose.position.x - a.pose.position.x;
    double dy = b.pose.position.y - a.pose.position.y;
    double d = std::hypot(dx, dy);
    return (a.footprint_radius + b.footprint_radius) - d;
}

// Separate a pair along the center line, split by inverse mass.
void separate_pair(SceneObject& a, SceneObject& b, double depth) {
    double dx = b.pose.position.x - a.pose.position.x;
    double dy = b.pose.position.y - a.pose.position.y;
    double d = std::hypot(dx, dy);
    double ux, uy;
    if (d < 1e-12) {
        ux = 1.0;  // coincident centers: arbitrary fixed axis
        uy = 0.0;
    } else {
        ux = dx / d;
        uy = dy / d;
    }
    double wa = 1.0 / std::max(a.mass, 1e-9);
    double wb = 1.0 / std::max(b.mass, 1e-9);
    double fa = wa / (wa + wb), fb = wb / (wa + wb);
    a.pose.position.x -= ux * depth * fa;
    a.pose.position.y -= uy * depth * fa;
    b.pose.position.x += ux * depth * fb;
    b.pose.position.y += uy * depth * fb;
}

// One sweep of pairwise overlap resolution. Returns max movement applied.
double relax_once(SceneState& s) {
    double moved = 0.0;
    for (std::size_t i = 0; i < s.objects.size(); ++i) {
        for (std::size_t j = i + 1; j < s.objects.size(); ++j) {
            double depth = overlap_depth(s.objects[i], s.objects[j]);
            if (depth > kPenetrationTol) {
                separate_pair(s.objects[i], s.objects[j], depth);
                moved = std::max(moved, depth);
            }
        }
    }
    return moved;
}

bool any_overlap(const SceneState& s) {
    for (std::size_t i = 0; i < s.objects.size(); ++i)
        for (std::size_t j = i + 1; j < s.objects.size(); ++j)
            if (overlap_depth(s.objects[i], s.objects[j]) > kPenetrationTol) return true;
    return false;
}

}  // namespace

SettleResult settle(const SceneState& scene) {
    for (const auto& o : scene.objects)
        if (!o.pose.finite()) throw std::invalid_argument("settle: non-finite pose");

    SceneState s = scene;
    for (int it = 0; it < 30; ++it) relax_once(s);
    if (any_overlap(s)) throw std::runtime_error("settle: unresolvable overlap");

    std::vector<geom::Vec3> start;
    start.reserve(s.objects.size());
    for (const auto& o : s.objects) start.push_back(o.pose.position);

    double max_disp = 0.0;
    for (int it = 0; it < 60; ++it) {
        relax_once(s);
        for (std::size_t i = 0; i < s.objects.size(); ++i) {
            double d = (s.objects[i].pose.position - start[i]).norm();
            max_disp = std::max(max_disp, d);
        }
    }
    return {std::move(s), max_disp};
}

DisplaceResult displace_object(const SceneState& scene, const std::string& id,
                               double dir_x, double dir_y, double dist) {
    if (dist < 0.0) throw std::invalid_argument("displace_object: negative distance");
    SceneState s = scene;
    SceneObject* obj = s.find(id);
    if (!obj) throw std::invalid_argument("displace_object: unknown id " + id);
    if (obj->attached) throw std::invalid_argument("displace_object: object is attached");

    double n = std::hypot(dir_x, dir_y);
    if (n < 1e-12) {
        if (dist > 0.0) throw std::invalid_argument("displace_object: zero direction");
        return {std::move(s), {}};
    }
    double ux = dir_x / n, uy = dir_y / n;

    std::vector<std::string> contacts;
    auto note_contact = [&](const std::string& cid) {
        if (std::find(contacts.begin(), contacts.end(), cid) == contacts.end())
            contacts.push_back(cid);
    };

    const double step = 0.005;
    double remaining = dist;
    while (remaining > 1e-12) {
        double d = std::min(step, remaining);
        remaining -= d;
        obj->pose.position.x += ux * d;
        obj->pose.position.y += uy * d;

        // level 1: objects hit by the commanded object
        std::vector<SceneObject*> pushed;
        for (auto& other : s.objects) {
            if (&other == obj) continue;
            double depth = overlap_depth(*obj, other);
            if (depth > kPenetrationTol) {
                note_contact(other.id);
                double cdx = other.pose.position.x - obj->pose.position.x;
                double cdy = other.pose.position.y - obj->pose.position.y;
                double cd = std::hypot(cdx, cdy);
                double px = cd < 1e-12 ? ux : cdx / cd;
                double py = cd < 1e-12 ? uy : cdy / cd;
                other.pose.position.x += px * depth;
                other.pose.position.y += py * depth;
                pushed.push_back(&other);
            }
        }
        // level 2: pushed objects shove their own neighbors once
        for (auto* p : pushed) {
            for (auto& other : s.objects) {
                if (&other == p || &other == obj) continue;
                double depth = overlap_depth(*p, other);
                if (depth > kPenetrationTol) {
                    note_contact(other.id);
                    double cdx = other.pose.position.x - p->pose.position.x;
                    double cdy = other.pose.position.y - p->pose.position.y;
                    double cd = std::hypot(cdx, cdy);
                    if (cd < 1e-12) continue;
                    other.pose.position.x += cdx / cd * depth;
                    other.pose.position.y += cdy / cd * depth;
                }
            }
        }
    }
    return {std::move(s), std::move(contacts)};
}

std::vector<std::string> approach_clearance(const SceneState& scene,
                                            const std::string& target_id,
                                            double corridor_halfwidth) {
    const SceneObject* target = scene.find(target_id);
    if (!target) throw std::invalid_argument("approach_clearance: unknown target " + target_id);
    double cyl = target->footprint_radius + corridor_halfwidth;

    std::vector<std::pair<double, std::string>> hits;
    for (const auto& o : scene.objects) {
        if (o.id == target_id) continue;
        double dx = o.pose.position.x - target->pose.position.x;
        double dy = o.pose.position.y - target->pose.position.y;
        double d = std::hypot(dx, dy);
        if (d < cyl + o.footprint_radius) hits.emplace_back(d, o.id);
    }
    std::sort(hits.begin(), hits.end());
    std::vector<std::string> out;
    out.reserve(hits.size());
    for (auto& [d, id] : hits) out.push_back(id);
    return out;
}

std::vector<std::string> escaped_objects(const SceneState& scene) {
    std::vector<std::string> out;
    for (const auto& o : scene.objects)
        if (std::abs(o.pose.position.x) > scene.workspace_halfwidth ||
            std::abs(o.pose.position.y) > scene.workspace_halfwidth)
            out.push_back(o.id);
    return out;
}

SceneState tick_attached(const SceneState& scene) {
    SceneState s = scene;
    for (auto& o : s.objects)
        if (o.attached) o.pose = s.hand.tcp_pose.compose(o.attach_rel);
    s.tick += 1;
    return s;
}

}  // namespace clutter::world
