#include "clutter/geograsp.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace clutter::grasp {

std::array<double, kObsDims> GraspObservation::flat() const {
    std::array<double, kObsDims> out{};
    for (int i = 0; i < 54; ++i) out[i] = geom[i];
    out[54] = target_height;
    for (int i = 0; i < 4; ++i) out[55 + i] = tcp[i];
    return out;
}

GraspObservation encode_observation(const rig::HandState& hand,
                                    const geom::PointCloud& target_cloud,
                                    double target_height,
                                    const rig::RigConfig& cfg) {
    if (target_cloud.empty())
        throw std::invalid_argument("encode_observation: empty cloud");
    GraspObservation obs;
    auto keypoints = rig::forward_keypoints(hand, cfg);
    for (int k = 0; k < rig::kKeypoints; ++k) {
        auto hit = geom::nearest_vector(keypoints[k], target_cloud);
        geom::Vec3 unit = hit.distance < kContactEpsilon ? geom::Vec3{}
                                                         : hit.vector * (1.0 / hit.distance);
        obs.geom[3 * k + 0] = unit.x;
        obs.geom[3 * k + 1] = unit.y;
        obs.geom[3 * k + 2] = unit.z;
    }
    obs.target_height = target_height;
    obs.tcp = rig::tcp_observation(hand);
    return obs;
}

double step_reward(const RewardState& prev, const RewardState& cur,
                   const rig::ActionVector& action, const RewardWeights& w) {
    double r_lift = w.w_lift * (cur.object_height - cur.initial_height);
    double r_success = cur.object_height > w.success_height ? w.w_success : 0.0;
    double r_contact = w.w_contact * cur.contact_count;
    double r_nn = w.w_nn * (prev.nn_distance - cur.nn_distance);
    double c_action = w.w_action * action.norm();
    double total = r_lift + r_success + r_contact + r_nn - c_action;
    return std::max(w.clip_lo, std::min(w.clip_hi, total));
}

int count_contacts(const rig::HandState& hand, const geom::PointCloud& cloud,
                   double threshold, const rig::RigConfig& cfg) {
    if (cloud.empty()) throw std::invalid_argument("count_contacts: empty cloud");
    auto keypoints = rig::forward_keypoints(hand, cfg);
    int count = 0;
    for (int k = 6; k < rig::kKeypoints; ++k)  // palm excluded
        if (geom::nearest_vector(keypoints[k], cloud).distance <= threshold) ++count;
    return count;
}

DRSample sample_domain_randomization(std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    auto unit = [&] { return geom::u64_to_unit(gen()); };
    DRSample s;
    s.friction_scale = 0.5 + 1.5 * unit();
    s.mass_scale = 0.8 + 0.4 * unit();
    s.cloud_noise_sigma = 0.005;
    for (auto& v : s.init_joint_offset) v = -0.05 + 0.10 * unit();
    return s;
}

namespace {
constexpr double kHoverGap = 0.045;    // palm-to-centroid gap held while closing
constexpr double kSqueezeRate = 0.5;   // fraction of max finger action
}  // namespace

rig::ActionVector geo_controller(const GraspObservation& obs) {
    std::array<double, rig::kActionDims> raw{};

    bool all_zero = true;
    for (int k = 0; k < rig::kKeypoints; ++k) {
        geom::Vec3 v{obs.geom[3 * k], obs.geom[3 * k + 1], obs.geom[3 * k + 2]};
        if (v.norm() > 0.0) all_zero = false;
    }

    if (!all_zero) {
        // descend vertically, slowing to a stop at the hover gap so the
        // approach converges without overshoot; the pre-grasp pose already
        // centers the palm over the target, and keeping xy fixed keeps the
        // finger/thumb approach symmetric
        double gap = obs.tcp[0] - obs.target_height;
        double speed = std::max(0.0, std::min(1.0, (gap - kHoverGap) / rig::kActionScale));
        raw[2] = -speed;
    }
    for (int j = 7; j < rig::kActionDims; ++j) raw[j] = kSqueezeRate;
    return rig::clamp_action(raw);
}

namespace {

// Antipodal pinch: finger contacts on opposing sides of the centroid.
bool closure_holds(const rig::HandState& hand, const geom::PointCloud& cloud,
                   const geom::Vec3& centroid, double threshold,
                   const rig::RigConfig& cfg) {
    auto keypoints = rig::forward_keypoints(hand, cfg);
    std::vector<geom::Vec3> contact_dirs;
    for (int k = 6; k < rig::kKeypoints; ++k) {
        if (geom::nearest_vector(keypoints[k], cloud).distance <= threshold) {
            geom::Vec3 d = keypoints[k] - centroid;
            d.z = 0.0;
            contact_dirs.push_back(d.normalized());
        }
    }
    if (contact_dirs.size() < 2) return false;
    for (std::size_t i = 0; i < contact_dirs.size(); ++i)
        for (std::size_t j = i + 1; j < contact_dirs.size(); ++j)
            if (contact_dirs[i].dot(contact_dirs[j]) < 0.0) return true;
    return false;
}

}  // namespace

GraspOutcome run_grasp_episode(world::SceneState& scene,
                               const std::string& target_id,
                               const Controller& controller,
                               const EpisodeConfig& cfg, const DRSample* dr) {
    world::SceneObject* target = scene.find(target_id);
    if (!target) throw std::invalid_argument("run_grasp_episode: unknown target " + target_id);

    // pre-grasp pose above the target centroid
    scene.hand.tcp_pose.position = target->centroid() + geom::Vec3{0.0, 0.0, kPreGraspOffset};

    geom::PointCloud canonical =
        geom::sample_compound_cloud(target->parts, cfg.cloud_points, cfg.cloud_seed);
    if (dr) {
        std::mt19937_64 gen(cfg.cloud_seed ^ 0x9e3779b97f4a7c15ull);
        std::normal_distribution<double> noise(0.0, dr->cloud_noise_sigma);
        for (auto& p : canonical.points) {
            p.x += noise(gen);
            p.y += noise(gen);
            p.z += noise(gen);
        }
        target->mass *= dr->mass_scale;
        target->friction_static *= dr->friction_scale;
        target->friction_dynamic *= dr->friction_scale;
        for (int j = 0; j < rig::kFingerJoints; ++j) {
            double q = scene.hand.finger_joints[j] + dr->init_joint_offset[7 + j];
            scene.hand.finger_joints[j] =
                std::max(cfg.rig.joint_lo, std::min(cfg.rig.joint_hi, q));
        }
    }

    auto world_cloud = [&] { return geom::transform_cloud(canonical, target->pose); };

    double h0 = target->pose.position.z;
    RewardState prev;
    prev.object_height = h0;
    prev.initial_height = h0;
    {
        auto cloud = world_cloud();
        prev.contact_count = count_contacts(scene.hand, cloud, cfg.contact_threshold, cfg.rig);
        prev.nn_distance =
            geom::total_nn_distance(rig::forward_keypoints(scene.hand, cfg.rig), cloud);
    }

    GraspOutcome out;
    int hold = 0;
    for (int tick = 0; tick < cfg.max_ticks; ++tick) {
        auto cloud = world_cloud();
        auto obs = encode_observation(scene.hand, cloud, target->pose.position.z, cfg.rig);
        auto action = controller(obs);
        if (target->attached) {
            // closure achieved: the runner drives the lift-and-hold phase
            action.values[0] = 0.0;
            action.values[1] = 0.0;
            action.values[2] = 1.0;
            action.values[3] = action.values[4] = action.values[5] = 0.0;
        } else {
            // contact constraint: a finger touching the surface stops closing
            auto keypoints = rig::forward_keypoints(scene.hand, cfg.rig);
            for (int f = 0; f < 4; ++f) {
                double dmin = 1e18;
                for (int k = 0; k < 3; ++k)
                    dmin = std::min(dmin,
                                    geom::nearest_vector(keypoints[6 + 3 * f + k], cloud).distance);
                if (dmin <= cfg.contact_threshold)
                    for (int k = 0; k < 3; ++k) action.values[7 + 3 * f + k] = 0.0;
            }
        }
        scene.hand = rig::apply_action(scene.hand, action, cfg.rig);
        scene = world::tick_attached(scene);
        target = scene.find(target_id);

        auto cloud_after = world_cloud();
        if (!target->attached &&
            closure_holds(scene.hand, cloud_after, target->centroid(),
                          cfg.contact_threshold, cfg.rig)) {
            target->attached = true;
            target->attach_rel = scene.hand.tcp_pose.inverse().compose(target->pose);
        }

        RewardState cur;
        cur.object_height = target->pose.position.z;
        cur.initial_height = h0;
        cur.contact_count =
            count_contacts(scene.hand, cloud_after, cfg.contact_threshold, cfg.rig);
        cur.nn_distance =
            geom::total_nn_distance(rig::forward_keypoints(scene.hand, cfg.rig), cloud_after);
        out.cumulative_reward += step_reward(prev, cur, action, cfg.weights);
        prev = cur;

        out.ticks = tick + 1;
        if (target->pose.position.z > kSuccessHeight) {
            if (++hold >= kHoldTicks) {
                out.success = true;
                break;
            }
        } else {
            hold = 0;
        }
    }
    out.final_height = target->pose.position.z;
    out.attached = target->attached;
    return out;
}

}  // namespace clutter::grasp
