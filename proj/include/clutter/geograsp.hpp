#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>

#include "clutter/geometry.hpp"
#include "clutter/handrig.hpp"
#include "clutter/simworld.hpp"

namespace clutter::grasp {

inline constexpr int kObsDims = 59;  // 54 geom + 1 target height + 4 tcp
inline constexpr double kContactEpsilon = 1e-6;
inline constexpr int kTickRate = 60;
inline constexpr int kHoldTicks = 120;        // 2 seconds at 60 Hz
inline constexpr double kSuccessHeight = 0.15;
inline constexpr double kPreGraspOffset = 0.15;

struct GraspObservation {
    std::array<double, 54> geom{};  // 18 unit NN vectors, keypoint-major
    double target_height = 0.0;
    std::array<double, 4> tcp{};

    std::array<double, kObsDims> flat() const;
};

struct RewardState {
    double object_height = 0.0;
    double initial_height = 0.0;
    int contact_count = 0;
    double nn_distance = 0.0;
};

struct RewardWeights {
    double w_lift = 50.0;
    double w_success = 200.0;
    double w_contact = 10.0;
    double w_nn = 10.0;
    double w_action = 0.03;
    double success_height = kSuccessHeight;
    double clip_lo = -100.0;
    double clip_hi = 100.0;
};

struct DRSample {
    double friction_scale = 1.0;     // [0.5, 2.0]
    double mass_scale = 1.0;         // [0.8, 1.2]
    double cloud_noise_sigma = 0.005;
    std::array<double, 19> init_joint_offset{};  // [-0.05, 0.05] rad
};

struct GraspOutcome {
    bool success = false;
    int ticks = 0;
    double cumulative_reward = 0.0;
    double final_height = 0.0;
    bool attached = false;
};

/// Per keypoint the unit-normalized NN vector, zero when in contact
/// (distance < 1e-6), followed by target height and the TCP observation.
GraspObservation encode_observation(const rig::HandState& hand,
                                    const geom::PointCloud& target_cloud,
                                    double target_height,
                                    const rig::RigConfig& cfg = {});

/// Dense shaping reward, clipped to [clip_lo, clip_hi].
double step_reward(const RewardState& prev, const RewardState& cur,
                   const rig::ActionVector& action, const RewardWeights& w = {});

/// Finger keypoints (the 12 non-palm points) within `threshold` of the cloud.
int count_contacts(const rig::HandState& hand, const geom::PointCloud& cloud,
                   double threshold = 0.005, const rig::RigConfig& cfg = {});

DRSample sample_domain_randomization(std::uint64_t seed);

using Controller = std::function<rig::ActionVector(const GraspObservation&)>;

/// Deterministic geometry-driven controller standing in for the trained
/// policy: descend vertically toward the hover gap while squeezing the
/// fingers closed.
rig::ActionVector geo_controller(const GraspObservation& obs);

struct EpisodeConfig {
    int max_ticks = 600;
    std::size_t cloud_points = 1024;
    std::uint64_t cloud_seed = 0;
    double contact_threshold = 0.005;
    RewardWeights weights;
    rig::RigConfig rig;
};

/// Tick the controller at 60 Hz from the pre-grasp pose; attach on the
/// closure criterion (finger contacts on opposing sides of the centroid) and
/// report success when the object stays above 0.15 m for 120 ticks.
GraspOutcome run_grasp_episode(world::SceneState& scene,
                               const std::string& target_id,
                               const Controller& controller,
                               const EpisodeConfig& cfg = {},
                               const DRSample* dr = nullptr);

}  // namespace clutter::grasp
