#pragma once

#include <array>
#include <numbers>
#include <vector>

#include "clutter/geometry.hpp"

namespace clutter::rig {

inline constexpr int kActionDims = 19;
inline constexpr int kFingerJoints = 12;
inline constexpr int kKeypoints = 18;
inline constexpr double kActionScale = 0.05;  // per-step scale, rad and m

/// Fixed rig dimensions; defaults are the normative values for golden tests.
struct RigConfig {
    std::array<double, 3> link_lengths{0.04, 0.03, 0.02};
    double palm_pitch = 0.02;        // spacing of the 2x3 palm grid
    double finger_mount_y = 0.035;   // front fingers at +y, thumb at -y
    double finger_spread = 0.025;    // lateral spacing of the 3 front fingers
    double joint_lo = 0.0;
    double joint_hi = std::numbers::pi / 2;
};

struct HandState {
    geom::Pose tcp_pose;
    std::array<double, kFingerJoints> finger_joints{};  // 3 per finger x 4
};

struct ActionVector {
    std::array<double, kActionDims> values{};

    double norm() const;
};

/// Componentwise clamp to [-1, 1]; throws on non-finite input.
ActionVector clamp_action(const std::array<double, kActionDims>& raw);

/// Relative control: dims 0-5 move the TCP (dx,dy,dz,droll,dpitch,dyaw),
/// dim 6 is unused, dims 7-18 drive the 12 finger joints. All scaled by 0.05.
HandState apply_action(const HandState& state, const ActionVector& a,
                       const RigConfig& cfg = {});

/// 18 keypoints: 6 palm (2x3 grid in the TCP frame) followed by 12 finger
/// link centers (proximal/medial/distal per finger). Fingers 0-2 mount on
/// the +y palm edge, finger 3 (thumb) mirrors on -y.
std::vector<geom::Vec3> forward_keypoints(const HandState& state,
                                          const RigConfig& cfg = {});

/// (tcp z, roll, pitch, yaw)
std::array<double, 4> tcp_observation(const HandState& state);

}  // namespace clutter::rig
