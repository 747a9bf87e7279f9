#include "clutter/handrig.hpp"

#include <cmath>
#include <stdexcept>

namespace clutter::rig {

double ActionVector::norm() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return std::sqrt(s);
}

ActionVector clamp_action(const std::array<double, kActionDims>& raw) {
    ActionVector out;
    for (int i = 0; i < kActionDims; ++i) {
        if (!std::isfinite(raw[i]))
            throw std::invalid_argument("clamp_action: non-finite component");
        out.values[i] = std::max(-1.0, std::min(1.0, raw[i]));
    }
    return out;
}

HandState apply_action(const HandState& state, const ActionVector& a,
                       const RigConfig& cfg) {
    HandState out = state;
    out.tcp_pose.position.x += kActionScale * a.values[0];
    out.tcp_pose.position.y += kActionScale * a.values[1];
    out.tcp_pose.position.z += kActionScale * a.values[2];
    out.tcp_pose.roll = geom::wrap_angle(out.tcp_pose.roll + kActionScale * a.values[3]);
    out.tcp_pose.pitch = geom::wrap_angle(out.tcp_pose.pitch + kActionScale * a.values[4]);
    out.tcp_pose.yaw = geom::wrap_angle(out.tcp_pose.yaw + kActionScale * a.values[5]);
    // dim 6 reserved (arm redundancy in the source robot), unused here
    for (int j = 0; j < kFingerJoints; ++j) {
        double q = state.finger_joints[j] + kActionScale * a.values[7 + j];
        out.finger_joints[j] = std::max(cfg.joint_lo, std::min(cfg.joint_hi, q));
    }
    return out;
}

std::vector<geom::Vec3> forward_keypoints(const HandState& state,
                                          const RigConfig& cfg) {
    std::vector<geom::Vec3> pts;
    pts.reserve(kKeypoints);

    // Palm: 2x3 grid on the local z=0 plane.
    for (int col = 0; col < 2; ++col) {
        for (int row = 0; row < 3; ++row) {
            geom::Vec3 local{(col == 0 ? -0.5 : 0.5) * cfg.palm_pitch,
                             (row - 1) * cfg.palm_pitch, 0.0};
            pts.push_back(state.tcp_pose.apply(local));
        }
    }

    // Fingers: planar 3-link chains curling from horizontal toward -z and
    // back inward. Fingers 0-2 extend along +y, the thumb along -y.
    for (int f = 0; f < 4; ++f) {
        geom::Vec3 base;
        double dir;  // chain direction along local y
        if (f < 4 - 1) {
            base = {(f - 1) * cfg.finger_spread, cfg.finger_mount_y, 0.0};
            dir = 1.0;
        } else {
            base = {0.0, -cfg.finger_mount_y, 0.0};
            dir = -1.0;
        }
        double theta = 0.0;
        geom::Vec3 tip = base;
        for (int link = 0; link < 3; ++link) {
            theta += state.finger_joints[3 * f + link];
            geom::Vec3 seg{0.0, dir * std::cos(theta), -std::sin(theta)};
            geom::Vec3 mid = tip + seg * (0.5 * cfg.link_lengths[link]);
            pts.push_back(state.tcp_pose.apply(mid));
            tip += seg * cfg.link_lengths[link];
        }
    }
    return pts;
}

std::array<double, 4> tcp_observation(const HandState& state) {
    return {state.tcp_pose.position.z, state.tcp_pose.roll, state.tcp_pose.pitch,
            state.tcp_pose.yaw};
}

}  // namespace clutter::rig
