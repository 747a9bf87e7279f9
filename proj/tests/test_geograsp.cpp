#include <cmath>
#include <random>
#include <stdexcept>

#include "clutter/geograsp.hpp"
#include "clutter/scenegen.hpp"
#include "doctest.h"

using namespace clutter;
using namespace clutter::grasp;

namespace {

rig::HandState random_hand(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(-0.1, 0.1);
    std::uniform_real_distribution<double> q(0.0, M_PI_2);
    rig::HandState s;
    s.tcp_pose.position = {u(gen), u(gen), 0.15 + std::abs(u(gen))};
    s.tcp_pose.yaw = u(gen) * 3.0;
    for (auto& j : s.finger_joints) j = q(gen);
    return s;
}

// hand-coded reward oracle, independent of step_reward
double reward_oracle(const RewardState& prev, const RewardState& cur,
                     const rig::ActionVector& a) {
    double sum_sq = 0.0;
    for (double v : a.values) sum_sq += v * v;
    double r = 50.0 * (cur.object_height - cur.initial_height) +
               (cur.object_height > 0.15 ? 200.0 : 0.0) + 10.0 * cur.contact_count +
               10.0 * (prev.nn_distance - cur.nn_distance) - 0.03 * std::sqrt(sum_sq);
    if (r > 100.0) r = 100.0;
    if (r < -100.0) r = -100.0;
    return r;
}

world::SceneState single_cube_scene() {
    scenegen::ScenarioConfig cfg;
    cfg.level = 1;
    cfg.target = {"cube", 0.0, 0.0, 0.0};
    cfg.obstacles = {{"can", 0.08, 0.0, 0.0}, {"apple", -0.08, 0.0, 0.0}};
    return scenegen::instantiate(cfg, scenegen::default_roster());
}

}  // namespace

TEST_CASE("encode_observation shape and normalization") {
    auto cloud = geom::sample_primitive_cloud({geom::ShapeKind::Sphere, {0.03, 0, 0}}, 512, 4);
    std::mt19937_64 gen(8);
    for (int i = 0; i < 50; ++i) {
        auto hand = random_hand(gen);
        auto obs = encode_observation(hand, cloud, 0.03);
        auto flat = obs.flat();
        CHECK(flat.size() == 59);
        for (int k = 0; k < 18; ++k) {
            geom::Vec3 block{obs.geom[3 * k], obs.geom[3 * k + 1], obs.geom[3 * k + 2]};
            double n = block.norm();
            CHECK((n == 0.0 || std::abs(n - 1.0) < 1e-6));
        }
        CHECK(flat[54] == 0.03);
        CHECK(flat[55] == hand.tcp_pose.position.z);
    }
}

TEST_CASE("contact keypoints encode as zero blocks") {
    // put a cloud point exactly at a palm keypoint
    rig::HandState hand;
    hand.tcp_pose.position = {0, 0, 0.1};
    auto keypoints = rig::forward_keypoints(hand);
    geom::PointCloud cloud;
    cloud.points = {keypoints[0], {1, 1, 1}};
    auto obs = encode_observation(hand, cloud, 0.0);
    CHECK(obs.geom[0] == 0.0);
    CHECK(obs.geom[1] == 0.0);
    CHECK(obs.geom[2] == 0.0);
}

TEST_CASE("encode_observation geom blocks rotate with a shared rigid transform") {
    auto cloud = geom::sample_primitive_cloud({geom::ShapeKind::Box, {0.04, 0.05, 0.03}}, 700, 6);
    std::mt19937_64 gen(10);
    auto hand = random_hand(gen);
    auto obs = encode_observation(hand, cloud, 0.02);

    geom::Pose delta;
    delta.position = {0.2, -0.1, 0.05};
    delta.yaw = 1.1;
    rig::HandState moved = hand;
    moved.tcp_pose = delta.compose(hand.tcp_pose);
    auto moved_cloud = geom::transform_cloud(cloud, delta);
    auto obs2 = encode_observation(moved, moved_cloud, 0.02);
    for (int k = 0; k < 18; ++k) {
        geom::Vec3 b{obs.geom[3 * k], obs.geom[3 * k + 1], obs.geom[3 * k + 2]};
        geom::Vec3 b2{obs2.geom[3 * k], obs2.geom[3 * k + 1], obs2.geom[3 * k + 2]};
        CHECK((b2 - delta.rotate(b)).norm() < 1e-6);
        CHECK(std::abs(b2.norm() - b.norm()) < 1e-9);
    }
}

TEST_CASE("step_reward hand-evaluated cases") {
    rig::ActionVector zero;
    SUBCASE("all terms vanish") {
        RewardState prev{0.02, 0.02, 0, 0.5}, cur{0.02, 0.02, 0, 0.5};
        CHECK(step_reward(prev, cur, zero) == 0.0);
    }
    SUBCASE("lift above success height clips at 100") {
        RewardState prev{0.0, 0.0, 0, 0.5}, cur{0.16, 0.0, 0, 0.5};
        // 50*0.16 + 200 = 208, clipped
        CHECK(step_reward(prev, cur, zero) == 100.0);
    }
    SUBCASE("five contacts only") {
        RewardState prev{0.0, 0.0, 0, 0.5}, cur{0.0, 0.0, 5, 0.5};
        CHECK(step_reward(prev, cur, zero) == doctest::Approx(50.0));
    }
}

TEST_CASE("step_reward matches the oracle on random triples") {
    std::mt19937_64 gen(33);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> contacts(0, 18);
    for (int i = 0; i < 2000; ++i) {
        RewardState prev, cur;
        prev.initial_height = cur.initial_height = u(gen) * 0.05;
        prev.object_height = prev.initial_height + u(gen) * 0.2 - 0.05;
        cur.object_height = cur.initial_height + u(gen) * 0.2 - 0.05;
        prev.contact_count = contacts(gen);
        cur.contact_count = contacts(gen);
        prev.nn_distance = u(gen) * 3.0;
        cur.nn_distance = u(gen) * 3.0;
        rig::ActionVector a;
        for (auto& v : a.values) v = u(gen) * 2.0 - 1.0;
        double got = step_reward(prev, cur, a);
        CHECK(got == doctest::Approx(reward_oracle(prev, cur, a)).epsilon(1e-12));
        CHECK(got <= 100.0);
        CHECK(got >= -100.0);
    }
}

TEST_CASE("count_contacts") {
    rig::HandState hand;
    hand.tcp_pose.position = {0, 0, 0.2};
    auto keypoints = rig::forward_keypoints(hand);

    SUBCASE("far cloud gives zero") {
        geom::PointCloud cloud;
        cloud.points = {{1, 1, 1}};
        CHECK(count_contacts(hand, cloud) == 0);
    }
    SUBCASE("all 12 finger keypoints on the surface saturate") {
        geom::PointCloud cloud;
        for (int k = 6; k < 18; ++k) cloud.points.push_back(keypoints[k]);
        CHECK(count_contacts(hand, cloud) == 12);
    }
    SUBCASE("palm keypoints never count") {
        geom::PointCloud cloud;
        for (int k = 0; k < 6; ++k) cloud.points.push_back(keypoints[k]);
        CHECK(count_contacts(hand, cloud) == 0);
    }
    SUBCASE("matches a brute-force distance test on random scenes") {
        std::mt19937_64 gen(77);
        std::uniform_real_distribution<double> u(-0.05, 0.05);
        for (int trial = 0; trial < 30; ++trial) {
            auto h = random_hand(gen);
            geom::PointCloud cloud;
            for (int i = 0; i < 200; ++i)
                cloud.points.push_back(h.tcp_pose.position + geom::Vec3{u(gen), u(gen), u(gen)});
            auto kps = rig::forward_keypoints(h);
            int expect = 0;
            for (int k = 6; k < 18; ++k) {
                double best = 1e18;
                for (const auto& p : cloud.points) best = std::min(best, (p - kps[k]).norm());
                if (best <= 0.005) ++expect;
            }
            CHECK(count_contacts(h, cloud) == expect);
        }
    }
}

TEST_CASE("domain randomization ranges and mean") {
    double friction_sum = 0.0;
    const int n = 20000;
    for (int seed = 0; seed < n; ++seed) {
        auto s = sample_domain_randomization(seed);
        CHECK(s.friction_scale >= 0.5);
        CHECK(s.friction_scale <= 2.0);
        CHECK(s.mass_scale >= 0.8);
        CHECK(s.mass_scale <= 1.2);
        for (double v : s.init_joint_offset) {
            CHECK(v >= -0.05);
            CHECK(v <= 0.05);
        }
        friction_sum += s.friction_scale;
    }
    CHECK(friction_sum / n == doctest::Approx(1.25).epsilon(0.01));
}

TEST_CASE("geo_controller conventions") {
    SUBCASE("all-zero blocks keep the arm still and the fingers closing") {
        GraspObservation obs;
        obs.tcp = {0.2, 0, 0, 0};
        obs.target_height = 0.02;
        auto a = geo_controller(obs);
        for (int i = 0; i < 7; ++i) CHECK(a.values[i] == 0.0);
        for (int i = 7; i < 19; ++i) CHECK(a.values[i] > 0.0);
    }
    SUBCASE("object below the tcp yields a negative z command") {
        GraspObservation obs;
        for (int k = 0; k < 18; ++k) obs.geom[3 * k + 2] = -1.0;  // all vectors point down
        obs.tcp = {0.2, 0, 0, 0};
        obs.target_height = 0.02;
        auto a = geo_controller(obs);
        CHECK(a.values[2] < 0.0);
    }
    SUBCASE("output always satisfies the clamp contract") {
        std::mt19937_64 gen(50);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int i = 0; i < 100; ++i) {
            GraspObservation obs;
            for (auto& v : obs.geom) v = u(gen);
            obs.tcp = {u(gen) + 0.3, 0, 0, u(gen)};
            obs.target_height = u(gen) * 0.05;
            auto a = geo_controller(obs);
            for (double v : a.values) {
                CHECK(v <= 1.0);
                CHECK(v >= -1.0);
            }
        }
    }
}

TEST_CASE("run_grasp_episode outcomes") {
    SUBCASE("zero-action controller never lifts") {
        auto scene = single_cube_scene();
        Controller idle = [](const GraspObservation&) { return rig::ActionVector{}; };
        EpisodeConfig cfg;
        cfg.max_ticks = 100;
        double h0 = scene.target()->pose.position.z;
        auto out = run_grasp_episode(scene, "cube", idle, cfg);
        CHECK_FALSE(out.success);
        CHECK(out.final_height == h0);
        CHECK(out.ticks == 100);
    }
    SUBCASE("geo controller grasps an isolated cube") {
        auto scene = single_cube_scene();
        auto out = run_grasp_episode(scene, "cube", geo_controller);
        CHECK(out.success);
        CHECK(out.final_height > 0.15);
    }
    SUBCASE("missing target throws") {
        auto scene = single_cube_scene();
        Controller idle = [](const GraspObservation&) { return rig::ActionVector{}; };
        CHECK_THROWS_AS(run_grasp_episode(scene, "nope", idle), std::invalid_argument);
    }
}

TEST_CASE("success implies the final hold window stayed above 0.15") {
    auto scene = single_cube_scene();
    std::vector<double> heights;
    Controller tracked = [&](const GraspObservation& obs) {
        heights.push_back(obs.target_height);
        return geo_controller(obs);
    };
    auto out = run_grasp_episode(scene, "cube", tracked);
    REQUIRE(out.success);
    REQUIRE(heights.size() >= 120);
    // last 119 observed heights plus the final state cover the hold window
    for (std::size_t i = heights.size() - 119; i < heights.size(); ++i)
        CHECK(heights[i] > 0.15);
    CHECK(out.final_height > 0.15);
}
