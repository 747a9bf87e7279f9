// End-to-end acceptance checks for the benchmark toolkit. Each check prints
// one pass/fail line; the process exits nonzero if any check fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "clutter/execloop.hpp"
#include "clutter/mcpserv.hpp"

using namespace clutter;
using nlohmann::json;

namespace {

constexpr std::uint64_t kMasterSeed = 34770;

int g_failures = 0;

void report(int index, const std::string& name, bool ok, const std::string& detail = "") {
    std::printf("[%s] %2d. %s%s%s\n", ok ? "PASS" : "FAIL", index, name.c_str(),
                detail.empty() ? "" : " — ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

double udist(std::mt19937_64& gen, double lo, double hi) {
    return lo + (hi - lo) * geom::u64_to_unit(gen());
}

// --- 1. benchmark matrix fidelity -----------------------------------------

void check_matrix_fidelity() {
    auto t0 = std::chrono::steady_clock::now();
    const auto& roster = scenegen::default_roster();
    std::vector<scenegen::ScenarioConfig> all;
    std::string detail;
    bool ok = true;
    try {
        all = scenegen::generate_benchmark(kMasterSeed, roster);
    } catch (const std::exception& e) {
        report(1, "benchmark matrix fidelity", false, e.what());
        return;
    }
    ok = ok && all.size() == 210;
    int per_level[4] = {};
    for (const auto& c : all) {
        per_level[c.level]++;
        ok = ok && static_cast<int>(c.obstacles.size()) == 2 * c.level;
        std::vector<scenegen::PlacedObject> objs{c.target};
        objs.insert(objs.end(), c.obstacles.begin(), c.obstacles.end());
        for (const auto& o : objs)
            ok = ok && std::abs(o.x) <= 0.10 && std::abs(o.y) <= 0.10;
        for (std::size_t i = 0; i < objs.size(); ++i)
            for (std::size_t j = i + 1; j < objs.size(); ++j)
                ok = ok && std::hypot(objs[i].x - objs[j].x, objs[i].y - objs[j].y) >=
                               0.06 - 1e-12;
        auto settled = world::settle(scenegen::instantiate(c, roster));
        ok = ok && settled.max_displacement < 0.01;
    }
    ok = ok && per_level[1] == 70 && per_level[2] == 70 && per_level[3] == 70;
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ok = ok && secs < 60.0;
    char buf[128];
    std::snprintf(buf, sizeof buf, "210 scenarios, constraints verified in %.1f s", secs);
    report(1, "benchmark matrix fidelity", ok, buf);
}

// --- 2. determinism goldens ------------------------------------------------

std::string matrix_json(std::uint64_t master) {
    std::string out;
    for (const auto& c : scenegen::generate_benchmark(master, scenegen::default_roster()))
        out += scenegen::serialize(c);
    return out;
}

void check_determinism() {
    bool ok = true;
    std::string detail;
    try {
        auto a = matrix_json(kMasterSeed);
        auto b = matrix_json(kMasterSeed);
        ok = ok && a == b && !a.empty();

        auto scenarios = scenegen::generate_benchmark(kMasterSeed, scenegen::default_roster());
        auto run1 = exec::run_benchmark(scenarios, plan::scripted_plan, 4);
        auto run2 = exec::run_benchmark(scenarios, plan::scripted_plan, 1);
        ok = ok && run1.to_csv() == run2.to_csv() && !run1.to_csv().empty();
        detail = "matrix JSON and benchmark CSV byte-identical across runs";
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    report(2, "determinism goldens", ok, detail);
}

// --- 3. reward oracle equivalence -------------------------------------------

double reward_reference(const grasp::RewardState& prev, const grasp::RewardState& cur,
                        const rig::ActionVector& a) {
    double mag = 0.0;
    for (double v : a.values) mag += v * v;
    double r = 50.0 * (cur.object_height - cur.initial_height) +
               (cur.object_height > 0.15 ? 200.0 : 0.0) + 10.0 * cur.contact_count +
               10.0 * (prev.nn_distance - cur.nn_distance) - 0.03 * std::sqrt(mag);
    return std::min(100.0, std::max(-100.0, r));
}

void check_reward_oracle() {
    std::mt19937_64 gen(0xACCE01);
    bool ok = true;
    for (int i = 0; i < 10000 && ok; ++i) {
        grasp::RewardState prev, cur;
        prev.initial_height = cur.initial_height = udist(gen, 0.0, 0.05);
        prev.object_height = udist(gen, -0.05, 0.30);
        cur.object_height = udist(gen, -0.05, 0.30);
        prev.contact_count = static_cast<int>(gen() % 19);
        cur.contact_count = static_cast<int>(gen() % 19);
        prev.nn_distance = udist(gen, 0.0, 5.0);
        cur.nn_distance = udist(gen, 0.0, 5.0);
        rig::ActionVector a;
        for (auto& v : a.values) v = udist(gen, -1.0, 1.0);
        double got = grasp::step_reward(prev, cur, a);
        ok = ok && std::abs(got - reward_reference(prev, cur, a)) <= 1e-9;
        ok = ok && got >= -100.0 && got <= 100.0;
    }
    report(3, "reward oracle equivalence", ok, "10^4 triples within 1e-9, outputs clipped");
}

// --- 4. observation invariants ----------------------------------------------

void check_observation_invariants() {
    std::mt19937_64 gen(0xACCE02);
    bool ok = true;

    auto cloud = geom::sample_primitive_cloud({geom::ShapeKind::Box, {0.04, 0.05, 0.03}}, 512, 1);
    for (int i = 0; i < 10000 && ok; ++i) {
        rig::HandState hand;
        hand.tcp_pose.position = {udist(gen, -0.2, 0.2), udist(gen, -0.2, 0.2),
                                  udist(gen, 0.0, 0.3)};
        hand.tcp_pose.yaw = udist(gen, -3.0, 3.0);
        for (auto& j : hand.finger_joints) j = udist(gen, 0.0, 1.5);
        auto obs = grasp::encode_observation(hand, cloud, 0.02);
        ok = ok && obs.flat().size() == 59;
        for (int k = 0; k < 18 && ok; ++k) {
            double n = std::hypot(std::hypot(obs.geom[3 * k], obs.geom[3 * k + 1]),
                                  obs.geom[3 * k + 2]);
            ok = ok && (n == 0.0 || std::abs(n - 1.0) <= 1e-6);
        }
    }

    // telescoping shaping-term identity over random action episodes
    grasp::RewardWeights nn_only;
    nn_only.w_lift = nn_only.w_success = nn_only.w_contact = nn_only.w_action = 0.0;
    nn_only.clip_lo = -1e18;
    nn_only.clip_hi = 1e18;
    for (int ep = 0; ep < 100 && ok; ++ep) {
        auto ep_cloud = geom::sample_primitive_cloud(
            {geom::ShapeKind::Sphere, {udist(gen, 0.02, 0.05), 0, 0}}, 256, gen());
        rig::HandState hand;
        hand.tcp_pose.position = {udist(gen, -0.05, 0.05), udist(gen, -0.05, 0.05),
                                  udist(gen, 0.1, 0.2)};
        double d0 = geom::total_nn_distance(rig::forward_keypoints(hand), ep_cloud);
        double prev_d = d0, sum = 0.0;
        for (int t = 0; t < 50; ++t) {
            rig::ActionVector a;
            for (auto& v : a.values) v = udist(gen, -1.0, 1.0);
            hand = rig::apply_action(hand, a);
            double d = geom::total_nn_distance(rig::forward_keypoints(hand), ep_cloud);
            grasp::RewardState prev, cur;
            prev.nn_distance = prev_d;
            cur.nn_distance = d;
            sum += grasp::step_reward(prev, cur, a, nn_only);
            prev_d = d;
        }
        ok = ok && std::abs(sum - nn_only.w_nn * (d0 - prev_d)) <= 1e-8;
    }
    report(4, "observation invariants", ok,
           "length 59, unit 3-blocks, telescoping shaping sum on 100 episodes");
}

// --- 5. nearest-neighbor oracle equivalence ---------------------------------

void check_nn_oracle() {
    std::mt19937_64 gen(0xACCE03);
    bool ok = true;
    int queries = 0;
    while (queries < 10000 && ok) {
        geom::PointCloud cloud;
        std::size_t n = 1 + gen() % 2048;
        for (std::size_t i = 0; i < n; ++i)
            cloud.points.push_back(
                {udist(gen, -0.3, 0.3), udist(gen, -0.3, 0.3), udist(gen, -0.3, 0.3)});
        for (int q = 0; q < 100 && queries < 10000 && ok; ++q, ++queries) {
            geom::Vec3 p{udist(gen, -0.4, 0.4), udist(gen, -0.4, 0.4), udist(gen, -0.4, 0.4)};
            auto hit = geom::nearest_vector(p, cloud);
            std::size_t best_i = 0;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < cloud.points.size(); ++i) {
                geom::Vec3 d = cloud.points[i] - p;
                double dist = std::sqrt(d.x * d.x + d.y * d.y + d.z * d.z);
                if (dist < best) {
                    best = dist;
                    best_i = i;
                }
            }
            ok = ok && hit.index == best_i && hit.distance == best;
        }
    }
    report(5, "nearest-neighbor oracle equivalence", ok, "10^4 queries, exact index and distance");
}

// --- 6. executor protocol bounds --------------------------------------------

void check_executor_bounds() {
    bool ok = true;
    std::string detail = "210 episodes, steps_used = 40, replans <= 5";
    try {
        auto scenarios = scenegen::generate_benchmark(kMasterSeed, scenegen::default_roster());
        exec::Planner adversary = [](const plan::PlannerContext&) {
            plan::PlanAction a;
            a.action = "grasp";  // always fails: the hand never leaves home
            return a;
        };
        auto table = exec::run_benchmark(scenarios, adversary, 4);
        for (const auto& r : table.reports) {
            ok = ok && r.steps_used == 40 && r.replans_used <= 5 &&
                 r.outcome != exec::Outcome::Success;
        }
        ok = ok && table.reports.size() == 210;
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    report(6, "executor protocol bounds", ok, detail);
}

// --- 7. ablation trend -------------------------------------------------------

void check_ablation_trend() {
    bool ok = true;
    std::string detail;
    try {
        auto scenarios = scenegen::generate_benchmark(kMasterSeed, scenegen::default_roster());
        auto clearing = exec::run_benchmark(scenarios, plan::scripted_plan, 4);
        auto grasp_only = exec::run_benchmark(scenarios, plan::grasp_only_plan, 4);
        double c2 = clearing.level_rate(2), c3 = clearing.level_rate(3);
        double g1 = grasp_only.level_rate(1), g2 = grasp_only.level_rate(2),
               g3 = grasp_only.level_rate(3);
        ok = ok && c2 - g2 >= 0.10 && c3 - g3 >= 0.10;
        ok = ok && g1 > g2 && g2 > g3;
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "clearing L2/L3 %.2f/%.2f vs grasp-only L1/L2/L3 %.2f/%.2f/%.2f", c2, c3,
                      g1, g2, g3);
        detail = buf;
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    report(7, "ablation trend", ok, detail);
}

// --- 8. tool-server fuzz ------------------------------------------------------

void check_server_fuzz() {
    bool ok = true;
    std::string detail = "1000 valid + 1000 malformed messages, codes verified";
    std::mt19937_64 gen(0xACCE08);
    const auto& roster = scenegen::default_roster();
    auto base = scenegen::generate_scenario("cube", 1,
                                            scenegen::derive_seed(kMasterSeed, "cube", 1, 0),
                                            roster);
    mcp::Session session{scenegen::instantiate(base, roster), std::nullopt};

    auto tool_names = skills::tool_names();
    auto valid_request = [&](std::int64_t id) {
        const std::string& name = tool_names[gen() % tool_names.size()];
        json args = json::object();
        const char* sides[] = {"left", "center", "right"};
        if (name == "push" || name == "pull") {
            args["side"] = sides[gen() % 3];
            if (gen() % 2) args["dist"] = udist(gen, 0.01, 0.15);
        } else if (name == "move_to") {
            args["target"] = (gen() % 2) ? "cube" : session.scene.objects[gen() % 3].id;
        } else if (name == "lift" || name == "lower") {
            if (gen() % 2) args["height"] = udist(gen, 0.01, 0.5);
        }
        return json{{"id", id},
                    {"method", "tools/call"},
                    {"params", {{"name", name}, {"arguments", args}}}};
    };

    std::int64_t id = 0;
    for (int i = 0; i < 1000 && ok; ++i) {
        auto req = valid_request(++id);
        auto line = mcp::handle_message(session, req.dump());
        json res;
        try {
            res = json::parse(line);
        } catch (...) {
            ok = false;
            break;
        }
        ok = ok && res["id"] == id && (res.contains("result") || res.contains("error"));
        // schema-valid calls never produce protocol errors
        ok = ok && !res.contains("error");
    }

    for (int i = 0; i < 1000 && ok; ++i) {
        int expect;
        std::string line;
        switch (i % 5) {
            case 0:  // unparsable
                line = "{broken json " + std::to_string(gen());
                expect = -32700;
                break;
            case 1:  // unknown method
                line = json{{"id", ++id}, {"method", "tools/" + std::to_string(gen())}}.dump();
                expect = -32601;
                break;
            case 2:  // unknown tool
                line = json{{"id", ++id},
                            {"method", "tools/call"},
                            {"params", {{"name", "tool" + std::to_string(gen() % 100)}}}}
                           .dump();
                expect = -32601;
                break;
            case 3:  // schema-invalid arguments
                line = json{{"id", ++id},
                            {"method", "tools/call"},
                            {"params",
                             {{"name", "push"},
                              {"arguments", {{"side", "up"}, {"dist", udist(gen, -1, 2)}}}}}}
                           .dump();
                expect = -32602;
                break;
            default:  // missing params entirely
                line = json{{"id", ++id}, {"method", "tools/call"}}.dump();
                expect = -32602;
                break;
        }
        json res;
        try {
            res = json::parse(mcp::handle_message(session, line));
        } catch (...) {
            ok = false;
            break;
        }
        ok = ok && res.contains("error") && res["error"]["code"] == expect;
    }
    report(8, "tool-server fuzz", ok, detail);
}

// --- 9. planner round-trip -----------------------------------------------------

void check_planner_roundtrip() {
    bool ok = true;
    std::mt19937_64 gen(0xACCE09);
    auto names = skills::tool_names();
    const char* sides[] = {"left", "center", "right"};
    const char* reasons[] = {"clear the blocker", "approach {the} target",
                             "fallback: \"pull\" instead", "", "reset and retry"};
    for (int i = 0; i < 1000 && ok; ++i) {
        plan::PlanAction a;
        a.action = names[gen() % names.size()];
        if (a.action == "push" || a.action == "pull") {
            a.args["side"] = sides[gen() % 3];
            if (gen() % 2) a.args["dist"] = 0.01 + 0.01 * static_cast<double>(gen() % 14);
        } else if (a.action == "move_to") {
            a.args["target"] = "obj_" + std::to_string(gen() % 50);
        } else if (a.action == "lift" || a.action == "lower") {
            if (gen() % 2) a.args["height"] = 0.05 + 0.01 * static_cast<double>(gen() % 45);
        }
        a.reason = reasons[gen() % 5];
        try {
            auto back = plan::parse_plan_action(a.serialize());
            ok = ok && back.action == a.action && back.args == a.args && back.reason == a.reason;
        } catch (const std::exception&) {
            ok = false;
        }
    }

    // push -> pull fallback fires exactly on prior push failure against the
    // same blocker, and only then
    plan::PlannerContext ctx;
    ctx.target_name = "cube";
    ctx.objects = {{"cube", 0.0, 0.0, 0.02, 0.0, true}, {"orange", 0.07, 0.0, 0.02, 0.0, false}};
    ctx.tcp_pose.position = {0.0, 0.0, 0.02 + skills::kHoverOffset};
    ctx.blocking = {"orange"};
    ok = ok && plan::scripted_plan(ctx).action == "push";
    ctx.recent = {{"push", "orange", true}};
    ok = ok && plan::scripted_plan(ctx).action == "push";
    ctx.recent = {{"push", "other", false}};
    ok = ok && plan::scripted_plan(ctx).action == "push";
    ctx.recent = {{"push", "orange", false}};
    ok = ok && plan::scripted_plan(ctx).action == "pull";
    ctx.recent.push_back({"pull", "orange", false});
    ok = ok && plan::scripted_plan(ctx).action == "initarm";
    report(9, "planner round-trip", ok, "10^3 serialization identities, fallback conditions");
}

// --- 10. domain randomization ranges ------------------------------------------

void check_dr_ranges() {
    bool ok = true;
    double friction_sum = 0.0;
    const int n = 100000;
    for (int seed = 0; seed < n && ok; ++seed) {
        auto s = grasp::sample_domain_randomization(seed);
        ok = ok && s.friction_scale >= 0.5 && s.friction_scale <= 2.0;
        ok = ok && s.mass_scale >= 0.8 && s.mass_scale <= 1.2;
        ok = ok && s.cloud_noise_sigma == 0.005;
        for (double v : s.init_joint_offset) ok = ok && v >= -0.05 && v <= 0.05;
        friction_sum += s.friction_scale;
    }
    double mean = friction_sum / n;
    ok = ok && std::abs(mean - 1.25) <= 0.01;
    char buf[64];
    std::snprintf(buf, sizeof buf, "10^5 samples in range, friction mean %.4f", mean);
    report(10, "domain randomization ranges", ok, buf);
}

}  // namespace

int main() {
    check_matrix_fidelity();
    check_determinism();
    check_reward_oracle();
    check_observation_invariants();
    check_nn_oracle();
    check_executor_bounds();
    check_ablation_trend();
    check_server_fuzz();
    check_planner_roundtrip();
    check_dr_ranges();
    if (g_failures) {
        std::printf("%d acceptance check(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all acceptance checks passed\n");
    return 0;
}
