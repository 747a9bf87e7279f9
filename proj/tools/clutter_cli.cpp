#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "clutter/execloop.hpp"
#include "clutter/mcpserv.hpp"
#include "clutter/planner.hpp"
#include "clutter/scenegen.hpp"

namespace fs = std::filesystem;
using namespace clutter;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

exec::Planner make_planner(const std::string& name) {
    if (name == "scripted") return plan::scripted_plan;
    if (name == "grasp_only") return plan::grasp_only_plan;
    if (name == "llm") {
        auto endpoint = plan::EndpointConfig::from_environment();
        if (endpoint.base_url.empty())
            throw std::runtime_error("llm planner needs CLUTTER_LLM_URL");
        return [endpoint](const plan::PlannerContext& ctx) {
            auto res = plan::llm_plan(ctx, endpoint);
            if (res.fallback) std::cerr << "planner_fallback at step " << ctx.step_index << "\n";
            return res.action;
        };
    }
    throw std::runtime_error("unknown planner: " + name);
}

std::vector<scenegen::ScenarioConfig> load_scenarios(const std::string& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<scenegen::ScenarioConfig> out;
    for (const auto& f : files) {
        try {
            out.push_back(scenegen::parse(read_file(f.string())));
        } catch (const std::exception& e) {
            std::cerr << "warning: skipping " << f << ": " << e.what() << "\n";
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Clutter-grasping benchmark toolkit"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate benchmark scenarios");
    std::string gen_target, gen_out = ".";
    int gen_level = 1, gen_count = 1;
    std::uint64_t gen_seed = 34770;  // default master seed: all 210 scenarios are feasible
    bool gen_all = false;
    gen->add_option("--target", gen_target, "target object name");
    gen->add_option("--level", gen_level, "clutter level 1|2|3");
    gen->add_option("--count", gen_count, "number of scenarios");
    gen->add_option("--seed", gen_seed, "master seed");
    gen->add_option("--out", gen_out, "output directory")->required();
    gen->add_flag("--all", gen_all, "generate the full 7x3x10 benchmark matrix");

    // run
    auto* run = app.add_subcommand("run", "Run one episode");
    std::string run_scenario, run_planner = "scripted";
    int run_max_steps = 40, run_replan_limit = 5;
    run->add_option("--scenario", run_scenario, "scenario JSON file")->required();
    run->add_option("--planner", run_planner, "scripted|grasp_only|llm");
    run->add_option("--max-steps", run_max_steps, "planning step limit");
    run->add_option("--replan-limit", run_replan_limit, "failed-skill budget");

    // bench
    auto* bench = app.add_subcommand("bench", "Run a benchmark sweep");
    std::string bench_dir, bench_planner = "scripted", bench_out = "results.csv";
    int bench_jobs = 1;
    bench->add_option("--dir", bench_dir, "directory of scenario JSON files")->required();
    bench->add_option("--planner", bench_planner, "scripted|grasp_only|llm");
    bench->add_option("--out", bench_out, "CSV output path");
    bench->add_option("--jobs", bench_jobs, "parallel episodes");

    // render
    auto* render = app.add_subcommand("render", "Render a scenario to SVG");
    std::string render_scenario_path, render_out;
    render->add_option("--scenario", render_scenario_path, "scenario JSON file")->required();
    render->add_option("--out", render_out, "SVG output path")->required();

    // serve
    auto* serve = app.add_subcommand("serve", "Run the tool server");
    std::string serve_transport = "stdio", serve_scenario, serve_snapshot;
    int serve_port = 7077;
    serve->add_option("--transport", serve_transport, "stdio|tcp");
    serve->add_option("--port", serve_port, "tcp port");
    serve->add_option("--scenario", serve_scenario, "scenario JSON file")->required();
    serve->add_option("--snapshot", serve_snapshot, "final scene snapshot path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            fs::create_directories(gen_out);
            const auto& roster = scenegen::default_roster();
            if (gen_all) {
                auto configs = scenegen::generate_benchmark(gen_seed, roster);
                for (const auto& c : configs)
                    write_file((fs::path(gen_out) / (c.scenario_id() + ".json")).string(),
                               scenegen::serialize(c));
                std::cout << "wrote " << configs.size() << " scenarios to " << gen_out << "\n";
            } else {
                if (gen_target.empty())
                    throw std::runtime_error("gen needs --target or --all");
                for (int i = 0; i < gen_count; ++i) {
                    auto seed = scenegen::derive_seed(gen_seed, gen_target, gen_level, i);
                    auto c = scenegen::generate_scenario(gen_target, gen_level, seed, roster);
                    write_file((fs::path(gen_out) / (c.scenario_id() + ".json")).string(),
                               scenegen::serialize(c));
                }
                std::cout << "wrote " << gen_count << " scenarios to " << gen_out << "\n";
            }
        } else if (*run) {
            auto config = scenegen::parse(read_file(run_scenario));
            auto report = exec::run_episode(config, make_planner(run_planner),
                                            {run_max_steps, run_replan_limit});
            std::cout << "scenario " << report.scenario_id << ": "
                      << exec::outcome_name(report.outcome) << " in " << report.steps_used
                      << " steps (" << report.replans_used << " replans)\n";
            for (const auto& entry : report.trace)
                std::cout << "  " << entry.action.action << " -> "
                          << (entry.result.success ? "ok" : "FAIL") << " "
                          << entry.result.message << "\n";
        } else if (*bench) {
            auto scenarios = load_scenarios(bench_dir);
            if (scenarios.empty()) {
                std::cout << "no scenarios found in " << bench_dir << "\n";
                return 0;
            }
            auto table = exec::run_benchmark(scenarios, make_planner(bench_planner), bench_jobs);
            write_file(bench_out, table.to_csv());
            std::cout << table.format_table();
            std::cout << "wrote " << bench_out << "\n";
        } else if (*render) {
            auto config = scenegen::parse(read_file(render_scenario_path));
            write_file(render_out, exec::render_scenario(config));
            std::cout << "wrote " << render_out << "\n";
        } else if (*serve) {
            auto config = scenegen::parse(read_file(serve_scenario));
            auto scene = scenegen::instantiate(config, scenegen::default_roster());
            scene = world::settle(scene).scene;
            mcp::serve(scene, {serve_transport, serve_port, serve_snapshot});
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
