/*
Copyright 2026 The ROARS Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

// Command-line front end: generate | simulate | train | bench | inspect.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "roars/bench.hpp"
#include "roars/training.hpp"

namespace fs = std::filesystem;
using namespace roars;

namespace {

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path &path, const std::string &text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

GenConfig gen_from(const std::string &path) { return path.empty() ? GenConfig{} : gen_config_from_json(read_file(path)); }

struct Options {
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string config, out, scenario, scheduler = "STF", checkpoint, mode = "sample", search, train_config, curve;
    int queue = kDefaultQueueCapacity;
    long steps = -1;
    int batch = -1;
    bool serial = false, quiet = false;
};

int cmd_generate(const Options &o) {
    const auto scenario = generate_scenario(gen_from(o.config), o.seed);
    if (o.out.empty()) std::cout << scenario_to_json(scenario) << '\n';
    else save_scenario(scenario, o.out);
    return 0;
}

SearchConfig search_for(const Options &o, int num_sites) {
    const SearchConfig base = num_sites > 1 ? SearchConfig::distributed() : SearchConfig::intra_site();
    return o.search.empty() ? base : search_config_from_json(read_file(o.search), base);
}

int cmd_simulate(const Options &o) {
    Scenario sc = o.scenario.empty() ? generate_scenario(gen_from(o.config), o.seed) : load_scenario(o.scenario);
    const auto inst = Instance::build(std::move(sc));
    std::shared_ptr<const PolicyNet> policy;
    if (!o.checkpoint.empty()) policy = std::make_shared<const PolicyNet>(load_checkpoint(o.checkpoint));
    auto spec = parse_scheduler(o.scheduler, policy, search_for(o, inst->num_sites), parse_pick_mode(o.mode));
    spec.seed = o.seed;
    const auto r = run_online(inst, spec, o.queue);
    if (!o.out.empty()) write_file(o.out, schedule_dump(r.dag));
    nlohmann::json j = {{"scheduler", spec.name()},      {"tasks", inst->num_tasks()},
                        {"scheduled", r.dag.size()},      {"drop_count", r.dropped.size()},
                        {"avg_slowdown", r.avg_slowdown()}, {"replans", r.replans}};
    std::cout << j.dump() << '\n';
    return 0;
}

int cmd_train(const Options &o) {
    TrainConfig tc = o.train_config.empty() ? TrainConfig{} : train_config_from_json(read_file(o.train_config));
    if (o.seed_given) tc.seed = o.seed;
    if (o.steps >= 0) tc.steps = o.steps;
    if (o.batch > 0) tc.batch = o.batch;
    const GenConfig gen = gen_from(o.config);
    const SearchConfig search = search_for(o, gen.num_sites);
    const auto t0 = std::chrono::steady_clock::now();
    const auto result = train(tc, gen, search, [&](const CurveRow &row) {
        if (o.quiet) return;
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::fprintf(stderr, "step %ld loss %.4f L_w %.4f L_u %.4f val %.4f (%.0fs)\n", row.step, row.train_loss,
                     row.l_omega, row.l_u, row.val_slowdown, s);
    });
    save_checkpoint(result.best, o.out);
    fs::path curve = o.curve;
    if (curve.empty()) curve = fs::path(o.out).replace_extension(".curve.csv");
    write_file(curve, curve_csv(result.curve));
    return 0;
}

int cmd_bench(const Options &o) {
    auto cfg = bench_config_from_json(read_file(o.config), fs::path(o.config).parent_path().string());
    if (o.seed_given) cfg.seed = o.seed;
    if (!o.checkpoint.empty()) cfg.checkpoint = o.checkpoint;
    const auto report = run_benchmark(cfg, !o.serial);
    const fs::path dir = o.out.empty() ? fs::path("report") : fs::path(o.out);
    write_file(dir / "rows.csv", rows_csv(report));
    write_file(dir / "summary.csv", summary_csv(report));
    write_file(dir / "timing.csv", timing_csv(report));
    write_file(dir / "slowdown.svg", summary_svg(report));
    if (!o.quiet) std::cout << summary_csv(report);
    int failures = 0;
    for (const auto &s : report.summary) failures += s.failures;
    if (failures > 0) std::fprintf(stderr, "roars: %d run(s) failed; see rows.csv\n", failures);
    return 0;
}

int cmd_inspect(const Options &o) {
    nlohmann::json j;
    if (!o.checkpoint.empty()) {
        const auto net = load_checkpoint(o.checkpoint);
        const auto &d = net.dims();
        j["checkpoint"] = {{"hidden", d.hidden},       {"input_size", d.input_size()}, {"sites", d.num_sites},
                           {"filters", d.num_filters}, {"e_max", d.e_max},             {"distributed", d.distributed},
                           {"train_step", net.train_step}, {"parameters", net.params().size()}};
    }
    if (!o.scenario.empty() || !o.config.empty()) {
        Scenario sc = o.scenario.empty() ? generate_scenario(gen_from(o.config), o.seed) : load_scenario(o.scenario);
        const auto inst = Instance::build(std::move(sc));
        int never_visible = 0;
        for (const auto &t : inst->tasks) {
            bool any = false;
            for (int s = 0; s < inst->num_sites && !any; ++s)
                for (int b = t.arrival; b + t.exposure <= t.deadline && !any; ++b)
                    any = inst->visibility.observable(t.target, s, b, t.exposure);
            never_visible += !any;
        }
        j["scenario"] = {{"sites", inst->num_sites},      {"filters", inst->num_filters},
                         {"horizon", inst->horizon},      {"targets", inst->scenario.targets.size()},
                         {"tasks", inst->num_tasks()},    {"never_visible_tasks", never_visible},
                         {"seed", inst->scenario.rng_seed}};
    }
    if (j.is_null()) throw std::invalid_argument("inspect needs --scenario, --config or --checkpoint");
    std::cout << j.dump(2) << '\n';
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Online scheduler for follow-up observations of transients"};
    app.require_subcommand(1);
    Options o;
    auto seed_opt = [&](CLI::App *sub) {
        sub->add_option_function<std::uint64_t>(
               "--seed", [&](std::uint64_t s) { o.seed = s, o.seed_given = true; }, "Random seed");
    };

    auto *gen = app.add_subcommand("generate", "Write a random scenario");
    gen->add_option("--config", o.config, "Generator config (JSON)");
    gen->add_option("--out", o.out, "Scenario file (stdout when omitted)");
    seed_opt(gen);

    auto *sim = app.add_subcommand("simulate", "Run one scheduler online over a scenario");
    sim->add_option("--scenario", o.scenario, "Scenario file");
    sim->add_option("--config", o.config, "Generator config, used when no scenario is given");
    sim->add_option("--scheduler", o.scheduler, "STF, FCFS, EDD, SPT, RIP, SQTF, ..., Offline, ROARS, Rewrite-random");
    sim->add_option("--checkpoint", o.checkpoint, "Policy checkpoint (ROARS)");
    sim->add_option("--mode", o.mode, "Policy decoding: sample or greedy");
    sim->add_option("--search", o.search, "Rewrite search config (JSON)");
    sim->add_option("--queue", o.queue, "Waiting-queue capacity")->check(CLI::PositiveNumber);
    sim->add_option("--out", o.out, "Schedule dump (JSON lines)");
    seed_opt(sim);

    auto *tr = app.add_subcommand("train", "Train a rewriting policy");
    tr->add_option("--scenario-config", o.config, "Generator config (JSON)");
    tr->add_option("--train-config", o.train_config, "Training config (JSON)");
    tr->add_option("--search", o.search, "Rewrite search config (JSON)");
    tr->add_option("--out", o.out, "Checkpoint path")->required();
    tr->add_option("--curve", o.curve, "Learning-curve CSV (default: <out>.curve.csv)");
    tr->add_option("--steps", o.steps, "Override optimizer steps");
    tr->add_option("--batch", o.batch, "Override batch size");
    tr->add_flag("--quiet", o.quiet, "No progress output");
    seed_opt(tr);

    auto *bench = app.add_subcommand("bench", "Benchmark schedulers over seeded instances");
    bench->add_option("--config", o.config, "Benchmark config (JSON)")->required();
    bench->add_option("--out", o.out, "Report directory (default: report)");
    bench->add_option("--checkpoint", o.checkpoint, "Override the config's checkpoint");
    bench->add_flag("--serial", o.serial, "Use the serial reference loop");
    bench->add_flag("--quiet", o.quiet, "Do not print the summary");
    seed_opt(bench);

    auto *ins = app.add_subcommand("inspect", "Summarize a scenario or checkpoint");
    ins->add_option("--scenario", o.scenario, "Scenario file");
    ins->add_option("--config", o.config, "Generator config");
    ins->add_option("--checkpoint", o.checkpoint, "Policy checkpoint");
    seed_opt(ins);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        std::fprintf(stderr, "roars: %s\n", e.what());
        const CLI::App *sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        std::cerr << sub->help();
        return 2;
    }

    try {
        if (*gen) return cmd_generate(o);
        if (*sim) return cmd_simulate(o);
        if (*tr) return cmd_train(o);
        if (*bench) return cmd_bench(o);
        return cmd_inspect(o);
    } catch (const std::exception &e) {
        std::fprintf(stderr, "roars: error: %s\n", e.what());
        return 1;
    }
}
