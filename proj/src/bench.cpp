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

#include "roars/bench.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "roars/parallel.hpp"

namespace roars {

using json = nlohmann::json;

SearchConfig search_config_from_json(const std::string &text, SearchConfig base) {
    const auto j = json::parse(text);
    base.num_steps = j.value("num_steps", base.num_steps);
    base.region_candidates = j.value("region_candidates", base.region_candidates);
    base.rule_candidates = j.value("rule_candidates", base.rule_candidates);
    base.pc_initial = j.value("pc_initial", base.pc_initial);
    base.pc_decay = j.value("pc_decay", base.pc_decay);
    base.pc_decay_every = j.value("pc_decay_every", base.pc_decay_every);
    base.pc_min = j.value("pc_min", base.pc_min);
    base.validate();
    return base;
}

namespace {

constexpr TaskRule kTaskRules[] = {TaskRule::STF, TaskRule::FCFS, TaskRule::EDD, TaskRule::SPT, TaskRule::RIP};

} // namespace

std::vector<std::string> heuristic_pair_names() {
    std::vector<std::string> out;
    for (auto site : {SiteRule::BestQuality, SiteRule::BestPriority})
        for (auto rule : kTaskRules) out.push_back(heuristic_name(rule, site));
    return out;
}

SchedulerSpec parse_scheduler(const std::string &name, std::shared_ptr<const PolicyNet> policy,
                              const SearchConfig &search, PickMode mode) {
    if (name == "Offline") return SchedulerSpec::offline();
    if (name == "Rewrite-random") return SchedulerSpec::random_search(search);
    if (name == "ROARS") {
        if (!policy) throw std::invalid_argument("scheduler ROARS needs a checkpoint");
        return SchedulerSpec::roars(std::move(policy), search, mode);
    }
    for (auto site : {SiteRule::None, SiteRule::BestQuality, SiteRule::BestPriority})
        for (auto rule : kTaskRules)
            if (heuristic_name(rule, site) == name) return SchedulerSpec::heuristic(rule, site);
    throw std::invalid_argument("unknown scheduler '" + name + "'");
}

BenchConfig bench_config_from_json(const std::string &text, const std::string &base_dir) {
    const auto j = json::parse(text);
    BenchConfig c;
    const json scenario = j.value("scenario", json::object());
    if (j.contains("ablations")) {
        for (const auto &a : j["ablations"]) {
            json merged = scenario;
            merged.merge_patch(a.value("overrides", json::object()));
            c.ablations.push_back({a.at("label").get<std::string>(), merged.dump()});
        }
    } else {
        c.ablations.push_back({"base", scenario.dump()});
    }
    for (const auto &a : c.ablations) gen_config_from_json(a.scenario_json);
    c.schedulers = j.at("schedulers").get<std::vector<std::string>>();
    if (c.schedulers.empty()) throw std::invalid_argument("bench config lists no schedulers");
    c.instances = j.value("instances", c.instances);
    if (c.instances < 1) throw std::invalid_argument("instances must be >= 1");
    c.seed = j.value("seed", c.seed);
    c.queue_capacity = j.value("queue_capacity", c.queue_capacity);
    if (j.contains("search")) c.search = search_config_from_json(j["search"].dump());
    if (j.contains("checkpoint")) {
        std::filesystem::path p = j["checkpoint"].get<std::string>();
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        c.checkpoint = p.lexically_normal().string();
    }
    if (j.contains("mode")) c.mode = parse_pick_mode(j["mode"].get<std::string>());
    return c;
}

std::uint64_t bench_instance_seed(std::uint64_t seed, int index) {
    return derive_seed(derive_seed(seed, 7), static_cast<std::uint64_t>(index));
}

BenchReport run_benchmark(const BenchConfig &config, bool parallel) {
    std::shared_ptr<const PolicyNet> policy;
    for (const auto &name : config.schedulers)
        if (name == "ROARS" && !policy) {
            if (config.checkpoint.empty()) throw std::invalid_argument("scheduler ROARS needs a checkpoint");
            policy = std::make_shared<const PolicyNet>(load_checkpoint(config.checkpoint));
        }
    std::vector<SchedulerSpec> specs;
    for (const auto &name : config.schedulers) specs.push_back(parse_scheduler(name, policy, config.search, config.mode));

    const int n_sched = static_cast<int>(specs.size());
    BenchReport report;
    for (const auto &ab : config.ablations) {
        const GenConfig gen = gen_config_from_json(ab.scenario_json);
        std::vector<BenchRow> rows(static_cast<std::size_t>(config.instances) * n_sched);
        auto body = [&](int i) {
            const std::uint64_t seed = bench_instance_seed(config.seed, i);
            std::shared_ptr<const Instance> inst;
            std::string gen_error;
            try {
                inst = Instance::build(generate_scenario(gen, seed), false);
            } catch (const std::exception &e) {
                gen_error = e.what();
            }
            for (int s = 0; s < n_sched; ++s) {
                auto &row = rows[static_cast<std::size_t>(i) * n_sched + s];
                row.ablation = ab.label;
                row.scheduler = config.schedulers[static_cast<std::size_t>(s)];
                row.instance = i;
                row.seed = seed;
                if (!inst) {
                    row.error = gen_error;
                    continue;
                }
                row.tasks = inst->num_tasks();
                try {
                    const auto r = run_online(inst, specs[static_cast<std::size_t>(s)], config.queue_capacity);
                    row.avg_slowdown = r.avg_slowdown();
                    row.drop_count = static_cast<int>(r.dropped.size());
                    row.wall_seconds = r.wall_seconds;
                } catch (const std::exception &e) {
                    row.error = e.what();
                }
            }
        };
        if (parallel) parallel::for_each_index_omp(config.instances, body);
        else parallel::for_each_index_serial(config.instances, body);

        for (int s = 0; s < n_sched; ++s) {
            SummaryRow sum{ab.label, config.schedulers[static_cast<std::size_t>(s)]};
            double total = 0.0;
            for (int i = 0; i < config.instances; ++i) {
                const auto &row = rows[static_cast<std::size_t>(i) * n_sched + s];
                sum.wall_seconds += row.wall_seconds;
                if (!row.error.empty()) {
                    ++sum.failures;
                    continue;
                }
                sum.drop_count += row.drop_count;
                // Instances where every task was dropped carry no slowdown.
                if (row.tasks - row.drop_count > 0) {
                    total += row.avg_slowdown;
                    ++sum.instances;
                }
            }
            sum.mean_slowdown = sum.instances > 0 ? total / sum.instances : 0.0;
            report.summary.push_back(std::move(sum));
        }
        report.rows.insert(report.rows.end(), std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.end()));
    }
    return report;
}

std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

namespace {

std::string fmt(const char *f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

} // namespace

std::string rows_csv(const BenchReport &report) {
    std::string out = "ablation,scheduler,instance,seed,tasks,avg_slowdown,drop_count,error\r\n";
    for (const auto &r : report.rows) {
        out += csv_field(r.ablation) + ',' + csv_field(r.scheduler) + ',' + std::to_string(r.instance) + ',' +
               std::to_string(r.seed) + ',' + std::to_string(r.tasks) + ',' + fmt("%.6f", r.avg_slowdown) + ',' +
               std::to_string(r.drop_count) + ',' + csv_field(r.error) + "\r\n";
    }
    return out;
}

std::string summary_csv(const BenchReport &report) {
    std::string out = "ablation,scheduler,instances,avg_slowdown,drop_count,failures\r\n";
    for (const auto &r : report.summary) {
        out += csv_field(r.ablation) + ',' + csv_field(r.scheduler) + ',' + std::to_string(r.instances) + ',' +
               fmt("%.6f", r.mean_slowdown) + ',' + std::to_string(r.drop_count) + ',' +
               std::to_string(r.failures) + "\r\n";
    }
    return out;
}

std::string timing_csv(const BenchReport &report) {
    std::string out = "ablation,scheduler,instance,wall_time_seconds\r\n";
    for (const auto &r : report.rows)
        out += csv_field(r.ablation) + ',' + csv_field(r.scheduler) + ',' + std::to_string(r.instance) + ',' +
               fmt("%.6f", r.wall_seconds) + "\r\n";
    for (const auto &r : report.summary)
        out += csv_field(r.ablation) + ',' + csv_field(r.scheduler) + ",total," + fmt("%.6f", r.wall_seconds) +
               "\r\n";
    return out;
}

namespace {

std::string xml_escape(const std::string &s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

const char *const kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948",
                                "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#1b9e77", "#7570b3"};

} // namespace

std::string summary_svg(const BenchReport &report) {
    std::vector<std::string> groups, names;
    std::map<std::pair<std::string, std::string>, double> value;
    for (const auto &r : report.summary) {
        if (std::find(groups.begin(), groups.end(), r.ablation) == groups.end()) groups.push_back(r.ablation);
        if (std::find(names.begin(), names.end(), r.scheduler) == names.end()) names.push_back(r.scheduler);
        value[{r.ablation, r.scheduler}] = r.mean_slowdown;
    }
    double vmax = 1.0;
    for (const auto &[k, v] : value) vmax = std::max(vmax, v);

    const double bar = 14.0, gap = 24.0, left = 60.0, top = 30.0, plot_h = 260.0;
    const double group_w = bar * static_cast<double>(names.size()) + gap;
    const double width = left + group_w * static_cast<double>(groups.size()) + 160.0;
    const double height = top + plot_h + 70.0;
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    o << "<text x=\"" << left << "\" y=\"18\" font-size=\"13\">Average slowdown</text>\n";
    o << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << width - 150 << "\" y2=\""
      << top + plot_h << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double v = vmax * k / 4.0, y = top + plot_h - plot_h * k / 4.0;
        o << "<text x=\"" << left - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << fmt("%.2f", v)
          << "</text>\n";
    }
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const double x0 = left + gap / 2 + group_w * static_cast<double>(g);
        for (std::size_t s = 0; s < names.size(); ++s) {
            const auto it = value.find({groups[g], names[s]});
            if (it == value.end()) continue;
            const double h = plot_h * it->second / vmax;
            o << "<rect x=\"" << x0 + bar * static_cast<double>(s) << "\" y=\"" << top + plot_h - h << "\" width=\""
              << bar - 2 << "\" height=\"" << h << "\" fill=\"" << kPalette[s % std::size(kPalette)] << "\"><title>"
              << xml_escape(names[s]) << ": " << fmt("%.4f", it->second) << "</title></rect>\n";
        }
        o << "<text x=\"" << x0 + (group_w - gap) / 2 << "\" y=\"" << top + plot_h + 16
          << "\" text-anchor=\"middle\">" << xml_escape(groups[g]) << "</text>\n";
    }
    for (std::size_t s = 0; s < names.size(); ++s) {
        const double y = top + 14.0 * static_cast<double>(s);
        o << "<rect x=\"" << width - 140 << "\" y=\"" << y << "\" width=\"10\" height=\"10\" fill=\""
          << kPalette[s % std::size(kPalette)] << "\"/><text x=\"" << width - 125 << "\" y=\"" << y + 9 << "\">"
          << xml_escape(names[s]) << "</text>\n";
    }
    o << "<metadata><![CDATA[\n" << summary_csv(report) << "]]></metadata>\n</svg>\n";
    return o.str();
}

} // namespace roars
