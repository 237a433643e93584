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

#include "roars/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "roars/rng.hpp"

namespace roars {

using nlohmann::json;
namespace eph = ephemeris;

int Target::filter_count() const {
    return static_cast<int>(std::count(filters_required.begin(), filters_required.end(), true));
}

const Target &Scenario::target_of(const ObservationTask &task) const {
    return targets.at(static_cast<std::size_t>(task.target_id));
}

bool Scenario::operator==(const Scenario &o) const {
    return grid.epoch.iso == o.grid.epoch.iso && grid.step_minutes == o.grid.step_minutes &&
           grid.horizon_steps == o.grid.horizon_steps &&
           constraints.min_altitude_deg == o.constraints.min_altitude_deg &&
           constraints.max_airmass == o.constraints.max_airmass &&
           constraints.max_sun_altitude_deg == o.constraints.max_sun_altitude_deg && sites == o.sites &&
           num_filters == o.num_filters && targets == o.targets && tasks == o.tasks && rng_seed == o.rng_seed;
}

int GenConfig::horizon_steps() const { return arrival_steps + std::max(duration_long.hi, duration_short.hi); }

void GenConfig::validate() const {
    auto prob = [](double p, const char *name) {
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(name) + " must be in [0,1]");
    };
    auto range = [](IntRange r, int min_lo, const char *name) {
        if (r.lo < min_lo || r.hi < r.lo) throw std::invalid_argument(std::string(name) + " interval is inverted or out of range");
    };
    prob(arrival_prob, "arrival_prob");
    prob(dynamic_max_prob, "dynamic_max_prob");
    prob(duration_long_fraction, "duration_long_fraction");
    prob(exposure_long_fraction, "exposure_long_fraction");
    prob(cadence_fraction, "cadence_fraction");
    for (double p : resource_probs) prob(p, "resource_probs");
    range(duration_long, 1, "duration_long");
    range(duration_short, 1, "duration_short");
    range(exposure_long, 1, "exposure_long");
    range(exposure_short, 1, "exposure_short");
    range(cadence_gap, 0, "cadence_gap");
    range(priority, 1, "priority");
    if (arrival_steps < 1) throw std::invalid_argument("arrival_steps must be >= 1");
    if (num_filters < 1) throw std::invalid_argument("num_filters must be >= 1");
    if (num_fields < 1) throw std::invalid_argument("num_fields must be >= 1");
    if (step_minutes < 1) throw std::invalid_argument("step_minutes must be >= 1");
    if (resource_mix == ResourceMix::NonUniform &&
        (resource_probs.size() != static_cast<std::size_t>(num_filters) ||
         std::accumulate(resource_probs.begin(), resource_probs.end(), 0.0) <= 0.0))
        throw std::invalid_argument("resource_probs must have num_filters entries with positive sum");
    if (resource_mix == ResourceMix::Uniform && num_filters < 2)
        throw std::invalid_argument("uniform resource mix needs at least 2 filters");
    const auto n_sites = sites.empty() ? default_sites().size() : sites.size();
    if (num_sites < 1 || static_cast<std::size_t>(num_sites) > n_sites)
        throw std::invalid_argument("num_sites out of range");
}

std::vector<Site> default_sites() {
    return {
        {"Cerro Pachon", eph::GeoCoord::make(-30.2407, -70.7366, 2715.0), 0.5},
        {"Roque de los Muchachos", eph::GeoCoord::make(28.7606, -17.8816, 2396.0), 0.5},
        {"Sutherland", eph::GeoCoord::make(-32.3794, 20.8107, 1798.0), 0.5},
        {"Bickley", eph::GeoCoord::make(-32.0081, 116.1350, 384.0), 0.5},
        {"Lenghu", eph::GeoCoord::make(38.6068, 93.8961, 4200.0), 0.5},
    };
}

std::vector<ObservationTask> target_to_tasks(const Target &target, int first_task_id) {
    std::vector<ObservationTask> tasks;
    const int e = target.exposure_minutes;
    const int stride = target.mode.kind == ObservationMode::Kind::Cadence ? e + target.mode.gap_minutes : e;
    for (int m = 0;; ++m) {
        const int a = target.start_time + m * stride;
        if (a + e > target.fade_time) break;
        tasks.push_back(ObservationTask{first_task_id + m, target.id, target.filters_required, a, e,
                                        target.fade_time, m});
    }
    return tasks;
}

namespace {

int draw(Rng &rng, IntRange r) { return rng.uniform_int(r.lo, r.hi); }

std::vector<bool> draw_filters(Rng &rng, const GenConfig &c) {
    const int d = c.num_filters;
    std::vector<bool> f(static_cast<std::size_t>(d), false);
    int count = 0;
    if (c.resource_mix == GenConfig::ResourceMix::Uniform) {
        count = 2; // uniform over unordered pairs
    } else {
        count = static_cast<int>(rng.categorical(c.resource_probs)) + 1;
    }
    for (int idx : rng.sample_without_replacement(d, count)) f[static_cast<std::size_t>(idx)] = true;
    return f;
}

// A field is usable when some site sees it at some (coarsely sampled) step.
bool field_ever_visible(const eph::SkyCoord &field, const std::vector<Site> &sites, const eph::TimeGrid &grid,
                        const eph::VisibilityConstraints &vc) {
    constexpr int kStride = 5;
    for (const auto &site : sites)
        for (int t = 0; t < grid.horizon_steps; t += kStride)
            if (eph::visible_at(field, site.coord, grid, t, vc)) return true;
    return false;
}

} // namespace

Scenario generate_scenario(const GenConfig &config, std::uint64_t seed) {
    config.validate();
    Rng rng(seed);
    Scenario s;
    s.rng_seed = seed;
    s.num_filters = config.num_filters;
    s.constraints = config.constraints;
    s.grid.epoch = eph::UtcInstant::parse(config.epoch_utc);
    s.grid.step_minutes = config.step_minutes;
    s.grid.horizon_steps = config.horizon_steps();

    const auto all_sites = config.sites.empty() ? default_sites() : config.sites;
    s.sites.assign(all_sites.begin(), all_sites.begin() + config.num_sites);
    for (auto &site : s.sites)
        if (config.randomize_equipment_priority) site.equipment_priority = rng.uniform();

    // Sky fields: uniform on the sphere above min_field_dec_deg, rejecting
    // fields no site can ever observe within the grid.
    std::vector<eph::SkyCoord> fields;
    const double zmin = std::sin(config.min_field_dec_deg * 3.14159265358979323846 / 180.0);
    for (int attempts = 0; static_cast<int>(fields.size()) < config.num_fields; ++attempts) {
        const double ra = rng.uniform(0.0, 360.0);
        const double dec = std::asin(rng.uniform(zmin, 1.0)) * 180.0 / 3.14159265358979323846;
        const auto field = eph::SkyCoord::make(ra, dec);
        if (attempts > 200 * config.num_fields || field_ever_visible(field, s.sites, s.grid, s.constraints))
            fields.push_back(field);
    }

    // A transient is detected while observable, so targets take a field
    // visible from some site at their arrival step when one exists.
    std::vector<std::vector<int>> visible_fields(static_cast<std::size_t>(config.arrival_steps));
    for (int f = 0; f < config.num_fields; ++f)
        for (int t = 0; t < config.arrival_steps; ++t)
            for (const auto &site : s.sites)
                if (eph::visible_at(fields[static_cast<std::size_t>(f)], site.coord, s.grid, t, s.constraints)) {
                    visible_fields[static_cast<std::size_t>(t)].push_back(f);
                    break;
                }

    for (int t = 0; t < config.arrival_steps; ++t) {
        const double p = config.arrival_mode == GenConfig::ArrivalMode::Steady
                             ? config.arrival_prob
                             : rng.uniform(0.0, config.dynamic_max_prob);
        if (!rng.bernoulli(p)) continue;
        Target tg;
        tg.id = static_cast<int>(s.targets.size());
        const auto &pool = visible_fields[static_cast<std::size_t>(t)];
        const int f = pool.empty() ? rng.uniform_int(0, config.num_fields - 1)
                                   : pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(pool.size()) - 1))];
        tg.coord = fields[static_cast<std::size_t>(f)];
        tg.filters_required = draw_filters(rng, config);
        tg.arrival_step = t;
        tg.start_time = t;
        const bool long_duration = rng.bernoulli(config.duration_long_fraction);
        tg.fade_time = t + draw(rng, long_duration ? config.duration_long : config.duration_short);
        const bool long_exposure = rng.bernoulli(config.exposure_long_fraction);
        tg.exposure_minutes = draw(rng, long_exposure ? config.exposure_long : config.exposure_short);
        tg.mode = rng.bernoulli(config.cadence_fraction) ? ObservationMode::cadence(draw(rng, config.cadence_gap))
                                                         : ObservationMode::exposure_count();
        tg.priority = draw(rng, config.priority);
        auto tasks = target_to_tasks(tg, static_cast<int>(s.tasks.size()));
        s.tasks.insert(s.tasks.end(), tasks.begin(), tasks.end());
        s.targets.push_back(std::move(tg));
    }
    return s;
}

// ---------------------------------------------------------------- JSON

namespace {

json bools(const std::vector<bool> &v) {
    json a = json::array();
    for (bool b : v) a.push_back(b);
    return a;
}

json site_json(const Site &s) {
    return json{{"name", s.name},
                {"lat_deg", s.coord.lat_deg},
                {"lon_deg", s.coord.lon_deg},
                {"alt_m", s.coord.altitude_m},
                {"equipment_priority", s.equipment_priority}};
}

template <class T>
T field(const json &obj, const char *key, const std::string &where) {
    if (!obj.is_object() || !obj.contains(key))
        throw ScenarioParseError(where + ": missing field '" + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception &) {
        throw ScenarioParseError(where + ": field '" + key + "' has the wrong type");
    }
}

Site parse_site(const json &j, const std::string &where) {
    const double lat = field<double>(j, "lat_deg", where);
    const double lon = field<double>(j, "lon_deg", where);
    if (lat < -90.0 || lat > 90.0) throw ScenarioParseError(where + ": lat out of range");
    if (lon <= -180.0 || lon > 180.0) throw ScenarioParseError(where + ": lon out of range");
    Site s;
    s.name = field<std::string>(j, "name", where);
    s.coord = eph::GeoCoord{lat, lon, j.value("alt_m", 0.0)};
    s.equipment_priority = j.value("equipment_priority", 0.5);
    return s;
}

ObservationMode parse_mode(const json &j, const std::string &where) {
    const auto kind = field<std::string>(j, "kind", where + ".mode");
    if (kind == "exposure_count") return ObservationMode::exposure_count();
    if (kind == "cadence") {
        const int gap = field<int>(j, "gap_minutes", where + ".mode");
        if (gap < 0) throw ScenarioParseError(where + ".mode: gap_minutes out of range");
        return ObservationMode::cadence(gap);
    }
    throw ScenarioParseError(where + ".mode: unknown kind '" + kind + "'");
}

IntRange parse_range(const json &j, const char *key, IntRange fallback) {
    if (!j.contains(key)) return fallback;
    const auto &a = j.at(key);
    if (!a.is_array() || a.size() != 2) throw std::invalid_argument(std::string(key) + " must be [lo, hi]");
    return IntRange{a[0].get<int>(), a[1].get<int>()};
}

} // namespace

std::string scenario_to_json(const Scenario &s) {
    json j;
    j["version"] = kScenarioVersion;
    j["grid"] = {{"epoch_utc", s.grid.epoch.iso},
                 {"step_minutes", s.grid.step_minutes},
                 {"horizon_steps", s.grid.horizon_steps}};
    j["constraints"] = {{"min_altitude_deg", s.constraints.min_altitude_deg},
                        {"max_airmass", s.constraints.max_airmass},
                        {"max_sun_altitude_deg", s.constraints.max_sun_altitude_deg}};
    j["sites"] = json::array();
    for (const auto &site : s.sites) j["sites"].push_back(site_json(site));
    j["num_filters"] = s.num_filters;
    j["targets"] = json::array();
    for (const auto &t : s.targets) {
        json mode = t.mode.kind == ObservationMode::Kind::Cadence
                        ? json{{"kind", "cadence"}, {"gap_minutes", t.mode.gap_minutes}}
                        : json{{"kind", "exposure_count"}};
        j["targets"].push_back(json{{"id", t.id},
                                    {"coord", {{"ra", t.coord.ra_deg}, {"dec", t.coord.dec_deg}}},
                                    {"filters_required", bools(t.filters_required)},
                                    {"start_time", t.start_time},
                                    {"fade_time", t.fade_time},
                                    {"exposure_minutes", t.exposure_minutes},
                                    {"mode", mode},
                                    {"priority", t.priority},
                                    {"arrival_step", t.arrival_step}});
    }
    j["tasks"] = json::array();
    for (const auto &k : s.tasks)
        j["tasks"].push_back(json{{"id", k.id},
                                  {"target_id", k.target_id},
                                  {"rho", bools(k.rho)},
                                  {"arrival", k.arrival},
                                  {"exposure", k.exposure},
                                  {"deadline", k.deadline},
                                  {"seq_index", k.seq_index}});
    j["seed"] = s.rng_seed;
    return j.dump(1) + "\n";
}

Scenario scenario_from_json(const std::string &text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ScenarioParseError(std::string("scenario: malformed JSON: ") + e.what());
    }
    const int version = field<int>(j, "version", "scenario");
    if (version != kScenarioVersion)
        throw ScenarioParseError("scenario: version mismatch (file " + std::to_string(version) + ", expected " +
                                 std::to_string(kScenarioVersion) + ")");
    Scenario s;
    const auto &g = j.contains("grid") ? j["grid"] : throw ScenarioParseError("scenario: missing field 'grid'");
    try {
        s.grid.epoch = eph::UtcInstant::parse(field<std::string>(g, "epoch_utc", "grid"));
    } catch (const std::invalid_argument &e) {
        throw ScenarioParseError(std::string("grid.epoch_utc: ") + e.what());
    }
    s.grid.step_minutes = field<int>(g, "step_minutes", "grid");
    s.grid.horizon_steps = field<int>(g, "horizon_steps", "grid");
    if (s.grid.step_minutes < 1) throw ScenarioParseError("grid: step_minutes out of range");
    if (s.grid.horizon_steps < 1) throw ScenarioParseError("grid: horizon_steps out of range");
    if (j.contains("constraints")) {
        const auto &c = j["constraints"];
        s.constraints.min_altitude_deg = c.value("min_altitude_deg", s.constraints.min_altitude_deg);
        s.constraints.max_airmass = c.value("max_airmass", s.constraints.max_airmass);
        s.constraints.max_sun_altitude_deg = c.value("max_sun_altitude_deg", s.constraints.max_sun_altitude_deg);
    }
    const auto sites = field<json>(j, "sites", "scenario");
    for (std::size_t i = 0; i < sites.size(); ++i) s.sites.push_back(parse_site(sites[i], "sites[" + std::to_string(i) + "]"));
    s.num_filters = field<int>(j, "num_filters", "scenario");
    if (s.num_filters < 1) throw ScenarioParseError("scenario: num_filters out of range");
    const auto d = static_cast<std::size_t>(s.num_filters);

    const auto targets = field<json>(j, "targets", "scenario");
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const std::string where = "targets[" + std::to_string(i) + "]";
        const auto &tj = targets[i];
        Target t;
        t.id = field<int>(tj, "id", where);
        const auto coord = field<json>(tj, "coord", where);
        const double ra = field<double>(coord, "ra", where + ".coord");
        const double dec = field<double>(coord, "dec", where + ".coord");
        if (dec < -90.0 || dec > 90.0) throw ScenarioParseError(where + ": dec out of range");
        if (ra < 0.0 || ra >= 360.0) throw ScenarioParseError(where + ": ra out of range");
        t.coord = eph::SkyCoord{ra, dec};
        t.filters_required = field<std::vector<bool>>(tj, "filters_required", where);
        t.start_time = field<int>(tj, "start_time", where);
        t.fade_time = field<int>(tj, "fade_time", where);
        t.exposure_minutes = field<int>(tj, "exposure_minutes", where);
        t.mode = parse_mode(field<json>(tj, "mode", where), where);
        t.priority = field<int>(tj, "priority", where);
        t.arrival_step = field<int>(tj, "arrival_step", where);
        if (t.id != static_cast<int>(i)) throw ScenarioParseError(where + ": id must equal its index");
        if (t.filters_required.size() != d) throw ScenarioParseError(where + ": filters_required length != num_filters");
        if (t.filter_count() < 1) throw ScenarioParseError(where + ": filters_required has no filter");
        if (t.start_time >= t.fade_time) throw ScenarioParseError(where + ": start_time must precede fade_time");
        if (t.exposure_minutes < 1) throw ScenarioParseError(where + ": exposure_minutes out of range");
        if (t.arrival_step > t.start_time) throw ScenarioParseError(where + ": arrival_step after start_time");
        if (t.priority < 1) throw ScenarioParseError(where + ": priority out of range");
        s.targets.push_back(std::move(t));
    }
    const auto tasks = field<json>(j, "tasks", "scenario");
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const std::string where = "tasks[" + std::to_string(i) + "]";
        const auto &kj = tasks[i];
        ObservationTask k;
        k.id = field<int>(kj, "id", where);
        k.target_id = field<int>(kj, "target_id", where);
        k.rho = field<std::vector<bool>>(kj, "rho", where);
        k.arrival = field<int>(kj, "arrival", where);
        k.exposure = field<int>(kj, "exposure", where);
        k.deadline = field<int>(kj, "deadline", where);
        k.seq_index = field<int>(kj, "seq_index", where);
        if (k.id != static_cast<int>(i)) throw ScenarioParseError(where + ": id must equal its index");
        if (k.target_id < 0 || static_cast<std::size_t>(k.target_id) >= s.targets.size())
            throw ScenarioParseError(where + ": target_id references no target");
        if (k.rho != s.targets[static_cast<std::size_t>(k.target_id)].filters_required)
            throw ScenarioParseError(where + ": rho differs from the target's filters_required");
        if (k.exposure < 1) throw ScenarioParseError(where + ": exposure out of range");
        if (k.arrival + k.exposure > k.deadline) throw ScenarioParseError(where + ": arrival + exposure exceeds deadline");
        if (k.deadline > s.grid.horizon_steps) throw ScenarioParseError(where + ": deadline beyond the grid horizon");
        s.tasks.push_back(std::move(k));
    }
    s.rng_seed = field<std::uint64_t>(j, "seed", "scenario");
    return s;
}

void save_scenario(const Scenario &s, const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << scenario_to_json(s);
    if (!out) throw std::runtime_error("write failed: " + path);
}

Scenario load_scenario(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return scenario_from_json(ss.str());
}

std::vector<Site> sites_from_json(const std::string &text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ScenarioParseError(std::string("sites: malformed JSON: ") + e.what());
    }
    if (!j.is_array()) throw ScenarioParseError("sites: expected a JSON array");
    std::vector<Site> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_site(j[i], "sites[" + std::to_string(i) + "]"));
    return out;
}

std::string sites_to_json(const std::vector<Site> &sites) {
    json j = json::array();
    for (const auto &s : sites) j.push_back(site_json(s));
    return j.dump(2) + "\n";
}

GenConfig gen_config_from_json(const std::string &text) {
    const json j = json::parse(text);
    GenConfig c;
    if (j.contains("arrival_mode")) {
        const auto m = j["arrival_mode"].get<std::string>();
        if (m == "steady") c.arrival_mode = GenConfig::ArrivalMode::Steady;
        else if (m == "dynamic") c.arrival_mode = GenConfig::ArrivalMode::Dynamic;
        else throw std::invalid_argument("arrival_mode must be 'steady' or 'dynamic'");
    }
    c.arrival_prob = j.value("arrival_prob", c.arrival_prob);
    c.dynamic_max_prob = j.value("dynamic_max_prob", c.dynamic_max_prob);
    c.arrival_steps = j.value("arrival_steps", c.arrival_steps);
    c.duration_long_fraction = j.value("duration_long_fraction", c.duration_long_fraction);
    c.duration_long = parse_range(j, "duration_long", c.duration_long);
    c.duration_short = parse_range(j, "duration_short", c.duration_short);
    if (j.contains("resource_mix")) {
        const auto m = j["resource_mix"].get<std::string>();
        if (m == "uniform") c.resource_mix = GenConfig::ResourceMix::Uniform;
        else if (m == "non_uniform") c.resource_mix = GenConfig::ResourceMix::NonUniform;
        else throw std::invalid_argument("resource_mix must be 'uniform' or 'non_uniform'");
    }
    if (j.contains("resource_probs")) c.resource_probs = j["resource_probs"].get<std::vector<double>>();
    c.exposure_long_fraction = j.value("exposure_long_fraction", c.exposure_long_fraction);
    c.exposure_long = parse_range(j, "exposure_long", c.exposure_long);
    c.exposure_short = parse_range(j, "exposure_short", c.exposure_short);
    c.cadence_fraction = j.value("cadence_fraction", c.cadence_fraction);
    c.cadence_gap = parse_range(j, "cadence_gap", c.cadence_gap);
    c.priority = parse_range(j, "priority", c.priority);
    c.num_fields = j.value("num_fields", c.num_fields);
    c.min_field_dec_deg = j.value("min_field_dec_deg", c.min_field_dec_deg);
    c.num_filters = j.value("num_filters", c.num_filters);
    if (j.contains("sites")) c.sites = sites_from_json(j["sites"].dump());
    c.num_sites = j.value("num_sites", c.num_sites);
    c.randomize_equipment_priority = j.value("randomize_equipment_priority", c.randomize_equipment_priority);
    c.epoch_utc = j.value("epoch_utc", c.epoch_utc);
    c.step_minutes = j.value("step_minutes", c.step_minutes);
    if (j.contains("constraints")) {
        const auto &v = j["constraints"];
        c.constraints.min_altitude_deg = v.value("min_altitude_deg", c.constraints.min_altitude_deg);
        c.constraints.max_airmass = v.value("max_airmass", c.constraints.max_airmass);
        c.constraints.max_sun_altitude_deg = v.value("max_sun_altitude_deg", c.constraints.max_sun_altitude_deg);
    }
    c.validate();
    return c;
}

} // namespace roars
