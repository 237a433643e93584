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

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "roars/ephemeris.hpp"

namespace roars {

inline constexpr int kScenarioVersion = 1;

struct Site {
    std::string name;
    ephemeris::GeoCoord coord;
    double equipment_priority = 0.5;

    bool operator==(const Site &) const = default;
};

inline bool operator==(const ephemeris::GeoCoord &a, const ephemeris::GeoCoord &b) {
    return a.lat_deg == b.lat_deg && a.lon_deg == b.lon_deg && a.altitude_m == b.altitude_m;
}
inline bool operator==(const ephemeris::SkyCoord &a, const ephemeris::SkyCoord &b) {
    return a.ra_deg == b.ra_deg && a.dec_deg == b.dec_deg;
}

/// Observation mode of a target: back-to-back exposures, or exposures
/// separated by a fixed gap.
struct ObservationMode {
    enum class Kind { ExposureCount, Cadence };
    Kind kind = Kind::ExposureCount;
    int gap_minutes = 0; // Cadence only

    static ObservationMode exposure_count() { return {Kind::ExposureCount, 0}; }
    static ObservationMode cadence(int gap) { return {Kind::Cadence, gap}; }
    bool operator==(const ObservationMode &) const = default;
};

struct Target {
    int id = 0;
    ephemeris::SkyCoord coord;
    std::vector<bool> filters_required;
    int start_time = 0; // grid step
    int fade_time = 0;  // grid step
    int exposure_minutes = 1;
    ObservationMode mode;
    int priority = 1;
    int arrival_step = 0;

    int duration() const { return fade_time - start_time; }
    int filter_count() const;
    bool operator==(const Target &) const = default;
};

/// One exposure of a target; the unit of scheduling.
struct ObservationTask {
    int id = 0;
    int target_id = 0;
    std::vector<bool> rho;
    int arrival = 0;  // required beginning step
    int exposure = 1; // steps
    int deadline = 0; // latest completion step
    int seq_index = 0;

    bool operator==(const ObservationTask &) const = default;
};

struct Scenario {
    ephemeris::TimeGrid grid;
    ephemeris::VisibilityConstraints constraints;
    std::vector<Site> sites;
    int num_filters = 3;
    std::vector<Target> targets;
    std::vector<ObservationTask> tasks;
    std::uint64_t rng_seed = 0;

    const Target &target_of(const ObservationTask &task) const;
    bool operator==(const Scenario &o) const;
};

struct IntRange {
    int lo = 0;
    int hi = 0;
};

struct GenConfig {
    enum class ArrivalMode { Steady, Dynamic };
    enum class ResourceMix { Uniform, NonUniform };

    ArrivalMode arrival_mode = ArrivalMode::Steady;
    double arrival_prob = 0.10;     // Steady
    double dynamic_max_prob = 0.30; // Dynamic: per-step prob ~ U[0, max]
    int arrival_steps = 240;        // targets arrive in [0, arrival_steps)

    double duration_long_fraction = 0.2;
    IntRange duration_long{120, 240};
    IntRange duration_short{60, 119};

    ResourceMix resource_mix = ResourceMix::NonUniform;
    std::vector<double> resource_probs{0.10, 0.20, 0.30}; // renormalized

    double exposure_long_fraction = 0.8;
    IntRange exposure_long{10, 20};
    IntRange exposure_short{1, 9};

    double cadence_fraction = 1.0; // fraction of targets in Cadence mode
    IntRange cadence_gap{10, 30};

    IntRange priority{1, 5};
    int num_fields = 100;
    double min_field_dec_deg = -30.0;

    int num_filters = 3;
    std::vector<Site> sites;             // empty: default site list
    int num_sites = 1;                   // first num_sites of the list
    bool randomize_equipment_priority = true;
    std::string epoch_utc = "2026-06-21T00:00:00Z";
    int step_minutes = 1;
    ephemeris::VisibilityConstraints constraints;

    /// Grid length: arrivals plus the longest possible monitoring duration.
    int horizon_steps() const;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

/// The built-in five-site array (Chile, Canary Islands, South Africa,
/// Western Australia, Western China).
std::vector<Site> default_sites();

/// Splits a target into its exposures per its observation mode.
std::vector<ObservationTask> target_to_tasks(const Target &target, int first_task_id = 0);

/// Deterministic in (config, seed).
Scenario generate_scenario(const GenConfig &config, std::uint64_t seed);

class ScenarioParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

std::string scenario_to_json(const Scenario &s);
Scenario scenario_from_json(const std::string &text);
void save_scenario(const Scenario &s, const std::string &path);
Scenario load_scenario(const std::string &path);

GenConfig gen_config_from_json(const std::string &text);
std::vector<Site> sites_from_json(const std::string &text);
std::string sites_to_json(const std::vector<Site> &sites);

} // namespace roars
