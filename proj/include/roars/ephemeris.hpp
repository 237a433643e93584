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

#include <optional>
#include <string>
#include <vector>

// Low-precision positional astronomy: sidereal time, horizon altitude,
// Kasten-Young airmass, a closed-form solar ephemeris and per-site
// visibility windows on a discrete time grid. All functions are pure.
namespace roars::ephemeris {

inline constexpr double kJ2000 = 2451545.0;

struct SkyCoord {
    double ra_deg = 0.0;  // [0, 360)
    double dec_deg = 0.0; // [-90, 90]

    /// Wraps ra into [0, 360) and clamps dec to [-90, 90].
    static SkyCoord make(double ra_deg, double dec_deg);
};

struct GeoCoord {
    double lat_deg = 0.0;
    double lon_deg = 0.0; // east-positive, (-180, 180]
    double altitude_m = 0.0;

    static GeoCoord make(double lat_deg, double lon_deg, double altitude_m = 0.0);
};

/// A UTC instant kept both as the ISO-8601 text it was parsed from and as a
/// Julian date.
struct UtcInstant {
    std::string iso;          // "YYYY-MM-DDTHH:MM:SSZ"
    double julian_date = kJ2000;

    /// Throws std::invalid_argument on malformed input.
    static UtcInstant parse(const std::string &iso);
};

struct TimeGrid {
    UtcInstant epoch = UtcInstant::parse("2026-06-21T00:00:00Z");
    int step_minutes = 1;
    int horizon_steps = 240;

    double julian_date(int step) const {
        return epoch.julian_date + static_cast<double>(step) * step_minutes / 1440.0;
    }
};

struct VisibilityConstraints {
    double min_altitude_deg = 5.0;     // airmass cutoff
    double max_airmass = 3.0;
    double max_sun_altitude_deg = -12.0; // nautical twilight
};

/// Half-open [start_step, end_step).
struct VisibilityWindow {
    int site_index = 0;
    int start_step = 0;
    int end_step = 0;
    double min_airmass_in_window = 1.0;
};

double wrap_degrees(double deg);

/// Greenwich mean sidereal time in degrees, [0, 360).
double gmst_deg(double julian_date);

double local_sidereal_time(double julian_date, const GeoCoord &site);
double local_sidereal_time(const TimeGrid &grid, int step_index, const GeoCoord &site);

/// Altitude above the geometric horizon, degrees. Hour angle = lst - ra.
double altitude(const SkyCoord &target, const GeoCoord &site, double lst_deg);

/// Kasten-Young relative airmass; nullopt when alt <= cutoff ("unobservable").
std::optional<double> airmass(double alt_deg, double cutoff_deg = 5.0);

/// Apparent solar RA/Dec from the mean-anomaly / ecliptic-longitude series.
SkyCoord sun_position(double julian_date);

double sun_altitude(double julian_date, const GeoCoord &site);
double sun_altitude(const TimeGrid &grid, int step_index, const GeoCoord &site);

/// The per-step predicate that visibility_windows flattens into windows:
/// airmass defined and <= max_airmass, and the sun at or below threshold.
bool visible_at(const SkyCoord &target, const GeoCoord &site, const TimeGrid &grid, int step,
                const VisibilityConstraints &constraints);

/// Maximal runs of visible steps over [0, horizon_steps), sorted by start.
std::vector<VisibilityWindow> visibility_windows(const SkyCoord &target, const GeoCoord &site,
                                                 int site_index, const TimeGrid &grid,
                                                 const VisibilityConstraints &constraints);

} // namespace roars::ephemeris
