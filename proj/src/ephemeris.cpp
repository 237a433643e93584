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

#include "roars/ephemeris.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace roars::ephemeris {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDeg = kPi / 180.0;

// Days since 1970-01-01 for a proleptic Gregorian date (H. Hinnant).
long days_from_civil(long y, unsigned m, unsigned d) {
    y -= m <= 2;
    const long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long>(doe) - 719468;
}

} // namespace

SkyCoord SkyCoord::make(double ra_deg, double dec_deg) {
    return SkyCoord{wrap_degrees(ra_deg), std::clamp(dec_deg, -90.0, 90.0)};
}

GeoCoord GeoCoord::make(double lat_deg, double lon_deg, double altitude_m) {
    if (lat_deg < -90.0 || lat_deg > 90.0) throw std::invalid_argument("lat out of range");
    double lon = std::fmod(lon_deg, 360.0);
    if (lon <= -180.0) lon += 360.0;
    if (lon > 180.0) lon -= 360.0;
    return GeoCoord{lat_deg, lon, altitude_m};
}

UtcInstant UtcInstant::parse(const std::string &iso) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0;
    double s = 0.0;
    char tail = 0;
    const int n = std::sscanf(iso.c_str(), "%d-%d-%dT%d:%d:%lf%c", &y, &mo, &d, &h, &mi, &s, &tail);
    if (n != 7 || tail != 'Z' || mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 ||
        mi > 59 || s < 0.0 || s >= 61.0)
        throw std::invalid_argument("malformed UTC timestamp '" + iso + "'");
    const long days = days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d));
    const double jd = 2440587.5 + static_cast<double>(days) + (h * 3600.0 + mi * 60.0 + s) / 86400.0;
    return UtcInstant{iso, jd};
}

double wrap_degrees(double deg) {
    double w = std::fmod(deg, 360.0);
    if (w < 0.0) w += 360.0;
    if (w >= 360.0) w -= 360.0;
    return w;
}

double gmst_deg(double julian_date) {
    const double d = julian_date - kJ2000;
    const double t = d / 36525.0;
    return wrap_degrees(280.46061837 + 360.98564736629 * d + 0.000387933 * t * t - t * t * t / 38710000.0);
}

double local_sidereal_time(double julian_date, const GeoCoord &site) {
    return wrap_degrees(gmst_deg(julian_date) + site.lon_deg);
}

double local_sidereal_time(const TimeGrid &grid, int step_index, const GeoCoord &site) {
    return local_sidereal_time(grid.julian_date(step_index), site);
}

double altitude(const SkyCoord &target, const GeoCoord &site, double lst_deg) {
    const double ha = (lst_deg - target.ra_deg) * kDeg;
    const double lat = site.lat_deg * kDeg;
    const double dec = target.dec_deg * kDeg;
    const double s = std::sin(lat) * std::sin(dec) + std::cos(lat) * std::cos(dec) * std::cos(ha);
    return std::asin(std::clamp(s, -1.0, 1.0)) / kDeg;
}

std::optional<double> airmass(double alt_deg, double cutoff_deg) {
    if (alt_deg <= cutoff_deg) return std::nullopt;
    return 1.0 / (std::sin(alt_deg * kDeg) + 0.50572 * std::pow(alt_deg + 6.07995, -1.6364));
}

SkyCoord sun_position(double julian_date) {
    const double n = julian_date - kJ2000;
    const double mean_lon = wrap_degrees(280.460 + 0.9856474 * n);
    const double g = wrap_degrees(357.528 + 0.9856003 * n) * kDeg;
    const double lambda = (mean_lon + 1.915 * std::sin(g) + 0.020 * std::sin(2.0 * g)) * kDeg;
    const double eps = (23.439 - 0.0000004 * n) * kDeg;
    const double ra = std::atan2(std::cos(eps) * std::sin(lambda), std::cos(lambda));
    const double dec = std::asin(std::sin(eps) * std::sin(lambda));
    return SkyCoord::make(ra / kDeg, dec / kDeg);
}

double sun_altitude(double julian_date, const GeoCoord &site) {
    return altitude(sun_position(julian_date), site, local_sidereal_time(julian_date, site));
}

double sun_altitude(const TimeGrid &grid, int step_index, const GeoCoord &site) {
    return sun_altitude(grid.julian_date(step_index), site);
}

bool visible_at(const SkyCoord &target, const GeoCoord &site, const TimeGrid &grid, int step,
                const VisibilityConstraints &constraints) {
    const double jd = grid.julian_date(step);
    const auto x = airmass(altitude(target, site, local_sidereal_time(jd, site)), constraints.min_altitude_deg);
    if (!x || *x > constraints.max_airmass) return false;
    return sun_altitude(jd, site) <= constraints.max_sun_altitude_deg;
}

std::vector<VisibilityWindow> visibility_windows(const SkyCoord &target, const GeoCoord &site,
                                                 int site_index, const TimeGrid &grid,
                                                 const VisibilityConstraints &constraints) {
    std::vector<VisibilityWindow> out;
    bool open = false;
    for (int step = 0; step < grid.horizon_steps; ++step) {
        const double jd = grid.julian_date(step);
        const auto x = airmass(altitude(target, site, local_sidereal_time(jd, site)), constraints.min_altitude_deg);
        const bool ok = x && *x <= constraints.max_airmass &&
                        sun_altitude(jd, site) <= constraints.max_sun_altitude_deg;
        if (ok && !open) {
            out.push_back(VisibilityWindow{site_index, step, step + 1, *x});
            open = true;
        } else if (ok) {
            out.back().end_step = step + 1;
            out.back().min_airmass_in_window = std::min(out.back().min_airmass_in_window, *x);
        } else {
            open = false;
        }
    }
    return out;
}

} // namespace roars::ephemeris
