#pragma once

namespace skylink::constants {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double speed_of_light = 299792458.0;      // m/s
inline constexpr double earth_gm = 3.986004418e14;         // m^3/s^2
inline constexpr double earth_mu_km = 398600.4418;         // km^3/s^2
inline constexpr double earth_radius_km = 6371.0;
inline constexpr double earth_radius_m = 6.371e6;
inline constexpr double seconds_per_day = 86400.0;
inline constexpr double seconds_per_year = 365.25 * 86400.0;
inline constexpr double seconds_per_century = 100.0 * seconds_per_year;

inline constexpr double deg_to_rad = pi / 180.0;
inline constexpr double rad_to_deg = 180.0 / pi;

} // namespace skylink::constants
