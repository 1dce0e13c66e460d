#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "driftfit/series.hpp"
#include "driftfit/series_io.hpp"

namespace driftfit {

/// Earth's rotation rate used for the Coriolis frequency, rad/s.
inline constexpr double kEarthRotation = 7.29e-5;
/// Spherical Earth radius, cm.
inline constexpr double kEarthRadiusCm = 6371.0e5;

/// sin of an angle in degrees; exact at multiples of 30 and 90 degrees.
double sin_degrees(double degrees);

/// f0 = -2 Omega sin(lat); negative in the northern hemisphere so that
/// the sign gives the rotation sense of inertial oscillations. rad/s.
double coriolis_frequency(double lat_degrees);

/// A drifter's position fixes.
struct Trajectory {
  std::string id;
  std::vector<double> times;  // seconds since the epoch, strictly increasing
  std::vector<double> lat;    // degrees [-90, 90]
  std::vector<double> lon;    // degrees [-180, 180)
};

struct RowError {
  std::size_t line = 0;
  std::string message;
};

struct ParsedTrajectories {
  std::vector<Trajectory> trajectories;  // one per id, in order of first appearance
  std::vector<RowError> rejected;        // malformed rows, line-numbered
};

/// Reads "id,time,lat,lon" CSV (ISO-8601 times). Rows that fail to parse or
/// break coordinate ranges are collected in `rejected`; if more than 1% of
/// data rows are rejected, or the header is missing, std::invalid_argument
/// is thrown with the diagnostics.
ParsedTrajectories parse_trajectory_csv(std::istream& in);
ParsedTrajectories parse_trajectory_csv(const std::string& path);

/// Modal sampling interval of `times`, throwing std::invalid_argument when
/// any gap deviates from it by more than 1%.
double regular_interval(const std::vector<double>& times, double tolerance = 0.01);

/// Splits a trajectory wherever consecutive fixes are not within 1% of the
/// modal interval, then converts each piece (at least two fixes) to u + i v
/// in cm/s by central differences on a spherical Earth; piece endpoints use
/// one-sided differences.
std::vector<VelocityRecord> positions_to_velocities(const Trajectory& tr);

}  // namespace driftfit
