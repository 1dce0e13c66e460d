#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "driftfit/series.hpp"
#include "driftfit/spectral.hpp"

namespace driftfit {

/// Parses an ISO-8601 UTC timestamp ("2013-05-01T06:00:00Z", optional
/// fractional seconds, optional +hh:mm offset, "T" or space separator,
/// or a bare date) into seconds since the Unix epoch. A plain number is
/// accepted as seconds already. Throws std::invalid_argument.
double parse_time(std::string_view text);

/// Seconds since the epoch -> "YYYY-MM-DDTHH:MM:SS[.ffffff]Z".
std::string format_time(double seconds);

/// A velocity file: time, u_cms, v_cms, lat, f0_rad_per_s.
struct VelocityRecord {
  ComplexSeries series;
  std::vector<double> lat;  // degrees, one per sample
};

VelocityRecord read_velocity_csv(const std::string& path);
VelocityRecord read_velocity_csv(std::istream& in);
void write_velocity_csv(std::ostream& out, const VelocityRecord& rec);

/// Header lines "# n=..." and "# dt=..." then freq_rad_per_s, freq_cpd, psd.
/// With `decibels`, psd is written as 10 log10(psd).
void write_periodogram_csv(std::ostream& out, const Periodogram& pg, bool decibels = false);

/// Angular frequency (rad/s) to cycles per day.
double rad_per_s_to_cpd(double omega);

/// Shortest round-trip decimal representation of a double.
std::string fmt_double(double v);

}  // namespace driftfit
