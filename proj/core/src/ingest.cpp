#include "driftfit/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace driftfit {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_double(std::string_view s, const char* what) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw std::invalid_argument(std::string("bad ") + what + " '" + std::string(s) + "'");
  }
  return v;
}

// Shortest signed angular difference b - a in degrees, in (-180, 180].
double lon_diff(double a, double b) {
  double d = std::fmod(b - a, 360.0);
  if (d > 180.0) d -= 360.0;
  if (d <= -180.0) d += 360.0;
  return d;
}

struct Row {
  double t;
  double lat;
  double lon;
  std::size_t line;
};

}  // namespace

double sin_degrees(double degrees) {
  // Reduce to a quarter turn so that sin(30 deg) = 1/2 and quadrant
  // multiples come out exact, and the result is odd in its argument.
  double r = std::remainder(degrees, 360.0);
  const long q = std::lround(r / 90.0);
  r -= 90.0 * static_cast<double>(q);
  double s = 0.0, c = 0.0;
  if (r == 30.0 || r == -30.0) {
    s = r > 0.0 ? 0.5 : -0.5;
    c = std::sqrt(3.0) / 2.0;
  } else {
    s = std::sin(r * kDegToRad);
    c = std::cos(r * kDegToRad);
  }
  switch (((q % 4) + 4) % 4) {
    case 0: return s;
    case 1: return c;
    case 2: return -s;
    default: return -c;
  }
}

double coriolis_frequency(double lat_degrees) {
  if (!(std::abs(lat_degrees) <= 90.0)) {
    throw std::domain_error("coriolis_frequency: latitude must lie in [-90, 90]");
  }
  return -2.0 * kEarthRotation * sin_degrees(lat_degrees);
}

ParsedTrajectories parse_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trajectory file '" + path + "'");
  return parse_trajectory_csv(in);
}

ParsedTrajectories parse_trajectory_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string_view> head;
  std::string header;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    // Skip a UTF-8 byte order mark.
    if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    header = line;
    break;
  }
  head = split(header);
  const auto col = [&](std::string_view name) -> long {
    const auto it = std::find(head.begin(), head.end(), name);
    return it == head.end() ? -1 : static_cast<long>(it - head.begin());
  };
  const long cid = col("id"), ct = col("time"), clat = col("lat"), clon = col("lon");
  if (cid < 0 || ct < 0 || clat < 0 || clon < 0) {
    throw std::invalid_argument("trajectory csv: missing header 'id,time,lat,lon'");
  }
  const auto need = static_cast<std::size_t>(std::max({cid, ct, clat, clon}));

  ParsedTrajectories out;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<Row>> rows;
  std::size_t data_rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    ++data_rows;
    const auto f = split(line);
    try {
      if (f.size() <= need) throw std::invalid_argument("too few columns");
      const std::string id(f[static_cast<std::size_t>(cid)]);
      if (id.empty()) throw std::invalid_argument("empty id");
      const double t = parse_time(f[static_cast<std::size_t>(ct)]);
      const double lat = to_double(f[static_cast<std::size_t>(clat)], "lat");
      double lon = to_double(f[static_cast<std::size_t>(clon)], "lon");
      if (lat < -90.0 || lat > 90.0) {
        throw std::invalid_argument("latitude " + std::string(f[static_cast<std::size_t>(clat)]) +
                                    " outside [-90, 90]");
      }
      if (lon < -180.0 || lon > 360.0) {
        throw std::invalid_argument("longitude outside [-180, 360]");
      }
      if (lon >= 180.0) lon -= 360.0;
      auto [it, inserted] = index.emplace(id, rows.size());
      if (inserted) {
        rows.emplace_back();
        out.trajectories.push_back(Trajectory{id, {}, {}, {}});
      }
      rows[it->second].push_back(Row{t, lat, lon, lineno});
    } catch (const std::invalid_argument& e) {
      out.rejected.push_back(RowError{lineno, e.what()});
    }
  }

  for (std::size_t k = 0; k < rows.size(); ++k) {
    auto& r = rows[k];
    std::stable_sort(r.begin(), r.end(), [](const Row& a, const Row& b) { return a.t < b.t; });
    auto& tr = out.trajectories[k];
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i > 0 && r[i].t == r[i - 1].t) {
        out.rejected.push_back(RowError{r[i].line, "duplicate time for id " + tr.id});
        continue;
      }
      tr.times.push_back(r[i].t);
      tr.lat.push_back(r[i].lat);
      tr.lon.push_back(r[i].lon);
    }
  }
  std::sort(out.rejected.begin(), out.rejected.end(),
            [](const RowError& a, const RowError& b) { return a.line < b.line; });

  if (!out.rejected.empty() &&
      static_cast<double>(out.rejected.size()) > 0.01 * static_cast<double>(data_rows)) {
    std::ostringstream os;
    os << "trajectory csv: " << out.rejected.size() << " of " << data_rows
       << " rows rejected (limit 1%)";
    for (std::size_t i = 0; i < std::min<std::size_t>(out.rejected.size(), 10); ++i) {
      os << "; line " << out.rejected[i].line << ": " << out.rejected[i].message;
    }
    throw std::invalid_argument(os.str());
  }
  return out;
}

double regular_interval(const std::vector<double>& times, double tolerance) {
  if (times.size() < 2) throw std::invalid_argument("regular_interval: need at least two times");
  std::vector<double> diffs(times.size() - 1);
  for (std::size_t i = 1; i < times.size(); ++i) diffs[i - 1] = times[i] - times[i - 1];
  // Mode over millisecond-rounded gaps.
  std::map<long long, std::size_t> counts;
  for (double d : diffs) ++counts[std::llround(d * 1000.0)];
  const auto best = std::max_element(counts.begin(), counts.end(), [](const auto& a, const auto& b) {
    return a.second < b.second;
  });
  const double modal = static_cast<double>(best->first) / 1000.0;
  if (!(modal > 0.0)) throw std::invalid_argument("regular_interval: non-increasing times");
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    if (std::abs(diffs[i] - modal) > tolerance * modal) {
      throw std::invalid_argument("irregular sampling: gap of " + std::to_string(diffs[i]) +
                                  " s after sample " + std::to_string(i) + " (modal " +
                                  std::to_string(modal) + " s)");
    }
  }
  // Average over the record; exact for integer-second grids.
  return (times.back() - times.front()) / static_cast<double>(diffs.size());
}

std::vector<VelocityRecord> positions_to_velocities(const Trajectory& tr) {
  const std::size_t n = tr.times.size();
  if (tr.lat.size() != n || tr.lon.size() != n) {
    throw std::invalid_argument("trajectory: times/lat/lon lengths differ");
  }
  if (n < 2) throw std::invalid_argument("trajectory: need at least two fixes");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(tr.times[i]) || !std::isfinite(tr.lat[i]) || !std::isfinite(tr.lon[i])) {
      throw std::invalid_argument("trajectory: non-finite coordinates");
    }
    if (i > 0 && !(tr.times[i] > tr.times[i - 1])) {
      throw std::invalid_argument("trajectory: times must be strictly increasing");
    }
  }

  std::vector<double> diffs(n - 1);
  for (std::size_t i = 1; i < n; ++i) diffs[i - 1] = tr.times[i] - tr.times[i - 1];
  std::map<long long, std::size_t> counts;
  for (double d : diffs) ++counts[std::llround(d * 1000.0)];
  const double modal =
      static_cast<double>(std::max_element(counts.begin(), counts.end(), [](const auto& a,
                                                                           const auto& b) {
                            return a.second < b.second;
                          })->first) /
      1000.0;

  // Segment boundaries at irregular gaps.
  std::vector<std::pair<std::size_t, std::size_t>> segments;  // [begin, end)
  std::size_t begin = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(diffs[i] - modal) > 0.01 * modal) {
      segments.emplace_back(begin, i + 1);
      begin = i + 1;
    }
  }
  segments.emplace_back(begin, n);

  const auto velocity = [&](std::size_t a, std::size_t b) {
    const double dlat = (tr.lat[b] - tr.lat[a]) * kDegToRad;
    const double dlon = lon_diff(tr.lon[a], tr.lon[b]) * kDegToRad;
    const double mid = 0.5 * (tr.lat[a] + tr.lat[b]) * kDegToRad;
    const double dt = tr.times[b] - tr.times[a];
    const double u = kEarthRadiusCm * dlon * std::cos(mid) / dt;
    const double v = kEarthRadiusCm * dlat / dt;
    return std::complex<double>(u, v);
  };

  std::vector<VelocityRecord> out;
  for (const auto& [s, e] : segments) {
    const std::size_t len = e - s;
    if (len < 2) continue;
    VelocityRecord rec;
    rec.series.values.resize(len);
    rec.lat.assign(tr.lat.begin() + static_cast<std::ptrdiff_t>(s),
                   tr.lat.begin() + static_cast<std::ptrdiff_t>(e));
    for (std::size_t i = s; i < e; ++i) {
      const std::size_t a = i == s ? s : i - 1;
      const std::size_t b = i + 1 == e ? e - 1 : i + 1;
      rec.series.values[i - s] = velocity(a, b);
    }
    rec.series.t0 = tr.times[s];
    rec.series.dt = (tr.times[e - 1] - tr.times[s]) / static_cast<double>(len - 1);
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace driftfit
