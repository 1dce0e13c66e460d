#include "driftfit/series_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "driftfit/ingest.hpp"

namespace driftfit {

ComplexSeries::ComplexSeries(std::vector<std::complex<double>> v, double dt_,
                             std::optional<double> t0_)
    : values(std::move(v)), dt(dt_), t0(t0_) {}

double ComplexSeries::time_at(std::size_t i) const {
  return t0.value_or(0.0) + static_cast<double>(i) * dt;
}

void ComplexSeries::validate() const {
  if (values.size() < 2) throw std::invalid_argument("series: length must be at least 2");
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("series: sampling interval must be positive");
  }
  for (const auto& v : values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw std::invalid_argument("series: missing or non-finite values (split gaps upstream)");
    }
  }
}

ComplexSeries ComplexSeries::slice(std::size_t start, std::size_t count) const {
  if (start + count > values.size()) throw std::out_of_range("series: slice out of range");
  ComplexSeries s;
  s.values.assign(values.begin() + static_cast<std::ptrdiff_t>(start),
                  values.begin() + static_cast<std::ptrdiff_t>(start + count));
  s.dt = dt;
  if (t0) s.t0 = time_at(start);
  return s;
}

namespace {

// Days since 1970-01-01 for a proleptic Gregorian date (H. Hinnant).
long days_from_civil(long y, unsigned m, unsigned d) {
  y -= m <= 2;
  const long era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long>(doe) - 719468;
}

void civil_from_days(long z, long& y, unsigned& m, unsigned& d) {
  z += 719468;
  const long era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<long>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y += m <= 2;
}

bool parse_uint(std::string_view s, std::size_t pos, std::size_t len, unsigned& out) {
  if (pos + len > s.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  const auto r = std::from_chars(s.data() + pos, s.data() + pos + len, out);
  return r.ec == std::errc{};
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
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

double parse_number(std::string_view s, const char* what) {
  s = trim(s);
  if (s == "nan" || s == "NaN" || s == "NAN") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
    throw std::invalid_argument(std::string("cannot parse ") + what + " '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

double parse_time(std::string_view text) {
  const std::string_view s = trim(text);
  const auto fail = [&]() -> double {
    throw std::invalid_argument("cannot parse time '" + std::string(s) + "'");
  };
  if (s.empty()) return fail();
  // Plain seconds.
  if (s.size() < 10 || s[4] != '-') {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size() || !std::isfinite(v)) return fail();
    return v;
  }
  unsigned y = 0, mo = 0, d = 0;
  if (!parse_uint(s, 0, 4, y) || s[4] != '-' || !parse_uint(s, 5, 2, mo) || s[7] != '-' ||
      !parse_uint(s, 8, 2, d)) {
    return fail();
  }
  if (mo < 1 || mo > 12 || d < 1 || d > 31) return fail();
  double secs = static_cast<double>(days_from_civil(y, mo, d)) * 86400.0;
  if (s.size() == 10) return secs;
  if (s[10] != 'T' && s[10] != ' ') return fail();
  unsigned hh = 0, mm = 0, ss = 0;
  if (!parse_uint(s, 11, 2, hh) || s.size() < 16 || s[13] != ':' || !parse_uint(s, 14, 2, mm)) {
    return fail();
  }
  std::size_t pos = 16;
  if (pos < s.size() && s[pos] == ':') {
    if (!parse_uint(s, 17, 2, ss)) return fail();
    pos = 19;
  }
  if (hh > 23 || mm > 59 || ss > 60) return fail();
  secs += hh * 3600.0 + mm * 60.0 + ss;
  if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
    std::size_t end = pos + 1;
    while (end < s.size() && s[end] >= '0' && s[end] <= '9') ++end;
    if (end == pos + 1) return fail();
    std::string frac = "0." + std::string(s.substr(pos + 1, end - pos - 1));
    secs += std::stod(frac);
    pos = end;
  }
  if (pos == s.size()) return secs;
  if (s[pos] == 'Z' && pos + 1 == s.size()) return secs;
  if ((s[pos] == '+' || s[pos] == '-') && s.size() >= pos + 6 && s[pos + 3] == ':') {
    unsigned oh = 0, om = 0;
    if (!parse_uint(s, pos + 1, 2, oh) || !parse_uint(s, pos + 4, 2, om)) return fail();
    const double off = oh * 3600.0 + om * 60.0;
    return s[pos] == '+' ? secs - off : secs + off;
  }
  return fail();
}

std::string format_time(double seconds) {
  const double whole = std::floor(seconds);
  double frac = seconds - whole;
  long total = static_cast<long>(whole);
  long days = total / 86400;
  long rem = total % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  long y = 0;
  unsigned m = 0, d = 0;
  civil_from_days(days, y, m, d);
  char buf[64];
  const int hh = static_cast<int>(rem / 3600);
  const int mi = static_cast<int>((rem % 3600) / 60);
  const int ss = static_cast<int>(rem % 60);
  int len = std::snprintf(buf, sizeof(buf), "%04ld-%02u-%02uT%02d:%02d:%02d", y, m, d, hh, mi, ss);
  std::string out(buf, static_cast<std::size_t>(len));
  if (frac > 5e-7) {
    len = std::snprintf(buf, sizeof(buf), "%.6f", frac);
    out += std::string(buf + 1, static_cast<std::size_t>(len - 1));
  }
  return out + "Z";
}

std::string fmt_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

double rad_per_s_to_cpd(double omega) { return omega * 86400.0 / (2.0 * std::numbers::pi); }

VelocityRecord read_velocity_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open velocity file '" + path + "'");
  return read_velocity_csv(in);
}

VelocityRecord read_velocity_csv(std::istream& in) {
  std::string line;
  std::vector<std::string_view> cols;
  std::string header;
  while (std::getline(in, line)) {
    if (trim(line).empty() || trim(line).front() == '#') continue;
    header = line;
    break;
  }
  if (header.empty()) throw std::invalid_argument("velocity file: missing header");
  cols = split_csv(header);
  const auto find = [&](std::string_view name) -> long {
    const auto it = std::find(cols.begin(), cols.end(), name);
    return it == cols.end() ? -1 : static_cast<long>(it - cols.begin());
  };
  const long it = find("time"), iu = find("u_cms"), iv = find("v_cms"), il = find("lat");
  if (it < 0 || iu < 0 || iv < 0 || il < 0) {
    throw std::invalid_argument("velocity file: header must contain time,u_cms,v_cms,lat");
  }
  const auto need = static_cast<std::size_t>(std::max({it, iu, iv, il}));

  std::vector<double> times;
  VelocityRecord rec;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty() || trim(line).front() == '#') continue;
    const auto f = split_csv(line);
    if (f.size() <= need) {
      throw std::invalid_argument("velocity file: line " + std::to_string(lineno) +
                                  ": too few columns");
    }
    try {
      times.push_back(parse_time(f[static_cast<std::size_t>(it)]));
      rec.series.values.emplace_back(parse_number(f[static_cast<std::size_t>(iu)], "u_cms"),
                                     parse_number(f[static_cast<std::size_t>(iv)], "v_cms"));
      rec.lat.push_back(parse_number(f[static_cast<std::size_t>(il)], "lat"));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("velocity file: line " + std::to_string(lineno) + ": " +
                                  e.what());
    }
  }
  if (times.size() < 2) throw std::invalid_argument("velocity file: need at least 2 samples");
  rec.series.dt = regular_interval(times);
  rec.series.t0 = times.front();
  return rec;
}

void write_velocity_csv(std::ostream& out, const VelocityRecord& rec) {
  out << "time,u_cms,v_cms,lat,f0_rad_per_s\n";
  const auto& s = rec.series;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double lat = i < rec.lat.size() ? rec.lat[i] : 0.0;
    out << format_time(s.time_at(i)) << ',' << fmt_double(s.values[i].real()) << ','
        << fmt_double(s.values[i].imag()) << ',' << fmt_double(lat) << ','
        << fmt_double(coriolis_frequency(lat)) << '\n';
  }
}

void write_periodogram_csv(std::ostream& out, const Periodogram& pg, bool decibels) {
  out << "# n=" << pg.n << "\n# dt=" << fmt_double(pg.dt) << "\n";
  out << "freq_rad_per_s,freq_cpd," << (decibels ? "psd_db" : "psd") << "\n";
  for (std::size_t i = 0; i < pg.size(); ++i) {
    const double v = decibels ? 10.0 * std::log10(pg.values[i]) : pg.values[i];
    out << fmt_double(pg.freqs[i]) << ',' << fmt_double(rad_per_s_to_cpd(pg.freqs[i])) << ','
        << fmt_double(v) << '\n';
  }
}

}  // namespace driftfit
