#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"

#include "driftfit/fit_json.hpp"
#include "driftfit/inference.hpp"
#include "driftfit/ingest.hpp"
#include "driftfit/parallel.hpp"
#include "driftfit/rolling.hpp"
#include "driftfit/series_io.hpp"
#include "driftfit/simulate.hpp"
#include "driftfit/spectral.hpp"

namespace driftfit::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Thrown for conflicting or invalid flag values found after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::uint64_t seed = 1;
  unsigned jobs = 0;
  std::string out = "-";
  std::optional<double> dt;
  std::string side = "auto";
  std::string cutoff = "1.75";
  std::string variant = "full6";
  std::string config;
  bool strict = false;
};

struct Options {
  Common common;
  // ingest / spectrum / fit / roll / lrt
  std::string input;
  // simulate
  std::size_t n = 1200;
  double A = 1.0, B = 10.0, c = 0.1, h = 0.1, alpha = 0.9;
  std::optional<double> omega0;
  double lat = 30.0;
  bool physical = false;
  std::string start = "2000-01-01T00:00:00Z";
  std::size_t ensemble = 0;
  // spectrum / fit
  bool db = false;
  std::string curve;
  std::string likelihood = "blurred";
  std::optional<double> f0;
  // roll / lrt
  std::optional<std::size_t> window;
  std::size_t stride = 25;
  bool warm_start = false;
  std::string spectrogram;
  std::string data_spectrogram;
  std::string null_variant = "fixedfreq5";
  std::string alt_variant = "full6";
};

void add_common(CLI::App* sub, Common& c, bool with_mask, bool with_variant) {
  sub->add_option("--seed", c.seed, "Random seed");
  sub->add_option("--jobs", c.jobs, "Worker threads (0 = all cores)");
  sub->add_option("--out", c.out, "Output path ('-' = stdout)");
  sub->add_option("--dt", c.dt, "Sampling interval in seconds (overrides the file)");
  sub->add_option("--config", c.config, "key=value file; flags given on the command line win");
  sub->add_flag("--strict", c.strict, "Exit with status 3 when a fit does not converge");
  if (with_mask) {
    sub->add_option("--side", c.side, "Frequencies to fit: neg, pos, both or auto (by hemisphere)")
        ->check(CLI::IsMember({"neg", "pos", "both", "auto", "negative", "positive"}));
    sub->add_option("--cutoff", c.cutoff,
                    "Upper |frequency|: multiple of |f0| (1.75), absolute (2e-4rad/s) or none");
  }
  if (with_variant) {
    sub->add_option("--variant", c.variant, "full6, fixedfreq5, fbm5, matern3 or ou3");
  }
}

std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  std::size_t lineno = 0;
  const auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    kv.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return kv;
}

std::optional<std::string> find_config_arg(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

// Output stream on a path, or the caller's stream for "-".
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      os_ = &fallback;
      return;
    }
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw std::runtime_error("cannot write '" + path + "'");
    os_ = file_.get();
  }
  std::ostream& operator*() { return *os_; }
  void close() {
    if (file_) {
      file_->close();
      if (!*file_) throw std::runtime_error("write failed");
    }
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_ = nullptr;
};

// <stem>_<tag><ext> next to `path`.
std::string tagged_path(const std::string& path, const std::string& tag) {
  const fs::path p(path);
  const std::string ext = p.has_extension() ? p.extension().string() : ".csv";
  return (p.parent_path() / (p.stem().string() + "_" + tag + ext)).string();
}

MaskRule mask_rule(const Common& c) {
  MaskRule r;
  r.side = MaskRule::parse_side(c.side);
  const auto [kind, value] = MaskRule::parse_cutoff(c.cutoff);
  r.cutoff_kind = kind;
  r.cutoff_value = value;
  return r;
}

VelocityRecord load(const Options& o) {
  VelocityRecord rec = read_velocity_csv(o.input);
  if (o.common.dt) {
    if (!(*o.common.dt > 0.0)) throw UsageError("--dt must be positive");
    rec.series.dt = *o.common.dt;
  }
  return rec;
}

double mean_latitude(const std::vector<double>& lat) {
  double s = 0.0;
  std::size_t k = 0;
  for (const double v : lat) {
    if (std::isfinite(v)) {
      s += v;
      ++k;
    }
  }
  if (k == 0) throw std::runtime_error("no finite latitude in input");
  return s / static_cast<double>(k);
}

double to_db(double v, bool db) { return db ? 10.0 * std::log10(v) : v; }

void warn(std::ostream& err, const std::string& command, const std::string& message) {
  json j;
  j["warning"] = message;
  j["command"] = command;
  err << j.dump() << '\n';
}

int cmd_ingest(const Options& o, std::ostream& out, std::ostream& err) {
  const ParsedTrajectories parsed = parse_trajectory_csv(o.input);
  for (const auto& r : parsed.rejected) {
    warn(err, "ingest", "line " + std::to_string(r.line) + ": " + r.message);
  }
  std::vector<std::pair<std::string, VelocityRecord>> records;
  for (const auto& tr : parsed.trajectories) {
    if (tr.times.size() < 2) {
      warn(err, "ingest", "trajectory " + tr.id + " has fewer than two fixes; skipped");
      continue;
    }
    auto pieces = positions_to_velocities(tr);
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      const std::string tag = pieces.size() == 1 ? tr.id : tr.id + "_" + std::to_string(k);
      records.emplace_back(tag, std::move(pieces[k]));
    }
  }
  if (records.empty()) throw std::runtime_error("no trajectory with at least two fixes");
  if (records.size() == 1) {
    Sink sink(o.common.out, out);
    write_velocity_csv(*sink, records.front().second);
    sink.close();
    return kOk;
  }
  if (o.common.out == "-") {
    throw UsageError("input splits into " + std::to_string(records.size()) +
                     " records; give --out so one file per record can be written");
  }
  for (const auto& [tag, rec] : records) {
    const std::string path = tagged_path(o.common.out, tag);
    Sink sink(path, out);
    write_velocity_csv(*sink, rec);
    sink.close();
    out << path << '\n';
  }
  return kOk;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream&) {
  const double dt = o.common.dt.value_or(3600.0);
  if (!(dt > 0.0)) throw UsageError("--dt must be positive");
  if (o.n < 2) throw UsageError("--n must be at least 2");
  const double f0 = coriolis_frequency(o.lat);
  ModelParams p;
  p.variant = parse_variant(o.common.variant);
  p.A = o.A;
  p.B = o.B;
  p.c = o.c;
  p.h = p.variant == Variant::kFbmBackground5 ? 0.0 : o.h;
  p.alpha = o.alpha;
  if (o.physical) {
    p.omega0 = o.omega0.value_or(f0);
  } else {
    p.omega0 = o.omega0.value_or(f0 * dt);
    p = p.from_sample_units(dt);
  }
  if (p.variant == Variant::kFixedFreq5 && o.omega0) {
    throw UsageError("--omega0 conflicts with the fixedfreq5 variant (pinned to f0)");
  }
  if (p.variant == Variant::kFixedFreq5) p.omega0 = f0;
  p.validate(dt);
  const double t0 = parse_time(o.start);

  const auto member = [&](std::uint64_t seed) {
    VelocityRecord rec;
    rec.series = simulate(p, o.n, dt, seed);
    rec.series.t0 = t0;
    rec.lat.assign(o.n, o.lat);
    return rec;
  };
  if (o.ensemble == 0) {
    Sink sink(o.common.out, out);
    write_velocity_csv(*sink, member(o.common.seed));
    sink.close();
    return kOk;
  }
  if (o.common.out == "-") throw UsageError("--ensemble needs --out for the member files");
  const int width = static_cast<int>(std::to_string(o.ensemble - 1).size());
  std::vector<std::string> paths(o.ensemble);
  parallel_for(o.ensemble, o.common.jobs, [&](std::size_t k) {
    std::string tag = std::to_string(k);
    tag.insert(0, static_cast<std::size_t>(std::max(0, width - static_cast<int>(tag.size()))), '0');
    paths[k] = tagged_path(o.common.out, tag);
    std::ofstream f(paths[k]);
    if (!f) throw std::runtime_error("cannot write '" + paths[k] + "'");
    write_velocity_csv(f, member(derive_seed(o.common.seed, k)));
  });
  for (const auto& path : paths) out << path << '\n';
  return kOk;
}

int cmd_spectrum(const Options& o, std::ostream& out, std::ostream&) {
  const VelocityRecord rec = load(o);
  rec.series.validate();
  Sink sink(o.common.out, out);
  write_periodogram_csv(*sink, periodogram(rec.series), o.db);
  sink.close();
  return kOk;
}

int cmd_fit(const Options& o, std::ostream& out, std::ostream& err) {
  const VelocityRecord rec = load(o);
  rec.series.validate();
  const double f0 = o.f0.value_or(coriolis_frequency(mean_latitude(rec.lat)));
  const FrequencyMask mask = mask_rule(o.common).resolve(f0);
  FitOptions fo;
  if (o.likelihood == "whittle") {
    fo.kind = LikelihoodKind::kWhittle;
  } else if (o.likelihood != "blurred") {
    throw UsageError("--likelihood must be blurred or whittle");
  }
  const Variant variant = parse_variant(o.common.variant);
  const Periodogram pg = periodogram(rec.series);
  FitResult r = fit(pg, variant, mask, f0, std::nullopt, fo);
  r.data_digest = data_digest(rec.series);

  Sink sink(o.common.out, out);
  *sink << fit_to_json(r) << '\n';
  sink.close();

  if (!o.curve.empty()) {
    Sink cs(o.curve, out);
    const auto expected = expected_periodogram(r.params, pg.n, pg.dt);
    *cs << "freq_rad_per_s,freq_cpd," << (o.db ? "periodogram_db" : "periodogram")
        << ",in_mask," << (o.db ? "expected_periodogram_db" : "expected_periodogram") << ','
        << (o.db ? "model_spectrum_db" : "model_spectrum") << '\n';
    for (std::size_t i = 0; i < pg.size(); ++i) {
      const double w = pg.freqs[i];
      *cs << fmt_double(w) << ',' << fmt_double(rad_per_s_to_cpd(w)) << ','
          << fmt_double(to_db(pg.values[i], o.db)) << ',' << (mask.contains(w) ? 1 : 0) << ','
          << fmt_double(to_db(expected.values[i], o.db)) << ','
          << fmt_double(to_db(model_spectrum(r.params, w), o.db)) << '\n';
    }
    cs.close();
  }
  for (const auto& w : r.warnings) warn(err, "fit", w);
  if (!r.converged && o.common.strict) return kNotConverged;
  return kOk;
}

RollingOptions rolling_options(const Options& o, std::size_t n) {
  RollingOptions ro;
  std::size_t w = o.window.value_or(std::min<std::size_t>(1000, n));
  if (!o.window && w % 2 == 1) --w;
  ro.window = w;
  ro.stride = o.stride;
  ro.mask_rule = mask_rule(o.common);
  ro.warm_start = o.warm_start;
  ro.jobs = o.common.jobs;
  if (o.warm_start && o.common.jobs > 1) {
    throw UsageError("--warm-start runs windows sequentially; it conflicts with --jobs > 1");
  }
  return ro;
}

int cmd_roll(const Options& o, std::ostream& out, std::ostream& err) {
  const VelocityRecord rec = load(o);
  RollingOptions ro = rolling_options(o, rec.series.size());
  ro.variant = parse_variant(o.common.variant);
  const RollingFit rf = rolling_fit(rec.series, rec.lat, ro);
  Sink sink(o.common.out, out);
  write_rolling_csv(*sink, rf);
  sink.close();
  if (!o.spectrogram.empty()) {
    Sink s(o.spectrogram, out);
    write_spectrogram_csv(*s, tv_spectrogram(rf));
    s.close();
  }
  if (!o.data_spectrogram.empty()) {
    Sink s(o.data_spectrogram, out);
    write_spectrogram_csv(*s, windowed_periodogram(rec.series, ro.window, ro.stride));
    s.close();
  }
  bool all_converged = true;
  for (const auto& w : rf.windows) {
    if (!w.fit) {
      warn(err, "roll", "window centred at " + std::to_string(w.center) + " skipped: " + w.skipped);
    } else if (!w.fit->converged) {
      all_converged = false;
      warn(err, "roll", "window centred at " + std::to_string(w.center) + " did not converge");
    }
  }
  return !all_converged && o.common.strict ? kNotConverged : kOk;
}

int cmd_lrt(const Options& o, std::ostream& out, std::ostream& err) {
  const VelocityRecord rec = load(o);
  const RollingOptions ro = rolling_options(o, rec.series.size());
  const Variant nv = parse_variant(o.null_variant);
  const Variant av = parse_variant(o.alt_variant);
  if (!is_nested(nv, av)) {
    throw UsageError("--null " + o.null_variant + " is not nested in --alt " + o.alt_variant);
  }
  const LrtTrace tr = lrt_trace(rec.series, rec.lat, nv, av, ro);
  Sink sink(o.common.out, out);
  write_lrt_csv(*sink, tr);
  sink.close();
  bool all_converged = true;
  for (const auto& w : tr.windows) {
    if (!w.fits) {
      warn(err, "lrt", "window centred at " + std::to_string(w.center) + " skipped: " + w.skipped);
      continue;
    }
    if (!w.fits->null_fit.converged || !w.fits->alt_fit.converged) all_converged = false;
    for (const auto& msg : w.fits->lrt.warnings) {
      warn(err, "lrt", "window centred at " + std::to_string(w.center) + ": " + msg);
    }
  }
  return !all_converged && o.common.strict ? kNotConverged : kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("driftfit");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Inertial-oscillation and turbulence fits to drifter velocity records", "driftfit"};
  app.require_subcommand(1);
  // -h is taken by the background damping option.
  app.set_help_flag("--help", "Print this help message and exit");
  std::map<std::string, CLI::App*> subs;

  auto* ingest = app.add_subcommand("ingest", "Drifter positions (id,time,lat,lon) to velocities");
  ingest->add_option("input", o.input, "Trajectory CSV")->required();
  add_common(ingest, o.common, false, false);
  subs["ingest"] = ingest;

  auto* sim = app.add_subcommand("simulate", "Draw a model velocity record");
  add_common(sim, o.common, false, true);
  sim->add_option("--n", o.n, "Number of samples");
  sim->add_option("--A", o.A, "Inertial amplitude");
  sim->add_option("--B", o.B, "Background amplitude");
  sim->add_option("--omega0", o.omega0, "Inertial frequency (default: f0 at --lat)");
  sim->add_option("--c", o.c, "Inertial damping");
  sim->add_option("--h", o.h, "Background damping");
  sim->add_option("--alpha", o.alpha, "Background slope parameter");
  sim->add_option("--lat", o.lat, "Latitude in degrees");
  sim->add_flag("--physical", o.physical,
                "Parameters are per second rather than per sampling interval");
  sim->add_option("--start", o.start, "Time of the first sample (ISO-8601)");
  sim->add_option("--ensemble", o.ensemble, "Write this many members with derived seeds");
  subs["simulate"] = sim;

  auto* spec = app.add_subcommand("spectrum", "Periodogram of a velocity record");
  spec->add_option("input", o.input, "Velocity CSV")->required();
  add_common(spec, o.common, false, false);
  spec->add_flag("--db", o.db, "Write power in decibels");
  subs["spectrum"] = spec;

  auto* fitc = app.add_subcommand("fit", "Fit a model to a velocity record");
  fitc->add_option("input", o.input, "Velocity CSV")->required();
  add_common(fitc, o.common, true, true);
  fitc->add_option("--curve", o.curve, "Also write periodogram and fitted curves to this CSV");
  fitc->add_flag("--db", o.db, "Curves in decibels");
  fitc->add_option("--likelihood", o.likelihood, "blurred (default) or whittle");
  fitc->add_option("--f0", o.f0, "Coriolis frequency in rad/s (default: from mean latitude)");
  subs["fit"] = fitc;

  auto* roll = app.add_subcommand("roll", "Sliding-window fits");
  roll->add_option("input", o.input, "Velocity CSV")->required();
  add_common(roll, o.common, true, true);
  roll->add_option("--window", o.window, "Window length in samples (even)");
  roll->add_option("--stride", o.stride, "Samples between window starts");
  roll->add_flag("--warm-start", o.warm_start, "Start each window from the previous estimate");
  roll->add_option("--spectrogram", o.spectrogram, "Fitted time-varying spectrum CSV (dB)");
  roll->add_option("--data-spectrogram", o.data_spectrogram, "Windowed periodogram CSV (dB)");
  subs["roll"] = roll;

  auto* lrt = app.add_subcommand("lrt", "Sliding-window likelihood-ratio test");
  lrt->add_option("input", o.input, "Velocity CSV")->required();
  add_common(lrt, o.common, true, false);
  lrt->add_option("--null", o.null_variant, "Null variant");
  lrt->add_option("--alt", o.alt_variant, "Alternative variant");
  lrt->add_option("--window", o.window, "Window length in samples (even)");
  lrt->add_option("--stride", o.stride, "Samples between window starts");
  subs["lrt"] = lrt;

  std::string command = "driftfit";
  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    for (const auto& a : args) {
      if (subs.count(a)) {
        command = a;
        break;
      }
    }
    if (const auto cfg = find_config_arg(args); cfg && subs.count(command)) {
      CLI::App* sub = subs[command];
      for (const auto& [key, value] : read_config(*cfg)) {
        if (key == "config") continue;
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt == nullptr) {
          bool known = false;
          for (const auto& [name, s] : subs) known = known || s->get_option_no_throw("--" + key);
          if (!known) throw UsageError("unknown config key '" + key + "'");
          continue;
        }
        opt->default_val(value);
      }
    }
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::Error& e) {
    json j;
    j["error"] = e.what();
    j["command"] = command;
    err << j.dump() << '\n';
    return kUsage;
  } catch (const UsageError& e) {
    json j;
    j["error"] = e.what();
    j["command"] = command;
    err << j.dump() << '\n';
    return kUsage;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(o, out, err);
    if (sim->parsed()) return cmd_simulate(o, out, err);
    if (spec->parsed()) return cmd_spectrum(o, out, err);
    if (fitc->parsed()) return cmd_fit(o, out, err);
    if (roll->parsed()) return cmd_roll(o, out, err);
    if (lrt->parsed()) return cmd_lrt(o, out, err);
  } catch (const UsageError& e) {
    json j;
    j["error"] = e.what();
    j["command"] = command;
    err << j.dump() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    json j;
    j["error"] = e.what();
    j["command"] = command;
    err << j.dump() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace driftfit::cli
