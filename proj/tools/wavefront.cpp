// Command-line front end: speed intervals, c_star curves, wave profiles,
// PDE runs and hypothesis checks.

#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wavefront/birthfn.hpp"
#include "wavefront/charroots.hpp"
#include "wavefront/error.hpp"
#include "wavefront/pdesim.hpp"
#include "wavefront/profile.hpp"
#include "wavefront/serialize.hpp"
#include "wavefront/speeds.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wavefront;

namespace {

constexpr const char* kVersion = "0.1.0";

enum Exit : int { kOk = 0, kError = 1, kNegative = 2, kNotConverged = 3, kUsage = 64 };

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// `start:stop:step`, inclusive of stop within 1e-12, or a single number.
std::vector<double> parse_range(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw Error(ErrorKind::ParseError, "bad range '" + text + "'");
    }
  };
  if (parts.size() == 1) return {number(parts[0])};
  if (parts.size() != 3) throw Error(ErrorKind::ParseError, "range must be start:stop:step, got '" + text + "'");
  const double start = number(parts[0]), stop = number(parts[1]), step = number(parts[2]);
  if (!(step > 0.0) || stop < start) throw Error(ErrorKind::ParseError, "range needs step > 0 and stop >= start");
  const double span = (stop - start) / step;
  const auto count = static_cast<long>(std::floor(span + 1e-12 * std::max(1.0, span))) + 1;
  std::vector<double> out;
  for (long k = 0; k < count; ++k) out.push_back(start + step * static_cast<double>(k));
  if (std::abs(out.back() - stop) <= 1e-12 * std::max(1.0, std::abs(stop))) out.back() = stop;
  return out;
}

/// Collects outputs; with --out DIR also writes the manifest and files.
class Output {
 public:
  Output(std::string subcommand, bool as_json, std::string dir)
      : subcommand_(std::move(subcommand)), as_json_(as_json), dir_(std::move(dir)),
        start_(std::chrono::steady_clock::now()) {}

  void param(const std::string& key, json value) { params_[key] = std::move(value); }
  void hash_input(std::string_view data) { extra_input_ += data; }
  bool json_mode() const { return as_json_; }
  bool has_dir() const { return !dir_.empty(); }

  void write_file(const std::string& name, const std::string& content) {
    if (dir_.empty()) return;
    fs::create_directories(dir_);
    std::ofstream f(fs::path(dir_) / name, std::ios::binary);
    if (!f) throw Error(ErrorKind::DomainError, "cannot write " + (fs::path(dir_) / name).string());
    f << content;
    files_.push_back(name);
  }

  void write_json(const std::string& name, json j) {
    j["manifest"] = "manifest.json";
    write_file(name, j.dump(2) + "\n");
  }

  std::string path(const std::string& name) const { return (fs::path(dir_) / name).string(); }
  void note_file(const std::string& name) { files_.push_back(name); }

  void finish() {
    if (dir_.empty()) return;
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json m{{"subcommand", subcommand_},
           {"params", params_},
           {"version", kVersion},
           {"wall_time_s", wall},
           {"input_hash", hex(fnv1a(subcommand_ + params_.dump() + extra_input_))},
           {"files", files_}};
    fs::create_directories(dir_);
    std::ofstream(fs::path(dir_) / "manifest.json") << m.dump(2) << "\n";
  }

 private:
  std::string subcommand_;
  bool as_json_;
  std::string dir_;
  std::chrono::steady_clock::time_point start_;
  json params_ = json::object();
  std::string extra_input_;
  std::vector<std::string> files_;
};

void print_fields(const json& j, const std::string& prefix = "") {
  for (const auto& [key, value] : j.items()) {
    if (value.is_object()) {
      print_fields(value, prefix + key + ".");
    } else if (value.is_number_float()) {
      std::cout << prefix << key << ": " << fmt(value.get<double>()) << "\n";
    } else {
      std::cout << prefix << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << "\n";
    }
  }
}

void emit(const Output& out, const json& j) {
  if (out.json_mode()) {
    std::cout << j.dump() << "\n";
  } else {
    print_fields(j);
  }
}

double epsilon_from(std::optional<double> c, std::optional<double> eps) {
  if (c && eps) throw Error(ErrorKind::ParseError, "give either --c or --epsilon, not both");
  if (c) {
    if (!(*c > 0.0)) throw Error(ErrorKind::DomainError, "speed must be positive");
    return 1.0 / (*c * *c);
  }
  if (eps) return *eps;
  throw Error(ErrorKind::ParseError, "one of --c or --epsilon is required");
}

std::string csv_rows(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::string s;
  for (std::size_t k = 0; k < header.size(); ++k) s += (k ? "," : "") + header[k];
  s += "\r\n";
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < r.size(); ++k) s += (k ? "," : "") + fmt(r[k]);
    s += "\r\n";
  }
  return s;
}

int run_speed_interval(Output& out, const std::string& gspec, double h) {
  const BirthFunction g = BirthFunction::parse(gspec);
  out.param("g", g.spec());
  out.param("h", h);
  const StructureReport report = analyze_structure(g);
  const SpeedInterval iv = speed_interval(report, h);
  const json j = to_json(iv);
  out.write_json("speed_interval.json", j);
  emit(out, j);
  return iv.upper == UpperKind::Empty ? kNegative : kOk;
}

int run_cstar_curve(Output& out, std::optional<double> a, const std::string& gspec, const std::string& hrange) {
  if (a && !gspec.empty()) throw Error(ErrorKind::ParseError, "give either --a or --g, not both");
  double slope;
  if (a) {
    slope = *a;
  } else if (!gspec.empty()) {
    const BirthFunction g = BirthFunction::parse(gspec);
    out.param("g", g.spec());
    slope = g.slope_at_zero();
  } else {
    throw Error(ErrorKind::ParseError, "one of --a or --g is required");
  }
  out.param("a", slope);
  out.param("h", hrange);
  const std::vector<double> hs = parse_range(hrange);
  const auto curve = epsilon0_curve(slope, hs);
  for (std::size_t i = 1; i < curve.size(); ++i)
    if (!(curve[i].c_star < curve[i - 1].c_star))
      throw Error(ErrorKind::InconsistentResult, "c_star not decreasing at h = " + fmt(curve[i].h));

  std::vector<std::vector<double>> rows;
  json arr = json::array();
  for (const auto& p : curve) {
    rows.push_back({p.h, p.epsilon0, p.c_star});
    arr.push_back({{"h", p.h}, {"epsilon0", p.epsilon0}, {"c_star", p.c_star}});
  }
  const std::string csv = csv_rows({"h", "epsilon0", "c_star"}, rows);
  out.write_file("cstar_curve.csv", csv);
  out.write_json("cstar_curve.json", {{"a", slope}, {"rows", curve.size()}, {"csv", "cstar_curve.csv"}});
  if (out.json_mode()) {
    std::cout << json{{"a", slope}, {"curve", arr}}.dump() << "\n";
  } else {
    std::cout << csv;
  }
  return kOk;
}

int run_profile(Output& out, const std::string& gspec, double h, double epsilon, const SolverConfig& cfg) {
  const BirthFunction g = BirthFunction::parse(gspec);
  const double c = 1.0 / std::sqrt(epsilon);
  out.param("g", g.spec());
  out.param("h", h);
  out.param("c", c);
  out.param("tol", cfg.tol);
  out.param("max_iters", cfg.max_iters);
  out.param("dt", cfg.dt);
  const WaveProfile w = solve_profile(g, h, c, cfg);

  json j = profile_summary(w);
  j["g"] = g.spec();
  j["classification"] = nullptr;
  j["fitted_rate"] = nullptr;
  if (w.converged) {
    const TailReport tail = classify_tail(w, g, h);
    j["classification"] = to_json(tail);
    try {
      const AsymptoticsReport asym = check_asymptotics(w);
      j["fitted_rate"] = asym.fitted_rate;
      j["asymptotics"] = to_json(asym);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InsufficientTail) throw;
      j["asymptotics"] = {{"error", e.what()}};
    }
  }
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < w.x.size(); ++i) rows.push_back({w.x.t(i), w.x.values[i]});
  out.write_file("profile.csv", csv_rows({"t", "x"}, rows));
  j["csv"] = "profile.csv";
  out.write_json("profile.json", j);
  emit(out, j);
  return w.converged ? kOk : kNotConverged;
}

int run_simulate(Output& out, const std::string& config_path, const std::string& frames_name, bool parallel) {
  std::ifstream f(config_path);
  if (!f) throw Error(ErrorKind::ParseError, "cannot read config " + config_path);
  std::stringstream buf;
  buf << f.rdbuf();
  json cfg_json;
  try {
    cfg_json = json::parse(buf.str());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("config is not JSON: ") + e.what());
  }
  out.hash_input(buf.str());
  out.param("config", cfg_json);
  SimConfig cfg = sim_config_from_json(cfg_json);
  cfg.exec = parallel ? Exec::Parallel : Exec::Serial;

  std::ofstream frames;
  if (!frames_name.empty()) {
    if (!out.has_dir()) throw Error(ErrorKind::ParseError, "--frames needs --out");
    if (!(cfg.frame_interval > 0.0)) cfg.frame_interval = 1.0;
    fs::create_directories(out.path(""));
    frames.open(out.path(frames_name), std::ios::binary);
    const json header{{"nx", cfg.nx},
                      {"dx", cfg.length / (cfg.nx - 1)},
                      {"dtype", "f64-le"},
                      {"row", "t followed by nx values"},
                      {"frame_interval", cfg.frame_interval},
                      {"manifest", "manifest.json"}};
    frames << header.dump() << "\n";
    cfg.on_frame = [&](double t, std::span<const double> u) {
      frames.write(reinterpret_cast<const char*>(&t), sizeof t);
      frames.write(reinterpret_cast<const char*>(u.data()), static_cast<std::streamsize>(u.size_bytes()));
    };
    out.note_file(frames_name);
  }

  const SimResult r = simulate(cfg);
  const double a0 = cfg.g.slope_at_zero();
  json j = sim_summary(r);
  j["g"] = cfg.g.spec();
  j["h"] = cfg.h;
  j["history"] = "constant initial data on [-h, 0]";
  if (a0 > 1.0) {
    const double c_star = minimal_speed(a0, cfg.h).c_star;
    j["c_star"] = c_star;
    j["relative_gap"] = r.speed_estimate ? json(std::abs(*r.speed_estimate - c_star) / c_star) : json(nullptr);
  }
  std::vector<std::vector<double>> rows;
  for (const auto& [t, x] : r.front_positions) rows.push_back({t, x});
  out.write_file("front.csv", csv_rows({"t", "x_front"}, rows));
  j["csv"] = "front.csv";
  out.write_json("simulate.json", j);
  emit(out, j);
  return kOk;
}

int run_check_hypotheses(Output& out, const std::string& gspec) {
  const BirthFunction g = BirthFunction::parse(gspec);
  out.param("g", g.spec());
  const StructureReport report = analyze_structure(g);
  json j = to_json(report);
  out.write_json("hypotheses.json", j);
  emit(out, j);
  return report.hypotheses.H ? kOk : kNegative;
}

int run_roots(Output& out, double a, double h, double epsilon) {
  out.param("a", a);
  out.param("h", h);
  out.param("epsilon", epsilon);
  const CharParams p{a, h, epsilon};
  const RootCount rc = count_right_halfplane_robust(p, true);
  json j = to_json(rc);
  json neg = json::array();
  for (double z : negative_real_roots(p)) neg.push_back(z);
  j["negative_real_roots"] = neg;
  if (a > 1.0) {
    const MinimalSpeed m = minimal_speed(a, h);
    j["fold"] = to_json(m);
  }
  out.write_json("roots.json", j);
  emit(out, j);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Traveling wavefronts of u_t = u_xx - u + g(u(t - h, x))"};
  app.set_version_flag("--version", kVersion);
  // "--h" is the delay, so help is long-form only.
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  bool as_json = false;
  std::string out_dir;
  auto common = [&](CLI::App* sub) {
    sub->add_flag("--json", as_json, "Print a single JSON object");
    sub->add_option("--out", out_dir, "Directory for result files and manifest.json");
  };

  std::string gspec;
  double h = 0.0;
  std::optional<double> c, eps, a;
  std::string hrange;

  auto* si = app.add_subcommand("speed-interval", "Admissible speed interval [c_star, upper]");
  si->add_option("--g", gspec, "Birth function, e.g. nicholson:p=7.389056")->required();
  si->add_option("--h", h, "Delay")->required()->check(CLI::NonNegativeNumber);
  common(si);

  auto* cc = app.add_subcommand("cstar-curve", "Minimal speed against the delay");
  cc->add_option("--a", a, "Slope g'(0+)");
  cc->add_option("--g", gspec, "Birth function (slope taken at 0)");
  cc->add_option("--h", hrange, "Delay range start:stop:step")->required();
  common(cc);

  SolverConfig solver;
  bool parallel = false;
  int threads = 0;
  auto* pr = app.add_subcommand("profile", "Wave profile by fixed-point iteration");
  pr->add_option("--g", gspec, "Birth function")->required();
  pr->add_option("--h", h, "Delay")->required()->check(CLI::NonNegativeNumber);
  pr->add_option("--c", c, "Wave speed");
  pr->add_option("--epsilon", eps, "1/c^2");
  pr->add_option("--tol", solver.tol, "Residual tolerance")->capture_default_str();
  pr->add_option("--max-iters", solver.max_iters, "Iteration cap")->capture_default_str();
  pr->add_option("--dt", solver.dt, "Mesh step (0 = automatic)");
  pr->add_flag("--parallel", parallel, "Use the OpenMP kernels");
  pr->add_option("--threads", threads, "OpenMP thread count");
  common(pr);

  std::string config_path, frames_name;
  auto* sim = app.add_subcommand("simulate", "Direct PDE simulation and front speed");
  sim->add_option("config", config_path, "JSON simulation config")->required()->check(CLI::ExistingFile);
  sim->add_option("--frames", frames_name, "Snapshot file name inside --out");
  sim->add_flag("--parallel", parallel, "Use the OpenMP kernels");
  sim->add_option("--threads", threads, "OpenMP thread count");
  common(sim);

  auto* ch = app.add_subcommand("check-hypotheses", "Structure of g and hypotheses H, L, B");
  ch->add_option("--g", gspec, "Birth function")->required();
  common(ch);

  double ra = 0.0;
  auto* ro = app.add_subcommand("roots", "Right-half-plane roots of the characteristic function");
  ro->add_option("--a", ra, "Slope a")->required();
  ro->add_option("--h", h, "Delay")->required()->check(CLI::NonNegativeNumber);
  ro->add_option("--c", c, "Wave speed");
  ro->add_option("--epsilon", eps, "1/c^2");
  common(ro);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (threads > 0) omp_set_num_threads(threads);
  solver.exec = parallel ? Exec::Parallel : Exec::Serial;
  const std::string name = app.get_subcommands().front()->get_name();
  Output out(name, as_json, out_dir);
  try {
    int code = kOk;
    if (si->parsed()) code = run_speed_interval(out, gspec, h);
    if (cc->parsed()) code = run_cstar_curve(out, a, gspec, hrange);
    if (pr->parsed()) code = run_profile(out, gspec, h, epsilon_from(c, eps), solver);
    if (sim->parsed()) code = run_simulate(out, config_path, frames_name, parallel);
    if (ch->parsed()) code = run_check_hypotheses(out, gspec);
    if (ro->parsed()) code = run_roots(out, ra, h, epsilon_from(c, eps));
    out.finish();
    return code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::ParseError ? kUsage : kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
}
