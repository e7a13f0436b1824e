// SPDX-License-Identifier: Apache-2.0
#include "app.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "cdde/compound.hpp"
#include "cdde/errors.hpp"
#include "cdde/floquet.hpp"
#include "cdde/parallel.hpp"
#include "cdde/tensor_spectra.hpp"
#include "cdde/u0pos.hpp"

namespace cdde::app {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void bad_field(const std::string& field, const std::string& msg) {
  fail(ErrorKind::InvalidArgument, "config field '" + field + "': " + msg);
}

const std::set<std::string> kCommands{"simulate", "spectrum", "positivity", "detcheck", "floquet", "u0check"};
const std::set<std::string> kFields{"command", "alpha",  "beta",    "gamma",  "n_sub",   "m",
                                    "k",       "k_max",  "eta",     "tau",    "horizon", "seed",
                                    "trials",  "homotopy_steps", "probe", "window", "matrix", "compound",
                                    "initial", "tolerance", "out", "threads"};

double get_double(const json& j, const std::string& f, double def) {
  if (!j.contains(f)) return def;
  if (!j[f].is_number()) bad_field(f, "expected a number");
  const double v = j[f].get<double>();
  if (!std::isfinite(v)) bad_field(f, "must be finite");
  return v;
}

long get_int(const json& j, const std::string& f, long def, long lo, long hi) {
  if (!j.contains(f)) return def;
  if (!j[f].is_number_integer()) bad_field(f, "expected an integer");
  const long v = j[f].get<long>();
  if (v < lo || v > hi) bad_field(f, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return v;
}

std::string get_string(const json& j, const std::string& f, const std::string& def) {
  if (!j.contains(f)) return def;
  if (!j[f].is_string()) bad_field(f, "expected a string");
  return j[f].get<std::string>();
}

void check_aligned(double t, int n, const std::string& f) {
  if (!is_aligned(t, n)) bad_field(f, "value " + std::to_string(t) + " is not a multiple of 1/n_sub");
}

CoefSpec parse_coef(const json& j, const std::string& f, double def) {
  CoefSpec c;
  if (j.is_null()) {
    c.value = def;
    return c;
  }
  if (j.is_number()) {
    c.value = j.get<double>();
    return c;
  }
  if (!j.is_object() || j.size() != 1) bad_field(f, "expected a number or one of {constant, sinusoid, samples}");
  if (j.contains("constant")) {
    if (!j["constant"].is_number()) bad_field(f + ".constant", "expected a number");
    c.value = j["constant"].get<double>();
  } else if (j.contains("sinusoid")) {
    const json& s = j["sinusoid"];
    if (!s.is_object()) bad_field(f + ".sinusoid", "expected an object");
    for (auto it = s.begin(); it != s.end(); ++it)
      if (it.key() != "mean" && it.key() != "amplitude" && it.key() != "frequency")
        bad_field(f + ".sinusoid." + it.key(), "unknown field");
    c.kind = CoefSpec::Kind::Sinusoid;
    c.mean = get_double(s, "mean", 0.0);
    c.amplitude = get_double(s, "amplitude", 0.0);
    c.frequency = get_double(s, "frequency", 1.0);
  } else if (j.contains("samples")) {
    if (!j["samples"].is_string()) bad_field(f + ".samples", "expected a file path");
    c.kind = CoefSpec::Kind::Samples;
    c.path = j["samples"].get<std::string>();
  } else {
    bad_field(f, "expected one of {constant, sinusoid, samples}");
  }
  if (!std::isfinite(c.value)) bad_field(f, "must be finite");
  return c;
}

json coef_json(const CoefSpec& c) {
  switch (c.kind) {
    case CoefSpec::Kind::Constant: return {{"constant", c.value}};
    case CoefSpec::Kind::Sinusoid:
      return {{"sinusoid", {{"mean", c.mean}, {"amplitude", c.amplitude}, {"frequency", c.frequency}}}};
    case CoefSpec::Kind::Samples: return {{"samples", c.path}};
  }
  return nullptr;
}

std::vector<double> read_numbers(const std::string& path, const std::string& field) {
  std::ifstream in(path);
  if (!in) bad_field(field, "cannot open '" + path + "'");
  std::vector<double> v;
  std::string tok;
  std::string line;
  while (std::getline(in, line)) {
    for (char& ch : line)
      if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
    std::istringstream ls(line);
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        bad_field(field, "'" + path + "' contains a non-numeric token '" + tok + "'");
      }
    }
  }
  return v;
}

std::string timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

json config_json(const ExperimentConfig& c) {
  json j = {{"command", c.command},
            {"alpha", coef_json(c.alpha)},
            {"beta", coef_json(c.beta)},
            {"gamma", c.gamma},
            {"n_sub", c.n_sub},
            {"m", c.m},
            {"k", c.k},
            {"k_max", c.k_max},
            {"eta", c.eta},
            {"tau", c.tau},
            {"horizon", c.horizon},
            {"trials", c.trials},
            {"homotopy_steps", c.homotopy_steps},
            {"probe", c.probe},
            {"window", {c.window_t0, c.window_t1}},
            {"compound", c.compound},
            {"initial", c.initial},
            {"tolerance", {{"det_rel", c.det_rel_tol}}}};
  if (c.seed_given) j["seed"] = c.seed;
  if (!c.matrix.empty()) j["matrix"] = c.matrix;
  return j;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) fail(ErrorKind::InvalidArgument, "config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!kFields.count(it.key())) bad_field(it.key(), "unknown field");
  ExperimentConfig c;
  if (!j.contains("command")) bad_field("command", "missing");
  c.command = get_string(j, "command", "");
  if (!kCommands.count(c.command)) bad_field("command", "unknown subcommand '" + c.command + "'");

  c.n_sub = static_cast<int>(get_int(j, "n_sub", c.n_sub, 2, 4096));
  c.gamma = get_double(j, "gamma", c.gamma);
  if (!(c.gamma > 0)) bad_field("gamma", "must be positive");
  check_aligned(c.gamma, c.n_sub, "gamma");
  c.alpha = parse_coef(j.contains("alpha") ? j["alpha"] : json(), "alpha", 0.0);
  c.beta = parse_coef(j.contains("beta") ? j["beta"] : json(), "beta", 1.0);
  for (const CoefSpec* s : {&c.alpha, &c.beta}) {
    const std::string f = s == &c.alpha ? "alpha" : "beta";
    if (s->kind == CoefSpec::Kind::Sinusoid) {
      const double cycles = s->frequency * c.gamma;
      if (std::fabs(cycles - std::round(cycles)) > 1e-9)
        bad_field(f + ".sinusoid.frequency", "frequency * gamma must be an integer for a gamma-periodic coefficient");
    }
  }
  c.m = static_cast<int>(get_int(j, "m", c.m, 1, kMaxOrder));
  c.k = static_cast<int>(get_int(j, "k", c.k, 1, 64));
  c.k_max = static_cast<int>(get_int(j, "k_max", c.k_max, 1, 63));
  c.eta = get_double(j, "eta", c.eta);
  if (!(c.eta > 0)) bad_field("eta", "must be positive");
  check_aligned(c.eta, c.n_sub, "eta");
  c.tau = get_double(j, "tau", c.tau);
  check_aligned(c.tau, c.n_sub, "tau");
  c.horizon = get_double(j, "horizon", c.horizon);
  if (c.horizon < 0) bad_field("horizon", "must be nonnegative");
  check_aligned(c.horizon, c.n_sub, "horizon");
  if (j.contains("seed")) {
    const json& sj = j["seed"];
    if (!sj.is_number_integer() || (!sj.is_number_unsigned() && sj.get<std::int64_t>() < 0))
      bad_field("seed", "expected a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
    c.seed_given = true;
  }
  c.trials = static_cast<int>(get_int(j, "trials", c.trials, 1, 1000000));
  c.homotopy_steps = static_cast<int>(get_int(j, "homotopy_steps", c.homotopy_steps, 0, 1000));
  c.probe = get_string(j, "probe", c.probe);
  if (j.contains("window")) {
    const json& w = j["window"];
    if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number())
      bad_field("window", "expected [t0, t1]");
    c.window_t0 = w[0].get<double>();
    c.window_t1 = w[1].get<double>();
  }
  if (c.window_t1 < c.window_t0) bad_field("window", "end precedes start");
  check_aligned(c.window_t0, c.n_sub, "window");
  check_aligned(c.window_t1, c.n_sub, "window");
  c.matrix = get_string(j, "matrix", "");
  c.compound = static_cast<int>(get_int(j, "compound", 0, 0, kMaxOrder));
  c.initial = get_string(j, "initial", c.initial);
  if (j.contains("tolerance")) {
    const json& t = j["tolerance"];
    if (!t.is_object()) bad_field("tolerance", "expected an object");
    for (auto it = t.begin(); it != t.end(); ++it)
      if (it.key() != "det_rel") bad_field("tolerance." + it.key(), "unknown tolerance");
    c.det_rel_tol = get_double(t, "det_rel", c.det_rel_tol);
    if (!(c.det_rel_tol >= 0)) bad_field("tolerance.det_rel", "must be nonnegative");
  }
  c.out = get_string(j, "out", c.out);
  c.threads = static_cast<unsigned>(get_int(j, "threads", 1, 0, 1024));

  // Command-specific ranges and randomness.
  if (c.command == "u0check") {
    if (c.m < 2 || c.m > 4) bad_field("m", "u0check supports m in {2, 3, 4}");
    if (c.probe != "const" && c.probe != "bump" && c.probe.rfind("random:", 0) != 0)
      bad_field("probe", "expected const, bump or random:<seed>");
    if (c.probe.rfind("random:", 0) == 0) {
      try {
        std::size_t used = 0;
        const std::string s = c.probe.substr(7);
        c.seed = std::stoull(s, &used);
        if (used != s.size() || s.empty()) throw std::invalid_argument(s);
        c.seed_given = true;
      } catch (const std::exception&) {
        bad_field("probe", "random probe needs an integer seed, e.g. random:7");
      }
    }
  }
  if (c.command == "positivity" && !c.seed_given) bad_field("seed", "required for randomized trials");
  if (c.command == "simulate" && c.initial == "random" && !c.seed_given)
    bad_field("seed", "required for a random initial segment");
  if (c.command == "spectrum" && c.matrix.empty()) bad_field("matrix", "required for spectrum");
  if (c.command == "floquet" && c.k_max >= c.n_sub + 1) bad_field("k_max", "must be at most n_sub");
  c.source = config_json(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidArgument, "cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    fail(ErrorKind::InvalidArgument, "config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

PeriodicCoefficient build_coefficient(const CoefSpec& c, const Grid& grid, double gamma) {
  switch (c.kind) {
    case CoefSpec::Kind::Constant: return constant_coefficient(grid, gamma, c.value);
    case CoefSpec::Kind::Sinusoid:
      return make_coefficient(grid, gamma, [c](double t) {
        return c.mean + c.amplitude * std::sin(2.0 * kPi * c.frequency * t);
      });
    case CoefSpec::Kind::Samples: {
      std::vector<double> v = read_numbers(c.path, "samples");
      const long P = to_ticks(gamma, grid.n_sub, "gamma");
      if (static_cast<long>(v.size()) == P + 1) v.pop_back();
      if (static_cast<long>(v.size()) != P)
        bad_field("samples", "'" + c.path + "' has " + std::to_string(v.size()) + " values; expected gamma*n_sub = " +
                                 std::to_string(P));
      PeriodicCoefficient pc = constant_coefficient(grid, gamma, 0.0);
      pc.samples = v;
      return pc;
    }
  }
  fail(ErrorKind::InvalidArgument, "unknown coefficient kind");
}

json RunRecord::to_json() const {
  return {{"config", config}, {"version", version}, {"started", started},
          {"finished", finished}, {"files", files}, {"passed", passed}};
}

namespace {

class Outputs {
 public:
  Outputs(const std::string& dir, RunRecord& rec) : dir_(dir), rec_(rec) { fs::create_directories(dir_); }

  std::ofstream open(const std::string& name) {
    std::ofstream os(dir_ / name);
    if (!os) fail(ErrorKind::InvalidArgument, "cannot write '" + (dir_ / name).string() + "'");
    os << std::setprecision(17);
    rec_.files.push_back((dir_ / name).string());
    return os;
  }

  void write_json(const std::string& name, const json& j) {
    auto os = open(name);
    os << j.dump(2) << '\n';
  }

 private:
  fs::path dir_;
  RunRecord& rec_;
};

DdeSystem build_system(const ExperimentConfig& cfg, const Grid& grid) {
  DdeSystem sys;
  sys.alpha = build_coefficient(cfg.alpha, grid, cfg.gamma);
  sys.beta = build_coefficient(cfg.beta, grid, cfg.gamma);
  sys.m = cfg.m;
  return sys;
}

Segment initial_segment(const ExperimentConfig& cfg, const Grid& grid) {
  const std::string& s = cfg.initial;
  if (s == "random") {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Segment seg{grid, std::vector<double>(static_cast<std::size_t>(grid.n_sub) + 1)};
    for (auto& v : seg.values) v = u(rng);
    return seg;
  }
  auto nums = [&](const std::string& body) {
    std::vector<double> v;
    std::istringstream is(body);
    std::string t;
    while (std::getline(is, t, ',')) {
      try {
        v.push_back(std::stod(t));
      } catch (const std::exception&) {
        bad_field("initial", "bad number '" + t + "'");
      }
    }
    return v;
  };
  if (s.rfind("const:", 0) == 0) {
    const auto v = nums(s.substr(6));
    if (v.size() != 1) bad_field("initial", "const takes one value");
    return make_segment(grid, [c = v[0]](double) { return c; });
  }
  if (s.rfind("linear:", 0) == 0) {
    const auto v = nums(s.substr(7));
    if (v.size() != 2) bad_field("initial", "linear takes a,b for a + b*theta");
    return make_segment(grid, [a = v[0], b = v[1]](double t) { return a + b * t; });
  }
  bad_field("initial", "expected const:<c>, linear:<a>,<b> or random");
}

void write_scatter(Outputs& out, const std::string& name, const std::vector<cplx>& z) {
  auto os = out.open(name);
  os << "re,im\n";
  for (const auto& v : z) os << v.real() << ',' << v.imag() << '\n';
}

DenseMatrix read_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad_field("matrix", "cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> r;
    std::istringstream ls(line);
    std::string t;
    while (std::getline(ls, t, ',')) {
      try {
        r.push_back(std::stod(t));
      } catch (const std::exception&) {
        bad_field("matrix", "non-numeric entry '" + t + "' in '" + path + "'");
      }
    }
    rows.push_back(std::move(r));
  }
  const int n = static_cast<int>(rows.size());
  if (n == 0) bad_field("matrix", "'" + path + "' is empty");
  if (n > kMaxDim) fail(ErrorKind::Capacity, "matrix dimension exceeds " + std::to_string(kMaxDim));
  DenseMatrix A(n, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != n) bad_field("matrix", "matrix must be square");
    for (int j = 0; j < n; ++j) A(i, j) = rows[i][j];
  }
  return A;
}

bool all_constant(const ExperimentConfig& c) {
  return c.alpha.kind == CoefSpec::Kind::Constant && c.beta.kind == CoefSpec::Kind::Constant;
}

}  // namespace

RunRecord run(const ExperimentConfig& cfg) {
  RunRecord rec;
  rec.config = cfg.source;
  rec.started = timestamp();
  set_threads(cfg.threads);
  Outputs out(cfg.out, rec);
  const Grid grid = make_grid(cfg.n_sub);
  auto stamp = [&](CertReport& r) {
    r.config_echo = cfg.source;
    r.seed = cfg.seed;
  };

  if (cfg.command == "simulate") {
    const DdeSystem sys = build_system(cfg, grid);
    const Segment phi = initial_segment(cfg, grid);
    const Trajectory tr = solve_untransformed(sys, cfg.tau, cfg.tau + cfg.horizon, phi);
    {
      auto os = out.open("trajectory.csv");
      write_trajectory_csv(os, tr);
    }
    double sup = 0.0;
    for (double v : tr.samples) sup = std::max(sup, std::fabs(v));
    out.write_json("simulate.json", {{"config", cfg.source},
                                     {"samples", tr.samples.size()},
                                     {"sup_abs", num(sup)},
                                     {"final_value", num(tr.samples.back())}});
  } else if (cfg.command == "spectrum") {
    DenseMatrix A = read_matrix(cfg.matrix);
    if (cfg.compound > 0) A = compound_matrix(A, cfg.compound);
    const ComplexSpectrum sp = eigenvalues(A);
    {
      auto os = out.open("eigenvalues.csv");
      os << "re,im,mult\n";
      for (const auto& [z, mult] : sp.eigenvalues) os << z.real() << ',' << z.imag() << ',' << mult << '\n';
    }
    write_scatter(out, "scatter.csv", sp.expanded);
    json ev = json::array();
    for (const auto& [z, mult] : sp.eigenvalues) ev.push_back({{"re", num(z.real())}, {"im", num(z.imag())}, {"mult", mult}});
    out.write_json("spectrum.json", {{"config", cfg.source},
                                     {"dimension", A.rows},
                                     {"eigenvalues", ev},
                                     {"conjugate_pairs_ok", sp.conjugate_pairs_ok},
                                     {"residual_checked", sp.residual_checked},
                                     {"residual_ok", sp.residual_ok},
                                     {"max_residual", num(sp.max_residual)}});
  } else if (cfg.command == "positivity") {
    const DdeSystem sys = build_system(cfg, grid);
    const Transformed tf = transform(sys);
    CertReport r = positivity_certificate(tf.b, cfg.tau, cfg.eta, cfg.m, cfg.trials, cfg.seed);
    stamp(r);
    rec.passed = rec.passed && r.passed;
    out.write_json("positivity.json", r.to_json());
  } else if (cfg.command == "detcheck") {
    const DetWindow w{cfg.window_t0, cfg.window_t1};
    CertReport r;
    if (all_constant(cfg)) {
      r = leading_det_check(cfg.alpha.value, cfg.beta.value, cfg.m, w, grid, cfg.det_rel_tol);
    } else {
      const DdeSystem sys = build_system(cfg, grid);
      r = leading_det_check(sys, cfg.m, w, cfg.det_rel_tol);
    }
    stamp(r);
    rec.passed = rec.passed && r.passed;
    out.write_json("detcheck.json", r.to_json());
  } else if (cfg.command == "floquet") {
    const DdeSystem sys = build_system(cfg, grid);
    Theorem51Result res = theorem51_report(sys, cfg.m, cfg.k_max);
    stamp(res.cert);
    rec.passed = rec.passed && res.cert.passed;
    {
      auto os = out.open("multipliers.csv");
      os << "k,re,im,mod,lap,bound\n";
      for (const auto& lr : res.laps.records) {
        os << lr.k << ',' << lr.lambda.real() << ',' << lr.lambda.imag() << ',' << lr.modulus << ',';
        if (lr.lap >= 0) os << lr.lap;
        os << ',';
        for (const auto& b : res.bounds)
          if (b.k == lr.k) os << b.bound;
        os << '\n';
      }
    }
    write_scatter(out, "scatter.csv", res.multipliers.spectrum.expanded);
    json j = res.cert.to_json();
    j["laps"] = res.laps.to_json();
    out.write_json("floquet.json", j);
    if (cfg.homotopy_steps > 0) {
      const HomotopyResult hr = homotopy_scan(sys, cfg.m, cfg.homotopy_steps, cfg.k_max);
      rec.passed = rec.passed && hr.all_passed;
      json pts = json::array();
      for (const auto& p : hr.points) {
        json mods = json::array();
        for (const auto& l : p.result.multipliers.leading) mods.push_back(num(l.modulus));
        pts.push_back({{"kappa", p.kappa}, {"passed", p.result.cert.passed}, {"moduli", mods},
                       {"laps", p.result.laps.to_json()}});
      }
      json jumps = json::array();
      for (double v : hr.max_jump) jumps.push_back(num(v));
      out.write_json("homotopy.json",
                     {{"config", cfg.source}, {"points", pts}, {"max_jump", jumps}, {"all_passed", hr.all_passed}});
    }
  } else if (cfg.command == "u0check") {
    const std::string kind = cfg.probe.rfind("random:", 0) == 0 ? "random" : cfg.probe;
    const WedgeGrid phi = make_probe(cfg.m, grid, kind, cfg.seed);
    const RatioReport rr = u0_ratio(phi, cfg.k);
    if (!rr.exploratory) rec.passed = rec.passed && rr.passed;
    json j = rr.to_json();
    j["config"] = cfg.source;
    j["seed"] = cfg.seed;
    j["norm"] = num(phi.sup_norm());
    out.write_json("ratio.json", j);
    auto os = out.open("ratio.csv");
    for (int p = 1; p <= cfg.m; ++p) os << 'j' << p << ',';
    os << "ratio\n";
    for (std::size_t i = 0; i < rr.points.size(); ++i) {
      for (int v : rr.points[i]) os << v << ',';
      os << rr.ratios[i] << '\n';
    }
  }
  rec.finished = timestamp();
  rec.files.push_back((fs::path(cfg.out) / "run.json").string());
  std::ofstream(fs::path(cfg.out) / "run.json") << rec.to_json().dump(2) << '\n';
  return rec;
}

namespace {

json coef_from_flag(const std::string& s, const std::string& field) {
  try {
    if (s.rfind("const:", 0) == 0) return {{"constant", std::stod(s.substr(6))}};
    if (s.rfind("sin:", 0) == 0) {
      std::vector<double> v;
      std::istringstream is(s.substr(4));
      std::string t;
      while (std::getline(is, t, ',')) v.push_back(std::stod(t));
      if (v.size() != 3) bad_field(field, "sin takes mean,amplitude,frequency");
      return {{"sinusoid", {{"mean", v[0]}, {"amplitude", v[1]}, {"frequency", v[2]}}}};
    }
    if (s.rfind("file:", 0) == 0) return {{"samples", s.substr(5)}};
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return {{"constant", v}};
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    bad_field(field, "expected <number>, const:<c>, sin:<mean>,<amp>,<freq> or file:<path>");
  }
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Compound and Floquet analysis of scalar periodic delay equations"};
  app.set_version_flag("--version", kVersion);
  std::string config_path, out_dir;
  unsigned threads = 1;
  std::uint64_t seed = 0;
  auto* o_config = app.add_option("--config", config_path, "JSON experiment config");
  auto* o_out = app.add_option("--out", out_dir, "output directory");
  auto* o_threads = app.add_option("--threads", threads, "worker threads (0 = all cores)");
  auto* o_seed = app.add_option("--seed", seed, "random seed");
  (void)o_config;

  json flags = json::object();
  std::vector<std::function<void()>> collect;
  auto num_flag = [&](CLI::App* sub, const std::string& name, const std::string& key, const std::string& help,
                      bool integer) {
    auto holder = std::make_shared<std::string>();
    auto* opt = sub->add_option(name, *holder, help);
    collect.push_back([=, &flags]() {
      if (!opt->count() || !sub->parsed()) return;
      try {
        std::size_t used = 0;
        if (integer) {
          const long v = std::stol(*holder, &used);
          if (used != holder->size()) throw std::invalid_argument(*holder);
          flags[key] = v;
        } else {
          const double v = std::stod(*holder, &used);
          if (used != holder->size()) throw std::invalid_argument(*holder);
          flags[key] = v;
        }
      } catch (const std::exception&) {
        bad_field(key, "cannot parse '" + *holder + "'");
      }
    });
  };
  auto str_flag = [&](CLI::App* sub, const std::string& name, const std::string& key, const std::string& help,
                      bool coef) {
    auto holder = std::make_shared<std::string>();
    auto* opt = sub->add_option(name, *holder, help);
    collect.push_back([=, &flags]() {
      if (!opt->count() || !sub->parsed()) return;
      flags[key] = coef ? coef_from_flag(*holder, key) : json(*holder);
    });
  };

  std::map<std::string, CLI::App*> subs;
  auto common = [&](CLI::App* s) {
    num_flag(s, "--nsub", "n_sub", "grid cells on [-1, 0]", true);
    num_flag(s, "--gamma", "gamma", "coefficient period", false);
    str_flag(s, "--alpha", "alpha", "alpha coefficient", true);
    str_flag(s, "--beta", "beta", "beta coefficient", true);
    num_flag(s, "--m", "m", "exterior order", true);
  };
  subs["simulate"] = app.add_subcommand("simulate", "solve x'(t) = -alpha x(t) - beta x(t-1)");
  common(subs["simulate"]);
  num_flag(subs["simulate"], "--tau", "tau", "initial time", false);
  num_flag(subs["simulate"], "--horizon", "horizon", "integration length", false);
  str_flag(subs["simulate"], "--initial", "initial", "const:<c> | linear:<a>,<b> | random", false);

  subs["spectrum"] = app.add_subcommand("spectrum", "eigenvalues of a matrix CSV");
  str_flag(subs["spectrum"], "--matrix", "matrix", "square matrix CSV", false);
  num_flag(subs["spectrum"], "--compound", "compound", "use the m-th compound matrix", true);

  subs["positivity"] = app.add_subcommand("positivity", "cone positivity certificate");
  common(subs["positivity"]);
  num_flag(subs["positivity"], "--eta", "eta", "step length", false);
  num_flag(subs["positivity"], "--tau", "tau", "initial time", false);
  num_flag(subs["positivity"], "--trials", "trials", "random cone elements", true);

  subs["detcheck"] = app.add_subcommand("detcheck", "sign of the leading-solution determinant");
  common(subs["detcheck"]);
  auto w0 = std::make_shared<double>(0.0), w1 = std::make_shared<double>(3.0);
  auto* o_t0 = subs["detcheck"]->add_option("--t0", *w0, "window start");
  auto* o_t1 = subs["detcheck"]->add_option("--t1", *w1, "window end");

  subs["floquet"] = app.add_subcommand("floquet", "Floquet multipliers, laps and bounds");
  common(subs["floquet"]);
  num_flag(subs["floquet"], "--kmax", "k_max", "number of multipliers", true);
  num_flag(subs["floquet"], "--homotopy-steps", "homotopy_steps", "homotopy scan steps (0 = off)", true);

  subs["u0check"] = app.add_subcommand("u0check", "u_m comparability of A^k phi");
  num_flag(subs["u0check"], "--m", "m", "order in {2,3,4}", true);
  num_flag(subs["u0check"], "--k", "k", "iterations", true);
  num_flag(subs["u0check"], "--nsub", "n_sub", "grid cells", true);
  str_flag(subs["u0check"], "--probe", "probe", "const | bump | random:<seed>", false);
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    for (auto& f : collect) f();
    json base = json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) fail(ErrorKind::InvalidArgument, "cannot open config '" + config_path + "'");
      try {
        in >> base;
      } catch (const json::parse_error& e) {
        fail(ErrorKind::InvalidArgument, "config '" + config_path + "' is not valid JSON: " + e.what());
      }
      if (!base.is_object()) fail(ErrorKind::InvalidArgument, "config must be a JSON object");
    }
    std::string chosen;
    for (const auto& [name, s] : subs)
      if (s->parsed()) chosen = name;
    if (!chosen.empty()) {
      if (base.contains("command") && base["command"] != chosen)
        bad_field("command", "config names '" + base["command"].dump() + "' but subcommand is '" + chosen + "'");
      base["command"] = chosen;
    } else if (!base.contains("command")) {
      fail(ErrorKind::InvalidArgument, "no subcommand given (use --help)");
    }
    for (auto it = flags.begin(); it != flags.end(); ++it) base[it.key()] = it.value();
    if (o_t0->count() || o_t1->count()) {
      json w = base.contains("window") ? base["window"] : json::array({0.0, 3.0});
      if (o_t0->count()) w[0] = *w0;
      if (o_t1->count()) w[1] = *w1;
      base["window"] = w;
    }
    if (o_out->count()) base["out"] = out_dir;
    if (o_threads->count()) base["threads"] = threads;
    if (o_seed->count()) base["seed"] = seed;
    const ExperimentConfig cfg = parse_config(base);
    const RunRecord rec = run(cfg);
    std::cout << (rec.passed ? "passed" : "FAILED") << ": wrote " << rec.files.size() << " files to " << cfg.out
              << '\n';
    return rec.passed ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error [" << kind_name(e.kind()) << "]: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error [invalid-argument]: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace cdde::app
