#include "cli.hpp"

#include <omp.h>

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "lrdemp/empirical.hpp"
#include "lrdemp/errors.hpp"
#include "lrdemp/gof.hpp"
#include "lrdemp/harness.hpp"
#include "lrdemp/multilinear.hpp"
#include "lrdemp/process.hpp"
#include "lrdemp/scalings.hpp"
#include "lrdemp/seeding.hpp"
#include "lrdemp/stats.hpp"

namespace lrdemp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string tool_version() { return std::string("lrdemp ") + LRDEMP_VERSION; }

namespace {

/// A flag value rejected after parsing; exit code 2.
struct FlagError : std::runtime_error {
  FlagError(const std::string& flag, const std::string& what) : std::runtime_error(flag + ": " + what) {}
};

struct ProcessFlags {
  double beta = 0.7;
  std::size_t trunc = std::size_t{1} << 16;
  double mu = 0.0;
  double sigma = 1.0;
  std::uint64_t seed = 1;

  void add(CLI::App* app, bool with_location) {
    app->add_option("--beta", beta, "memory parameter, 1/2 < beta < 1")->required();
    app->add_option("--trunc", trunc, "truncation lag K of the linear filter")->capture_default_str();
    app->add_option("--seed", seed, "random seed")->capture_default_str();
    if (with_location) {
      app->add_option("--mu", mu, "location")->capture_default_str();
      app->add_option("--sigma", sigma, "scale, > 0")->capture_default_str();
    }
  }

  ProcessConfig config() const {
    ProcessConfig c;
    c.beta = beta;
    c.trunc_K = trunc;
    c.mu = mu;
    c.sigma = sigma;
    c.seed = seed;
    if (!(sigma > 0.0)) throw FlagError("--sigma", "sigma must be > 0");
    try {
      c.validate();
    } catch (const ParameterError& e) {
      throw FlagError("--beta", e.what());
    }
    if (trunc == 0) throw FlagError("--trunc", "must be >= 1");
    return c;
  }

  json to_json() const { return {{"beta", beta}, {"trunc_K", trunc}, {"mu", mu}, {"sigma", sigma}, {"seed", seed}}; }
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::optional<fs::path> env_out_dir() {
  if (const char* d = std::getenv("LRDEMP_OUT_DIR"); d && *d) return fs::path(d);
  return std::nullopt;
}

fs::path resolve_out_dir(const std::string& flag, const std::string& fallback) {
  if (!flag.empty()) return flag;
  if (auto d = env_out_dir()) return *d;
  return fallback;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

json stamp(json j, const json& inputs) {
  j["tool_version"] = tool_version();
  j["config_hash"] = fnv1a_hex(inputs.dump());
  return j;
}

void write_path_csv(std::ostream& os, const PathBundle& path) {
  os << "i,x,y\n";
  for (std::size_t i = 0; i < path.n(); ++i) os << i + 1 << ',' << fmt(path.x[i]) << ',' << fmt(path.y[i]) << '\n';
}

std::vector<double> read_y_column(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot read " + file.string());
  std::string line;
  if (!std::getline(in, line) || line != "i,x,y") throw IoError(file.string() + ": expected header i,x,y");
  std::vector<double> y;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c2 = line.rfind(',');
    if (c2 == std::string::npos) throw IoError(file.string() + ": malformed row '" + line + "'");
    try {
      y.push_back(std::stod(line.substr(c2 + 1)));
    } catch (const std::exception&) {
      throw IoError(file.string() + ": malformed row '" + line + "'");
    }
  }
  if (y.empty()) throw IoError(file.string() + ": no data rows");
  return y;
}

// ---------------------------------------------------------------- simulate

struct SimulateCmd {
  ProcessFlags p;
  std::size_t n = 0;
  std::string out;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("simulate", "simulate one path and write i,x,y as CSV");
    p.add(c, true);
    c->add_option("--n", n, "sample size")->required()->check(CLI::PositiveNumber);
    c->add_option("--out", out, "output CSV (default: $LRDEMP_OUT_DIR/path_<seed>.csv or stdout)");
  }

  int run(std::ostream& os) const {
    const auto path = generate_path(p.config(), n);
    if (!out.empty() || env_out_dir()) {
      const fs::path file = !out.empty() ? fs::path(out) : *env_out_dir() / ("path_" + std::to_string(p.seed) + ".csv");
      auto f = open_out(file);
      write_path_csv(f, path);
      if (!f) throw IoError("write failed: " + file.string());
    } else {
      write_path_csv(os, path);
    }
    return kOk;
  }
};

// ---------------------------------------------------------------- scalings

struct ScalingsCmd {
  double beta = 0.7;
  std::size_t n = 1024;
  std::size_t trunc = std::size_t{1} << 16;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("scalings", "print the normalising sequences as JSON");
    c->add_option("--beta", beta, "memory parameter")->required();
    c->add_option("--n", n, "sample size")->capture_default_str();
    c->add_option("--trunc", trunc, "truncation lag K")->capture_default_str();
  }

  int run(std::ostream& os) const {
    ProcessFlags pf;
    pf.beta = beta;
    pf.trunc = trunc;
    const auto cfg = pf.config();
    try {
      regime_of(beta);
    } catch (const UnsupportedBoundaryError& e) {
      throw FlagError("--beta", e.what());
    }
    if (n < 3) throw FlagError("--n", "must be >= 3");
    const auto s = build_scaling_set(cfg, n);
    os << stamp(to_json(s), {{"command", "scalings"}, {"beta", beta}, {"n", n}, {"trunc_K", trunc}}).dump(2) << '\n';
    return kOk;
  }
};

// ---------------------------------------------------------------- gof

struct GofCmd {
  ProcessFlags p;
  std::string stat = "ks";
  std::string estimator = "none";
  std::string normalization;
  std::size_t n = 4096;
  std::size_t reps = 50;
  int jobs = 0;
  std::string out;
  std::string input;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("gof", "goodness-of-fit statistics over replications, or for one input path");
    p.add(c, true);
    c->add_option("--stat", stat, "ks | cvm")->check(CLI::IsMember({"ks", "cvm"}))->capture_default_str();
    c->add_option("--estimator", estimator, "none | mean | m:<psi> with psi in sign, huber:<c>, ssign:<h>")
        ->capture_default_str();
    c->add_option("--normalization", normalization, "assert the normalisation (sigma_n1_n | sigma_n2_n | sqrt_n)");
    c->add_option("--n", n, "sample size")->capture_default_str();
    c->add_option("--reps", reps, "replications")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--jobs", jobs, "worker threads (0 = all)")->capture_default_str();
    c->add_option("--out", out, "output directory (default: $LRDEMP_OUT_DIR or .)");
    c->add_option("--input", input, "recompute the statistic for a path CSV written by simulate");
  }

  json inputs() const {
    return {{"command", "gof"}, {"process", p.to_json()}, {"stat", stat}, {"estimator", estimator},
            {"n", n}, {"reps", reps}, {"input", input}};
  }

  GofResult compute(const PathBundle& path, const MarginalModel& marginal, const EstimatorSpec& est,
                    const ScalingSet& s) const {
    std::optional<Normalization> requested;
    if (!normalization.empty()) {
      try {
        requested = parse_normalization(normalization);
      } catch (const ParameterError& e) {
        throw FlagError("--normalization", e.what());
      }
    }
    GofResult r;
    if (stat == "ks" && est.kind() == EstimatorSpec::Kind::none) {
      if (requested && *requested != Normalization::sigma_n1_n)
        throw RegimeError("ks with known parameter is normalised by sigma_n1_n");
      r = ks_known(path, marginal, s);
    } else if (stat == "ks") {
      r = ks_estimated(path, marginal, est, s, requested);
    } else {
      r = est.kind() == EstimatorSpec::Kind::none ? cvm_at(path, marginal, marginal.mu(), s, "none")
                                                   : cvm_estimated(path, marginal, est, s);
      if (requested && *requested != r.normalization)
        throw RegimeError("normalization " + normalization + " does not match regime " + to_string(s.regime));
    }
    r.seed = path.seed;
    return r;
  }

  int run(std::ostream& os) const {
    const auto cfg = p.config();
    EstimatorSpec est = EstimatorSpec::none();
    try {
      est = EstimatorSpec::parse(estimator);
    } catch (const ParameterError& e) {
      throw FlagError("--estimator", e.what());
    }
    try {
      regime_of(cfg.beta);
    } catch (const UnsupportedBoundaryError& e) {
      throw FlagError("--beta", e.what());
    }
    const auto coeffs = gen_coefficients(cfg.beta, cfg.trunc_K);
    const auto marginal = marginal_model(coeffs, cfg.mu, cfg.sigma);

    if (!input.empty()) {
      PathBundle path;
      path.y = read_y_column(input);
      path.x.resize(path.y.size());
      for (std::size_t i = 0; i < path.y.size(); ++i) path.x[i] = (path.y[i] - cfg.mu) / cfg.sigma;
      path.trunc_K = cfg.trunc_K;
      path.seed = cfg.seed;
      if (path.n() < 3) throw FlagError("--input", "needs at least 3 rows");
      const auto s = build_scaling_set(cfg, path.n());
      const auto r = compute(path, marginal, est, s);
      const auto j = stamp(to_json(r), inputs());
      if (!out.empty()) {
        auto f = open_out(fs::path(out) / ("gof_" + stat + "_input.json"));
        f << j.dump(2) << '\n';
      }
      os << j.dump(2) << '\n';
      return kOk;
    }

    if (n < 3) throw FlagError("--n", "must be >= 3");
    const PathGenerator gen(cfg, n);
    const auto s = build_scaling_set(cfg, n);
    std::vector<GofResult> results(reps);
    std::vector<std::exception_ptr> errors(reps);
    const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::size_t rep = 0; rep < reps; ++rep) {
      try {
        results[rep] = compute(gen.generate(derive_seed(cfg.seed, n, rep)), marginal, est, s);
      } catch (...) {
        errors[rep] = std::current_exception();
      }
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);

    const fs::path dir = resolve_out_dir(out, ".");
    const std::string stem = "gof_" + stat + "_" + [&] {
      auto name = est.name();
      for (auto& ch : name)
        if (ch == ':' || ch == '.') ch = '_';
      return name;
    }();
    std::vector<double> normalized;
    {
      auto f = open_out(dir / (stem + ".csv"));
      f << "rep,seed,theta_hat,raw,normalized,sigma_n1_scaled,limit_scaled\n";
      for (std::size_t rep = 0; rep < reps; ++rep) {
        const auto& r = results[rep];
        normalized.push_back(r.statistic_normalized);
        f << rep << ',' << r.seed << ',' << fmt(r.theta_hat) << ',' << fmt(r.statistic_raw) << ','
          << fmt(r.statistic_normalized) << ',' << (r.sigma_n1_scaled ? fmt(*r.sigma_n1_scaled) : "") << ','
          << (r.limit_scaled ? fmt(*r.limit_scaled) : "") << '\n';
      }
      if (!f) throw IoError("write failed: " + (dir / (stem + ".csv")).string());
    }
    json q;
    for (double lvl : {0.05, 0.25, 0.5, 0.75, 0.95}) {
      char key[8];
      std::snprintf(key, sizeof key, "p%02d", static_cast<int>(std::lround(lvl * 100)));
      q[key] = stats::quantile(normalized, lvl);
    }
    json summary = {{"stat", stat},
                    {"estimator", est.name()},
                    {"normalization", to_string(results.front().normalization)},
                    {"normalization_value", results.front().normalization_value},
                    {"n", n},
                    {"beta", cfg.beta},
                    {"reps", reps},
                    {"seed", cfg.seed},
                    {"regime", to_string(s.regime)},
                    {"quantiles", q}};
    summary = stamp(summary, inputs());
    {
      auto f = open_out(dir / (stem + "_summary.json"));
      f << summary.dump(2) << '\n';
    }
    os << summary.dump(2) << '\n';
    return kOk;
  }
};

// ---------------------------------------------------------------- reduction-check

struct ReductionCmd {
  ProcessFlags p;
  std::size_t n = 4096;
  int order = 2;
  std::size_t grid_m = 512;
  std::string out;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("reduction-check", "sup-norm of the reduction residual S_{n,p} for one path");
    p.add(c, false);
    c->add_option("--n", n, "sample size")->capture_default_str();
    c->add_option("--p", order, "expansion order, 1 or 2")->check(CLI::IsMember({1, 2}))->capture_default_str();
    c->add_option("--grid-m", grid_m, "extra quantile grid points")->capture_default_str();
    c->add_option("--out", out, "write the residual trace CSV here");
  }

  int run(std::ostream& os) const {
    const auto cfg = p.config();
    if (n < 3) throw FlagError("--n", "must be >= 3");
    const PathGenerator gen(cfg, n);
    const auto path = gen.generate(cfg.seed);
    const auto sums = compute_sums(path, gen.coefficients());
    const auto s = build_scaling_set(cfg, n);
    const auto marginal = marginal_model(gen.coefficients(), 0.0, 1.0);
    const double sigma_np = order == 1 ? s.sigma_n1 : s.sigma_n2;
    const auto r = reduction_residual(path, marginal, sums, order, sigma_np, grid_m);
    json j = {{"n", n},
              {"beta", cfg.beta},
              {"p", order},
              {"seed", cfg.seed},
              {"sigma_np", sigma_np},
              {"sup_abs", r.sup_abs},
              {"normalized_sup", r.normalized_sup},
              {"xi_rate", xi_rate(n, cfg.beta, order)}};
    try {
      j["d_np"] = d_np(n, cfg.beta, order);
    } catch (const UnsupportedBoundaryError&) {
      j["d_np"] = nullptr;
    }
    j = stamp(j, {{"command", "reduction-check"}, {"process", p.to_json()}, {"n", n}, {"p", order}, {"grid_m", grid_m}});
    if (!out.empty()) {
      auto f = open_out(out);
      write_trace_csv(f, r.trace);
    }
    os << j.dump(2) << '\n';
    return kOk;
  }
};

// ---------------------------------------------------------------- experiment

struct ExperimentCmd {
  std::string config;
  std::string out;
  int jobs = 0;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("experiment", "run a Monte Carlo experiment from a JSON config");
    c->add_option("--config", config, "experiment config JSON")->required();
    c->add_option("--out", out, "output directory (default: $LRDEMP_OUT_DIR/<name> or out/<name>)");
    c->add_option("--jobs", jobs, "worker threads (0 = all)")->capture_default_str();
  }

  int run(std::ostream& os) const {
    if (!fs::exists(config)) throw IoError("config not found: " + config);
    const auto cfg = load_experiment_config(config);
    const auto r = run_experiment(cfg, jobs);
    const fs::path dir = !out.empty() ? fs::path(out) : (env_out_dir() ? *env_out_dir() : fs::path("out")) / cfg.name;
    write_experiment_outputs(dir, r, tool_version());
    os << cfg.name << ": " << r.records.size() << " records (" << r.failed_records() << " failed), output in "
       << dir.string() << '\n';
    for (const auto& v : r.verdicts)
      os << "  " << (v.pass ? "PASS " : "FAIL ") << std::left << std::setw(26) << v.name << " measured="
         << v.measured << " threshold=" << v.threshold << (v.error.empty() ? "" : " error=" + v.error) << '\n';
    return r.all_pass() ? kOk : kCheckFailed;
  }
};

// ---------------------------------------------------------------- report

struct ReportCmd {
  std::string dir;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("report", "summarise the verdicts of an experiment output directory");
    c->add_option("--dir", dir, "experiment output directory")->required();
  }

  int run(std::ostream& os) const {
    const fs::path file = fs::path(dir) / "verdicts.json";
    std::ifstream in(file);
    if (!in) throw IoError("cannot read " + file.string());
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw IoError(file.string() + ": " + e.what());
    }
    os << "experiment " << j.value("experiment", "?") << "  config " << j.value("config_hash", "?") << "  "
       << j.value("tool_version", "?") << '\n';
    os << "records " << j.value("records", 0) << ", failed " << j.value("failed_records", 0) << '\n';
    for (const auto& c : j.at("checks")) {
      os << (c.at("pass").get<bool>() ? "PASS " : "FAIL ") << std::left << std::setw(26)
         << c.at("name").get<std::string>() << " measured=" << c.at("measured").dump()
         << " threshold=" << c.at("threshold").dump();
      if (c.contains("error")) os << " error=" << c.at("error").get<std::string>();
      os << '\n';
    }
    os << (j.value("all_pass", false) ? "all checks passed" : "some checks failed") << '\n';
    return kOk;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Empirical processes of long-range dependent linear processes", "lrdemp"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);
  SimulateCmd simulate;
  ScalingsCmd scalings;
  GofCmd gof;
  ReductionCmd reduction;
  ExperimentCmd experiment;
  ReportCmd report;
  simulate.add(app);
  scalings.add(app);
  gof.add(app);
  reduction.add(app);
  experiment.add(app);
  report.add(app);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (app.got_subcommand("simulate")) return simulate.run(out);
    if (app.got_subcommand("scalings")) return scalings.run(out);
    if (app.got_subcommand("gof")) return gof.run(out);
    if (app.got_subcommand("reduction-check")) return reduction.run(out);
    if (app.got_subcommand("experiment")) return experiment.run(out);
    if (app.got_subcommand("report")) return report.run(out);
  } catch (const FlagError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConfigError& e) {
    err << "error: config " << (e.pointer().empty() ? "/" : e.pointer()) << ": " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const RegimeError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const UnsupportedBoundaryError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kCheckFailed;
  }
  return kUsage;
}

}  // namespace lrdemp::cli
