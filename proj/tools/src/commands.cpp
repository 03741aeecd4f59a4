#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "rtourn/adversary.hpp"
#include "rtourn/equilibrium.hpp"
#include "rtourn/kernel.hpp"
#include "rtourn/metrics.hpp"
#include "rtourn_cli/cli.hpp"
#include "rtourn_cli/json_writer.hpp"
#include "rtourn_cli/verify.hpp"

namespace rtourn::cli {

namespace fs = std::filesystem;

namespace {

fs::path resolve_output(const std::string& path) {
  fs::path p(path);
  if (p.is_relative()) {
    if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') {
      p = fs::path(dir) / p;
    }
  }
  return p;
}

// Either a file (opened in binary mode so line endings stay LF) or the
// fallback stream when no path, or "-", is given.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      os_ = &fallback;
      return;
    }
    path_ = resolve_output(path);
    if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
    file_.open(path_, std::ios::binary | std::ios::trunc);
    if (!file_) throw std::invalid_argument("cannot open output file " + path_.string());
    os_ = &file_;
  }

  std::ostream& stream() { return *os_; }
  bool to_file() const { return !path_.empty(); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
  std::ofstream file_;
  std::ostream* os_ = nullptr;
};

std::string fixed4(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

std::string csv_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json array_of(const std::vector<double>& xs) {
  Json a = Json::array();
  for (double x : xs) a.push_back(x);
  return a;
}

Json solve_json(const SolveReport& rep) {
  Json j;
  j["n"] = rep.n;
  j["d"] = array_of(rep.d_star);
  j["v"] = array_of(rep.v_star);
  j["objective"] = rep.objective;
  j["kkt_residual"] = rep.kkt_residual;
  j["mu"] = rep.mu;
  Json support = Json::array();
  for (bool s : rep.support) support.push_back(s);
  j["support"] = support;
  j["iterations"] = rep.iterations;
  j["converged"] = rep.converged;
  return j;
}

void write_rdv_csv(std::ostream& os, const std::vector<double>& d, const std::vector<double>& v) {
  os << "r,d,v\n";
  for (std::size_t i = 0; i < v.size(); ++i) {
    os << (i + 1) << ',' << (i < d.size() ? csv_double(d[i]) : std::string()) << ','
       << csv_double(v[i]) << '\n';
  }
}

void write_distribution_csv(std::ostream& os, const NoiseDistribution& dist) {
  os << "t,F,f,hazard\n";
  for (std::size_t i = 0; i < dist.size(); ++i) {
    os << csv_double(dist.t[i]) << ',' << csv_double(dist.cdf[i]) << ','
       << csv_double(dist.pdf[i]) << ',' << csv_double(dist.hazard[i]) << '\n';
  }
}

}  // namespace

SolverConfig SolverFlags::config() const {
  SolverConfig cfg;
  cfg.kkt_tol = kkt_tol;
  cfg.zero_threshold = zero_threshold;
  cfg.max_iterations = max_iterations;
  cfg.quadrature.order = order;
  cfg.quadrature.panels = panels;
  cfg.quadrature.refine_tol = refine_tol;
  cfg.start = start == "equal" ? StartPoint::equal_differentials : StartPoint::asymptotic;
  cfg.validate();
  return cfg;
}

int cmd_solve(const SolveArgs& a, Io io) {
  require_tournament_size(a.n);
  const SolverConfig cfg = a.solver.config();
  const SolveReport rep = solve_robust(a.n, cfg);
  Sink sink(a.output, io.out);
  if (a.format == "csv") {
    write_rdv_csv(sink.stream(), rep.d_star, rep.v_star);
  } else {
    write_json(sink.stream(), solve_json(rep));
  }
  if (!rep.converged) {
    io.err << "solve: n = " << a.n << " did not converge (kkt residual "
           << format_double(rep.kkt_residual) << ")\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_table(const TableArgs& a, Io io) {
  if (a.n_min < 3 || a.n_max < a.n_min) {
    throw std::invalid_argument("table needs 3 <= --min <= --max");
  }
  const SolverConfig cfg = a.solver.config();
  std::vector<std::future<SolveReport>> jobs;
  for (int n = a.n_min; n <= a.n_max; ++n) {
    jobs.push_back(std::async(std::launch::async, [n, &cfg] { return solve_robust(n, cfg); }));
  }
  Sink sink(a.output, io.out);
  std::ostream& os = sink.stream();
  os << 'n';
  for (int r = 1; r <= a.n_max; ++r) os << ",v" << r;
  os << '\n';
  int status = kExitOk;
  for (int n = a.n_min; n <= a.n_max; ++n) {
    const SolveReport rep = jobs[static_cast<std::size_t>(n - a.n_min)].get();
    if (status != kExitOk) continue;
    if (!rep.converged) {
      io.err << "table: n = " << n << " did not converge (kkt residual "
             << format_double(rep.kkt_residual) << ")\n";
      status = kExitNotConverged;
      continue;
    }
    os << n;
    for (double v : rep.v_star) os << ',' << fixed4(v);
    for (int r = n + 1; r <= a.n_max; ++r) os << ',';
    os << '\n';
  }
  return status;
}

int cmd_distribution(const DistributionArgs& a, Io io) {
  require_tournament_size(a.n);
  if (a.grid < 3) throw std::invalid_argument("--grid must be >= 3");
  if (!std::isfinite(a.eps_lower)) throw std::invalid_argument("--eps-lower must be finite");
  if (a.source == "closed-form" && a.n != 3 && a.n != 4) {
    throw std::invalid_argument("closed-form source is available for n = 3 and n = 4 only");
  }
  const SolverConfig cfg = a.solver.config();
  const QuadratureSpec& q = cfg.quadrature;
  const EntropyBound h(a.hbar);

  int status = kExitOk;
  NoiseDistribution dist;
  double lambda = 0.0;
  double entropy = 0.0;
  Json extra;
  if (a.source == "asymptotic") {
    dist = exponential_limit(h, a.eps_lower, a.grid);
    lambda = exponential_limit_rate(h);
    entropy = 1.0 - std::log(lambda);
    extra["rate"] = lambda;
  } else if (a.source == "closed-form") {
    PrizeDifferentials d = a.n == 3 ? solve_n3_closed_form() : solve_n4_closed_form(q).d;
    const QuantileDensity m = adversarial_m(d, h, q);
    lambda = m.scale();
    entropy = entropy_of(m, q);
    if (a.n == 3) {
      dist = closed_form_n3_distribution(h, a.eps_lower, a.grid);
      const N3SquareRootForm form = n3_square_root_form(h);
      extra["b"] = form.b;
      extra["k"] = form.k;
    } else {
      dist = closed_form_n4_distribution(h, objective_W(d, q), a.eps_lower, a.grid);
    }
  } else {
    const SolveReport rep = solve_robust(a.n, cfg);
    if (!rep.converged) {
      io.err << "distribution: n = " << a.n << " did not converge (kkt residual "
             << format_double(rep.kkt_residual) << ")\n";
      status = kExitNotConverged;
    }
    const QuantileDensity m = adversarial_m(rep.differentials(), h, q);
    lambda = m.scale();
    entropy = entropy_of(m, q);
    dist = reconstruct_distribution(m, a.eps_lower, a.grid, q);
  }

  Json side;
  side["n"] = a.n;
  side["source"] = a.source;
  side["hbar"] = a.hbar;
  side["eps_lower"] = a.eps_lower;
  side["points"] = dist.size();
  side["bounded"] = dist.bounded;
  side["support_length"] = dist.bounded ? dist.support_length : std::nan("");
  side["lambda"] = lambda;
  side["entropy"] = entropy;
  side["entropy_error"] = std::abs(entropy - a.hbar);
  for (const auto& [k, v] : extra.items()) side[k] = v;

  Sink sink(a.output, io.out);
  write_distribution_csv(sink.stream(), dist);
  std::string side_path = a.sidecar;
  if (side_path.empty() && sink.to_file()) side_path = sink.path().string() + ".json";
  Sink side_sink(side_path, io.err);
  write_json(side_sink.stream(), side);
  return status;
}

int cmd_asymptotic(const AsymptoticArgs& a, Io io) {
  require_tournament_size(a.n);
  const PrizeDifferentials d = asymptotic_d(a.n);
  const PrizeSchedule v = asymptotic_v(a.n);
  const std::vector<double> dv(d.values().begin(), d.values().end());
  const std::vector<double> vv(v.values().begin(), v.values().end());
  Sink sink(a.output, io.out);
  if (a.format == "csv") {
    write_rdv_csv(sink.stream(), dv, vv);
  } else {
    Json j;
    j["n"] = a.n;
    j["d"] = array_of(dv);
    j["v"] = array_of(vv);
    j["gini"] = gini(v);
    write_json(sink.stream(), j);
  }
  return kExitOk;
}

int cmd_gini_sweep(const GiniSweepArgs& a, Io io) {
  if (a.n_min < 2 || a.n_max < a.n_min) {
    throw std::invalid_argument("gini-sweep needs 2 <= --min <= --max");
  }
  const std::vector<GiniPoint> pts = gini_sweep(a.n_min, a.n_max, a.solver.config());
  Sink sink(a.output, io.out);
  sink.stream() << "n,gini\n";
  for (const auto& p : pts) sink.stream() << p.n << ',' << csv_double(p.gini) << '\n';
  return kExitOk;
}

int cmd_effort(const EffortArgs& a, Io io) {
  require_tournament_size(a.n);
  const CostFunction cost(a.p, a.c0);
  const SolverConfig cfg = a.solver.config();
  const EntropyBound h(a.hbar);
  const SolveReport rep = solve_robust(a.n, cfg);
  const PrizeDifferentials d = rep.differentials();
  const QuantileDensity m = adversarial_m(d, h, cfg.quadrature);
  const double mb = marginal_benefit(d, m, cfg.quadrature);
  Json j;
  j["n"] = a.n;
  j["hbar"] = a.hbar;
  j["p"] = a.p;
  j["c0"] = a.c0;
  j["objective"] = rep.objective;
  j["marginal_benefit"] = mb;
  j["effort"] = effort_from_benefit(mb, cost);
  j["converged"] = rep.converged;
  Sink sink(a.output, io.out);
  write_json(sink.stream(), j);
  if (!rep.converged) {
    io.err << "effort: n = " << a.n << " did not converge\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_verify(const VerifyArgs& a, Io io) {
  VerifyOptions opts;
  opts.hbar = a.hbar;
  opts.seed = a.seed;
  opts.perturbations = a.perturbations;
  opts.mc_samples = a.samples;
  opts.bump_fraction = a.bump_fraction;
  opts.grid = a.grid;
  opts.solver = a.solver.config();
  if (a.perturbations < 1) throw std::invalid_argument("--perturbations must be >= 1");
  if (a.grid < 3) throw std::invalid_argument("--grid must be >= 3");

  std::vector<double> d;
  if (!a.input.empty()) {
    std::ifstream in(a.input);
    if (!in) throw std::invalid_argument("cannot read " + a.input);
    Json j;
    try {
      j = Json::parse(in);
      d = j.at("d").get<std::vector<double>>();
      const int n = j.at("n").get<int>();
      if (a.n != 0 && a.n != n) throw std::invalid_argument("--n disagrees with the input file");
      if (static_cast<int>(d.size()) != n - 1) {
        throw std::invalid_argument("input d must have n - 1 entries");
      }
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument(std::string("malformed input: ") + e.what());
    }
  } else {
    if (a.n == 0) throw std::invalid_argument("verify needs --n or --input");
    require_tournament_size(a.n);
    d = solve_robust(a.n, opts.solver).d_star;
  }

  const VerifySummary sum = run_verification(PrizeDifferentials::feasible(std::move(d)), opts);
  Json j;
  j["n"] = sum.n;
  j["passed"] = sum.passed();
  j["kkt_residual"] = sum.kkt_residual;
  Json checks = Json::array();
  for (const auto& c : sum.checks) {
    Json cj;
    cj["name"] = c.name;
    cj["residual"] = c.residual;
    cj["tolerance"] = c.tolerance;
    cj["passed"] = c.passed;
    checks.push_back(cj);
  }
  j["checks"] = checks;
  Json failed = Json::array();
  for (const auto& name : sum.failed()) failed.push_back(name);
  j["failed"] = failed;
  Sink sink(a.output, io.out);
  write_json(sink.stream(), j);
  if (!sum.passed()) {
    io.err << "verify: failed checks:";
    for (const auto& name : sum.failed()) io.err << ' ' << name;
    io.err << '\n';
    return kExitCheckFailed;
  }
  return kExitOk;
}

}  // namespace rtourn::cli
