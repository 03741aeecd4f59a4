#include "rtourn_cli/cli.hpp"

#include <algorithm>
#include <functional>
#include <ostream>
#include <stdexcept>

#include "CLI11.hpp"
#include "commands.hpp"
#include "rtourn/metrics.hpp"
#include "rtourn/types.hpp"

namespace rtourn::cli {

namespace {

void add_solver_flags(CLI::App* app, SolverFlags& f) {
  app->add_option("--kkt-tol", f.kkt_tol, "KKT residual tolerance")->capture_default_str();
  app->add_option("--zero-threshold", f.zero_threshold, "differentials below this count as zero")
      ->capture_default_str();
  app->add_option("--max-iter", f.max_iterations, "solver iteration cap")->capture_default_str();
  app->add_option("--order", f.order, "Gauss-Legendre nodes per panel")->capture_default_str();
  app->add_option("--panels", f.panels, "quadrature panels on [0, 1]")->capture_default_str();
  app->add_option("--refine-tol", f.refine_tol, "panel-doubling tolerance")->capture_default_str();
  app->add_option("--start", f.start, "solver start point")
      ->check(CLI::IsMember({"asymptotic", "equal"}))
      ->capture_default_str();
}

void add_output(CLI::App* app, std::string& path) {
  app->add_option("-o,--output", path, "output file (default: standard output)");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust rank-order tournament design", "rtourn"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "rtourn 0.1.0");

  SolveArgs solve;
  auto* c_solve = app.add_subcommand("solve", "robust optimal prize schedule for n agents");
  c_solve->add_option("--n", solve.n, "number of agents")->required();
  c_solve->add_option("--format", solve.format)->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  add_output(c_solve, solve.output);
  add_solver_flags(c_solve, solve.solver);

  TableArgs table;
  auto* c_table = app.add_subcommand("table", "prize table for a range of n (4 decimals)");
  c_table->add_option("--min", table.n_min)->required();
  c_table->add_option("--max", table.n_max)->required();
  add_output(c_table, table.output);
  add_solver_flags(c_table, table.solver);

  DistributionArgs dist;
  auto* c_dist = app.add_subcommand("distribution", "adversarial noise distribution as t,F,f,hazard");
  c_dist->add_option("--n", dist.n)->required();
  c_dist->add_option("--hbar", dist.hbar, "entropy bound (nats)")->capture_default_str();
  c_dist->add_option("--eps-lower", dist.eps_lower, "lower end of the support")
      ->capture_default_str();
  c_dist->add_option("--grid", dist.grid, "uniform quantile grid points")->capture_default_str();
  c_dist->add_option("--source", dist.source)
      ->check(CLI::IsMember({"solved", "asymptotic", "closed-form"}))
      ->capture_default_str();
  c_dist->add_option("--sidecar", dist.sidecar,
                     "metadata JSON path (default: <output>.json, or stderr)");
  add_output(c_dist, dist.output);
  add_solver_flags(c_dist, dist.solver);

  AsymptoticArgs asym;
  auto* c_asym = app.add_subcommand("asymptotic", "harmonic schedule d_inf and v_inf");
  c_asym->add_option("--n", asym.n)->required();
  c_asym->add_option("--format", asym.format)->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  add_output(c_asym, asym.output);

  GiniSweepArgs sweep;
  auto* c_sweep = app.add_subcommand("gini-sweep", "Gini coefficient of the robust schedule over n");
  c_sweep->add_option("--min", sweep.n_min)->capture_default_str();
  c_sweep->add_option("--max", sweep.n_max)->capture_default_str();
  add_output(c_sweep, sweep.output);
  add_solver_flags(c_sweep, sweep.solver);

  EffortArgs effort;
  auto* c_effort = app.add_subcommand("effort", "equilibrium effort under the adversarial noise");
  c_effort->add_option("--n", effort.n)->required();
  c_effort->add_option("--hbar", effort.hbar)->capture_default_str();
  c_effort->add_option("--p", effort.p, "cost exponent, c(x) = c0 x^p / p")->capture_default_str();
  c_effort->add_option("--c0", effort.c0, "cost scale")->capture_default_str();
  add_output(c_effort, effort.output);
  add_solver_flags(c_effort, effort.solver);

  VerifyArgs verify;
  auto* c_verify = app.add_subcommand("verify", "run the invariant battery on a solution");
  c_verify->add_option("--n", verify.n, "solve for n and verify the result");
  c_verify->add_option("--input", verify.input, "verify a JSON report written by `solve`")
      ->check(CLI::ExistingFile);
  c_verify->add_option("--hbar", verify.hbar)->capture_default_str();
  c_verify->add_option("--seed", verify.seed)->capture_default_str();
  c_verify->add_option("--perturbations", verify.perturbations)->capture_default_str();
  c_verify->add_option("--samples", verify.samples, "Monte Carlo samples")->capture_default_str();
  c_verify->add_option("--bump-fraction", verify.bump_fraction,
                       "Monte Carlo bump relative to the support length")
      ->capture_default_str();
  c_verify->add_option("--grid", verify.grid)->capture_default_str();
  add_output(c_verify, verify.output);
  add_solver_flags(c_verify, verify.solver);

  // CLI11 consumes arguments from the back.
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalidInput;
  }

  const Io io{out, err};
  const std::function<int()> run = [&]() -> int {
    if (*c_solve) return cmd_solve(solve, io);
    if (*c_table) return cmd_table(table, io);
    if (*c_dist) return cmd_distribution(dist, io);
    if (*c_asym) return cmd_asymptotic(asym, io);
    if (*c_sweep) return cmd_gini_sweep(sweep, io);
    if (*c_effort) return cmd_effort(effort, io);
    return cmd_verify(verify, io);
  };
  try {
    return run();
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const SolverFailure& e) {
    err << "error: " << e.what() << '\n';
    return kExitNotConverged;
  } catch (const DivergentIntegral& e) {
    err << "error: numerical failure: " << e.what() << '\n';
    return kExitNotConverged;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
}

}  // namespace rtourn::cli
