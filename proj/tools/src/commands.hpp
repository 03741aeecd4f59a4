// Subcommand implementations; argument parsing lives in cli.cpp.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "rtourn/solver.hpp"

namespace rtourn::cli {

struct Io {
  std::ostream& out;
  std::ostream& err;
};

struct SolverFlags {
  double kkt_tol = 1e-8;
  double zero_threshold = 1e-9;
  int max_iterations = 10000;
  int order = 32;
  int panels = 16;
  double refine_tol = 1e-10;
  std::string start = "asymptotic";

  SolverConfig config() const;
};

struct SolveArgs {
  int n = 0;
  std::string format = "json";
  std::string output;
  SolverFlags solver;
};

struct TableArgs {
  int n_min = 3;
  int n_max = 10;
  std::string output;
  SolverFlags solver;
};

struct DistributionArgs {
  int n = 0;
  double hbar = 0.0;
  double eps_lower = 0.0;
  int grid = 2001;
  std::string source = "solved";
  std::string output;
  std::string sidecar;
  SolverFlags solver;
};

struct AsymptoticArgs {
  int n = 0;
  std::string format = "json";
  std::string output;
};

struct GiniSweepArgs {
  int n_min = 3;
  int n_max = 50;
  std::string output;
  SolverFlags solver;
};

struct EffortArgs {
  int n = 0;
  double hbar = 0.0;
  double p = 2.0;
  double c0 = 1.0;
  std::string output;
  SolverFlags solver;
};

struct VerifyArgs {
  int n = 0;
  std::string input;
  double hbar = 0.0;
  std::uint64_t seed = 20240601;
  int perturbations = 100;
  std::int64_t samples = 1'000'000;
  double bump_fraction = 1e-3;
  int grid = 2001;
  std::string output;
  SolverFlags solver;
};

int cmd_solve(const SolveArgs& a, Io io);
int cmd_table(const TableArgs& a, Io io);
int cmd_distribution(const DistributionArgs& a, Io io);
int cmd_asymptotic(const AsymptoticArgs& a, Io io);
int cmd_gini_sweep(const GiniSweepArgs& a, Io io);
int cmd_effort(const EffortArgs& a, Io io);
int cmd_verify(const VerifyArgs& a, Io io);

}  // namespace rtourn::cli
