#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qcfb/integrator.hpp"
#include "qcfb/netlist.hpp"
#include "qcfb/steady_state.hpp"

namespace qcfb::netlist {

// Trajectory and stationary computations behind the run tasks, exposed so
// callers can check numbers without going through files.

/// Observed mode in the initial state the run block asks for, other modes vacuum.
Matrix initial_density(const Resolved& r);

struct Trajectory {
  std::vector<double> t;
  std::vector<DensityMatrix> states;
  IntegratorStats stats;
  std::vector<double> max_leak;  // per mode, over the whole trajectory
};

Trajectory evolve(const Resolved& r, const Liouvillian& liou, const IntegratorOptions& opts = {});

struct Stationary {
  DensityMatrix rho;
  SteadyStateInfo info;
};

Stationary stationary(const Liouvillian& liou);

/// Normalized time scale used on g2 axes, in us.
inline constexpr double kTauStar = 2e-4;

enum class Format { Csv, Json };

struct RunOptions {
  std::filesystem::path out_dir;
  Format format = Format::Csv;
  unsigned long long seed = 0;  // recorded only; nothing random in the pipeline
  std::string netlist_path;
};

/// Run every task of the netlist, writing summary.txt, manifest.json and one
/// data file per series task into out_dir. Returns the artifact file names.
std::vector<std::string> run(const Netlist& n, const RunOptions& opts);

/// 0 success, 2 parse, 3 validation, 4 numerical, 1 anything else.
int exit_code_for(const std::exception& e);

}  // namespace qcfb::netlist
