#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qcfb/feedback_loop.hpp"
#include "qcfb/integrator.hpp"

namespace qcfb {

struct OracleConfig {
  int plant_truncation = 15;
  int amp_truncation = 20;
  /// Initial plant state on plant_truncation levels; empty means vacuum.
  Matrix plant_initial;
  IntegratorOptions integrator;
  double leak_threshold = 1e-6;
};

/// The loop's plant mode: the single registered mode other than spec.amp_mode.
std::string plant_mode_label(const FeedbackLoopSpec& spec);

/// Integrate the composite plant + amplifier triple (vacuum input on its output
/// channel) from plant_initial x |0><0|_c and return the plant-reduced states.
/// Throws NumericalError if either mode's top-two-level population exceeds the
/// leak threshold at any grid time.
std::vector<DensityMatrix> full_loop_simulate(const FeedbackLoopSpec& spec, const OracleConfig& cfg,
                                              const std::vector<double>& t_grid);

/// Eliminated-model evolution of the same plant state.
std::vector<DensityMatrix> eliminated_simulate(const FeedbackLoopSpec& spec, const OracleConfig& cfg,
                                               const std::vector<double>& t_grid);

struct EliminationTable {
  std::vector<std::pair<double, double>> rows;  // (kappa / gamma_ref, trace distance)
  std::string verdict;                          // "monotone", "non-monotone", "insufficient"
};

/// Sweep kappa = ratio * gamma_ref at the spec's fixed r0 and compare the two
/// simulations at t_probe.
EliminationTable elimination_error(const FeedbackLoopSpec& spec, double gamma_ref,
                                   const std::vector<double>& kappa_ratios, double t_probe,
                                   const OracleConfig& cfg);

}  // namespace qcfb
