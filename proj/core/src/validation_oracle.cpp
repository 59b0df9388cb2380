#include "qcfb/validation_oracle.hpp"

#include <cmath>

#include "qcfb/errors.hpp"
#include "qcfb/observables.hpp"

namespace qcfb {

std::string plant_mode_label(const FeedbackLoopSpec& spec) {
  const auto& reg = *spec.registry();
  if (reg.size() != 2 || !reg.find(spec.amp_mode))
    throw ValidationError("oracle needs exactly one plant mode plus the amplifier mode '" + spec.amp_mode + "'");
  return reg.mode(0).label == spec.amp_mode ? reg.mode(1).label : reg.mode(0).label;
}

namespace {

Matrix initial_plant(const OracleConfig& cfg) {
  if (cfg.plant_initial.size() == 0) return projector(fock_ket(cfg.plant_truncation, 0));
  if (cfg.plant_initial.rows() != cfg.plant_truncation)
    throw ValidationError("oracle: initial plant state has the wrong dimension");
  return cfg.plant_initial;
}

void check_leak(const Matrix& rho, const ModeRegistry& reg, double threshold, double t) {
  const auto leak = truncation_leak(rho, reg);
  for (std::size_t i = 0; i < leak.size(); ++i)
    if (leak[i] > threshold)
      throw NumericalError("truncation leak " + std::to_string(leak[i]) + " on mode '" + reg.mode(i).label +
                           "' at t = " + std::to_string(t));
}

}  // namespace

std::vector<DensityMatrix> full_loop_simulate(const FeedbackLoopSpec& spec, const OracleConfig& cfg,
                                              const std::vector<double>& t_grid) {
  const std::string plant = plant_mode_label(spec);
  auto reg = spec.registry()->with_truncation(plant, cfg.plant_truncation)->with_truncation(spec.amp_mode,
                                                                                            cfg.amp_truncation);
  const auto g = compose_loop_full(spec);
  const auto liou = build_liouvillian(g, *reg);
  const std::size_t pi = reg->index(plant);
  const Matrix vac = projector(fock_ket(cfg.amp_truncation, 0));
  const Matrix p0 = initial_plant(cfg);
  Matrix rho0 = pi == 0 ? kron(p0, vac) : kron(vac, p0);
  Integrator integ(cfg.integrator);
  const auto states = integ.integrate(liou, DensityMatrix(rho0), t_grid);
  std::vector<DensityMatrix> out;
  out.reserve(states.size());
  for (std::size_t k = 0; k < states.size(); ++k) {
    check_leak(states[k].matrix(), *reg, cfg.leak_threshold, t_grid[k]);
    out.emplace_back(partial_trace_keep(states[k].matrix(), *reg, pi));
  }
  return out;
}

std::vector<DensityMatrix> eliminated_simulate(const FeedbackLoopSpec& spec, const OracleConfig& cfg,
                                               const std::vector<double>& t_grid) {
  const std::string plant = plant_mode_label(spec);
  auto reg = ModeRegistry::create({{plant, cfg.plant_truncation}});
  const auto m = eliminate_amplifier(spec);
  EffectiveModel local{remap(m.H_eff, reg), {}, std::nullopt};
  for (const auto& ch : m.channels) local.channels.push_back({remap(ch.op, reg), ch.bath, ch.rate_prefactor});
  const auto liou = build_liouvillian(local, *reg);
  Integrator integ(cfg.integrator);
  auto states = integ.integrate(liou, DensityMatrix(initial_plant(cfg)), t_grid);
  for (std::size_t k = 0; k < states.size(); ++k) check_leak(states[k].matrix(), *reg, cfg.leak_threshold, t_grid[k]);
  return states;
}

EliminationTable elimination_error(const FeedbackLoopSpec& spec, double gamma_ref,
                                   const std::vector<double>& kappa_ratios, double t_probe,
                                   const OracleConfig& cfg) {
  for (std::size_t i = 1; i < kappa_ratios.size(); ++i)
    if (!(kappa_ratios[i] > kappa_ratios[i - 1])) throw ValidationError("kappa ratios must increase");
  const std::vector<double> grid{0.0, t_probe};
  const double r0 = spec.amp.r0();
  // the eliminated model depends on r0 only, so one reference serves every ratio
  const Matrix ref = eliminated_simulate(spec, cfg, grid).back().matrix();
  EliminationTable table;
  for (double ratio : kappa_ratios) {
    FeedbackLoopSpec s = spec;
    const double kappa = ratio * gamma_ref;
    s.amp = AmplifierParams::from_kappa_xi(kappa, kappa * std::tanh(0.5 * r0));
    const Matrix full = full_loop_simulate(s, cfg, grid).back().matrix();
    table.rows.emplace_back(ratio, trace_distance(full, ref));
  }
  if (table.rows.size() < 2) {
    table.verdict = "insufficient";
  } else {
    bool mono = true;
    for (std::size_t i = 1; i < table.rows.size(); ++i) mono = mono && table.rows[i].second < table.rows[i - 1].second;
    table.verdict = mono ? "monotone" : "non-monotone";
  }
  return table;
}

}  // namespace qcfb
