#include <benchmark/benchmark.h>

#include <cmath>

#include "qcfb/feedback_loop.hpp"
#include "qcfb/fock.hpp"
#include "qcfb/integrator.hpp"
#include "qcfb/netlist.hpp"
#include "qcfb/observables.hpp"
#include "qcfb/steady_state.hpp"

using namespace qcfb;

namespace {

// quartic resonator with decay, the heaviest single-mode model the CLI ships
EffectiveModel quartic_model(const RegistryPtr& reg) {
  const auto x = OperatorExpr::position(reg, "a");
  const double tp = 2 * M_PI;
  OperatorExpr H = OperatorExpr::number(reg, "a") * (100 * tp) + x * (20 * tp) + pow(x, 2) * (20 * tp) +
                   pow(x, 3) * (63.25 * tp) + pow(x, 4) * (63.25 * tp);
  EffectiveModel m{H, {}, std::nullopt};
  m.channels.push_back({OperatorExpr::annihilation(reg, "a") * std::sqrt(tp), VacuumBath{}, 1.0});
  return m;
}

}  // namespace

static void BM_OperatorProduct(benchmark::State& state) {
  auto reg = ModeRegistry::create({{"a", 10}, {"b", 10}});
  const auto x = OperatorExpr::position(reg, "a") + OperatorExpr::momentum(reg, "b");
  const auto y = pow(x, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(y * y);
}
BENCHMARK(BM_OperatorProduct)->Arg(2)->Arg(4)->Arg(6);

static void BM_HighGainLimit(benchmark::State& state) {
  auto reg = ModeRegistry::create({{"a", 10}});
  const auto x = OperatorExpr::position(reg, "a");
  FeedbackLoopSpec s{OperatorExpr::number(reg, "a"), M_PI / 2, pow(x, 2), x, AmplifierParams::from_gain(1e3, 1.0),
                     1.0, -M_PI};
  for (auto _ : state) benchmark::DoNotOptimize(high_gain_limit(s));
}
BENCHMARK(BM_HighGainLimit);

static void BM_LiouvillianApply(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  auto reg = ModeRegistry::create({{"a", d}});
  const auto liou = build_liouvillian(quartic_model(reg), *reg);
  const Matrix rho = projector(coherent_ket(d, {1.0, 0.5}));
  Matrix out(d, d);
  for (auto _ : state) {
    liou.apply(rho, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_LiouvillianApply)->Arg(15)->Arg(30)->Arg(60);

static void BM_SteadyStateDense(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  auto reg = ModeRegistry::create({{"a", d}});
  const auto liou = build_liouvillian(quartic_model(reg), *reg);
  for (auto _ : state) benchmark::DoNotOptimize(steady_state(liou));
}
BENCHMARK(BM_SteadyStateDense)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_SteadyStateSparse(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  auto reg = ModeRegistry::create({{"a", d}});
  const auto liou = build_liouvillian(quartic_model(reg), *reg);
  SteadyStateOptions o;
  o.dense_max_dim = 0;
  for (auto _ : state) benchmark::DoNotOptimize(steady_state(liou, o));
}
BENCHMARK(BM_SteadyStateSparse)->Arg(30)->Arg(60)->Unit(benchmark::kMillisecond);

static void BM_IntegrateShort(benchmark::State& state) {
  auto reg = ModeRegistry::create({{"a", 30}});
  const auto liou = build_liouvillian(quartic_model(reg), *reg);
  const DensityMatrix rho0(projector(fock_ket(30, 0)));
  for (auto _ : state) benchmark::DoNotOptimize(integrate(liou, rho0, {0.0, 1e-3}));
}
BENCHMARK(BM_IntegrateShort)->Unit(benchmark::kMillisecond);

static void BM_NonGaussianity(benchmark::State& state) {
  auto reg = ModeRegistry::create({{"a", 30}});
  Matrix rho = 0.5 * projector(fock_ket(30, 1)) + 0.5 * projector(coherent_ket(30, {1.2, 0}));
  for (auto _ : state) benchmark::DoNotOptimize(non_gaussianity(rho, *reg));
}
BENCHMARK(BM_NonGaussianity);

static void BM_ParseNetlist(benchmark::State& state) {
  const char* text =
      "[modes]\na = 30\n[plant]\nH = 100 MHz_over_2pi*n@a\n[loop k]\ntheta = pi/2\n"
      "L = sqrt(1 MHz_over_2pi)*x@a^2\nL_f = sqrt(1 MHz_over_2pi)*n@a\nG0 = 1000\n"
      "A = sqrt(40 MHz_over_2pi)\nphi = 0\n[run]\ntask = steady\nhigh_gain = true\n";
  for (auto _ : state) benchmark::DoNotOptimize(netlist::load(text));
}
BENCHMARK(BM_ParseNetlist);
BENCHMARK_MAIN();
