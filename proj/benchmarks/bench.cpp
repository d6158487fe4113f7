#include <benchmark/benchmark.h>

#include <string>

#include "modquad/actuation.hpp"
#include "modquad/config.hpp"
#include "modquad/control.hpp"
#include "modquad/simulation.hpp"

namespace {

using namespace modquad;

struct Loaded {
  StructureConfig config;
  StructureModel structure;
  ActuationAnalysis analysis;
};

Loaded load(const std::string& name) {
  Loaded l;
  l.config = load_config(std::string(MODQUAD_FIXTURE_DIR) + "/" + name);
  l.structure = build_structure(l.config);
  l.analysis = analyze_structure(l.structure, l.config.f_max);
  return l;
}

const char* kFixtures[] = {"exp1.cfg", "exp2.cfg", "exp4.cfg", "sim1.cfg"};

void BM_Analyze(benchmark::State& state) {
  const Loaded l = load(kFixtures[state.range(0)]);
  for (auto _ : state) benchmark::DoNotOptimize(analyze_structure(l.structure, l.config.f_max));
  state.SetLabel(kFixtures[state.range(0)]);
}
BENCHMARK(BM_Analyze)->DenseRange(0, 3);

void BM_Allocate(benchmark::State& state) {
  const Loaded l = load(kFixtures[state.range(0)]);
  const Allocator alloc(to_f_frame(l.structure.design, l.analysis.f_frame), l.analysis.dimensioning);
  Wrench6 w;
  w << 0.1, -0.2, l.structure.mass * kGravity, 0.01, 0.02, -0.01;
  for (auto _ : state) benchmark::DoNotOptimize(alloc(w));
  state.SetLabel(kFixtures[state.range(0)]);
}
BENCHMARK(BM_Allocate)->DenseRange(0, 3);

void BM_ControlStep(benchmark::State& state) {
  const Loaded l = load(kFixtures[state.range(0)]);
  GeometricController ctl(l.structure, l.analysis, l.config.gains);
  const Trajectory traj(l.config.scenario->trajectory);
  VehicleState x;
  x.position = Vec3(0.01, -0.02, 0.5);
  x.attitude = l.analysis.f_frame.transpose();
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ctl.update(x, traj.setpoint(t, l.analysis.controllable_dof), 0.002));
    t += 0.002;
  }
  state.SetLabel(kFixtures[state.range(0)]);
}
BENCHMARK(BM_ControlStep)->DenseRange(0, 3);

void BM_Step(benchmark::State& state) {
  const Loaded l = load(kFixtures[state.range(0)]);
  const Eigen::VectorXd u = l.analysis.hover_thrust;
  VehicleState x;
  for (auto _ : state) {
    x = step(x, u, l.structure, 0.001);
    benchmark::DoNotOptimize(x);
  }
  state.SetLabel(kFixtures[state.range(0)]);
}
BENCHMARK(BM_Step)->DenseRange(0, 3);

void BM_Scenario(benchmark::State& state) {
  const Loaded l = load(kFixtures[state.range(0)]);
  ScenarioOptions o = scenario_options(l.config);
  o.duration = 5.0;
  const Trajectory traj(l.config.scenario->trajectory);
  for (auto _ : state) benchmark::DoNotOptimize(run_scenario(l.structure, l.analysis, l.config.gains, traj, o));
  state.SetLabel(std::string(kFixtures[state.range(0)]) + ", 5 s");
}
BENCHMARK(BM_Scenario)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
