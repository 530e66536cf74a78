#include <benchmark/benchmark.h>

#include <random>

#include "hibox/boxspline.hpp"
#include "hibox/fem.hpp"
#include "hibox_app/config.hpp"
#include "hibox_app/pipeline.hpp"

using namespace hibox;

namespace {

std::vector<Vec2> points(int n) {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  std::vector<Vec2> p(n);
  for (auto& v : p) v = {u(rng), u(rng)};
  return p;
}

void BM_BoxSplineValue(benchmark::State& st) {
  const auto p = points(1024);
  std::size_t k = 0;
  for (auto _ : st) {
    const Vec2& x = p[k++ & 1023];
    benchmark::DoNotOptimize(quartic::evaluate(x.x(), x.y()));
  }
}
BENCHMARK(BM_BoxSplineValue);

void BM_BoxSplineSecondDerivatives(benchmark::State& st) {
  const auto p = points(1024);
  std::size_t k = 0;
  for (auto _ : st) {
    const Vec2& x = p[k++ & 1023];
    benchmark::DoNotOptimize(quartic::evaluate_fast(0.25, {0, 0}, x.x() / 4, x.y() / 4, 2));
  }
}
BENCHMARK(BM_BoxSplineSecondDerivatives);

void BM_ConvolutionOracle(benchmark::State& st) {
  const auto m = DirectionMatrix::three_directional_quartic();
  const auto p = points(1024);
  std::size_t k = 0;
  for (auto _ : st) {
    const Vec2& x = p[k++ & 1023];
    benchmark::DoNotOptimize(evaluate_oracle(m, x.x(), x.y()));
  }
}
BENCHMARK(BM_ConvolutionOracle);

app::Discretization hexagon(int levels) {
  return app::discretize(app::make_preset("hexagon"), "predefined", levels, StripKind::THBox, Variant::THBox);
}

void BM_THBoxBasis(benchmark::State& st) {
  const auto d = hexagon(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(thbox_basis(d.mesh));
  st.counters["dof"] = static_cast<double>(d.V.size());
}
BENCHMARK(BM_THBoxBasis)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

void BM_THBoxStrip(benchmark::State& st) {
  const auto d = hexagon(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(make_strip(d.mesh, StripKind::THBox));
}
BENCHMARK(BM_THBoxStrip)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

void BM_Assemble(benchmark::State& st) {
  const auto preset = app::make_preset("hexagon");
  const auto d = hexagon(static_cast<int>(st.range(0)));
  const auto ps = preset.problem(d.mesh, app::RunConfig{});
  for (auto _ : st) benchmark::DoNotOptimize(assemble(ps, d.mesh, d.V, d.strip, d.W, preset.map));
  st.counters["dof"] = static_cast<double>(d.V.size());
}
BENCHMARK(BM_Assemble)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

void BM_Solve(benchmark::State& st) {
  const auto preset = app::make_preset("hexagon");
  const auto d = hexagon(4);
  const auto sys = assemble(preset.problem(d.mesh, app::RunConfig{}), d.mesh, d.V, d.strip, d.W, preset.map);
  const auto kind = st.range(0) == 0 ? SolverKind::Schur : SolverKind::Monolithic;
  for (auto _ : st) benchmark::DoNotOptimize(solve(sys, kind));
  st.SetLabel(st.range(0) == 0 ? "schur" : "monolithic");
}
BENCHMARK(BM_Solve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
