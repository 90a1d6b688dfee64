// Serial against OpenMP timings for the parallel kernels.

#include "dtnlab/reference.hpp"
#include "dtnlab/xray.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

#include <map>

using namespace dtnlab;

namespace {

const TriangleMesh& disk_mesh(double h) {
  static std::map<double, TriangleMesh> cache;
  auto it = cache.find(h);
  if (it == cache.end()) it = cache.emplace(h, generate_mesh(ShapeSpec{}, h)).first;
  return it->second;
}

const MetricField& conformal() {
  static const MetricField g = MetricField::from_spec(CatalogSpec::parse("conformal:amplitude=0.3,width=0.5"));
  return g;
}

// Thread count from the benchmark argument; 0 means the OpenMP default.
void set_threads(int n) {
  static const int default_threads = omp_get_max_threads();
  omp_set_num_threads(n > 0 ? n : default_threads);
}

void BM_StiffnessReference(benchmark::State& state) {
  const TriangleMesh& m = disk_mesh(0.01);
  for (auto _ : state) benchmark::DoNotOptimize(reference::assemble_stiffness(m, conformal()));
}
BENCHMARK(BM_StiffnessReference)->Unit(benchmark::kMillisecond);

void BM_StiffnessElements(benchmark::State& state) {
  set_threads(static_cast<int>(state.range(0)));
  const TriangleMesh& m = disk_mesh(0.01);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_stiffness(m, conformal()));
  set_threads(0);
}
BENCHMARK(BM_StiffnessElements)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_DtN(benchmark::State& state) {
  set_threads(static_cast<int>(state.range(0)));
  const Discretization d(disk_mesh(0.03), conformal());
  const PotentialField v = PotentialField::zero(d.mesh().vertex_count());
  for (auto _ : state) benchmark::DoNotOptimize(dtn_matrix(d, v));
  set_threads(0);
}
BENCHMARK(BM_DtN)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_Santalo(benchmark::State& state) {
  const bool parallel = state.range(0) != 0;
  const InfluxQuadrature q = influx_quadrature(conformal(), ShapeSpec{}, 128, 64);
  const PlaneField f = make_plane_field(CatalogSpec::parse("bump"));
  for (auto _ : state) benchmark::DoNotOptimize(santalo_average(conformal(), ShapeSpec{}, f, q, 10.0, parallel));
}
BENCHMARK(BM_Santalo)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
