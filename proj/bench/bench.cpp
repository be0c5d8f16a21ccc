// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <vector>

#include "bsrd/coupled_system.hpp"
#include "bsrd/fem.hpp"
#include "bsrd/mesh.hpp"
#include "bsrd/sparse.hpp"
#include "bsrd/stability.hpp"

using namespace bsrd;

namespace {

const BulkSurfaceMesh& mesh_at(int level) {
  static std::vector<BulkSurfaceMesh> cache(kMaxRefinement + 1);
  auto& m = cache[static_cast<std::size_t>(level)];
  if (m.vertices.empty()) m = generate_ball_mesh(level);
  return m;
}

// Newton matrix of the full model: the operator the linear solver sees.
const CsrMatrix& newton_matrix_at(int level) {
  static std::vector<CsrMatrix> cache(kMaxRefinement + 1);
  auto& a = cache[static_cast<std::size_t>(level)];
  if (a.rows == 0) {
    const auto ops = assemble_operators(mesh_at(level));
    BulkSurfaceSystem sys(ops, ModelParams::reference(20.0, 20.0));
    std::vector<double> y(static_cast<std::size_t>(sys.size()), 1.0);
    a = sys.newton_matrix(y, 1.0, 1e-4);
  }
  return a;
}

template <bool Parallel>
void BM_Spmv(benchmark::State& state) {
  const auto& a = newton_matrix_at(static_cast<int>(state.range(0)));
  std::vector<double> x(static_cast<std::size_t>(a.cols), 1.0), y(static_cast<std::size_t>(a.rows));
  for (auto _ : state) {
    if constexpr (Parallel) spmv_omp(a, x.data(), y.data());
    else spmv_serial(a, x.data(), y.data());
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * a.nnz());
}

template <AssemblyMode Mode>
void BM_Assembly(benchmark::State& state) {
  const auto& mesh = mesh_at(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto ops = assemble_operators(mesh, Mode);
    benchmark::DoNotOptimize(ops.stiffness_bulk.values.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(mesh.tets.size()));
}

void BM_DispersionScan(benchmark::State& state) {
  const auto p = ModelParams::reference(20.0, 20.0);
  const auto j = reduced_jacobian(p.kinetics, p.coupling, false);
  const int l_max = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto t = dispersion_scan(j, p.diffusion, p.kinetics, l_max);
    benchmark::DoNotOptimize(t.rows.data());
  }
  state.SetItemsProcessed(state.iterations() * (l_max + 1));
}

}  // namespace

BENCHMARK(BM_Spmv<false>)->Name("spmv/serial")->DenseRange(2, 4)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Spmv<true>)->Name("spmv/omp")->DenseRange(2, 4)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Assembly<AssemblyMode::Serial>)
    ->Name("assembly/serial")
    ->DenseRange(2, 4)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Assembly<AssemblyMode::OpenMP>)
    ->Name("assembly/omp")
    ->DenseRange(2, 4)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DispersionScan)->Name("dispersion_scan")->Arg(50)->Arg(1000);

BENCHMARK_MAIN();
