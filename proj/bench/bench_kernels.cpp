// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include "fibermatch/interconnect.hpp"

using namespace fibermatch;

namespace {

const SmfSpec kSmf = SmfSpec::thorlabs_780hp();
const GifSpec kGif = GifSpec::thorlabs_gif625();

void BM_MapParallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto grid = efficiency_map(kSmf, kGif, SweepRange{100e-6, 500e-6, n}, SweepRange{5e-6, 30e-6, n});
    benchmark::DoNotOptimize(grid.eta.data());
  }
  state.counters["cells"] = static_cast<double>(n * n);
}

void BM_MapSerialReference(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto grid = efficiency_map_serial(kSmf, kGif, SweepRange{100e-6, 500e-6, n}, SweepRange{5e-6, 30e-6, n});
    benchmark::DoNotOptimize(grid.eta.data());
  }
  state.counters["cells"] = static_cast<double>(n * n);
}

struct OffsetFields {
  RadialField exit;
  RadialField hcf;
};

const OffsetFields& offset_fields() {
  static const OffsetFields fields = [] {
    const auto radii = uniform_radial_grid(4.0 * kGif.core_radius);
    const auto e = expand_source(smf_field(kSmf, radii), kGif);
    return OffsetFields{propagate(e, 248e-6, radii), hcf_mode(HcfSpec{17.375e-6, 1.0}, 0, 1, radii)};
  }();
  return fields;
}

void BM_OffsetParallel(benchmark::State& state) {
  const auto& f = offset_fields();
  for (auto _ : state) benchmark::DoNotOptimize(offset_efficiency(f.exit, f.hcf, 2e-6));
}

void BM_OffsetSerialReference(benchmark::State& state) {
  const auto& f = offset_fields();
  for (auto _ : state) benchmark::DoNotOptimize(offset_efficiency_serial(f.exit, f.hcf, 2e-6));
}

}  // namespace

BENCHMARK(BM_MapParallel)->Arg(51)->Arg(201)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MapSerialReference)->Arg(11)->Arg(21)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OffsetParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OffsetSerialReference)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
