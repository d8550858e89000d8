// Prints Z_k(delta) for k = 3, 4, 5 and delta = 0, 10, 50, 250, inf, the
// smallest gamma at which e_k of the shifted kappa_gamma kernel turns negative.
// "inf" is evaluated at delta = 1e4 with a Richardson estimate from 1e5.

#include <chrono>
#include <cstdio>
#include <limits>

#include "polygauss/pipeline.hpp"

using namespace polygauss;

int main() {
  const std::vector<double> deltas{0, 10, 50, 250, std::numeric_limits<double>::infinity()};
  std::printf("%-10s %12s %12s %12s\n", "delta", "k=3", "k=4", "k=5");
  std::vector<std::vector<ZscanRow>> columns;
  for (unsigned k : {3u, 4u, 5u}) {
    ZscanOptions o;
    o.ks = {k};
    o.deltas = deltas;
    const auto t0 = std::chrono::steady_clock::now();
    columns.push_back(run_zscan(o));
    std::fprintf(stderr, "k=%u: %.1f s\n", k,
                 std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (std::isinf(deltas[i])) std::printf("%-10s", "inf");
    else std::printf("%-10g", deltas[i]);
    for (const auto& col : columns) {
      const auto& r = col[i];
      if (r.z) std::printf(" %12.5f", *r.z);
      else std::printf(" %12s", "-");
    }
    std::printf("\n");
  }
  std::printf("%-10s", "richardson");
  for (const auto& col : columns) {
    const auto& r = col.back();
    if (r.extrapolated) std::printf(" %12.5f", *r.extrapolated);
    else std::printf(" %12s", "-");
  }
  std::printf("\n");
}
