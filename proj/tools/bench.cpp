// Micro-benchmark for the multi-depth window coder: times the scanner's
// hot pattern (reset + push a full window) over random data.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "atyp/bits.hpp"
#include "atyp/ctw.hpp"
#include "atyp/rng.hpp"

int main(int argc, char** argv) {
  const unsigned d_max = argc > 1 ? unsigned(std::atoi(argv[1])) : 16;
  const std::size_t window = argc > 2 ? std::size_t(std::atoll(argv[2])) : 512;
  const std::size_t windows = argc > 3 ? std::size_t(std::atoll(argv[3])) : 2000;
  const bool per_push_best = argc > 4 ? std::atoi(argv[4]) != 0 : true;

  atyp::Rng rng(0xBE7CULL);
  std::vector<atyp::Bit> data(window + windows);
  for (auto& b : data) b = rng.next_fair_bit();

  // Mirrors the scanner's pattern: reset per start, push the window, read the
  // depth-minimized length at every window length past a minimum.
  const std::size_t l_min = 16;
  atyp::DepthSweepCoder coder(d_max);
  double sink = 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t s = 0; s < windows; ++s) {
    coder.reset();
    for (std::size_t i = 0; i < window; ++i) {
      coder.push(data[s + i]);
      if (per_push_best && i + 1 >= l_min) sink += coder.best_bits();
    }
    if (!per_push_best) sink += coder.best_bits();
  }
  const auto t1 = std::chrono::steady_clock::now();
  const double ns =
      double(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0)
                 .count());
  const double pushes = double(windows) * double(window);
  std::printf("d_max=%u window=%zu windows=%zu  %.1f ns/push  %.2f s total  "
              "(checksum %.3f)\n",
              d_max, window, windows, ns / pushes, ns * 1e-9, sink);
  return 0;
}
