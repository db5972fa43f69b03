#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "atyp/bits.hpp"
#include "atyp/rng.hpp"
#include "atyp/scanner.hpp"

// Seeded Monte-Carlo studies: false-alarm and miss rates of the fixed-length
// test against their closed-form bounds, the alpha phase transition of the
// generalized threshold, a tree-coder false-alarm decay curve, and the
// frozen-versus-adaptive detection demonstration on 3-state Markov chains.
//
// Determinism contract: every estimate is a pure function of its spec.
// Trial i draws its generator via Rng::for_trial(seed, index) where the
// index encodes (grid point, trial), so results are independent of
// evaluation order and worker scheduling.
namespace atyp {

// Confidence half-widths use a fixed normal quantile (two-sided 99%).
inline constexpr double kConfidenceZ = 2.58;

struct BoundSpec {
  double p = 0.5;    // typical bias
  double p_a = 0.3;  // alternative bias (miss studies)
  double tau = 1.0;  // header bits
  std::vector<std::uint64_t> lengths;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
};

// One grid point: x is the swept quantity (length or alpha), bound is the
// matching closed-form value (NaN when no closed form applies).
struct GridRow {
  double x = 0.0;
  double estimate = 0.0;
  double ci_halfwidth = 0.0;
  double bound = 0.0;
};

// Fraction of iid(p) draws of each length flagged by the deviation form of
// the fixed-length test, |p_hat - p| > approx_threshold(l, tau, p).
// bound = pa_upper_bound (NaN where that form is not evaluable).
std::vector<GridRow> simulate_pa(const BoundSpec& spec);

// Fraction of iid(p_a) draws NOT flagged by the same criterion against
// typical bias p.  Rejects p_a == p.  bound = miss_upper_bound.
std::vector<GridRow> simulate_miss(const BoundSpec& spec);

// Fraction of iid(p) draws flagged by the tree-coder criterion
// (depth-swept code length + log*(l) + tau < typical bits); no closed-form
// bound column.  Decays with l at fixed tau.
std::vector<GridRow> simulate_pa_ctw(const BoundSpec& spec, unsigned d_max);

// For each alpha: draw `seeds` iid-uniform streams (stream s comes from
// Rng::for_trial(master_seed, s), one fair bit per position), flag every
// window (n, l), l <= l_max, whose walk increment satisfies
// |S[n+l] - S[n]| > sqrt(l (2 tau ln2 + alpha ln l)), and report the mean
// fraction of sample positions covered by at least one flagged window.
// ci_halfwidth is over the seed sample; bound is NaN.
std::vector<GridRow> phase_transition(const std::vector<double>& alphas,
                                      double tau, std::size_t l_max,
                                      std::size_t stream_length,
                                      unsigned seeds,
                                      std::uint64_t master_seed);

// Finite-state binary source: when the chain moves i -> j it emits
// emission[i][j].  Entries of -1 mark transitions with zero probability.
struct MarkovSpec {
  std::vector<std::vector<double>> transition;
  std::vector<std::vector<int>> emission;

  // Throws std::invalid_argument unless rows are stochastic (within 1e-12)
  // and every positive-probability transition has a 0/1 emission.
  void validate() const;

  std::size_t state_count() const { return transition.size(); }

  // Three-state cycle staying put 5% of the time; emits the repeating
  // pattern 1 0 1 while cycling.
  static MarkovSpec cycle_pattern_101();
  // Same skeleton, emitting 1 0 0 instead.
  static MarkovSpec cycle_pattern_100();
};

BitSequence markov_bits(const MarkovSpec& spec, std::size_t length, Rng& rng,
                        unsigned start_state = 0);

// Frozen-versus-adaptive comparison.  Trains on the typical chain, builds a
// test stream from the typical chain with an anomalous-chain segment
// spliced in (placement seeded, at least scan.l_max away from both ends;
// segment_length 0 produces a clean stream), and scans it twice against the
// shared in-itself coder: once with the frozen typical model, once with a
// control coder that keeps updating its counts over the test stream.
struct FreezingConfig {
  std::size_t train_length = 100000;
  std::size_t test_length = 10000;
  std::size_t segment_length = 2000;
  unsigned model_depth = 6;
  ScanConfig scan;  // callers usually lower d_max for speed
  std::uint64_t seed = 1;
};

struct FreezingDemo {
  BitSequence test_stream;
  std::size_t segment_start = 0;
  std::size_t segment_length = 0;
  ScanProfile frozen;
  ScanProfile adaptive;
};

FreezingDemo freezing_demo(const MarkovSpec& typical,
                           const MarkovSpec& anomalous,
                           const FreezingConfig& cfg);

// Delimiter-separated grid: comment line with the z quantile, then
// "<x_name>,estimate,ci_halfwidth,bound" rows.
void write_grid_csv(std::ostream& out, std::string_view x_name,
                    const std::vector<GridRow>& rows);

}  // namespace atyp
