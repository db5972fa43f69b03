#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "atyp/bits.hpp"
#include "atyp/frozen.hpp"
#include "atyp/iid.hpp"

// Sliding atypical-subsequence detector.  For every start position n the
// scanner grows one in-itself coder over x[n], x[n+1], ... and reports
//
//   delta(n) = min over l in [l_min, min(l_max, N-n)] of
//              [ atypical cost of x[n..n+l) + log*(l) - typical cost ]
//
// where the atypical cost is the depth-swept context-tree code length
// (depth header included) and the typical cost is a cumulative-difference
// read off a prefix-sum table, so the window x[n..n+l) is charged exactly
// what the typical coder pays for those symbols with their in-stream
// context.  Positions with delta(n) < -tau are flagged.
namespace atyp {

struct ScanConfig {
  std::size_t l_min = 16;
  std::size_t l_max = 512;
  unsigned d_max = 16;
  // Flagging threshold in bits; ranking works without it.
  std::optional<double> tau;
  // Exact pruning: subsequent window lengths whose lower bound (current
  // atypical cost is non-decreasing in l) cannot beat the running minimum
  // are pushed through the coder but not evaluated.  Never changes any
  // reported value; the switch exists so tests can run both ways.
  bool prune_with_lower_bound = true;
};

// Per-start scores and witnesses.  Entry i describes start position i; there
// are N - l_min + 1 entries.
struct ScanProfile {
  std::size_t input_length = 0;
  ScanConfig config;
  std::vector<double> delta;          // minimized difference, bits
  std::vector<std::uint32_t> best_l;  // earliest window length achieving it
  std::vector<std::uint32_t> best_d;  // tree depth chosen at that window

  std::size_t start_count() const { return delta.size(); }
};

struct FlaggedSegment {
  std::size_t start = 0;
  std::size_t length = 0;
  double delta = 0.0;
  unsigned depth = 0;
};

// Cumulative typical cost: out[k] = bits the typical coder pays for x[0..k),
// so a window costs out[n+l] - out[n].  out[0] = 0, size |x| + 1.
std::vector<double> typical_prefix(BitSpan x, const IIDTypicalModel& model);
std::vector<double> typical_prefix(BitSpan x, const FrozenModel& model);

// Core scan against an arbitrary prefix-sum table (size |x| + 1,
// non-decreasing, starting at 0).  Workers > 1 split the start positions
// into contiguous ranges; results are bit-identical for any worker count.
ScanProfile scan_with_typical_costs(BitSpan x,
                                    const std::vector<double>& typical_bits,
                                    const ScanConfig& cfg,
                                    unsigned workers = 1);

ScanProfile scan(BitSpan x, const IIDTypicalModel& model,
                 const ScanConfig& cfg, unsigned workers = 1);
ScanProfile scan(BitSpan x, const FrozenModel& model, const ScanConfig& cfg,
                 unsigned workers = 1);

// Positions with delta < -tau, merged when their witness windows overlap
// (each merged run is reported by its minimum-score witness), sorted by
// score ascending (ties: earlier start first).
std::vector<FlaggedSegment> flag_segments(const ScanProfile& profile,
                                          double tau);

// Random-walk representation: S[0] = 0, S[k] = sum of (2 x[i] - 1), i < k.
std::vector<std::int64_t> random_walk(BitSpan x);

// Delimiter-separated exports; one header comment line with the config, one
// line naming the columns, then the rows.
void write_profile_csv(std::ostream& out, const ScanProfile& profile);
void write_flags_csv(std::ostream& out, const ScanProfile& profile,
                     const std::vector<FlaggedSegment>& segments, double tau);

}  // namespace atyp
