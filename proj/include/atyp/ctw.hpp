#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "atyp/bits.hpp"
#include "atyp/codelength.hpp"

// Context-tree weighting over binary sequences: a reference tree that keeps
// per-node log-domain probabilities, the depth-minimized in-itself code
// length built on it, and a multi-depth sweep engine that evaluates every
// tree depth 0..d_max in one pass (used by the scanner; tested equivalent to
// the reference).
//
// Context convention everywhere: contexts are passed most-recent-first, i.e.
// context[0] is the symbol immediately preceding the one being coded.
namespace atyp {

// Header cost of announcing a tree depth: log*(D), with log*(0) defined as 0.
double depth_header_bits(unsigned depth);

// Binary context tree of fixed maximum depth.  Nodes are created lazily; an
// absent child stands for a subtree that has processed no symbols (P_w = 1).
// After every update each stored node satisfies the weighting recursion
//   P_w = P_e                         at maximum depth,
//   P_w = 1/2 P_e + 1/2 P_w(0s)P_w(1s) elsewhere.
//
// Symbols whose full context is unavailable (fewer than depth() preceding
// symbols supplied) update counts only along the realizable part of the
// context path; the weighting recursion is then restored over the nodes that
// exist.  The code length is always -log2 of the root weighted probability.
class ContextTree {
 public:
  explicit ContextTree(unsigned depth);

  // Codes one symbol given its preceding context (most-recent-first; only the
  // first min(depth, context.size()) entries are used).  Returns the ratio of
  // root weighted probabilities after/before.  With a full-length context the
  // two possible ratios sum to one (a proper predictive); at shorter contexts
  // they may sum to slightly more.
  double update(BitSpan context_recent_first, Bit symbol);

  unsigned depth() const { return depth_; }
  std::uint64_t symbols_processed() const { return symbols_; }
  std::size_t node_count() const { return pool_.size(); }

  // -log2 of the root weighted block probability of everything processed.
  double codelength() const { return -pool_[0].log2_pw; }

  void reset();

  // Inspection (tests, freezing).  Node ids are dense indices; id 0 is the
  // root.  Child ids are -1 when absent.
  struct NodeView {
    KTCounts counts;
    double log2_pe = 0.0;
    double log2_pw = 0.0;
    unsigned depth = 0;
    std::array<std::int64_t, 2> child = {-1, -1};
  };
  NodeView node(std::size_t id) const;

 private:
  struct Node {
    std::uint32_t child[2] = {kAbsent, kAbsent};
    KTCounts counts;
    double log2_pe = 0.0;
    double log2_pw = 0.0;
    std::uint8_t depth = 0;
  };
  static constexpr std::uint32_t kAbsent = 0xffffffffu;

  double child_product_log2(const Node& n) const;

  unsigned depth_;
  std::vector<Node> pool_;
  std::uint64_t symbols_ = 0;
};

// Processes x with a depth-D tree and returns -log2 of the root weighted
// block probability.  initial_context holds the symbols that precede x in
// natural stream order (may be shorter than D or empty); leading symbols of x
// beyond the available context update only the realizable part of their path
// as described above.
double ctw_codelength(BitSpan x, unsigned depth, BitSpan initial_context = {});

// In-itself description cost of x:
//   min over D in [0, d_max] of (ctw_codelength(x, D) + log*(D)) + log*(l).
// Ties in the minimization resolve to the smaller depth.  x must be
// non-empty.  The tree is rebuilt per depth (reference path).
struct AtypicalCodeLength {
  double total_bits = 0.0;    // everything, headers included
  unsigned best_depth = 0;
  double ctw_bits = 0.0;      // code length at best_depth, headers excluded
  double depth_header = 0.0;  // log*(best_depth)
  double length_header = 0.0; // log*(l)
};
AtypicalCodeLength atypical_codelength(BitSpan x, unsigned d_max);

// Evaluates ctw_codelength(window, d) — the root weighted code length of the
// depth-d tree — for every d in [0, d_max] simultaneously while the window
// grows one symbol at a time (standalone window semantics: no initial
// context).  Per-node probabilities are kept as linear-domain ratios
// beta = P_w(0s)P_w(1s)/P_e(s), clamped to [1e-250, 1e250]; at the default
// window sizes the clamp never engages and the results match the reference
// within accumulated rounding.
class DepthSweepCoder {
 public:
  explicit DepthSweepCoder(unsigned d_max);

  void reset();
  void push(Bit symbol);
  std::uint64_t size() const { return pushed_; }
  unsigned d_max() const { return d_max_; }

  // == ctw_codelength(window so far, d), within rounding.
  double codelength_at(unsigned d) const {
    return len_[d] - std::log2(prod_[d]);
  }

  // Writes codelength_at(d) for d = 0..d_max into out (length d_max+1) using
  // a vectorized polynomial log2 (absolute error well under 1e-10).
  void codelengths(double* out) const;

  // min over d of codelength_at(d) + depth_header_bits(d); smaller depth wins
  // ties.  The log*(l) length header is NOT included.
  struct Best {
    double bits = 0.0;
    unsigned depth = 0;
  };
  Best best_with_depth_header() const;

  // Value of best_with_depth_header().bits without the argmin bookkeeping;
  // this is the scanner's per-position hot call.
  double best_bits() const;

 private:
  static constexpr std::uint32_t kAbsent = 0xffffffffu;
  static constexpr unsigned kLane = 8;  // fold blocks are 8 doubles wide

  std::uint32_t create_node(std::uint32_t parent, Bit b);
  // ISA-specialized fold+accumulate for full-context pushes with d_max <= 16;
  // defined only when the build targets AVX-512.
  void fold_avx512(Bit symbol);
  template <unsigned Lanes>
  double best_bits_fixed() const;  // compile-time lane count
  double best_bits_generic() const;

  unsigned d_max_;
  unsigned padded_;       // d_max+1 rounded up to a lane multiple
  unsigned lane_words_;   // beta block size per node, in 8-double lanes

  // node records, four words each: zeros, ones, child0, child1 — one cache
  // line serves the walk's count read, count write, and child lookup
  std::vector<std::uint32_t> nodes_;
  std::size_t node_count_ = 0;

  // per-node beta block in tree-aligned lanes: entry i (within the block of
  // the node at path depth k, k <= i < d_max) belongs to the depth-(i+1)
  // tree, so every block load/store is a full aligned lane
  struct alignas(64) Lane8 {
    double v[8];
  };
  std::vector<Lane8> beta_;
  std::vector<double> len_;   // flushed bits per tree depth (lane-padded)
  std::vector<double> prod_;  // pending linear-domain factor (lane-padded)
  std::vector<double> depth_header_;  // lane-padded
  std::vector<Bit> recent_;           // ring of the last d_max symbols
  std::size_t recent_mask_ = 0;       // ring size is a power of two
  std::uint64_t pushed_ = 0;

  // scratch, sized for the deepest path
  std::vector<std::size_t> boff_;  // beta block offset per path depth, doubles
  std::vector<double> ktp_;
  std::vector<double> inv_ktp_;
  std::vector<double> mix_;  // pending ratio per tree depth (lane-padded)

  // reciprocal tables indexed by counts: 1/(n+1) and 1/(2n+1)
  std::vector<double> recip_n1_;
  std::vector<double> recip_odd_;
  void grow_tables(std::uint32_t need);
};

}  // namespace atyp
