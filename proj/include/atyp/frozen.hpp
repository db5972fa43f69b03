#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "atyp/bits.hpp"
#include "atyp/codelength.hpp"

// Trainable typical coder: run context-tree weighting over training data
// once, then freeze the result into a fixed predictive model.  Each context
// node keeps only two numbers: the posterior weight w1 of the memoryless
// hypothesis at that node given the training data, and the frozen KT
// predictive q1 = P(next = 1 | memoryless at this node).  Prediction mixes
// q1 with the deeper model's prediction using w1, descending along the
// context; the deeper branch contributes exactly 1/2 at the first context
// never seen in training (equivalently: at the first missing child) or when
// the available context is exhausted.
//
// A trained model is immutable; it may be shared by any number of threads.
// Context convention matches the rest of the library: most-recent-first.
namespace atyp {

class FrozenModel {
 public:
  // Runs context-tree training over the sequences and freezes the result.
  // The first `depth` symbols of each sequence serve only as context (they
  // are not coded), so every coded symbol sees a full-depth context.
  // Sequences no longer than `depth` contribute nothing.  Throws
  // std::invalid_argument when the training set is empty or no sequence is
  // longer than `depth`.
  static FrozenModel train(const std::vector<BitSequence>& sequences,
                           unsigned depth);

  unsigned depth() const { return depth_; }
  std::size_t node_count() const { return nodes_.size(); }

  // P(next symbol = 1 | context); context is most-recent-first and only its
  // first depth() entries are used.  Always strictly inside (0, 1).
  double predict_one(BitSpan context_recent_first) const;

  // Sum over symbols of -log2 P(symbol | context), with contexts threaded
  // from preceding_context (most-recent-first) into x itself.
  double codelength(BitSpan x, BitSpan preceding_context = {}) const;

  // Prefix sums of the same pass: out[k] = codelength of x[0..k), so the
  // cost of the window x[n..n+l) coded with its in-stream context is
  // out[n+l] - out[n].  out has size |x| + 1; out[0] = 0.
  std::vector<double> cumulative_bits(BitSpan x,
                                      BitSpan preceding_context = {}) const;

  // Inspection for tests.  Ids are dense; id 0 is the root.  Child entries
  // are -1 when absent.
  struct NodeView {
    KTCounts counts;
    double w1 = 1.0;
    double q1 = 0.5;
    unsigned depth = 0;
    std::array<std::int64_t, 2> child = {-1, -1};
  };
  NodeView node(std::size_t id) const;

  // Flat binary serialization (versioned, little-endian, canonical node
  // order); see docs/FORMATS.md.  Retraining on identical data yields
  // byte-identical output.  Requires depth() <= 64.
  std::vector<std::uint8_t> serialize() const;
  static FrozenModel deserialize(std::span<const std::uint8_t> bytes);
  void save_file(const std::string& path) const;
  static FrozenModel load_file(const std::string& path);

  // FNV-1a of serialize(); used to assert that prediction passes leave the
  // model untouched.
  std::uint64_t state_digest() const;

 private:
  FrozenModel() = default;

  static constexpr std::uint32_t kAbsent = 0xffffffffu;

  struct Node {
    KTCounts counts;
    double w1 = 1.0;
    double q1 = 0.5;
    std::uint32_t child[2] = {kAbsent, kAbsent};
    std::uint32_t depth = 0;
  };

  unsigned depth_ = 0;
  std::vector<Node> nodes_;
};

}  // namespace atyp
