#include "atyp/frozen.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>
#include <utility>

#include "atyp/ctw.hpp"

namespace atyp {

namespace {

constexpr char kMagic[8] = {'A', 'T', 'Y', 'P', 'F', 'Z', 'N', '1'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::size_t kHeaderBytes = 8 + 4 + 4 + 8;
constexpr std::size_t kRecordBytes = 1 + 8 + 8 + 8 + 8;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(p[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(p[i]) << (8 * i);
  return v;
}

std::uint64_t fnv1a(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

FrozenModel FrozenModel::train(const std::vector<BitSequence>& sequences,
                               unsigned depth) {
  if (sequences.empty()) {
    throw std::invalid_argument("FrozenModel::train: empty training set");
  }
  const bool any_codable =
      std::any_of(sequences.begin(), sequences.end(),
                  [&](const BitSequence& s) { return s.size() > depth; });
  if (!any_codable) {
    throw std::invalid_argument(
        "FrozenModel::train: no training sequence is longer than the depth; "
        "nothing to code");
  }

  ContextTree tree(depth);
  std::vector<Bit> ctx(depth);
  for (const BitSequence& seq : sequences) {
    if (seq.size() <= depth) continue;
    for (std::size_t t = depth; t < seq.size(); ++t) {
      for (unsigned k = 0; k < depth; ++k) ctx[k] = seq[t - 1 - k];
      tree.update(BitSpan(ctx.data(), depth), seq[t]);
    }
  }

  FrozenModel model;
  model.depth_ = depth;
  model.nodes_.resize(tree.node_count());
  for (std::size_t id = 0; id < tree.node_count(); ++id) {
    const ContextTree::NodeView v = tree.node(id);
    Node& n = model.nodes_[id];
    n.counts = v.counts;
    n.depth = v.depth;
    for (int b = 0; b < 2; ++b) {
      n.child[b] =
          v.child[b] < 0 ? kAbsent : std::uint32_t(v.child[b]);
    }
    n.q1 = kt_predict(v.counts, 1);
    if (v.depth == depth) {
      n.w1 = 1.0;  // no deeper model exists at maximum depth
    } else {
      double log2_children = 0.0;
      for (int b = 0; b < 2; ++b) {
        if (v.child[b] >= 0) {
          log2_children += tree.node(std::size_t(v.child[b])).log2_pw;
        }
      }
      // w1 = Pe / (Pe + Pw(0s) Pw(1s)) = 1 / (1 + 2^r).  exp2 saturating to
      // inf or 0 lands on the correct limit.
      const double r = log2_children - v.log2_pe;
      n.w1 = 1.0 / (1.0 + std::exp2(r));
    }
  }
  return model;
}

double FrozenModel::predict_one(BitSpan context_recent_first) const {
  // Distributed form of the recursive mixture: walking down the context,
  // node k contributes w1*q1 scaled by prod_{j<k} (1 - w1_j); whatever ends
  // the walk (leaf q1, or 1/2 for a missing child / exhausted context)
  // absorbs the remaining coefficient.
  double acc = 0.0;
  double coeff = 1.0;
  std::uint32_t id = 0;
  for (unsigned k = 0;; ++k) {
    const Node& n = nodes_[id];
    if (n.depth == depth_) return acc + coeff * n.q1;
    acc += coeff * n.w1 * n.q1;
    coeff *= 1.0 - n.w1;
    if (k >= context_recent_first.size()) break;
    const std::uint32_t child = n.child[context_recent_first[k]];
    if (child == kAbsent) break;
    id = child;
  }
  return acc + coeff * 0.5;
}

std::vector<double> FrozenModel::cumulative_bits(
    BitSpan x, BitSpan preceding_context) const {
  std::vector<double> out(x.size() + 1, 0.0);
  std::vector<Bit> ctx(depth_);
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    unsigned avail = 0;
    for (unsigned k = 0; k < depth_; ++k) {
      if (k < i) {
        ctx[avail++] = x[i - 1 - k];
      } else if (k - i < preceding_context.size()) {
        ctx[avail++] = preceding_context[k - i];
      } else {
        break;
      }
    }
    const double p1 = predict_one(BitSpan(ctx.data(), avail));
    total += -std::log2(x[i] ? p1 : 1.0 - p1);
    out[i + 1] = total;
  }
  return out;
}

double FrozenModel::codelength(BitSpan x, BitSpan preceding_context) const {
  return cumulative_bits(x, preceding_context).back();
}

FrozenModel::NodeView FrozenModel::node(std::size_t id) const {
  if (id >= nodes_.size()) {
    throw std::out_of_range("FrozenModel::node: bad id");
  }
  const Node& n = nodes_[id];
  NodeView v;
  v.counts = n.counts;
  v.w1 = n.w1;
  v.q1 = n.q1;
  v.depth = n.depth;
  for (int b = 0; b < 2; ++b) {
    v.child[b] =
        n.child[b] == kAbsent ? -1 : std::int64_t(n.child[b]);
  }
  return v;
}

std::vector<std::uint8_t> FrozenModel::serialize() const {
  if (depth_ > 64) {
    throw std::invalid_argument(
        "FrozenModel::serialize: persistence supports depth <= 64");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + nodes_.size() * kRecordBytes);
  out.insert(out.end(), kMagic, kMagic + 8);
  put_u32(out, kFormatVersion);
  put_u32(out, depth_);
  put_u64(out, nodes_.size());

  // Canonical order: pre-order depth-first, 0-child before 1-child.  Each
  // frame carries the context path from the root, packed LSB-first.
  struct Frame {
    std::uint32_t id;
    std::uint64_t path;
  };
  std::vector<Frame> stack = {{0, 0}};
  std::size_t emitted = 0;
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    const Node& n = nodes_[f.id];
    out.push_back(std::uint8_t(n.depth));
    put_u64(out, f.path);
    put_u64(out, std::bit_cast<std::uint64_t>(n.w1));
    put_u64(out, n.counts.zeros);
    put_u64(out, n.counts.ones);
    ++emitted;
    for (int b = 1; b >= 0; --b) {
      if (n.child[b] != kAbsent) {
        stack.push_back(
            {n.child[b], f.path | (std::uint64_t(b) << n.depth)});
      }
    }
  }
  if (emitted != nodes_.size()) {
    throw std::logic_error(
        "FrozenModel::serialize: node pool contains unreachable nodes");
  }
  return out;
}

FrozenModel FrozenModel::deserialize(std::span<const std::uint8_t> bytes) {
  const auto fail = [](const std::string& what) {
    throw std::runtime_error("FrozenModel::deserialize: " + what);
  };
  if (bytes.size() < kHeaderBytes) fail("truncated header");
  if (std::memcmp(bytes.data(), kMagic, 8) != 0) fail("bad magic");
  const std::uint32_t version = get_u32(bytes.data() + 8);
  if (version != kFormatVersion) {
    fail("unsupported format version " + std::to_string(version));
  }
  const std::uint32_t depth = get_u32(bytes.data() + 12);
  if (depth > 64) fail("depth exceeds 64");
  const std::uint64_t count = get_u64(bytes.data() + 16);
  if (count == 0) fail("empty model");
  if (bytes.size() != kHeaderBytes + count * kRecordBytes) {
    fail("size does not match node count");
  }

  FrozenModel model;
  model.depth_ = depth;
  model.nodes_.resize(count);
  // (depth, path) -> node id, for linking each record to its parent.
  std::map<std::pair<std::uint32_t, std::uint64_t>, std::uint32_t> by_path;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint8_t* rec = bytes.data() + kHeaderBytes + i * kRecordBytes;
    const std::uint32_t d = rec[0];
    const std::uint64_t path = get_u64(rec + 1);
    const double w1 = std::bit_cast<double>(get_u64(rec + 9));
    Node& n = model.nodes_[i];
    n.counts.zeros = get_u64(rec + 17);
    n.counts.ones = get_u64(rec + 25);
    n.depth = d;
    n.w1 = w1;
    n.q1 = kt_predict(n.counts, 1);

    if (d > depth) fail("node deeper than the model");
    if (d < 64 && (path >> d) != 0) fail("path has bits beyond its depth");
    if (!(w1 >= 0.0 && w1 <= 1.0)) fail("w1 outside [0, 1]");
    if (d == depth && w1 != 1.0) fail("leaf with w1 != 1");
    if (n.counts.total() == 0) fail("node with no training counts");
    if (i == 0) {
      if (d != 0 || path != 0) fail("first record is not the root");
    } else {
      if (d == 0) fail("duplicate root");
      const auto parent =
          by_path.find({d - 1, path & ((std::uint64_t(1) << (d - 1)) - 1)});
      if (parent == by_path.end()) fail("record precedes its parent");
      const unsigned bit = unsigned((path >> (d - 1)) & 1);
      std::uint32_t& slot = model.nodes_[parent->second].child[bit];
      if (slot != kAbsent) fail("duplicate context path");
      slot = std::uint32_t(i);
    }
    if (!by_path.emplace(std::make_pair(d, path), std::uint32_t(i)).second) {
      fail("duplicate context path");
    }
  }
  return model;
}

void FrozenModel::save_file(const std::string& path) const {
  const std::vector<std::uint8_t> bytes = serialize();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            std::streamsize(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

FrozenModel FrozenModel::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::vector<std::uint8_t> bytes(
      (std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw std::runtime_error("read failed: " + path);
  return deserialize(bytes);
}

std::uint64_t FrozenModel::state_digest() const { return fnv1a(serialize()); }

}  // namespace atyp
