#include "atyp/ctw.hpp"

#include <algorithm>
#include <cmath>
#include <bit>
#include <cstring>
#include <limits>
#include <stdexcept>

#if defined(__AVX512F__)
#include <immintrin.h>
#define ATYP_HAVE_AVX512 1
#else
#define ATYP_HAVE_AVX512 0
#endif

namespace atyp {

namespace {

// log2(2^x + 2^y), safe for any spread.
double log2_sum_exp2(double x, double y) {
  const double hi = std::max(x, y);
  const double lo = std::min(x, y);
  if (lo - hi < -1080.0) return hi;
  return hi + std::log2(1.0 + std::exp2(lo - hi));
}

}  // namespace

double depth_header_bits(unsigned depth) {
  return depth == 0 ? 0.0 : log_star(depth);
}

// ---------------------------------------------------------------------------
// ContextTree (reference, log-domain)
// ---------------------------------------------------------------------------

ContextTree::ContextTree(unsigned depth) : depth_(depth) {
  if (depth > 64) {
    throw std::invalid_argument("ContextTree: depth must be <= 64");
  }
  pool_.emplace_back();  // root, depth 0
}

void ContextTree::reset() {
  pool_.clear();
  pool_.emplace_back();
  symbols_ = 0;
}

double ContextTree::child_product_log2(const Node& n) const {
  double lc = 0.0;  // absent child: P_w = 1
  if (n.child[0] != kAbsent) lc += pool_[n.child[0]].log2_pw;
  if (n.child[1] != kAbsent) lc += pool_[n.child[1]].log2_pw;
  return lc;
}

double ContextTree::update(BitSpan context, Bit symbol) {
  if (symbol > 1) throw std::invalid_argument("ContextTree: symbol not 0/1");
  const unsigned dd =
      static_cast<unsigned>(std::min<std::size_t>(depth_, context.size()));

  // Walk (and lazily extend) the context path.
  std::array<std::uint32_t, 65> path;
  path[0] = 0;
  for (unsigned k = 1; k <= dd; ++k) {
    const Bit b = context[k - 1];
    if (b > 1) throw std::invalid_argument("ContextTree: context bit not 0/1");
    std::uint32_t slot = pool_[path[k - 1]].child[b];
    if (slot == kAbsent) {
      slot = static_cast<std::uint32_t>(pool_.size());
      Node fresh;
      fresh.depth = static_cast<std::uint8_t>(k);
      pool_[path[k - 1]].child[b] = slot;
      pool_.push_back(fresh);
    }
    path[k] = slot;
  }

  const double root_before = pool_[0].log2_pw;

  // Charge the symbol to every node on the path.
  for (unsigned k = 0; k <= dd; ++k) {
    Node& n = pool_[path[k]];
    n.log2_pe += std::log2(kt_predict(n.counts, symbol));
    (symbol ? n.counts.ones : n.counts.zeros)++;
  }
  // Restore the weighting recursion bottom-up.
  for (int k = static_cast<int>(dd); k >= 0; --k) {
    Node& n = pool_[path[k]];
    if (n.depth == depth_) {
      n.log2_pw = n.log2_pe;
    } else {
      n.log2_pw = -1.0 + log2_sum_exp2(n.log2_pe, child_product_log2(n));
    }
  }

  symbols_++;
  return std::exp2(pool_[0].log2_pw - root_before);
}

ContextTree::NodeView ContextTree::node(std::size_t id) const {
  if (id >= pool_.size()) throw std::out_of_range("ContextTree::node");
  const Node& n = pool_[id];
  NodeView v;
  v.counts = n.counts;
  v.log2_pe = n.log2_pe;
  v.log2_pw = n.log2_pw;
  v.depth = n.depth;
  for (int b = 0; b < 2; ++b) {
    v.child[b] = n.child[b] == kAbsent ? -1 : static_cast<std::int64_t>(n.child[b]);
  }
  return v;
}

double ctw_codelength(BitSpan x, unsigned depth, BitSpan initial_context) {
  ContextTree tree(depth);
  std::vector<Bit> recent;  // most-recent-first, capped at depth
  recent.reserve(depth + 1);
  const std::size_t take =
      std::min<std::size_t>(depth, initial_context.size());
  for (std::size_t j = 0; j < take; ++j) {
    recent.push_back(initial_context[initial_context.size() - 1 - j]);
  }
  for (Bit b : x) {
    tree.update(recent, b);
    if (depth > 0) {
      recent.insert(recent.begin(), b);
      if (recent.size() > depth) recent.pop_back();
    }
  }
  return tree.codelength();
}

AtypicalCodeLength atypical_codelength(BitSpan x, unsigned d_max) {
  if (x.empty()) {
    throw std::invalid_argument("atypical_codelength: empty input");
  }
  AtypicalCodeLength out;
  double best = std::numeric_limits<double>::infinity();
  for (unsigned d = 0; d <= d_max; ++d) {
    const double bits = ctw_codelength(x, d);
    const double cand = bits + depth_header_bits(d);
    if (cand < best) {
      best = cand;
      out.best_depth = d;
      out.ctw_bits = bits;
      out.depth_header = depth_header_bits(d);
    }
  }
  out.length_header = log_star(x.size());
  out.total_bits = best + out.length_header;
  return out;
}

// ---------------------------------------------------------------------------
// DepthSweepCoder (linear-ratio multi-depth engine)
// ---------------------------------------------------------------------------

namespace {
constexpr double kBetaFloor = 1e-250;
constexpr double kBetaCeil = 1e250;

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kTwoOverLn2 = 2.8853900817779268;
}  // namespace

namespace {
constexpr unsigned kLanes = 8;  // matches DepthSweepCoder::kLane
constexpr unsigned pad_lanes(unsigned n) { return (n + kLanes - 1) / kLanes * kLanes; }
}  // namespace

DepthSweepCoder::DepthSweepCoder(unsigned d_max) : d_max_(d_max) {
  if (d_max > 64) {
    throw std::invalid_argument("DepthSweepCoder: d_max must be <= 64");
  }
  padded_ = pad_lanes(d_max_ + 1);
  lane_words_ = pad_lanes(d_max_) / kLane;
  len_.assign(padded_, std::numeric_limits<double>::infinity());
  prod_.assign(padded_, 1.0);
  depth_header_.assign(padded_, 0.0);
  for (unsigned d = 0; d <= d_max_; ++d) depth_header_[d] = depth_header_bits(d);
  std::size_t ring = 1;
  while (ring < d_max_) ring <<= 1;
  recent_.assign(ring, 0);
  recent_mask_ = ring - 1;
  boff_.resize(d_max_ + 1);
  ktp_.resize(d_max_ + 1);
  inv_ktp_.resize(d_max_ + 1);
  mix_.resize(padded_, 1.0);
  grow_tables(1024);
  reset();
}

void DepthSweepCoder::grow_tables(std::uint32_t need) {
  std::size_t n = std::max<std::size_t>(recip_n1_.size(), 2);
  while (n < need + 1) n <<= 1;
  const std::size_t old = recip_n1_.size();
  recip_n1_.resize(n);
  recip_odd_.resize(n);
  for (std::size_t k = old; k < n; ++k) {
    recip_n1_[k] = 1.0 / (double(k) + 1.0);
    recip_odd_[k] = 1.0 / (2.0 * double(k) + 1.0);
  }
}

void DepthSweepCoder::reset() {
  nodes_.assign({0u, 0u, kAbsent, kAbsent});
  node_count_ = 1;
  const Lane8 ones = {{1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0}};
  beta_.assign(lane_words_, ones);  // fresh node: P_e = 1, no children
  std::fill_n(len_.begin(), d_max_ + 1, 0.0);
  std::fill(len_.begin() + d_max_ + 1, len_.end(),
            std::numeric_limits<double>::infinity());
  std::fill(prod_.begin(), prod_.end(), 1.0);
  std::fill(mix_.begin(), mix_.end(), 1.0);
  pushed_ = 0;
}

std::uint32_t DepthSweepCoder::create_node(std::uint32_t parent, Bit b) {
  const std::uint32_t id = static_cast<std::uint32_t>(node_count_++);
  nodes_[4 * std::size_t(parent) + 2 + b] = id;
  const std::uint32_t fresh[4] = {0, 0, kAbsent, kAbsent};
  nodes_.insert(nodes_.end(), fresh, fresh + 4);
  const Lane8 ones = {{1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0}};
  beta_.insert(beta_.end(), lane_words_, ones);
  return id;
}

void DepthSweepCoder::push(Bit symbol) {
  if (symbol > 1) throw std::invalid_argument("DepthSweepCoder: symbol not 0/1");
  const unsigned dd_cap =
      static_cast<unsigned>(std::min<std::uint64_t>(d_max_, pushed_));
  if (pushed_ + 1 >= recip_n1_.size()) {
    grow_tables(static_cast<std::uint32_t>(pushed_ + 1));
  }

  // Walk the context path, creating nodes as needed.  One pass records each
  // node's KT predictive (match+1/2)/(total+1) via the reciprocal tables
  // (the root sees every symbol, so its count bounds every other node's),
  // bumps its counts, and stashes its beta-block offset.
  std::uint32_t id = 0;
  for (unsigned k = 0;; ++k) {
    std::uint32_t* const rec = nodes_.data() + 4 * std::size_t(id);
    const std::uint32_t match = rec[symbol];
    const std::uint32_t total = rec[0] + rec[1];
    ktp_[k] = (double(match) + 0.5) * recip_n1_[total];
    inv_ktp_[k] = (2.0 * double(total) + 2.0) * recip_odd_[match];
    rec[symbol] = match + 1;
    const std::size_t lane_off = std::size_t(id) * lane_words_;
    boff_[k] = lane_off * kLane;
    __builtin_prefetch(beta_.data() + lane_off, 1);
    if (lane_words_ > 1) __builtin_prefetch(beta_.data() + lane_off + 1, 1);
    if (k == dd_cap) break;
    const Bit b = recent_[(pushed_ - 1 - k) & recent_mask_];
    std::uint32_t next = rec[2 + b];
    if (next == kAbsent) next = create_node(id, b);
    id = next;
  }

#if ATYP_HAVE_AVX512
  if (dd_cap == d_max_ && d_max_ >= 1 && d_max_ <= 16) {
    fold_avx512(symbol);
    return;
  }
#endif

  // mix_[d] carries the root-ratio update of the depth-d tree, folded up the
  // path.  In tree d the path node at depth d is a leaf (ratio = its KT
  // predictive); every shallower path node is internal.  Beta blocks share
  // the tree-aligned lane indexing, so mix_ is updated in place at absolute
  // positions.  Dividing as multiply-by-reciprocal keeps the division (which
  // depends only on this block's beta) off the level-to-level chain.
  double* __restrict__ const betas =
      beta_.empty() ? nullptr : beta_.data()->v;
  double* __restrict__ const mixv = mix_.data();
  for (unsigned d = 0; d <= dd_cap; ++d) mixv[d] = ktp_[d];
  if (dd_cap < d_max_) {
    // Trees deeper than the available context: node dd_cap is internal but
    // its children see nothing, so the incoming child ratio is 1.
    const double ktpk = ktp_[dd_cap];
    const double invk = inv_ktp_[dd_cap];
    double* __restrict__ const blk = betas + boff_[dd_cap];
    for (unsigned j = dd_cap; j < d_max_; ++j) {
      const double b = blk[j];
      const double r = 1.0 / (1.0 + b);
      mixv[j + 1] = (ktpk + b) * r;
      blk[j] = std::min(std::max(b * invk, kBetaFloor), kBetaCeil);
    }
  }
  for (int k = static_cast<int>(dd_cap) - 1; k >= 0; --k) {
    const double ktpk = ktp_[k];
    const double invk = inv_ktp_[k];
    double* __restrict__ const blk = betas + boff_[k];
    for (unsigned j = static_cast<unsigned>(k); j < d_max_; ++j) {
      const double b = blk[j];
      const double r = 1.0 / (1.0 + b);
      const double incoming = mixv[j + 1];
      const double binc = b * incoming;
      mixv[j + 1] = (ktpk + binc) * r;
      blk[j] = std::min(std::max(binc * invk, kBetaFloor), kBetaCeil);
    }
  }

  // Accumulate the per-depth ratios as linear products; flush to bits only
  // when a product gets small.  Each real-lane ratio is at least the deepest
  // KT predictive (>= 1/(2l+2)), so products cannot underflow between
  // flushes, and pad lanes of len_ absorb flushes at +infinity.
  double* __restrict__ const pr = prod_.data();
  for (unsigned d = 0; d < padded_; ++d) pr[d] *= mixv[d];
  for (unsigned d = 0; d < padded_; ++d) {
    if (pr[d] < 1e-280) {
      len_[d] -= std::log2(pr[d]);
      pr[d] = 1.0;
    }
  }

  recent_[pushed_ & recent_mask_] = symbol;
  pushed_++;
}

#if ATYP_HAVE_AVX512
// Full-context fold with every mix lane held in registers: lane i of
// (m0, m1) is the pending root-ratio of the depth-(i+1) tree; the depth-0
// tree is handled as a scalar.  Masked merges keep lanes for trees shallower
// than the current level untouched, and divisions are replaced by rcp14 plus
// two Newton refinements (relative error ~1 ulp), keeping the divider off
// both the critical path and the port-throughput budget.
void DepthSweepCoder::fold_avx512(Bit symbol) {
  const __m512d vone = _mm512_set1_pd(1.0);
  const __m512d vtwo = _mm512_set1_pd(2.0);
  const __m512d vfloor = _mm512_set1_pd(kBetaFloor);
  const __m512d vceil = _mm512_set1_pd(kBetaCeil);
  const unsigned lim = (1u << d_max_) - 1;  // lane i <=> tree i+1
  const __mmask8 lim_lo = __mmask8(lim & 0xFFu);
  const __mmask8 lim_hi = __mmask8((lim >> 8) & 0xFFu);

  // Seed every tree with its leaf ratio (the KT predictive at its path
  // depth); lanes beyond d_max stay at 1 so they never trigger flushes.
  __m512d m0 = _mm512_mask_loadu_pd(vone, lim_lo, ktp_.data() + 1);
  __m512d m1 = _mm512_mask_loadu_pd(vone, lim_hi, ktp_.data() + 9);

  double* const betas = beta_.data()->v;
  for (int k = static_cast<int>(d_max_) - 1; k >= 0; --k) {
    const unsigned mk = lim & (~0u << k);
    const __mmask8 mlo = __mmask8(mk & 0xFFu);
    const __mmask8 mhi = __mmask8((mk >> 8) & 0xFFu);
    double* const base = betas + boff_[k];  // 64-byte-aligned block
    const __m512d ktpk = _mm512_set1_pd(ktp_[k]);
    const __m512d invk = _mm512_set1_pd(inv_ktp_[k]);
    if (mlo) {
      const __m512d b = _mm512_maskz_load_pd(mlo, base);
      const __m512d den = _mm512_add_pd(vone, b);
      __m512d r = _mm512_rcp14_pd(den);
      r = _mm512_mul_pd(r, _mm512_fnmadd_pd(den, r, vtwo));
      r = _mm512_mul_pd(r, _mm512_fnmadd_pd(den, r, vtwo));
      const __m512d binc = _mm512_mul_pd(b, m0);
      const __m512d num = _mm512_fmadd_pd(b, m0, ktpk);
      m0 = _mm512_mask_mul_pd(m0, mlo, num, r);
      const __m512d bn = _mm512_min_pd(
          _mm512_max_pd(_mm512_mul_pd(binc, invk), vfloor), vceil);
      _mm512_mask_store_pd(base, mlo, bn);
    }
    if (mhi) {
      const __m512d b = _mm512_maskz_load_pd(mhi, base + 8);
      const __m512d den = _mm512_add_pd(vone, b);
      __m512d r = _mm512_rcp14_pd(den);
      r = _mm512_mul_pd(r, _mm512_fnmadd_pd(den, r, vtwo));
      r = _mm512_mul_pd(r, _mm512_fnmadd_pd(den, r, vtwo));
      const __m512d binc = _mm512_mul_pd(b, m1);
      const __m512d num = _mm512_fmadd_pd(b, m1, ktpk);
      m1 = _mm512_mask_mul_pd(m1, mhi, num, r);
      const __m512d bn = _mm512_min_pd(
          _mm512_max_pd(_mm512_mul_pd(binc, invk), vfloor), vceil);
      _mm512_mask_store_pd(base + 8, mhi, bn);
    }
  }

  const __m512d thr = _mm512_set1_pd(1e-280);
  double* const pr = prod_.data();
  const __m512d p0 = _mm512_mul_pd(_mm512_maskz_loadu_pd(lim_lo, pr + 1), m0);
  const __m512d p1 = _mm512_mul_pd(_mm512_maskz_loadu_pd(lim_hi, pr + 9), m1);
  _mm512_mask_storeu_pd(pr + 1, lim_lo, p0);
  _mm512_mask_storeu_pd(pr + 9, lim_hi, p1);
  const __mmask8 f0 = _mm512_mask_cmp_pd_mask(lim_lo, p0, thr, _CMP_LT_OQ);
  const __mmask8 f1 = _mm512_mask_cmp_pd_mask(lim_hi, p1, thr, _CMP_LT_OQ);
  pr[0] *= ktp_[0];
  if (pr[0] < 1e-280 || f0 || f1) {
    for (unsigned d = 0; d <= d_max_; ++d) {
      if (pr[d] < 1e-280) {
        len_[d] -= std::log2(pr[d]);
        pr[d] = 1.0;
      }
    }
  }

  recent_[pushed_ & recent_mask_] = symbol;
  pushed_++;
}
#endif

// Computes len - log2(prod) for every depth without libm calls: exponent
// extraction plus an atanh series on the mantissa, written branch-free so the
// loops vectorize.  Products are normal positive doubles by construction
// (flushed long before underflow), and the absolute error stays below ~1e-12.
void DepthSweepCoder::codelengths(double* out) const {
  const unsigned n = d_max_ + 1;
  double m[65], e[65];
  for (unsigned i = 0; i < n; ++i) {
    const std::uint64_t u = std::bit_cast<std::uint64_t>(prod_[i]);
    e[i] = double(std::int64_t(u >> 52) - 1023);
    m[i] = std::bit_cast<double>((u & 0x000fffffffffffffull) |
                                 0x3ff0000000000000ull);
  }
  for (unsigned i = 0; i < n; ++i) {
    // fold the mantissa from [1,2) into [1/sqrt2, sqrt2)
    // g = 1 when m >= sqrt2 else 0, computed without a branch so the loop
    // vectorizes (m - kSqrt2 == +0.0 counts as >=, matching copysign)
    const double g = 0.5 + 0.5 * std::copysign(1.0, m[i] - kSqrt2);
    const double mm = m[i] * (1.0 - 0.5 * g);
    const double t = (mm - 1.0) / (mm + 1.0);
    const double t2 = t * t;
    // log2(mm) = (2/ln2) * (t + t^3/3 + t^5/5 + ...)
    double s = 1.0 / 21.0;
    s = s * t2 + 1.0 / 19.0;
    s = s * t2 + 1.0 / 17.0;
    s = s * t2 + 1.0 / 15.0;
    s = s * t2 + 1.0 / 13.0;
    s = s * t2 + 1.0 / 11.0;
    s = s * t2 + 1.0 / 9.0;
    s = s * t2 + 1.0 / 7.0;
    s = s * t2 + 1.0 / 5.0;
    s = s * t2 + 1.0 / 3.0;
    s = s * t2 + 1.0;
    out[i] = len_[i] - (e[i] + g + kTwoOverLn2 * t * s);
  }
}

DepthSweepCoder::Best DepthSweepCoder::best_with_depth_header() const {
  double bits[65];
  codelengths(bits);
  Best best;
  best.bits = std::numeric_limits<double>::infinity();
  for (unsigned d = 0; d <= d_max_; ++d) {
    const double cand = bits[d] + depth_header_[d];
    if (cand < best.bits) {
      best.bits = cand;
      best.depth = d;
    }
  }
  return best;
}

// Same minimum as best_with_depth_header().bits, but computed over the full
// padded lane blocks (pad candidates are +infinity) with a lane-wise min
// reduction, so the whole thing vectorizes without tracking the argmin.
template <unsigned Lanes>
double DepthSweepCoder::best_bits_fixed() const {
  double cand[Lanes], m[Lanes], e[Lanes];
  for (unsigned i = 0; i < Lanes; ++i) {
    const std::uint64_t u = std::bit_cast<std::uint64_t>(prod_[i]);
    e[i] = double(std::int64_t(u >> 52) - 1023);
    m[i] = std::bit_cast<double>((u & 0x000fffffffffffffull) |
                                 0x3ff0000000000000ull);
  }
  for (unsigned i = 0; i < Lanes; ++i) {
    // g = 1 when m >= sqrt2 else 0, computed without a branch so the loop
    // vectorizes (m - kSqrt2 == +0.0 counts as >=, matching copysign)
    const double g = 0.5 + 0.5 * std::copysign(1.0, m[i] - kSqrt2);
    const double mm = m[i] * (1.0 - 0.5 * g);
    const double t = (mm - 1.0) / (mm + 1.0);
    const double t2 = t * t;
    double s = 1.0 / 21.0;
    s = s * t2 + 1.0 / 19.0;
    s = s * t2 + 1.0 / 17.0;
    s = s * t2 + 1.0 / 15.0;
    s = s * t2 + 1.0 / 13.0;
    s = s * t2 + 1.0 / 11.0;
    s = s * t2 + 1.0 / 9.0;
    s = s * t2 + 1.0 / 7.0;
    s = s * t2 + 1.0 / 5.0;
    s = s * t2 + 1.0 / 3.0;
    s = s * t2 + 1.0;
    cand[i] = len_[i] + depth_header_[i] - (e[i] + g + kTwoOverLn2 * t * s);
  }
  double lane[kLane];
  for (unsigned j = 0; j < kLane; ++j) lane[j] = cand[j];
  for (unsigned i = kLane; i < Lanes; i += kLane) {
    for (unsigned j = 0; j < kLane; ++j) lane[j] = std::min(lane[j], cand[i + j]);
  }
  double best = lane[0];
  for (unsigned j = 1; j < kLane; ++j) best = std::min(best, lane[j]);
  return best;
}

double DepthSweepCoder::best_bits_generic() const {
  double bits[65];
  codelengths(bits);
  double best = std::numeric_limits<double>::infinity();
  for (unsigned d = 0; d <= d_max_; ++d) {
    best = std::min(best, bits[d] + depth_header_[d]);
  }
  return best;
}

double DepthSweepCoder::best_bits() const {
  switch (padded_) {
    case 8: return best_bits_fixed<8>();
    case 16: return best_bits_fixed<16>();
    case 24: return best_bits_fixed<24>();
    default: return best_bits_generic();
  }
}

}  // namespace atyp
