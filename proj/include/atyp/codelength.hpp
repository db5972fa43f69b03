#pragma once

#include <cstdint>

#include "atyp/bits.hpp"

// Elementary code-length arithmetic: binary entropy, relative entropy, the
// iterated-log integer header, and the Krichevsky-Trofimov estimator that
// every coder in this library is built on.  All code lengths are in bits
// (base-2 logs) throughout.
namespace atyp {

// H(p) = -p log2 p - (1-p) log2(1-p), with 0 log 0 = 0.  p must be in [0,1].
double binary_entropy(double p);

// D(p_hat || p) = p_hat log2(p_hat/p) + (1-p_hat) log2((1-p_hat)/(1-p)),
// with 0 log 0 = 0.  p_hat in [0,1], p strictly inside (0,1).
double relative_entropy(double p_hat, double p);

// log*(l) = log2 l + log2 log2 l + ..., keeping only strictly positive terms;
// the universal cost of describing the positive integer l.  log*(1) = 0.
double log_star(std::uint64_t l);

// Zero/one counts observed in some context.
struct KTCounts {
  std::uint64_t zeros = 0;
  std::uint64_t ones = 0;

  std::uint64_t total() const { return zeros + ones; }
  bool operator==(const KTCounts&) const = default;
};

KTCounts count_bits(BitSpan x);

// KT predictive probability of `bit` given counts: (count(bit)+1/2)/(total+1).
double kt_predict(const KTCounts& counts, Bit bit);

// -log2 of the KT block probability of any sequence with these counts
// (the product of the sequential predictives; order-independent).
double kt_block_codelength(const KTCounts& counts);

// log2 of the KT block probability (convenience for mixture arithmetic).
double kt_log2_block_probability(const KTCounts& counts);

}  // namespace atyp
