#pragma once

#include <cstdint>

#include "atyp/bits.hpp"

// Fixed-length atypicality test against a known iid Bernoulli source, plus
// the closed-form false-alarm / miss bounds for that test.
namespace atyp {

// Typical model: iid Bernoulli(p) with p strictly inside (0,1).
class IIDTypicalModel {
 public:
  explicit IIDTypicalModel(double p);
  double p() const { return p_; }

 private:
  double p_;
};

// Outcome of comparing the in-itself description of x against the typical
// code.  atypical_bits includes the tau header, so the decision rule is
// simply delta < 0.
struct AtypicalityVerdict {
  double typical_bits = 0.0;
  double atypical_bits = 0.0;
  double delta = 0.0;  // atypical_bits - typical_bits
  bool is_atypical = false;
};

// Cost of coding x with the typical code: ones*log2(1/p) + zeros*log2(1/q).
double typical_codelength_iid(BitSpan x, const IIDTypicalModel& model);

// Cost of describing x in itself with an estimated bias:
// l*H(p_hat) + (3/2)*log2(l).  Requires a non-empty x.
double atypical_codelength_iid(BitSpan x);

// Full test at header cost tau >= 0.
AtypicalityVerdict iid_atypicality_test(BitSpan x, const IIDTypicalModel& model,
                                        double tau);

// Likelihood-ratio statistic l * D(p_hat || p); the test above is equivalent
// to comparing this against tau + (3/2)*log2(l).
double glrt_statistic(BitSpan x, const IIDTypicalModel& model);

// Gaussian-approximation decision radius: the test flags approximately when
// |p_hat - p| exceeds sqrt(p*q*ln4 / l) * sqrt(tau + (3/2)*log2(l)).
double approx_threshold(std::uint64_t l, double tau, double p);

// Upper bound on the false-alarm probability of the fixed-length test.
// p = 1/2 uses the strengthened form 2^(1-tau) * l^(-3/2); other p use the
// exact minimized Chernoff form, which throws std::domain_error when its
// validity condition b < l*(1-p) fails ("bound not evaluable").
// The value is returned unclamped (it can exceed 1 where it is vacuous).
double pa_upper_bound(std::uint64_t l, double tau, double p);

// Upper bound on the miss probability against an iid Bernoulli(p_a)
// alternative, clamped to [0,1].  p_a != p required; p_a > p is handled by
// relabeling 0/1.
double miss_upper_bound(std::uint64_t l, double tau, double p, double p_a);

}  // namespace atyp
