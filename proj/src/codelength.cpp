#include "atyp/codelength.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace atyp {

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("binary_entropy: p must be in [0,1], got " +
                                std::to_string(p));
  }
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

double relative_entropy(double p_hat, double p) {
  if (!(p_hat >= 0.0 && p_hat <= 1.0)) {
    throw std::invalid_argument("relative_entropy: p_hat must be in [0,1]");
  }
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("relative_entropy: p must be in (0,1)");
  }
  double d = 0.0;
  if (p_hat > 0.0) d += p_hat * std::log2(p_hat / p);
  if (p_hat < 1.0) d += (1.0 - p_hat) * std::log2((1.0 - p_hat) / (1.0 - p));
  return d;
}

double log_star(std::uint64_t l) {
  if (l < 1) throw std::invalid_argument("log_star: l must be >= 1");
  double sum = 0.0;
  double v = std::log2(static_cast<double>(l));
  while (v > 0.0) {
    sum += v;
    v = std::log2(v);
  }
  return sum;
}

KTCounts count_bits(BitSpan x) {
  KTCounts c;
  for (Bit b : x) (b ? c.ones : c.zeros)++;
  return c;
}

double kt_predict(const KTCounts& counts, Bit bit) {
  if (bit > 1) throw std::invalid_argument("kt_predict: bit must be 0/1");
  const double match = static_cast<double>(bit ? counts.ones : counts.zeros);
  return (match + 0.5) / (static_cast<double>(counts.total()) + 1.0);
}

double kt_log2_block_probability(const KTCounts& counts) {
  // P(a,b) = Gamma(a+1/2) Gamma(b+1/2) / (Gamma(1/2)^2 Gamma(a+b+1)),
  // the closed form of the sequential KT product.
  static const double kLgammaHalf = std::lgamma(0.5);
  const double a = static_cast<double>(counts.zeros);
  const double b = static_cast<double>(counts.ones);
  const double ln_p = std::lgamma(a + 0.5) + std::lgamma(b + 0.5) -
                      2.0 * kLgammaHalf - std::lgamma(a + b + 1.0);
  return ln_p / std::numbers::ln2_v<double>;
}

double kt_block_codelength(const KTCounts& counts) {
  return -kt_log2_block_probability(counts);
}

}  // namespace atyp
