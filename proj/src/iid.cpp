#include "atyp/iid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "atyp/codelength.hpp"

namespace atyp {

namespace {

constexpr double kLn2 = std::numbers::ln2_v<double>;

void require_nonempty(BitSpan x, const char* who) {
  if (x.empty()) throw std::invalid_argument(std::string(who) + ": empty input");
}

void require_prob_open(double p, const char* who) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument(std::string(who) + ": p must be in (0,1)");
  }
}

void require_tau(double tau, const char* who) {
  if (!(tau >= 0.0)) {
    throw std::invalid_argument(std::string(who) + ": tau must be >= 0");
  }
}

void require_length(std::uint64_t l, const char* who) {
  if (l < 1) throw std::invalid_argument(std::string(who) + ": l must be >= 1");
}

}  // namespace

IIDTypicalModel::IIDTypicalModel(double p) : p_(p) {
  require_prob_open(p, "IIDTypicalModel");
}

double typical_codelength_iid(BitSpan x, const IIDTypicalModel& model) {
  const KTCounts c = count_bits(x);
  return static_cast<double>(c.ones) * -std::log2(model.p()) +
         static_cast<double>(c.zeros) * -std::log2(1.0 - model.p());
}

double atypical_codelength_iid(BitSpan x) {
  require_nonempty(x, "atypical_codelength_iid");
  const KTCounts c = count_bits(x);
  const double l = static_cast<double>(x.size());
  const double p_hat = static_cast<double>(c.ones) / l;
  return l * binary_entropy(p_hat) + 1.5 * std::log2(l);
}

AtypicalityVerdict iid_atypicality_test(BitSpan x, const IIDTypicalModel& model,
                                        double tau) {
  require_nonempty(x, "iid_atypicality_test");
  require_tau(tau, "iid_atypicality_test");
  AtypicalityVerdict v;
  v.typical_bits = typical_codelength_iid(x, model);
  v.atypical_bits = atypical_codelength_iid(x) + tau;
  v.delta = v.atypical_bits - v.typical_bits;
  v.is_atypical = v.delta < 0.0;
  return v;
}

double glrt_statistic(BitSpan x, const IIDTypicalModel& model) {
  require_nonempty(x, "glrt_statistic");
  const KTCounts c = count_bits(x);
  const double l = static_cast<double>(x.size());
  return l * relative_entropy(static_cast<double>(c.ones) / l, model.p());
}

double approx_threshold(std::uint64_t l, double tau, double p) {
  require_length(l, "approx_threshold");
  require_tau(tau, "approx_threshold");
  require_prob_open(p, "approx_threshold");
  const double ld = static_cast<double>(l);
  return std::sqrt(p * (1.0 - p) * (2.0 * kLn2) / ld) *
         std::sqrt(tau + 1.5 * std::log2(ld));
}

double pa_upper_bound(std::uint64_t l, double tau, double p) {
  require_length(l, "pa_upper_bound");
  require_tau(tau, "pa_upper_bound");
  require_prob_open(p, "pa_upper_bound");
  const double ld = static_cast<double>(l);
  if (p == 0.5) {
    return std::exp2(1.0 - tau) * std::pow(ld, -1.5);
  }
  const double q = 1.0 - p;
  const double b = ld * approx_threshold(l, tau, p);
  if (!(b < ld * q)) {
    throw std::domain_error(
        "pa_upper_bound: bound not evaluable at this (l, tau, p): decision "
        "radius reaches the support edge");
  }
  const double ln_bound =
      kLn2 + ld * std::log(ld * q / (ld * q - b)) +
      (-(ld * p) - b) * std::log(q * (ld * p + b) / (p * (ld * q - b)));
  return std::exp(ln_bound);
}

double miss_upper_bound(std::uint64_t l, double tau, double p, double p_a) {
  require_length(l, "miss_upper_bound");
  require_tau(tau, "miss_upper_bound");
  require_prob_open(p, "miss_upper_bound");
  require_prob_open(p_a, "miss_upper_bound");
  if (p_a == p) {
    throw std::domain_error("miss_upper_bound: p_a must differ from p");
  }
  if (p_a > p) {  // relabel 0/1 so the alternative sits below the typical bias
    p = 1.0 - p;
    p_a = 1.0 - p_a;
  }
  const double ld = static_cast<double>(l);
  const double q = 1.0 - p;
  const double q_a = 1.0 - p_a;
  const double b =
      std::sqrt(ld * p * q * (2.0 * tau * kLn2 + 3.0 * std::log(ld)));
  const double ln_m =
      -tau * kLn2 - 1.5 * std::log(ld) + b * std::log(q_a * p / (p_a * q)) -
      ld * ((p - 1.0) * std::log(q_a) + (p + 1.0) * std::log(q) -
            p * std::log(p_a) - p * std::log(p));
  return std::clamp(std::exp(ln_m), 0.0, 1.0);
}

}  // namespace atyp
