#include "atyp/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "atyp/codelength.hpp"
#include "atyp/ctw.hpp"
#include "atyp/frozen.hpp"
#include "atyp/iid.hpp"

namespace atyp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void validate_spec(const BoundSpec& spec) {
  if (!(spec.p > 0.0 && spec.p < 1.0)) {
    throw std::invalid_argument("p must lie strictly inside (0,1)");
  }
  if (!(spec.tau >= 0.0)) {
    throw std::invalid_argument("tau must be non-negative");
  }
  if (spec.trials == 0) {
    throw std::invalid_argument("trials must be at least 1");
  }
  if (spec.lengths.empty()) {
    throw std::invalid_argument("length grid must be non-empty");
  }
  for (std::size_t i = 0; i < spec.lengths.size(); ++i) {
    if (spec.lengths[i] == 0) {
      throw std::invalid_argument("lengths must be positive");
    }
    if (i > 0 && spec.lengths[i] <= spec.lengths[i - 1]) {
      throw std::invalid_argument("length grid must be strictly increasing");
    }
  }
}

double proportion_ci(double estimate, std::uint64_t n) {
  const double var = std::max(estimate * (1.0 - estimate), 0.0);
  return kConfidenceZ * std::sqrt(var / static_cast<double>(n));
}

// The deviation criterion |p_hat - p| > approx_threshold depends on x only
// through its ones count, so the decision is tabulated once per length.
std::vector<char> flag_table(std::uint64_t l, double p, double tau) {
  const double radius = approx_threshold(l, tau, p);
  std::vector<char> flags(l + 1);
  for (std::uint64_t k = 0; k <= l; ++k) {
    const double p_hat = static_cast<double>(k) / static_cast<double>(l);
    flags[k] = std::abs(p_hat - p) > radius ? 1 : 0;
  }
  return flags;
}

// Trial indices never approach 2^40, so this keeps per-point streams
// disjoint under a single master seed.
std::uint64_t trial_index(std::size_t point, std::uint64_t trial) {
  return (static_cast<std::uint64_t>(point) << 40) + trial;
}

// Decimal form that round-trips a double exactly.
std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

}  // namespace

std::vector<GridRow> simulate_pa(const BoundSpec& spec) {
  validate_spec(spec);
  const bool fair = spec.p == 0.5;
  std::vector<GridRow> rows;
  rows.reserve(spec.lengths.size());
  for (std::size_t pt = 0; pt < spec.lengths.size(); ++pt) {
    const std::uint64_t l = spec.lengths[pt];
    const std::vector<char> flags = flag_table(l, spec.p, spec.tau);
    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < spec.trials; ++t) {
      Rng rng = Rng::for_trial(spec.seed, trial_index(pt, t));
      const std::uint64_t ones =
          fair ? rng.next_binomial_half(l) : rng.next_binomial(l, spec.p);
      hits += static_cast<std::uint64_t>(flags[ones]);
    }
    const double est =
        static_cast<double>(hits) / static_cast<double>(spec.trials);
    double bound = kNaN;
    try {
      bound = pa_upper_bound(l, spec.tau, spec.p);
    } catch (const std::domain_error&) {
      // Bound not evaluable at this point; the estimate still stands.
    }
    rows.push_back({static_cast<double>(l), est,
                    proportion_ci(est, spec.trials), bound});
  }
  return rows;
}

std::vector<GridRow> simulate_miss(const BoundSpec& spec) {
  validate_spec(spec);
  if (!(spec.p_a > 0.0 && spec.p_a < 1.0)) {
    throw std::invalid_argument("p_a must lie strictly inside (0,1)");
  }
  if (spec.p_a == spec.p) {
    throw std::invalid_argument("p_a must differ from p");
  }
  std::vector<GridRow> rows;
  rows.reserve(spec.lengths.size());
  for (std::size_t pt = 0; pt < spec.lengths.size(); ++pt) {
    const std::uint64_t l = spec.lengths[pt];
    const std::vector<char> flags = flag_table(l, spec.p, spec.tau);
    std::uint64_t misses = 0;
    for (std::uint64_t t = 0; t < spec.trials; ++t) {
      Rng rng = Rng::for_trial(spec.seed, trial_index(pt, t));
      const std::uint64_t ones = rng.next_binomial(l, spec.p_a);
      misses += static_cast<std::uint64_t>(!flags[ones]);
    }
    const double est =
        static_cast<double>(misses) / static_cast<double>(spec.trials);
    rows.push_back({static_cast<double>(l), est,
                    proportion_ci(est, spec.trials),
                    miss_upper_bound(l, spec.tau, spec.p, spec.p_a)});
  }
  return rows;
}

std::vector<GridRow> simulate_pa_ctw(const BoundSpec& spec, unsigned d_max) {
  validate_spec(spec);
  const IIDTypicalModel model(spec.p);
  const bool fair = spec.p == 0.5;
  DepthSweepCoder coder(d_max);
  std::vector<GridRow> rows;
  rows.reserve(spec.lengths.size());
  std::vector<Bit> buf;
  for (std::size_t pt = 0; pt < spec.lengths.size(); ++pt) {
    const std::uint64_t l = spec.lengths[pt];
    const double header = log_star(l);
    buf.assign(l, 0);
    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < spec.trials; ++t) {
      Rng rng = Rng::for_trial(spec.seed, trial_index(pt, t));
      coder.reset();
      for (std::uint64_t i = 0; i < l; ++i) {
        buf[i] = fair ? rng.next_fair_bit()
                      : static_cast<Bit>(rng.next_bernoulli(spec.p));
        coder.push(buf[i]);
      }
      const double in_itself = coder.best_bits() + header;
      const double typical = typical_codelength_iid(BitSpan(buf), model);
      hits += static_cast<std::uint64_t>(in_itself + spec.tau < typical);
    }
    const double est =
        static_cast<double>(hits) / static_cast<double>(spec.trials);
    rows.push_back({static_cast<double>(l), est,
                    proportion_ci(est, spec.trials), kNaN});
  }
  return rows;
}

std::vector<GridRow> phase_transition(const std::vector<double>& alphas,
                                      double tau, std::size_t l_max,
                                      std::size_t stream_length,
                                      unsigned seeds,
                                      std::uint64_t master_seed) {
  if (alphas.empty()) throw std::invalid_argument("alpha grid must be non-empty");
  for (double a : alphas) {
    if (!(a > 0.0)) throw std::invalid_argument("alpha must be positive");
  }
  if (!(tau >= 0.0)) throw std::invalid_argument("tau must be non-negative");
  if (l_max == 0) throw std::invalid_argument("l_max must be at least 1");
  if (stream_length < l_max) {
    throw std::invalid_argument("stream must be at least l_max long");
  }
  if (seeds == 0) throw std::invalid_argument("at least one seed is required");

  std::vector<std::vector<double>> fractions(alphas.size());
  std::vector<std::int64_t> walk(stream_length + 1);
  std::vector<std::int32_t> cover(stream_length + 1);
  for (unsigned s = 0; s < seeds; ++s) {
    Rng rng = Rng::for_trial(master_seed, s);
    walk[0] = 0;
    for (std::size_t i = 0; i < stream_length; ++i) {
      walk[i + 1] = walk[i] + (rng.next_fair_bit() ? 1 : -1);
    }
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      std::fill(cover.begin(), cover.end(), 0);
      for (std::size_t l = 1; l <= l_max; ++l) {
        const double radius = std::sqrt(
            static_cast<double>(l) *
            (2.0 * tau * std::numbers::ln2 + alphas[a] * std::log(static_cast<double>(l))));
        // |walk increment| <= l, so windows this short can never flag.
        if (radius >= static_cast<double>(l)) continue;
        for (std::size_t n = 0; n + l <= stream_length; ++n) {
          const std::int64_t d = walk[n + l] - walk[n];
          if (static_cast<double>(d > 0 ? d : -d) > radius) {
            cover[n] += 1;
            cover[n + l] -= 1;
          }
        }
      }
      std::size_t covered = 0;
      std::int64_t depth_sum = 0;
      for (std::size_t i = 0; i < stream_length; ++i) {
        depth_sum += cover[i];
        covered += static_cast<std::size_t>(depth_sum > 0);
      }
      fractions[a].push_back(static_cast<double>(covered) /
                             static_cast<double>(stream_length));
    }
  }

  std::vector<GridRow> rows;
  rows.reserve(alphas.size());
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    double mean = 0.0;
    for (double f : fractions[a]) mean += f;
    mean /= static_cast<double>(seeds);
    double ci = 0.0;
    if (seeds > 1) {
      double ss = 0.0;
      for (double f : fractions[a]) ss += (f - mean) * (f - mean);
      const double sd = std::sqrt(ss / static_cast<double>(seeds - 1));
      ci = kConfidenceZ * sd / std::sqrt(static_cast<double>(seeds));
    }
    rows.push_back({alphas[a], mean, ci, kNaN});
  }
  return rows;
}

void MarkovSpec::validate() const {
  const std::size_t n = transition.size();
  if (n == 0) throw std::invalid_argument("transition matrix must be non-empty");
  if (emission.size() != n) {
    throw std::invalid_argument("emission matrix shape must match transitions");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (transition[i].size() != n || emission[i].size() != n) {
      throw std::invalid_argument("transition and emission matrices must be square");
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double pij = transition[i][j];
      if (!(pij >= 0.0 && pij <= 1.0)) {
        throw std::invalid_argument("transition probabilities must lie in [0,1]");
      }
      sum += pij;
      const int e = emission[i][j];
      if (e != -1 && e != 0 && e != 1) {
        throw std::invalid_argument("emissions must be 0, 1, or -1 (impossible)");
      }
      if (pij > 0.0 && e == -1) {
        throw std::invalid_argument("reachable transitions need a 0/1 emission");
      }
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw std::invalid_argument("transition rows must sum to 1");
    }
  }
}

MarkovSpec MarkovSpec::cycle_pattern_101() {
  MarkovSpec s;
  s.transition = {{0.05, 0.95, 0.0}, {0.0, 0.05, 0.95}, {0.95, 0.0, 0.05}};
  s.emission = {{0, 1, -1}, {-1, 1, 0}, {1, -1, 0}};
  return s;
}

MarkovSpec MarkovSpec::cycle_pattern_100() {
  MarkovSpec s;
  s.transition = {{0.05, 0.95, 0.0}, {0.0, 0.05, 0.95}, {0.95, 0.0, 0.05}};
  s.emission = {{0, 1, -1}, {-1, 1, 0}, {0, -1, 1}};
  return s;
}

BitSequence markov_bits(const MarkovSpec& spec, std::size_t length, Rng& rng,
                        unsigned start_state) {
  spec.validate();
  if (start_state >= spec.state_count()) {
    throw std::invalid_argument("start state out of range");
  }
  std::vector<Bit> out;
  out.reserve(length);
  std::size_t state = start_state;
  for (std::size_t t = 0; t < length; ++t) {
    const double u = rng.next_unit();
    double acc = 0.0;
    std::size_t next = spec.state_count();
    for (std::size_t j = 0; j < spec.state_count(); ++j) {
      const double pij = spec.transition[state][j];
      if (pij <= 0.0) continue;
      acc += pij;
      next = j;
      if (u < acc) break;
    }
    // Rounding can leave u just past the accumulated total; `next` already
    // holds the last reachable state in that case.
    out.push_back(static_cast<Bit>(spec.emission[state][next]));
    state = next;
  }
  return BitSequence(std::move(out));
}

FreezingDemo freezing_demo(const MarkovSpec& typical,
                           const MarkovSpec& anomalous,
                           const FreezingConfig& cfg) {
  typical.validate();
  anomalous.validate();
  if (cfg.train_length <= cfg.model_depth) {
    throw std::invalid_argument("training stream must exceed the model depth");
  }
  if (cfg.test_length < cfg.scan.l_min) {
    throw std::invalid_argument("test stream shorter than the minimum window");
  }
  const std::size_t margin = cfg.scan.l_max;
  if (cfg.segment_length > 0 &&
      cfg.test_length < cfg.segment_length + 2 * margin) {
    throw std::invalid_argument(
        "test stream too short to place the segment away from both ends");
  }

  Rng train_rng = Rng::for_trial(cfg.seed, 0);
  Rng test_rng = Rng::for_trial(cfg.seed, 1);
  Rng anomaly_rng = Rng::for_trial(cfg.seed, 2);
  Rng place_rng = Rng::for_trial(cfg.seed, 3);

  const BitSequence train = markov_bits(typical, cfg.train_length, train_rng);
  const BitSequence clean = markov_bits(typical, cfg.test_length, test_rng);

  FreezingDemo demo;
  demo.segment_length = cfg.segment_length;
  if (cfg.segment_length > 0) {
    const std::size_t slack = cfg.test_length - cfg.segment_length - 2 * margin;
    demo.segment_start = margin + place_rng.next_below(slack + 1);
    const BitSequence segment =
        markov_bits(anomalous, cfg.segment_length, anomaly_rng);
    BitSequence spliced;
    spliced.append(clean.subspan(0, demo.segment_start));
    spliced.append(segment);
    spliced.append(clean.subspan(demo.segment_start + cfg.segment_length,
                                 cfg.test_length - demo.segment_start -
                                     cfg.segment_length));
    demo.test_stream = std::move(spliced);
  } else {
    demo.test_stream = clean;
  }

  const FrozenModel frozen = FrozenModel::train({train}, cfg.model_depth);
  const std::vector<double> frozen_costs =
      frozen.cumulative_bits(demo.test_stream);

  // Control coder: same training pass, but it keeps updating its counts
  // while coding the test stream, so the anomaly leaks into its statistics.
  ContextTree control(cfg.model_depth);
  std::vector<Bit> ctx(std::max<std::size_t>(cfg.model_depth, 1));
  for (std::size_t t = cfg.model_depth; t < train.size(); ++t) {
    for (unsigned k = 0; k < cfg.model_depth; ++k) ctx[k] = train[t - 1 - k];
    control.update(BitSpan(ctx.data(), cfg.model_depth), train[t]);
  }
  std::vector<double> adaptive_costs(demo.test_stream.size() + 1, 0.0);
  for (std::size_t t = 0; t < demo.test_stream.size(); ++t) {
    const std::size_t d = std::min<std::size_t>(cfg.model_depth, t);
    for (std::size_t k = 0; k < d; ++k) ctx[k] = demo.test_stream[t - 1 - k];
    const double ratio =
        control.update(BitSpan(ctx.data(), d), demo.test_stream[t]);
    adaptive_costs[t + 1] = adaptive_costs[t] - std::log2(ratio);
  }

  demo.frozen = scan_with_typical_costs(demo.test_stream, frozen_costs, cfg.scan);
  demo.adaptive =
      scan_with_typical_costs(demo.test_stream, adaptive_costs, cfg.scan);
  return demo;
}

void write_grid_csv(std::ostream& out, std::string_view x_name,
                    const std::vector<GridRow>& rows) {
  out << "# z=" << kConfidenceZ << "\n";
  out << x_name << ",estimate,ci_halfwidth,bound\n";
  for (const GridRow& r : rows) {
    out << fmt_double(r.x) << ',' << fmt_double(r.estimate) << ','
        << fmt_double(r.ci_halfwidth) << ',' << fmt_double(r.bound) << '\n';
  }
}

}  // namespace atyp
