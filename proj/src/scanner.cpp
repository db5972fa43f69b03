#include "atyp/scanner.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "atyp/codelength.hpp"
#include "atyp/ctw.hpp"

namespace atyp {

namespace {

void validate(BitSpan x, const std::vector<double>& typical_bits,
              const ScanConfig& cfg) {
  if (cfg.l_min < 1 || cfg.l_min > cfg.l_max) {
    throw std::invalid_argument(
        "scan: window length range requires 1 <= l_min <= l_max");
  }
  if (x.size() < cfg.l_min) {
    throw std::invalid_argument(
        "scan: input holds " + std::to_string(x.size()) +
        " samples but the smallest window is " + std::to_string(cfg.l_min));
  }
  if (typical_bits.size() != x.size() + 1) {
    throw std::invalid_argument(
        "scan: typical prefix table must have one entry per prefix "
        "(|x| + 1)");
  }
  if (typical_bits.front() != 0.0) {
    throw std::invalid_argument("scan: typical prefix table must start at 0");
  }
  for (std::size_t i = 1; i < typical_bits.size(); ++i) {
    if (!(typical_bits[i] >= typical_bits[i - 1])) {
      throw std::invalid_argument(
          "scan: typical prefix table must be non-decreasing");
    }
  }
}

// Sweeps start positions [first, last) writing into the profile arrays.
void sweep_starts(BitSpan x, const double* t, const ScanConfig& cfg,
                  const std::vector<double>& window_header,
                  std::size_t first, std::size_t last, ScanProfile& out) {
  DepthSweepCoder coder(cfg.d_max);
  const std::size_t n_samples = x.size();
  for (std::size_t n = first; n < last; ++n) {
    coder.reset();
    const std::size_t lim = std::min(cfg.l_max, n_samples - n);
    const double t_n = t[n];
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t arg_l = 0;
    std::uint32_t arg_d = 0;
    std::size_t next_eval = cfg.l_min;
    for (std::size_t l = 1; l <= lim; ++l) {
      coder.push(x[n + l - 1]);
      if (l < next_eval) continue;
      const double in_itself = coder.best_bits() + window_header[l];
      const double value = in_itself - (t[n + l] - t_n);
      if (value < best) {
        best = value;
        arg_l = std::uint32_t(l);
        arg_d = coder.best_with_depth_header().depth;
      }
      if (cfg.prune_with_lower_bound) {
        // Both the depth-swept cost and log*(l) are non-decreasing in l, so
        // for any longer window delta >= in_itself - (typical cost).  Skip
        // evaluations while that bound cannot beat the running minimum.
        const double budget = t_n + in_itself - best;
        std::size_t nl = l + 1;
        while (nl <= lim && t[n + nl] <= budget) ++nl;
        next_eval = nl;
      } else {
        next_eval = l + 1;
      }
    }
    out.delta[n] = best;
    out.best_l[n] = arg_l;
    out.best_d[n] = arg_d;
  }
}

}  // namespace

std::vector<double> typical_prefix(BitSpan x, const IIDTypicalModel& model) {
  const double cost1 = -std::log2(model.p());
  const double cost0 = -std::log2(1.0 - model.p());
  std::vector<double> out(x.size() + 1, 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    acc += x[i] ? cost1 : cost0;
    out[i + 1] = acc;
  }
  return out;
}

std::vector<double> typical_prefix(BitSpan x, const FrozenModel& model) {
  return model.cumulative_bits(x);
}

ScanProfile scan_with_typical_costs(BitSpan x,
                                    const std::vector<double>& typical_bits,
                                    const ScanConfig& cfg, unsigned workers) {
  validate(x, typical_bits, cfg);

  ScanProfile profile;
  profile.input_length = x.size();
  profile.config = cfg;
  const std::size_t starts = x.size() - cfg.l_min + 1;
  profile.delta.resize(starts);
  profile.best_l.resize(starts);
  profile.best_d.resize(starts);

  const std::size_t lim_max = std::min(cfg.l_max, x.size());
  std::vector<double> window_header(lim_max + 1, 0.0);
  for (std::size_t l = 1; l <= lim_max; ++l) window_header[l] = log_star(l);

  const double* t = typical_bits.data();
  if (workers <= 1 || starts < 2 * workers) {
    sweep_starts(x, t, cfg, window_header, 0, starts, profile);
    return profile;
  }

  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (starts + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = std::min(starts, std::size_t(w) * chunk);
    const std::size_t hi = std::min(starts, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi, w] {
      try {
        sweep_starts(x, t, cfg, window_header, lo, hi, profile);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
  return profile;
}

ScanProfile scan(BitSpan x, const IIDTypicalModel& model,
                 const ScanConfig& cfg, unsigned workers) {
  return scan_with_typical_costs(x, typical_prefix(x, model), cfg, workers);
}

ScanProfile scan(BitSpan x, const FrozenModel& model, const ScanConfig& cfg,
                 unsigned workers) {
  return scan_with_typical_costs(x, typical_prefix(x, model), cfg, workers);
}

std::vector<FlaggedSegment> flag_segments(const ScanProfile& profile,
                                          double tau) {
  std::vector<FlaggedSegment> merged;
  std::size_t run_end = 0;
  bool open = false;
  FlaggedSegment witness;
  for (std::size_t n = 0; n < profile.start_count(); ++n) {
    if (!(profile.delta[n] < -tau)) continue;
    const FlaggedSegment seg{n, profile.best_l[n], profile.delta[n],
                             profile.best_d[n]};
    if (open && seg.start < run_end) {
      if (seg.delta < witness.delta) witness = seg;
      run_end = std::max(run_end, seg.start + seg.length);
    } else {
      if (open) merged.push_back(witness);
      witness = seg;
      run_end = seg.start + seg.length;
      open = true;
    }
  }
  if (open) merged.push_back(witness);
  std::sort(merged.begin(), merged.end(),
            [](const FlaggedSegment& a, const FlaggedSegment& b) {
              if (a.delta != b.delta) return a.delta < b.delta;
              return a.start < b.start;
            });
  return merged;
}

std::vector<std::int64_t> random_walk(BitSpan x) {
  std::vector<std::int64_t> s(x.size() + 1, 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    s[i + 1] = s[i] + (x[i] ? 1 : -1);
  }
  return s;
}

namespace {

void write_config_comment(std::ostream& out, const ScanProfile& profile) {
  out << "# l_min=" << profile.config.l_min
      << " l_max=" << profile.config.l_max
      << " d_max=" << profile.config.d_max << " tau=";
  if (profile.config.tau) {
    out << *profile.config.tau;
  } else {
    out << "none";
  }
  out << " input_length=" << profile.input_length << '\n';
}

// Decimal form that round-trips a double exactly.
void write_bits(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

}  // namespace

void write_profile_csv(std::ostream& out, const ScanProfile& profile) {
  write_config_comment(out, profile);
  out << "n,delta_bits,best_l,best_depth\n";
  for (std::size_t n = 0; n < profile.start_count(); ++n) {
    out << n << ',';
    write_bits(out, profile.delta[n]);
    out << ',' << profile.best_l[n] << ',' << profile.best_d[n] << '\n';
  }
}

void write_flags_csv(std::ostream& out, const ScanProfile& profile,
                     const std::vector<FlaggedSegment>& segments,
                     double tau) {
  write_config_comment(out, profile);
  out << "# flag threshold tau=";
  write_bits(out, tau);
  out << '\n';
  out << "start,length,delta_bits,depth\n";
  for (const FlaggedSegment& seg : segments) {
    out << seg.start << ',' << seg.length << ',';
    write_bits(out, seg.delta);
    out << ',' << seg.depth << '\n';
  }
}

}  // namespace atyp
