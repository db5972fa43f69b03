// Command-line front end: train frozen models, scan streams for atypical
// segments, run seeded simulation studies, and binarize raw inputs.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "atyp/binarize.hpp"
#include "atyp/ctw.hpp"
#include "atyp/frozen.hpp"
#include "atyp/iid.hpp"
#include "atyp/montecarlo.hpp"
#include "atyp/scanner.hpp"
#include "cli_support.hpp"

namespace fs = std::filesystem;
using namespace atyp;
using cli::DataError;
using cli::UsageError;

namespace {

unsigned default_workers() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

// ---------------------------------------------------------------- train --

struct TrainArgs {
  std::vector<std::string> inputs;
  unsigned depth = 6;
  std::string model_out;
};

int run_train(const TrainArgs& a) {
  std::vector<BitSequence> sequences;
  sequences.reserve(a.inputs.size());
  for (const std::string& p : a.inputs) sequences.push_back(cli::load_bits_file(p));

  FrozenModel model = [&] {
    try {
      return FrozenModel::train(sequences, a.depth);
    } catch (const std::invalid_argument& e) {
      throw DataError(std::string("training inputs: ") + e.what());
    }
  }();

  // Training code length under the adaptive pass (first `depth` symbols of
  // each sequence serve as context only, matching the trainer).
  ContextTree tree(a.depth);
  std::vector<Bit> ctx(std::max<unsigned>(a.depth, 1));
  double bits = 0.0;
  std::size_t coded = 0;
  for (const BitSequence& seq : sequences) {
    if (seq.size() <= a.depth) continue;
    for (std::size_t t = a.depth; t < seq.size(); ++t) {
      for (unsigned k = 0; k < a.depth; ++k) ctx[k] = seq[t - 1 - k];
      bits -= std::log2(tree.update(BitSpan(ctx.data(), a.depth), seq[t]));
      ++coded;
    }
  }

  model.save_file(a.model_out);
  auto manifest = cli::manifest_base("train");
  manifest["parameters"]["depth"] = a.depth;
  for (const std::string& p : a.inputs) manifest["inputs"].push_back(p);
  manifest["outputs"].push_back(a.model_out);
  cli::write_manifest(a.model_out + ".manifest.json", manifest);

  std::printf("model: %s\n", a.model_out.c_str());
  std::printf("nodes: %zu\n", model.node_count());
  std::printf("training code length: %.6f bits over %zu symbols\n", bits, coded);
  return 0;
}

// ----------------------------------------------------------------- scan --

struct ScanArgs {
  std::string input;
  std::string model_path;
  std::optional<double> iid_p;
  std::optional<double> tau;
  std::size_t l_min = 16;
  std::size_t l_max = 512;
  unsigned depth = 16;
  unsigned workers = default_workers();
  bool no_prune = false;
  bool svg = false;
  std::string output_dir = ".";
};

int run_scan(const ScanArgs& a) {
  if (a.model_path.empty() == !a.iid_p.has_value()) {
    throw UsageError("scan needs exactly one of --model or --iid-p");
  }
  if (a.iid_p && !(*a.iid_p > 0.0 && *a.iid_p < 1.0)) {
    throw UsageError("--iid-p must lie strictly inside (0,1)");
  }
  if (a.l_min == 0) throw UsageError("--l-min must be at least 1");
  if (a.l_min > a.l_max) throw UsageError("--l-min must not exceed --l-max");
  if (a.tau && *a.tau < 0.0) throw UsageError("--tau must be non-negative");
  if (a.workers == 0) throw UsageError("--workers must be at least 1");

  const BitSequence x = cli::load_bits_file(a.input);
  ScanConfig cfg;
  cfg.l_min = a.l_min;
  cfg.l_max = a.l_max;
  cfg.d_max = a.depth;
  cfg.tau = a.tau;
  cfg.prune_with_lower_bound = !a.no_prune;

  ScanProfile profile;
  try {
    if (a.iid_p) {
      profile = scan(x, IIDTypicalModel(*a.iid_p), cfg, a.workers);
    } else {
      const FrozenModel model = FrozenModel::load_file(a.model_path);
      profile = scan(x, model, cfg, a.workers);
    }
  } catch (const std::invalid_argument& e) {
    throw DataError(a.input + ": " + e.what());
  }

  fs::create_directories(a.output_dir);
  const fs::path dir(a.output_dir);
  auto manifest = cli::manifest_base("scan");
  auto& params = manifest["parameters"];
  params["l_min"] = a.l_min;
  params["l_max"] = a.l_max;
  params["depth"] = a.depth;
  params["workers"] = a.workers;
  params["prune"] = !a.no_prune;
  if (a.tau) params["tau"] = *a.tau; else params["tau"] = nullptr;
  if (a.iid_p) params["iid_p"] = *a.iid_p; else params["model"] = a.model_path;
  manifest["inputs"].push_back(a.input);

  {
    std::ostringstream out;
    write_profile_csv(out, profile);
    cli::write_text_file(dir / "profile.csv", out.str());
    manifest["outputs"].push_back((dir / "profile.csv").string());
  }

  std::vector<FlaggedSegment> flags;
  if (a.tau) {
    flags = flag_segments(profile, *a.tau);
    std::ostringstream out;
    write_flags_csv(out, profile, flags, *a.tau);
    cli::write_text_file(dir / "flags.csv", out.str());
    manifest["outputs"].push_back((dir / "flags.csv").string());
  } else {
    // ranking mode: the full profile ordered from most to least atypical
    std::vector<std::size_t> order(profile.delta.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
      return profile.delta[i] < profile.delta[j];
    });
    std::ostringstream out;
    out << "# ranked by delta_bits ascending\n";
    out << "n,delta_bits,best_l,best_depth\n";
    for (std::size_t i : order) {
      out << i << ',' << fmt_double(profile.delta[i]) << ','
          << profile.best_l[i] << ',' << profile.best_d[i] << '\n';
    }
    cli::write_text_file(dir / "ranked.csv", out.str());
    manifest["outputs"].push_back((dir / "ranked.csv").string());
  }

  if (a.svg) {
    cli::write_text_file(dir / "scan.svg",
                         cli::render_scan_svg(x, profile, flags, a.tau));
    manifest["outputs"].push_back((dir / "scan.svg").string());
  }
  cli::write_manifest(dir / "manifest.json", manifest);

  const auto arg = std::min_element(profile.delta.begin(), profile.delta.end());
  const std::size_t n_star = static_cast<std::size_t>(arg - profile.delta.begin());
  std::printf("starts: %zu\n", profile.start_count());
  std::printf("min delta: %.6f bits at n=%zu (l=%u, depth=%u)\n", *arg, n_star,
              profile.best_l[n_star], profile.best_d[n_star]);
  if (a.tau) {
    std::printf("flags at tau=%.6g: %zu\n", *a.tau, flags.size());
  } else {
    std::printf("ranking mode (no --tau): see ranked.csv\n");
  }
  return 0;
}

// ------------------------------------------------------------- simulate --

struct SimCommonArgs {
  std::string output_dir = ".";
  bool svg = false;
  std::uint64_t seed = 1;
  std::uint64_t trials = 10000;
};

void finish_grid(const SimCommonArgs& c, std::string_view name,
                 std::string_view x_name, const std::vector<GridRow>& rows,
                 bool log_x, bool log_y, nlohmann::ordered_json manifest) {
  fs::create_directories(c.output_dir);
  const fs::path dir(c.output_dir);
  const fs::path csv = dir / (std::string(name) + ".csv");
  std::ostringstream out;
  write_grid_csv(out, x_name, rows);
  cli::write_text_file(csv, out.str());
  manifest["outputs"].push_back(csv.string());
  if (c.svg) {
    const fs::path svg = dir / (std::string(name) + ".svg");
    cli::write_text_file(svg, cli::render_grid_svg(rows, x_name, log_x, log_y));
    manifest["outputs"].push_back(svg.string());
  }
  cli::write_manifest(dir / "manifest.json", manifest);
  for (const GridRow& r : rows) {
    std::printf("%s=%g estimate=%g ci=%g bound=%g\n", std::string(x_name).c_str(),
                r.x, r.estimate, r.ci_halfwidth, r.bound);
  }
}

int run_simulate_pa(const SimCommonArgs& c, double p, double tau,
                    std::vector<std::uint64_t> lengths) {
  BoundSpec spec;
  spec.p = p;
  spec.tau = tau;
  spec.lengths = std::move(lengths);
  spec.trials = c.trials;
  spec.seed = c.seed;
  std::vector<GridRow> rows;
  try {
    rows = simulate_pa(spec);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  auto manifest = cli::manifest_base("simulate pa");
  auto& params = manifest["parameters"];
  params["p"] = spec.p;
  params["tau"] = spec.tau;
  params["lengths"] = spec.lengths;
  params["trials"] = spec.trials;
  params["seed"] = spec.seed;
  finish_grid(c, "pa", "l", rows, true, true, std::move(manifest));
  return 0;
}

int run_simulate_miss(const SimCommonArgs& c, double p, double p_a, double tau,
                      std::vector<std::uint64_t> lengths) {
  BoundSpec spec;
  spec.p = p;
  spec.p_a = p_a;
  spec.tau = tau;
  spec.lengths = std::move(lengths);
  spec.trials = c.trials;
  spec.seed = c.seed;
  std::vector<GridRow> rows;
  try {
    rows = simulate_miss(spec);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  auto manifest = cli::manifest_base("simulate miss");
  auto& params = manifest["parameters"];
  params["p"] = spec.p;
  params["p_a"] = spec.p_a;
  params["tau"] = spec.tau;
  params["lengths"] = spec.lengths;
  params["trials"] = spec.trials;
  params["seed"] = spec.seed;
  finish_grid(c, "miss", "l", rows, true, true, std::move(manifest));
  return 0;
}

int run_simulate_phase(const SimCommonArgs& c, const std::string& alphas_text,
                       double tau, std::size_t l_max, std::size_t stream_length,
                       unsigned seeds) {
  const std::vector<double> alphas = cli::parse_value_grid(alphas_text);
  std::vector<GridRow> rows;
  try {
    rows = phase_transition(alphas, tau, l_max, stream_length, seeds, c.seed);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  auto manifest = cli::manifest_base("simulate phase");
  auto& params = manifest["parameters"];
  params["alphas"] = alphas;
  params["tau"] = tau;
  params["l_max"] = l_max;
  params["stream_length"] = stream_length;
  params["seeds"] = seeds;
  params["seed"] = c.seed;
  finish_grid(c, "phase", "alpha", rows, false, false, std::move(manifest));
  return 0;
}

int run_simulate_freezing(const SimCommonArgs& c, const FreezingConfig& cfg_in,
                          double tau) {
  FreezingConfig cfg = cfg_in;
  cfg.seed = c.seed;
  FreezingDemo demo;
  try {
    demo = freezing_demo(MarkovSpec::cycle_pattern_101(),
                         MarkovSpec::cycle_pattern_100(), cfg);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  fs::create_directories(c.output_dir);
  const fs::path dir(c.output_dir);
  auto manifest = cli::manifest_base("simulate freezing");
  auto& params = manifest["parameters"];
  params["train_length"] = cfg.train_length;
  params["test_length"] = cfg.test_length;
  params["segment_length"] = cfg.segment_length;
  params["model_depth"] = cfg.model_depth;
  params["scan_depth"] = cfg.scan.d_max;
  params["l_min"] = cfg.scan.l_min;
  params["l_max"] = cfg.scan.l_max;
  params["tau"] = tau;
  params["seed"] = cfg.seed;

  const auto emit_profile = [&](const char* name, const ScanProfile& profile) {
    std::ostringstream out;
    write_profile_csv(out, profile);
    cli::write_text_file(dir / name, out.str());
    manifest["outputs"].push_back((dir / name).string());
  };
  emit_profile("frozen_profile.csv", demo.frozen);
  emit_profile("adaptive_profile.csv", demo.adaptive);

  const std::vector<FlaggedSegment> flags = flag_segments(demo.frozen, tau);
  {
    std::ostringstream out;
    write_flags_csv(out, demo.frozen, flags, tau);
    cli::write_text_file(dir / "frozen_flags.csv", out.str());
    manifest["outputs"].push_back((dir / "frozen_flags.csv").string());
  }
  if (c.svg) {
    cli::write_text_file(dir / "freezing.svg",
                         cli::render_scan_svg(demo.test_stream, demo.frozen,
                                              flags, tau));
    manifest["outputs"].push_back((dir / "freezing.svg").string());
  }
  cli::write_manifest(dir / "manifest.json", manifest);

  const double frozen_min =
      *std::min_element(demo.frozen.delta.begin(), demo.frozen.delta.end());
  const double adaptive_min =
      *std::min_element(demo.adaptive.delta.begin(), demo.adaptive.delta.end());
  std::printf("segment: [%zu, %zu)\n", demo.segment_start,
              demo.segment_start + demo.segment_length);
  std::printf("frozen min delta: %.6f bits\n", frozen_min);
  std::printf("adaptive min delta: %.6f bits\n", adaptive_min);
  std::printf("frozen flags at tau=%.6g: %zu\n", tau, flags.size());
  return 0;
}

// ------------------------------------------------------------- binarize --

struct BinarizeArgs {
  std::string input;
  std::string output;
  std::string mode;
  std::uint64_t seed = 1;
  bool skip_invalid = false;
  std::size_t count = 100000;
  std::uint32_t randu_seed = 65539;
  std::size_t wrap = 64;
};

int run_binarize(const BinarizeArgs& a) {
  if (a.mode != "randu" && a.input.empty()) {
    throw UsageError("mode '" + a.mode + "' needs --input");
  }

  BitSequence bits;
  if (a.mode == "compare") {
    const std::string text = cli::read_text_file(a.input);
    try {
      const std::vector<double> values = binarize::parse_numeric_lines(text);
      bits = binarize::consecutive_comparison(values, a.seed);
    } catch (const std::invalid_argument& e) {
      throw DataError(a.input + ": " + e.what());
    }
  } else if (a.mode == "dna") {
    const std::string text = cli::read_text_file(a.input);
    try {
      std::string bases;
      if (!text.empty() && text[0] == '>') {
        bases = binarize::load_fasta(text);
      } else {
        for (char ch : text) {
          if (!std::isspace(static_cast<unsigned char>(ch))) bases.push_back(ch);
        }
      }
      bits = binarize::dna_to_bits(bases, a.skip_invalid);
    } catch (const std::invalid_argument& e) {
      throw DataError(a.input + ": " + e.what());
    }
  } else if (a.mode == "randu") {
    try {
      bits = binarize::randu_bits(a.count, a.randu_seed);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  } else if (a.mode == "bits") {
    bits = cli::load_bits_file(a.input);
  } else {
    throw UsageError("unknown mode '" + a.mode +
                     "' (expected compare|dna|randu|bits)");
  }

  cli::write_text_file(a.output, binarize::write_bit_text(bits, a.wrap));
  auto manifest = cli::manifest_base("binarize");
  auto& params = manifest["parameters"];
  params["mode"] = a.mode;
  if (a.mode == "compare") params["seed"] = a.seed;
  if (a.mode == "dna") params["skip_invalid"] = a.skip_invalid;
  if (a.mode == "randu") {
    params["count"] = a.count;
    params["randu_seed"] = a.randu_seed;
  }
  params["wrap"] = a.wrap;
  if (!a.input.empty()) manifest["inputs"].push_back(a.input);
  manifest["outputs"].push_back(a.output);
  cli::write_manifest(a.output + ".manifest.json", manifest);
  std::printf("bits: %zu\n", bits.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information-theoretic detection of atypical segments in "
               "binary streams"};
  app.set_version_flag("--version", std::string(cli::kToolVersion));
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train = app.add_subcommand(
      "train", "Train a frozen context-tree model from bit-text files");
  train->add_option("--input", train_args.inputs, "bit-text training file(s)")
      ->required();
  train->add_option("--depth", train_args.depth, "context depth")
      ->capture_default_str();
  train->add_option("--model-out", train_args.model_out, "output model path")
      ->required();

  ScanArgs scan_args;
  auto* scan_cmd = app.add_subcommand(
      "scan", "Scan a bit stream for segments cheaper to describe in themselves");
  scan_cmd->add_option("--input", scan_args.input, "bit-text stream")->required();
  auto* model_opt =
      scan_cmd->add_option("--model", scan_args.model_path, "frozen model path");
  scan_cmd->add_option("--iid-p", scan_args.iid_p,
                       "typical iid bias instead of a model")
      ->excludes(model_opt);
  scan_cmd->add_option("--tau", scan_args.tau,
                       "flag threshold in bits (omit for ranking mode)");
  scan_cmd->add_option("--l-min", scan_args.l_min, "minimum window length")
      ->capture_default_str();
  scan_cmd->add_option("--l-max", scan_args.l_max, "maximum window length")
      ->capture_default_str();
  scan_cmd->add_option("--depth", scan_args.depth, "maximum context depth")
      ->capture_default_str();
  scan_cmd->add_option("--workers", scan_args.workers, "worker threads")
      ->capture_default_str();
  scan_cmd->add_flag("--no-prune", scan_args.no_prune,
                     "disable the exact lower-bound skip rule");
  scan_cmd->add_flag("--svg", scan_args.svg, "also render a two-panel figure");
  scan_cmd->add_option("--output-dir", scan_args.output_dir, "output directory")
      ->capture_default_str();

  auto* sim = app.add_subcommand("simulate", "Seeded Monte-Carlo studies");
  sim->require_subcommand(1);

  SimCommonArgs pa_common;
  double pa_p = 0.5, pa_tau = 1.0;
  std::vector<std::uint64_t> pa_lengths = {100, 316, 1000, 3162, 10000};
  auto* sim_pa = sim->add_subcommand(
      "pa", "False-alarm rate of the fixed-length test vs its bound");
  sim_pa->add_option("--p", pa_p, "typical bias")->capture_default_str();
  sim_pa->add_option("--tau", pa_tau, "header bits")->capture_default_str();
  sim_pa->add_option("--lengths", pa_lengths, "length grid")
      ->delimiter(',')
      ->capture_default_str();
  sim_pa->add_option("--trials", pa_common.trials, "trials per point")
      ->capture_default_str();
  sim_pa->add_option("--seed", pa_common.seed, "master seed")->capture_default_str();
  sim_pa->add_option("--output-dir", pa_common.output_dir, "output directory")
      ->capture_default_str();
  sim_pa->add_flag("--svg", pa_common.svg, "also render the curve");

  SimCommonArgs miss_common;
  double miss_p = 0.5, miss_pa = 0.3, miss_tau = 2.0;
  std::vector<std::uint64_t> miss_lengths = {100, 200, 400};
  auto* sim_miss =
      sim->add_subcommand("miss", "Miss rate against an alternative bias");
  sim_miss->add_option("--p", miss_p, "typical bias")->capture_default_str();
  sim_miss->add_option("--pa", miss_pa, "alternative bias")->capture_default_str();
  sim_miss->add_option("--tau", miss_tau, "header bits")->capture_default_str();
  sim_miss->add_option("--lengths", miss_lengths, "length grid")
      ->delimiter(',')
      ->capture_default_str();
  sim_miss->add_option("--trials", miss_common.trials, "trials per point")
      ->capture_default_str();
  sim_miss->add_option("--seed", miss_common.seed, "master seed")
      ->capture_default_str();
  sim_miss->add_option("--output-dir", miss_common.output_dir, "output directory")
      ->capture_default_str();
  sim_miss->add_flag("--svg", miss_common.svg, "also render the curve");

  SimCommonArgs phase_common;
  std::string phase_alphas = "0.5:3:0.5";
  double phase_tau = 12.0;
  std::size_t phase_l_max = 512;
  std::size_t phase_stream = 1 << 16;
  unsigned phase_seeds = 20;
  auto* sim_phase = sim->add_subcommand(
      "phase", "Coverage of the generalized threshold across alpha");
  sim_phase->add_option("--alphas", phase_alphas, "grid: list or start:stop:step")
      ->capture_default_str();
  sim_phase->add_option("--tau", phase_tau, "header bits")->capture_default_str();
  sim_phase->add_option("--l-max", phase_l_max, "maximum window length")
      ->capture_default_str();
  sim_phase->add_option("--stream-length", phase_stream, "bits per stream")
      ->capture_default_str();
  sim_phase->add_option("--seeds", phase_seeds, "streams to average")
      ->capture_default_str();
  sim_phase->add_option("--seed", phase_common.seed, "master seed")
      ->capture_default_str();
  sim_phase->add_option("--output-dir", phase_common.output_dir,
                        "output directory")
      ->capture_default_str();
  sim_phase->add_flag("--svg", phase_common.svg, "also render the curve");

  SimCommonArgs fz_common;
  FreezingConfig fz_cfg;
  fz_cfg.scan.d_max = 8;
  double fz_tau = 20.0;
  auto* sim_fz = sim->add_subcommand(
      "freezing", "Frozen vs adaptive typical coder on 3-state chains");
  sim_fz->add_option("--train-length", fz_cfg.train_length, "training symbols")
      ->capture_default_str();
  sim_fz->add_option("--test-length", fz_cfg.test_length, "test symbols")
      ->capture_default_str();
  sim_fz->add_option("--segment-length", fz_cfg.segment_length,
                     "anomalous symbols (0 for a clean stream)")
      ->capture_default_str();
  sim_fz->add_option("--model-depth", fz_cfg.model_depth, "frozen model depth")
      ->capture_default_str();
  sim_fz->add_option("--depth", fz_cfg.scan.d_max, "maximum scan context depth")
      ->capture_default_str();
  sim_fz->add_option("--l-min", fz_cfg.scan.l_min, "minimum window length")
      ->capture_default_str();
  sim_fz->add_option("--l-max", fz_cfg.scan.l_max, "maximum window length")
      ->capture_default_str();
  sim_fz->add_option("--tau", fz_tau, "flag threshold in bits")
      ->capture_default_str();
  sim_fz->add_option("--seed", fz_common.seed, "master seed")->capture_default_str();
  sim_fz->add_option("--output-dir", fz_common.output_dir, "output directory")
      ->capture_default_str();
  sim_fz->add_flag("--svg", fz_common.svg, "also render the frozen profile");

  BinarizeArgs bin_args;
  auto* bin = app.add_subcommand("binarize", "Turn raw inputs into bit text");
  bin->add_option("--mode", bin_args.mode, "compare|dna|randu|bits")->required();
  bin->add_option("--input", bin_args.input, "input file (not used by randu)");
  bin->add_option("--output", bin_args.output, "bit-text output path")->required();
  bin->add_option("--seed", bin_args.seed, "tie-break seed for compare mode")
      ->capture_default_str();
  bin->add_flag("--skip-invalid", bin_args.skip_invalid,
                "dna mode: drop unknown characters");
  bin->add_option("--count", bin_args.count, "randu mode: bits to generate")
      ->capture_default_str();
  bin->add_option("--randu-seed", bin_args.randu_seed,
                  "randu mode: odd seed below 2^31")
      ->capture_default_str();
  bin->add_option("--wrap", bin_args.wrap, "output line width (0 = one line)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitUsage;
  }

  try {
    if (train->parsed()) return run_train(train_args);
    if (scan_cmd->parsed()) return run_scan(scan_args);
    if (sim->parsed()) {
      if (sim_pa->parsed()) {
        return run_simulate_pa(pa_common, pa_p, pa_tau, pa_lengths);
      }
      if (sim_miss->parsed()) {
        return run_simulate_miss(miss_common, miss_p, miss_pa, miss_tau,
                                 miss_lengths);
      }
      if (sim_phase->parsed()) {
        return run_simulate_phase(phase_common, phase_alphas, phase_tau,
                                  phase_l_max, phase_stream, phase_seeds);
      }
      if (sim_fz->parsed()) return run_simulate_freezing(fz_common, fz_cfg, fz_tau);
    }
    if (bin->parsed()) return run_binarize(bin_args);
    throw UsageError("no subcommand selected");
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitData;
  }
}
