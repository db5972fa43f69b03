// End-to-end tests of the command-line tool: spawns the real binary and
// checks outputs, exit codes, and reproducibility.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "atyp/binarize.hpp"
#include "atyp/bits.hpp"
#include "atyp/rng.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void write_file(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(bool(out));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

fs::path make_scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "atyp_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

RunResult run_cli(const std::string& args, const fs::path& scratch) {
  const fs::path out_path = scratch / "_stdout.txt";
  const fs::path err_path = scratch / "_stderr.txt";
  const std::string cmd = std::string("\"") + ATYP_CLI_PATH + "\" " + args +
                          " > \"" + out_path.string() + "\" 2> \"" +
                          err_path.string() + "\"";
  const int raw = std::system(cmd.c_str());
  RunResult r;
  if (raw != -1 && WIFEXITED(raw)) r.exit_code = WEXITSTATUS(raw);
  r.out = read_file(out_path);
  r.err = read_file(err_path);
  return r;
}

std::string alternating_bits(std::size_t n) {
  std::string s;
  s.reserve(n + n / 64);
  for (std::size_t i = 0; i < n; ++i) {
    s.push_back(i % 2 == 0 ? '0' : '1');
    if (i % 64 == 63) s.push_back('\n');
  }
  s.push_back('\n');
  return s;
}

// columns: n,delta_bits,best_l,best_depth
std::vector<double> profile_deltas(const fs::path& csv) {
  std::istringstream in(read_file(csv));
  std::vector<double> deltas;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'n') continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    deltas.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
  }
  return deltas;
}

std::size_t data_row_count(const fs::path& csv) {
  std::istringstream in(read_file(csv));
  std::size_t rows = 0;
  std::string line;
  bool seen_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!seen_header) {
      seen_header = true;
      continue;
    }
    ++rows;
  }
  return rows;
}

}  // namespace

TEST_CASE("cli: version and help") {
  const fs::path dir = make_scratch("version");
  const RunResult v = run_cli("--version", dir);
  CHECK(v.exit_code == 0);
  CHECK(v.out.find("1.0.0") != std::string::npos);
  const RunResult h = run_cli("--help", dir);
  CHECK(h.exit_code == 0);
  CHECK(h.out.find("train") != std::string::npos);
  CHECK(h.out.find("scan") != std::string::npos);
  CHECK(h.out.find("simulate") != std::string::npos);
  CHECK(h.out.find("binarize") != std::string::npos);
}

TEST_CASE("cli: train is deterministic and reports the model") {
  const fs::path dir = make_scratch("train");
  write_file(dir / "train.bits", alternating_bits(10000));

  const std::string cmd = "train --input \"" + (dir / "train.bits").string() +
                          "\" --depth 4 --model-out \"" +
                          (dir / "m1.model").string() + "\"";
  const RunResult r1 = run_cli(cmd, dir);
  REQUIRE(r1.exit_code == 0);
  CHECK(r1.out.find("nodes:") != std::string::npos);
  CHECK(r1.out.find("training code length:") != std::string::npos);
  CHECK(fs::exists(dir / "m1.model"));

  // manifest alongside the model, machine-readable
  const auto manifest =
      nlohmann::json::parse(read_file(dir / "m1.model.manifest.json"));
  CHECK(manifest.at("subcommand") == "train");
  CHECK(manifest.at("parameters").at("depth") == 4);

  // retraining bit-identically
  const std::string cmd2 = "train --input \"" + (dir / "train.bits").string() +
                           "\" --depth 4 --model-out \"" +
                           (dir / "m2.model").string() + "\"";
  REQUIRE(run_cli(cmd2, dir).exit_code == 0);
  CHECK(read_file(dir / "m1.model") == read_file(dir / "m2.model"));
}

TEST_CASE("cli: train names a missing input path") {
  const fs::path dir = make_scratch("train_missing");
  const RunResult r = run_cli("train --input \"" + (dir / "nope.bits").string() +
                                  "\" --model-out \"" +
                                  (dir / "m.model").string() + "\"",
                              dir);
  CHECK(r.exit_code == 3);
  CHECK(r.err.find("nope.bits") != std::string::npos);
}

TEST_CASE("cli: scanning training-like data with its own model stays quiet") {
  const fs::path dir = make_scratch("scan_quiet");
  write_file(dir / "train.bits", alternating_bits(10000));
  write_file(dir / "test.bits", alternating_bits(2000));
  REQUIRE(run_cli("train --input \"" + (dir / "train.bits").string() +
                      "\" --depth 4 --model-out \"" + (dir / "m.model").string() +
                      "\"",
                  dir)
              .exit_code == 0);

  const std::string scan_cmd =
      "scan --input \"" + (dir / "test.bits").string() + "\" --model \"" +
      (dir / "m.model").string() + "\" --tau 8 --l-max 256 --depth 8" +
      " --output-dir \"" + (dir / "out").string() + "\"";
  const RunResult r = run_cli(scan_cmd, dir);
  REQUIRE(r.exit_code == 0);

  const auto deltas = profile_deltas(dir / "out" / "profile.csv");
  REQUIRE(deltas.size() == 2000 - 16 + 1);
  for (double d : deltas) CHECK(d > -8.0);
  CHECK(data_row_count(dir / "out" / "flags.csv") == 0);

  const auto manifest =
      nlohmann::json::parse(read_file(dir / "out" / "manifest.json"));
  CHECK(manifest.at("parameters").at("l_max") == 256);
  CHECK(manifest.at("parameters").at("tau") == 8.0);

  // bit-identical rerun
  const std::string scan_cmd2 =
      "scan --input \"" + (dir / "test.bits").string() + "\" --model \"" +
      (dir / "m.model").string() + "\" --tau 8 --l-max 256 --depth 8" +
      " --output-dir \"" + (dir / "out2").string() + "\"";
  REQUIRE(run_cli(scan_cmd2, dir).exit_code == 0);
  CHECK(read_file(dir / "out" / "profile.csv") ==
        read_file(dir / "out2" / "profile.csv"));
}

TEST_CASE("cli: scan finds a seeded insertion and renders svg") {
  const fs::path dir = make_scratch("scan_insert");
  atyp::Rng rng(424242);
  std::vector<atyp::Bit> bits;
  for (std::size_t i = 0; i < 3000; ++i) bits.push_back(rng.next_fair_bit());
  for (std::size_t i = 0; i < 300; ++i) {
    bits.push_back(rng.next_bernoulli(0.9) ? 1 : 0);
  }
  for (std::size_t i = 0; i < 1500; ++i) bits.push_back(rng.next_fair_bit());
  write_file(dir / "stream.bits",
             atyp::binarize::write_bit_text(atyp::BitSpan(bits), 64));

  const RunResult r = run_cli(
      "scan --input \"" + (dir / "stream.bits").string() +
          "\" --iid-p 0.5 --tau 12 --l-max 128 --depth 8 --svg --output-dir \"" +
          (dir / "out").string() + "\"",
      dir);
  REQUIRE(r.exit_code == 0);
  CHECK(data_row_count(dir / "out" / "flags.csv") >= 1);

  // top flag overlaps the planted segment
  std::istringstream in(read_file(dir / "out" / "flags.csv"));
  std::string line;
  std::size_t start = 0, length = 0;
  bool found = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 's') continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    start = std::stoul(line.substr(0, c1));
    length = std::stoul(line.substr(c1 + 1, c2 - c1 - 1));
    found = true;
    break;
  }
  REQUIRE(found);
  CHECK(start < 3300);
  CHECK(start + length > 3000);

  const std::string svg = read_file(dir / "out" / "scan.svg");
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
}

TEST_CASE("cli: ranking mode without tau") {
  const fs::path dir = make_scratch("scan_rank");
  write_file(dir / "stream.bits", alternating_bits(600));
  const RunResult r = run_cli(
      "scan --input \"" + (dir / "stream.bits").string() +
          "\" --iid-p 0.5 --l-max 64 --depth 4 --output-dir \"" +
          (dir / "out").string() + "\"",
      dir);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("ranking mode") != std::string::npos);
  CHECK(fs::exists(dir / "out" / "ranked.csv"));
  CHECK(!fs::exists(dir / "out" / "flags.csv"));

  // sorted ascending by delta
  std::istringstream in(read_file(dir / "out" / "ranked.csv"));
  std::string line;
  double prev = -1e300;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'n') continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    const double d = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
    CHECK(d >= prev);
    prev = d;
    ++rows;
  }
  CHECK(rows == 600 - 16 + 1);
}

TEST_CASE("cli: scan usage and data errors are distinct") {
  const fs::path dir = make_scratch("scan_errors");
  write_file(dir / "stream.bits", alternating_bits(200));
  const std::string input = "\"" + (dir / "stream.bits").string() + "\"";
  const std::string out = " --output-dir \"" + (dir / "out").string() + "\"";

  SUBCASE("l_min above l_max is a usage error") {
    const RunResult r = run_cli(
        "scan --input " + input + " --iid-p 0.5 --l-min 600 --l-max 64" + out,
        dir);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("--l-min") != std::string::npos);
  }
  SUBCASE("model and iid-p together are a usage error") {
    const RunResult r = run_cli(
        "scan --input " + input + " --iid-p 0.5 --model whatever" + out, dir);
    CHECK(r.exit_code == 2);
  }
  SUBCASE("neither model nor iid-p is a usage error") {
    const RunResult r = run_cli("scan --input " + input + out, dir);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("--model") != std::string::npos);
  }
  SUBCASE("missing input file is a data error") {
    const RunResult r = run_cli(
        "scan --input \"" + (dir / "absent.bits").string() + "\" --iid-p 0.5" +
            out,
        dir);
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("absent.bits") != std::string::npos);
  }
  SUBCASE("empty input is a data error") {
    write_file(dir / "empty.bits", "");
    const RunResult r = run_cli(
        "scan --input \"" + (dir / "empty.bits").string() + "\" --iid-p 0.5" +
            out,
        dir);
    CHECK(r.exit_code == 3);
  }
  SUBCASE("corrupt bit text is a data error naming the position") {
    write_file(dir / "bad.bits", "0101x01\n");
    const RunResult r = run_cli(
        "scan --input \"" + (dir / "bad.bits").string() + "\" --iid-p 0.5" + out,
        dir);
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("bad.bits") != std::string::npos);
  }
}

TEST_CASE("cli: simulate pa emits a grid under its bound") {
  const fs::path dir = make_scratch("sim_pa");
  const RunResult r = run_cli(
      "simulate pa --p 0.5 --tau 1 --lengths 64,256 --trials 4000 --seed 9 "
      "--output-dir \"" +
          (dir / "out").string() + "\"",
      dir);
  REQUIRE(r.exit_code == 0);
  const std::string csv = read_file(dir / "out" / "pa.csv");
  CHECK(csv.find("l,estimate,ci_halfwidth,bound") != std::string::npos);
  std::istringstream in(csv);
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'l') continue;
    double x, est, ci, bound;
    char c;
    std::istringstream row(line);
    row >> x >> c >> est >> c >> ci >> c >> bound;
    CHECK(est <= bound + ci);
    ++rows;
  }
  CHECK(rows == 2);
}

TEST_CASE("cli: simulate phase and freezing smoke") {
  const fs::path dir = make_scratch("sim_misc");
  const RunResult ph = run_cli(
      "simulate phase --alphas 0.5:3:2.5 --tau 8 --l-max 64 "
      "--stream-length 4096 --seeds 2 --output-dir \"" +
          (dir / "ph").string() + "\"",
      dir);
  CHECK(ph.exit_code == 0);
  CHECK(data_row_count(dir / "ph" / "phase.csv") == 2);

  const RunResult fz = run_cli(
      "simulate freezing --train-length 4000 --test-length 1200 "
      "--segment-length 300 --model-depth 3 --depth 4 --l-max 128 "
      "--output-dir \"" +
          (dir / "fz").string() + "\"",
      dir);
  CHECK(fz.exit_code == 0);
  CHECK(fs::exists(dir / "fz" / "frozen_profile.csv"));
  CHECK(fs::exists(dir / "fz" / "adaptive_profile.csv"));
  CHECK(fs::exists(dir / "fz" / "frozen_flags.csv"));
  CHECK(fz.out.find("frozen min delta:") != std::string::npos);

  const RunResult bad = run_cli("simulate phase --alphas 3:0.5:1", dir);
  CHECK(bad.exit_code == 2);
}

TEST_CASE("cli: binarize modes") {
  const fs::path dir = make_scratch("binarize");

  SUBCASE("compare") {
    write_file(dir / "nums.txt", "1\n2\n3\n");
    const RunResult r = run_cli("binarize --mode compare --input \"" +
                                    (dir / "nums.txt").string() +
                                    "\" --output \"" + (dir / "o.bits").string() +
                                    "\"",
                                dir);
    REQUIRE(r.exit_code == 0);
    CHECK(read_file(dir / "o.bits") == "11\n");
  }
  SUBCASE("dna, raw and fasta") {
    write_file(dir / "raw.txt", "ACGT\n");
    REQUIRE(run_cli("binarize --mode dna --input \"" + (dir / "raw.txt").string() +
                        "\" --output \"" + (dir / "raw.bits").string() + "\"",
                    dir)
                .exit_code == 0);
    CHECK(read_file(dir / "raw.bits") == "00011011\n");

    write_file(dir / "seq.fa", ">label\nAC\nGT\n");
    REQUIRE(run_cli("binarize --mode dna --input \"" + (dir / "seq.fa").string() +
                        "\" --output \"" + (dir / "fa.bits").string() + "\"",
                    dir)
                .exit_code == 0);
    CHECK(read_file(dir / "fa.bits") == "00011011\n");
  }
  SUBCASE("dna rejects junk without --skip-invalid") {
    write_file(dir / "junk.txt", "ACXGT\n");
    const std::string base = "binarize --mode dna --input \"" +
                             (dir / "junk.txt").string() + "\" --output \"" +
                             (dir / "junk.bits").string() + "\"";
    CHECK(run_cli(base, dir).exit_code == 3);
    CHECK(run_cli(base + " --skip-invalid", dir).exit_code == 0);
    CHECK(read_file(dir / "junk.bits") == "00011011\n");
  }
  SUBCASE("randu is reproducible and validated") {
    const std::string base = "binarize --mode randu --count 128 --output \"";
    REQUIRE(run_cli(base + (dir / "r1.bits").string() + "\"", dir).exit_code == 0);
    REQUIRE(run_cli(base + (dir / "r2.bits").string() + "\"", dir).exit_code == 0);
    CHECK(read_file(dir / "r1.bits") == read_file(dir / "r2.bits"));
    CHECK(run_cli("binarize --mode randu --count 16 --randu-seed 2 --output \"" +
                      (dir / "r3.bits").string() + "\"",
                  dir)
              .exit_code == 2);  // even seed
  }
  SUBCASE("bits round trip and mode validation") {
    write_file(dir / "in.bits", "0 1\n1\t0\n");
    REQUIRE(run_cli("binarize --mode bits --input \"" + (dir / "in.bits").string() +
                        "\" --output \"" + (dir / "norm.bits").string() +
                        "\" --wrap 0",
                    dir)
                .exit_code == 0);
    CHECK(read_file(dir / "norm.bits") == "0110\n");
    CHECK(run_cli("binarize --mode nonsense --input x --output y", dir)
              .exit_code == 2);
  }
  SUBCASE("manifest written next to the output") {
    write_file(dir / "nums.txt", "3\n1\n");
    REQUIRE(run_cli("binarize --mode compare --input \"" +
                        (dir / "nums.txt").string() + "\" --output \"" +
                        (dir / "m.bits").string() + "\"",
                    dir)
                .exit_code == 0);
    const auto manifest =
        nlohmann::json::parse(read_file(dir / "m.bits.manifest.json"));
    CHECK(manifest.at("subcommand") == "binarize");
    CHECK(manifest.at("parameters").at("mode") == "compare");
  }
}
