#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "atyp/bits.hpp"
#include "atyp/frozen.hpp"
#include "atyp/rng.hpp"

using namespace atyp;

namespace {

BitSequence random_bits(Rng& rng, std::size_t len, double p) {
  std::vector<Bit> v(len);
  for (auto& b : v) b = rng.next_bernoulli(p) ? 1 : 0;
  return BitSequence(std::move(v));
}

BitSequence alternating(std::size_t len) {
  std::vector<Bit> v(len);
  for (std::size_t i = 0; i < len; ++i) v[i] = Bit(i % 2);
  return BitSequence(std::move(v));
}

// Most-recent-first context for position i of x, up to depth bits.
std::vector<Bit> context_at(BitSpan x, std::size_t i, unsigned depth) {
  std::vector<Bit> ctx;
  for (unsigned k = 0; k < depth && k < i; ++k) ctx.push_back(x[i - 1 - k]);
  return ctx;
}

double root_w1(const FrozenModel& m) { return m.node(0).w1; }

}  // namespace

TEST_CASE("frozen: exact worked example, depth 1 trained on 0110") {
  const FrozenModel m =
      FrozenModel::train({BitSequence::from_string("0110")}, 1);
  CHECK(m.depth() == 1);
  CHECK(m.node_count() == 3);

  const auto root = m.node(0);
  CHECK(root.counts == KTCounts{1, 2});
  CHECK(root.depth == 0);
  CHECK(root.w1 == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(root.q1 == doctest::Approx(5.0 / 8.0).epsilon(1e-15));

  // Leaves carry w1 = 1 exactly and the frozen KT predictive.
  REQUIRE(root.child[0] >= 0);
  REQUIRE(root.child[1] >= 0);
  const auto after0 = m.node(std::size_t(root.child[0]));
  const auto after1 = m.node(std::size_t(root.child[1]));
  CHECK(after0.counts == KTCounts{0, 1});
  CHECK(after1.counts == KTCounts{1, 1});
  CHECK(after0.w1 == 1.0);
  CHECK(after1.w1 == 1.0);
  CHECK(after0.q1 == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(after1.q1 == doctest::Approx(0.5).epsilon(1e-15));

  // Mixture predictions, exact fractions.
  const Bit c0[] = {0};
  const Bit c1[] = {1};
  const Bit c01[] = {0, 1};
  CHECK(m.predict_one({}) == doctest::Approx(9.0 / 16.0).epsilon(1e-14));
  CHECK(m.predict_one(c0) == doctest::Approx(11.0 / 16.0).epsilon(1e-14));
  CHECK(m.predict_one(c1) == doctest::Approx(9.0 / 16.0).epsilon(1e-14));
  // Context beyond the model depth is ignored.
  CHECK(m.predict_one(c01) == m.predict_one(BitSpan(c01).first(1)));

  // -log2(11/16 * 7/16 * 11/16)
  const BitSequence x = BitSequence::from_string("101");
  CHECK(m.codelength(x, c0) ==
        doctest::Approx(2.2737818406678014).epsilon(1e-12));
}

TEST_CASE("frozen: unseen child contributes exactly one half") {
  // Training 0000 at depth 1 never observes context 1.
  const FrozenModel m =
      FrozenModel::train({BitSequence::from_string("0000")}, 1);
  const Bit c1[] = {1};
  const Bit c0[] = {0};
  // root: w1 = 1/2, q1 = 1/8; deeper branch for context 1 is unseen -> 1/2.
  CHECK(m.predict_one(c1) == doctest::Approx(5.0 / 16.0).epsilon(1e-14));
  CHECK(m.predict_one(c0) == doctest::Approx(1.0 / 8.0).epsilon(1e-14));
}

TEST_CASE("frozen: boundary bookkeeping, one sequence of length depth+1") {
  const FrozenModel m =
      FrozenModel::train({BitSequence::from_string("010")}, 2);
  CHECK(m.node_count() == 3);  // one coded symbol -> one full-depth path
  for (std::size_t id = 0; id < m.node_count(); ++id) {
    CHECK(m.node(id).counts.total() == 1);
  }
}

TEST_CASE("frozen: training validation") {
  CHECK_THROWS_AS(FrozenModel::train({}, 2), std::invalid_argument);
  // No sequence longer than the depth: nothing to code.
  CHECK_THROWS_AS(
      FrozenModel::train({BitSequence::from_string("01"),
                          BitSequence::from_string("11")},
                         2),
      std::invalid_argument);
  // Too-short sequences are skipped, not counted.
  const FrozenModel with_short = FrozenModel::train(
      {alternating(40), BitSequence::from_string("01")}, 2);
  const FrozenModel without = FrozenModel::train({alternating(40)}, 2);
  CHECK(with_short.serialize() == without.serialize());
}

TEST_CASE("frozen: multi-sequence training pools coded symbols") {
  const FrozenModel m =
      FrozenModel::train({alternating(10), alternating(6)}, 2);
  // (10 - 2) + (6 - 2) coded symbols land at the root.
  CHECK(m.node(0).counts.total() == 12);
}

TEST_CASE("frozen: depth 0 degenerates to the frozen KT estimate") {
  const FrozenModel m =
      FrozenModel::train({BitSequence::from_string("011")}, 0);
  CHECK(m.node_count() == 1);
  CHECK(m.node(0).w1 == 1.0);
  const Bit any_ctx[] = {1, 0, 1};
  CHECK(m.predict_one({}) == doctest::Approx(5.0 / 8.0).epsilon(1e-15));
  CHECK(m.predict_one(any_ctx) == doctest::Approx(5.0 / 8.0).epsilon(1e-15));

  // Balanced counts -> prediction 1/2 -> exactly one bit per symbol.
  const FrozenModel balanced =
      FrozenModel::train({BitSequence::from_string("0110")}, 0);
  Rng rng(7);
  const BitSequence x = random_bits(rng, 100, 0.8);
  CHECK(balanced.codelength(x) == doctest::Approx(100.0).epsilon(1e-15));
}

TEST_CASE("frozen: alternating training source, depth 2") {
  const FrozenModel m = FrozenModel::train({alternating(1000)}, 2);

  // Prediction after (prev = 0, prev-prev = 1) is almost certainly 1.
  const Bit ctx[] = {0, 1};
  const double p1 = m.predict_one(ctx);
  CHECK(p1 > 0.9);
  CHECK(p1 == doctest::Approx(0.999).epsilon(1e-9));

  // Structured training pushes the root posterior of the memoryless
  // hypothesis to essentially zero.
  CHECK(root_w1(m) > 0.0);
  CHECK(root_w1(m) < 1e-290);

  // Alternating test data is almost free, constant data is expensive.
  const double cl_alt = m.codelength(alternating(100));
  const double cl_const = m.codelength(BitSequence(std::vector<Bit>(100, 1)));
  CHECK(cl_alt == doctest::Approx(1.5574544699417618).epsilon(1e-9));
  CHECK(cl_const == doctest::Approx(198.71463165522099).epsilon(1e-9));
  CHECK(cl_const > 50.0 * cl_alt);
}

TEST_CASE("frozen: iid training drives the root posterior toward memoryless") {
  Rng rng(21);
  const BitSequence big = random_bits(rng, 10000, 0.5);
  const BitSequence small(
      std::vector<Bit>(big.begin(), big.begin() + 100));
  const FrozenModel m_big = FrozenModel::train({big}, 2);
  const FrozenModel m_small = FrozenModel::train({small}, 2);
  CHECK(root_w1(m_big) > 0.85);
  CHECK(root_w1(m_big) > root_w1(m_small));
}

TEST_CASE("frozen: structural invariants on a trained model") {
  Rng rng(5);
  const FrozenModel m = FrozenModel::train(
      {random_bits(rng, 3000, 0.4), random_bits(rng, 500, 0.9)}, 4);
  for (std::size_t id = 0; id < m.node_count(); ++id) {
    const auto v = m.node(id);
    CHECK(v.w1 >= 0.0);
    CHECK(v.w1 <= 1.0);
    CHECK(v.q1 > 0.0);
    CHECK(v.q1 < 1.0);
    CHECK(v.counts.total() >= 1);
    CHECK(v.depth <= m.depth());
    if (v.depth == m.depth()) {
      CHECK(v.w1 == 1.0);
      CHECK(v.child[0] == -1);
      CHECK(v.child[1] == -1);
    }
    for (int b = 0; b < 2; ++b) {
      if (v.child[b] >= 0) {
        CHECK(m.node(std::size_t(v.child[b])).depth == v.depth + 1);
      }
    }
  }
}

TEST_CASE("frozen: predictions stay strictly inside (0,1)") {
  Rng rng(11);
  const FrozenModel m = FrozenModel::train({random_bits(rng, 400, 0.2)}, 3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Bit> ctx(rng.next_below(6));
    for (auto& b : ctx) b = rng.next_fair_bit();
    const double p = m.predict_one(ctx);
    CHECK(p > 0.0);
    CHECK(p < 1.0);
  }
}

TEST_CASE("frozen: prediction passes leave the model untouched") {
  Rng rng(3);
  const FrozenModel m = FrozenModel::train({random_bits(rng, 800, 0.6)}, 3);
  const std::uint64_t before = m.state_digest();
  const BitSequence probe = random_bits(rng, 300, 0.3);
  (void)m.codelength(probe);
  (void)m.cumulative_bits(probe);
  const Bit ctx[] = {1, 0, 1};
  (void)m.predict_one(ctx);
  CHECK(m.state_digest() == before);
}

TEST_CASE("frozen: windowed cost equals cumulative difference") {
  Rng rng(17);
  const unsigned depth = 4;
  const FrozenModel m =
      FrozenModel::train({random_bits(rng, 2000, 0.5)}, depth);
  const BitSequence x = random_bits(rng, 500, 0.3);
  const std::vector<double> prefix = m.cumulative_bits(x);
  REQUIRE(prefix.size() == x.size() + 1);
  CHECK(prefix[0] == 0.0);
  for (std::size_t n : {std::size_t(0), std::size_t(1), std::size_t(3),
                        std::size_t(100), std::size_t(487)}) {
    for (std::size_t l : {std::size_t(1), std::size_t(7), std::size_t(13)}) {
      if (n + l > x.size()) continue;
      const std::vector<Bit> ctx = context_at(x, n, depth);
      const double windowed = m.codelength(x.subspan(n, l), ctx);
      CHECK(windowed ==
            doctest::Approx(prefix[n + l] - prefix[n]).epsilon(1e-9));
    }
  }
}

TEST_CASE("frozen: codelength is additive under context threading") {
  Rng rng(29);
  const FrozenModel m = FrozenModel::train({random_bits(rng, 1500, 0.7)}, 3);
  const BitSequence x = random_bits(rng, 80, 0.5);
  const BitSequence y = random_bits(rng, 60, 0.5);
  BitSequence xy = x;
  xy.append(y);
  const std::vector<Bit> mid_ctx = context_at(xy, x.size(), m.depth());
  CHECK(m.codelength(xy) ==
        doctest::Approx(m.codelength(x) + m.codelength(y, mid_ctx))
            .epsilon(1e-9));
}

TEST_CASE("frozen: serialization round-trips bit-exactly") {
  Rng rng(41);
  const FrozenModel m = FrozenModel::train(
      {random_bits(rng, 1200, 0.35), alternating(300)}, 5);
  const std::vector<std::uint8_t> bytes = m.serialize();
  const FrozenModel back = FrozenModel::deserialize(bytes);
  CHECK(back.depth() == m.depth());
  CHECK(back.node_count() == m.node_count());
  CHECK(back.serialize() == bytes);
  CHECK(back.state_digest() == m.state_digest());

  // Bit-identical behavior, not just structure.
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Bit> ctx(rng.next_below(m.depth() + 2));
    for (auto& b : ctx) b = rng.next_fair_bit();
    CHECK(back.predict_one(ctx) == m.predict_one(ctx));
  }
}

TEST_CASE("frozen: retraining on identical data is byte-identical") {
  Rng r1(99), r2(99);
  const FrozenModel a = FrozenModel::train({random_bits(r1, 700, 0.5)}, 4);
  const FrozenModel b = FrozenModel::train({random_bits(r2, 700, 0.5)}, 4);
  CHECK(a.serialize() == b.serialize());
}

TEST_CASE("frozen: file round trip") {
  Rng rng(55);
  const FrozenModel m = FrozenModel::train({random_bits(rng, 600, 0.25)}, 3);
  const std::filesystem::path path =
      std::filesystem::temp_directory_path() / "atyp_frozen_roundtrip.bin";
  m.save_file(path.string());
  const FrozenModel back = FrozenModel::load_file(path.string());
  CHECK(back.serialize() == m.serialize());
  std::filesystem::remove(path);
  CHECK_THROWS_AS(FrozenModel::load_file(path.string()), std::runtime_error);
}

TEST_CASE("frozen: deserialization rejects malformed input") {
  const FrozenModel m =
      FrozenModel::train({BitSequence::from_string("0110")}, 1);
  const std::vector<std::uint8_t> good = m.serialize();

  SUBCASE("bad magic") {
    auto bytes = good;
    bytes[0] ^= 0xff;
    CHECK_THROWS_AS(FrozenModel::deserialize(bytes), std::runtime_error);
  }
  SUBCASE("unsupported version") {
    auto bytes = good;
    bytes[8] = 0x7f;
    CHECK_THROWS_AS(FrozenModel::deserialize(bytes), std::runtime_error);
  }
  SUBCASE("truncated") {
    auto bytes = good;
    bytes.pop_back();
    CHECK_THROWS_AS(FrozenModel::deserialize(bytes), std::runtime_error);
    CHECK_THROWS_AS(
        FrozenModel::deserialize(std::span<const std::uint8_t>(
            bytes.data(), 10)),
        std::runtime_error);
  }
  SUBCASE("w1 out of range") {
    auto bytes = good;
    // First record starts after the 24-byte header; w1 sits at offset 9
    // inside the record.
    const std::size_t w1_off = 24 + 9;
    const std::uint64_t two = 0x4000000000000000ULL;  // 2.0
    for (int i = 0; i < 8; ++i) {
      bytes[w1_off + std::size_t(i)] = std::uint8_t(two >> (8 * i));
    }
    CHECK_THROWS_AS(FrozenModel::deserialize(bytes), std::runtime_error);
  }
  SUBCASE("non-root first record") {
    auto bytes = good;
    // Swap record 0 and record 1 (records are 33 bytes).
    for (std::size_t i = 0; i < 33; ++i) {
      std::swap(bytes[24 + i], bytes[24 + 33 + i]);
    }
    CHECK_THROWS_AS(FrozenModel::deserialize(bytes), std::runtime_error);
  }
}
