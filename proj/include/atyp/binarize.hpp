#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "atyp/bits.hpp"

// Ingestion helpers turning real-world sources into bit sequences:
// consecutive-comparison encoding of numeric series, a fixed 2-bit DNA map,
// the RANDU bit-sum construction, and plain bit-text parsing.  Everything
// here is deterministic given (input, seed).
namespace atyp::binarize {

// bit_i = 1 if values[i+1] > values[i], 0 if smaller; equal neighbours draw
// a fair coin from a generator seeded once with `seed` (consumed in tie
// order, so strictly monotone inputs are seed-independent).  Needs at least
// two values.
BitSequence consecutive_comparison(std::span<const double> values,
                                   std::uint64_t seed);

// Fixed 2-bit map A->00, C->01, G->10, T->11 (case-insensitive).  Any other
// character throws std::invalid_argument naming the position, unless
// skip_invalid is set, in which case it is dropped.
BitSequence dna_to_bits(std::string_view bases, bool skip_invalid = false);

// Inverse of dna_to_bits; the bit count must be even.
std::string bits_to_dna(BitSpan bits);

// RANDU generator x_{k+1} = 65539 x_k mod 2^31, emitting one bit per step:
// 1 iff the popcount of the 31-bit state exceeds 15.5.  The seed must be odd
// (and inside [1, 2^31)); count must be at least 1.
BitSequence randu_bits(std::size_t count, std::uint32_t seed);

// Parses '0'/'1' text; whitespace is ignored.  Other characters throw with
// their line and column.
BitSequence parse_bit_text(std::string_view text);

// Writes bits as '0'/'1' characters, wrapped at wrap columns (0 = one
// line), ending with a newline when non-empty.  parse_bit_text inverts it.
std::string write_bit_text(BitSpan bits, std::size_t wrap = 64);

// One numeric value per line; blank lines are skipped.  Unparseable lines
// throw with the line number.
std::vector<double> parse_numeric_lines(std::string_view text);

// FASTA: lines starting with '>' are headers and are skipped, remaining
// lines are concatenated with whitespace removed.  Base validation happens
// later in dna_to_bits.
std::string load_fasta(std::string_view text);

// Whitespace-separated tokens, stripped of leading/trailing punctuation;
// tokens left empty are dropped.  Returns each surviving token's length,
// ready for consecutive_comparison.
std::vector<double> word_lengths(std::string_view text);

}  // namespace atyp::binarize
