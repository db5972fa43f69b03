#include "atyp/binarize.hpp"

#include <bit>
#include <cctype>
#include <cstdlib>
#include <stdexcept>

#include "atyp/rng.hpp"

namespace atyp::binarize {

BitSequence consecutive_comparison(std::span<const double> values,
                                   std::uint64_t seed) {
  if (values.size() < 2) {
    throw std::invalid_argument(
        "consecutive_comparison: need at least two values");
  }
  Rng rng(seed);
  std::vector<Bit> out;
  out.reserve(values.size() - 1);
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    if (values[i + 1] > values[i]) {
      out.push_back(1);
    } else if (values[i + 1] < values[i]) {
      out.push_back(0);
    } else {
      out.push_back(rng.next_fair_bit());
    }
  }
  return BitSequence(std::move(out));
}

BitSequence dna_to_bits(std::string_view bases, bool skip_invalid) {
  std::vector<Bit> out;
  out.reserve(bases.size() * 2);
  for (std::size_t i = 0; i < bases.size(); ++i) {
    int code;
    switch (std::toupper(static_cast<unsigned char>(bases[i]))) {
      case 'A': code = 0; break;
      case 'C': code = 1; break;
      case 'G': code = 2; break;
      case 'T': code = 3; break;
      default:
        if (skip_invalid) continue;
        throw std::invalid_argument(
            "dna_to_bits: invalid base '" + std::string(1, bases[i]) +
            "' at position " + std::to_string(i));
    }
    out.push_back(Bit((code >> 1) & 1));
    out.push_back(Bit(code & 1));
  }
  return BitSequence(std::move(out));
}

std::string bits_to_dna(BitSpan bits) {
  if (bits.size() % 2 != 0) {
    throw std::invalid_argument("bits_to_dna: bit count must be even");
  }
  static constexpr char kBases[4] = {'A', 'C', 'G', 'T'};
  std::string out;
  out.reserve(bits.size() / 2);
  for (std::size_t i = 0; i < bits.size(); i += 2) {
    out.push_back(kBases[(bits[i] << 1) | bits[i + 1]]);
  }
  return out;
}

BitSequence randu_bits(std::size_t count, std::uint32_t seed) {
  if (count == 0) {
    throw std::invalid_argument("randu_bits: count must be at least 1");
  }
  if (seed % 2 == 0 || seed >= (std::uint32_t(1) << 31)) {
    throw std::invalid_argument(
        "randu_bits: seed must be odd and below 2^31");
  }
  std::vector<Bit> out(count);
  std::uint64_t state = seed;
  for (std::size_t i = 0; i < count; ++i) {
    state = (65539ULL * state) & 0x7fffffffULL;  // mod 2^31
    out[i] = Bit(std::popcount(state) > 15 ? 1 : 0);
  }
  return BitSequence(std::move(out));
}

BitSequence parse_bit_text(std::string_view text) {
  std::vector<Bit> out;
  out.reserve(text.size());
  std::size_t line = 1, column = 0;
  for (char c : text) {
    if (c == '\n') {
      ++line;
      column = 0;
      continue;
    }
    ++column;
    if (c == '0' || c == '1') {
      out.push_back(Bit(c - '0'));
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      throw std::invalid_argument(
          "parse_bit_text: unexpected character '" + std::string(1, c) +
          "' at line " + std::to_string(line) + ", column " +
          std::to_string(column));
    }
  }
  return BitSequence(std::move(out));
}

std::string write_bit_text(BitSpan bits, std::size_t wrap) {
  std::string out;
  out.reserve(bits.size() + bits.size() / (wrap ? wrap : 1) + 2);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (wrap != 0 && i != 0 && i % wrap == 0) out.push_back('\n');
    out.push_back(char('0' + bits[i]));
  }
  if (!out.empty()) out.push_back('\n');
  return out;
}

std::vector<double> parse_numeric_lines(std::string_view text) {
  std::vector<double> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    ++line_no;
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    // trim
    while (!line.empty() &&
           std::isspace(static_cast<unsigned char>(line.front()))) {
      line.remove_prefix(1);
    }
    while (!line.empty() &&
           std::isspace(static_cast<unsigned char>(line.back()))) {
      line.remove_suffix(1);
    }
    if (line.empty()) continue;

    const std::string token(line);
    char* end = nullptr;
    const double value = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size()) {
      throw std::invalid_argument(
          "parse_numeric_lines: cannot parse value on line " +
          std::to_string(line_no) + ": '" + token + "'");
    }
    out.push_back(value);
  }
  return out;
}

std::string load_fasta(std::string_view text) {
  std::string bases;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    const std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    if (!line.empty() && line.front() == '>') continue;
    for (char c : line) {
      if (!std::isspace(static_cast<unsigned char>(c))) bases.push_back(c);
    }
  }
  return bases;
}

std::vector<double> word_lengths(std::string_view text) {
  std::vector<double> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() &&
           std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
    }
    std::size_t j = i;
    while (j < text.size() &&
           !std::isspace(static_cast<unsigned char>(text[j]))) {
      ++j;
    }
    std::string_view token = text.substr(i, j - i);
    i = j;
    while (!token.empty() &&
           std::ispunct(static_cast<unsigned char>(token.front()))) {
      token.remove_prefix(1);
    }
    while (!token.empty() &&
           std::ispunct(static_cast<unsigned char>(token.back()))) {
      token.remove_suffix(1);
    }
    if (!token.empty()) out.push_back(double(token.size()));
  }
  return out;
}

}  // namespace atyp::binarize
