#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace atyp {

using Bit = std::uint8_t;
using BitSpan = std::span<const Bit>;

// Ordered sequence of binary symbols.  Thin wrapper over a byte vector whose
// elements are guaranteed to be 0 or 1; most library entry points take a
// BitSpan, which a BitSequence converts to implicitly.
class BitSequence {
 public:
  BitSequence() = default;

  explicit BitSequence(std::vector<Bit> bits) : bits_(std::move(bits)) {
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      if (bits_[i] > 1) {
        throw std::invalid_argument("BitSequence: symbol at index " +
                                    std::to_string(i) + " is not 0/1");
      }
    }
  }

  // Builds from a string like "0110".  Rejects anything but '0'/'1'.
  static BitSequence from_string(std::string_view text) {
    std::vector<Bit> bits;
    bits.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
      const char c = text[i];
      if (c != '0' && c != '1') {
        throw std::invalid_argument("BitSequence: character at index " +
                                    std::to_string(i) + " is not '0'/'1'");
      }
      bits.push_back(static_cast<Bit>(c - '0'));
    }
    return BitSequence(std::move(bits));
  }

  std::string to_string() const {
    std::string out;
    out.reserve(bits_.size());
    for (Bit b : bits_) out.push_back(static_cast<char>('0' + b));
    return out;
  }

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  Bit operator[](std::size_t i) const { return bits_[i]; }

  void push_back(Bit b) {
    if (b > 1) throw std::invalid_argument("BitSequence: symbol is not 0/1");
    bits_.push_back(b);
  }

  void append(BitSpan other) {
    for (Bit b : other) push_back(b);
  }

  std::size_t count_ones() const {
    std::size_t n = 0;
    for (Bit b : bits_) n += b;
    return n;
  }

  BitSpan span() const { return BitSpan(bits_); }
  BitSpan subspan(std::size_t pos, std::size_t len) const {
    return span().subspan(pos, len);
  }
  operator BitSpan() const { return span(); }

  const std::vector<Bit>& data() const { return bits_; }

  auto begin() const { return bits_.begin(); }
  auto end() const { return bits_.end(); }

  bool operator==(const BitSequence&) const = default;

 private:
  std::vector<Bit> bits_;
};

}  // namespace atyp
