#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace pchsh {

/// Fixed-length bit string of at most 64 bits.
///
/// Position 0 is the leftmost character of the textual form, so the integer
/// returned by value() orders bit strings lexicographically. All indices in
/// the public API are 0-based.
class BitString {
   public:
    static constexpr std::size_t kMaxLength = 64;

    BitString() = default;
    /// `value` holds position 0 in its most significant used bit.
    BitString(std::size_t length, std::uint64_t value);

    static BitString zeros(std::size_t length) { return BitString(length, 0); }
    static BitString ones(std::size_t length);
    /// The string with a single 1 at `index`.
    static BitString unit(std::size_t length, std::size_t index);
    static BitString from_string(std::string_view text);
    static BitString concat(const BitString &left, const BitString &right);

    std::size_t size() const { return length_; }
    std::uint64_t value() const { return bits_; }
    bool operator[](std::size_t index) const;

    BitString with_bit(std::size_t index, bool bit) const;
    BitString flipped(std::size_t index) const;
    BitString complement() const;
    /// First half (Alice's share). Requires even length.
    BitString first_half() const;
    /// Second half (Bob's share). Requires even length.
    BitString second_half() const;

    std::size_t weight() const;
    std::size_t dot(const BitString &other) const;

    BitString operator^(const BitString &other) const;

    std::string to_string() const;

    bool operator==(const BitString &) const = default;
    std::strong_ordering operator<=>(const BitString &other) const;

   private:
    std::uint64_t mask_for(std::size_t index) const;
    void check_index(std::size_t index) const;
    void check_same_length(const BitString &other) const;

    std::size_t length_ = 0;
    std::uint64_t bits_ = 0;
};

}  // namespace pchsh
