#include "pchsh/bitstring.h"

#include <bit>
#include <stdexcept>

namespace pchsh {

namespace {

std::uint64_t low_mask(std::size_t length) {
    return length == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << length) - 1;
}

}  // namespace

BitString::BitString(std::size_t length, std::uint64_t value) : length_(length), bits_(value) {
    if (length > kMaxLength) {
        throw std::invalid_argument("BitString length exceeds 64 bits");
    }
    if ((value & ~low_mask(length)) != 0) {
        throw std::invalid_argument("BitString value has bits beyond its length");
    }
}

BitString BitString::ones(std::size_t length) {
    if (length > kMaxLength) {
        throw std::invalid_argument("BitString length exceeds 64 bits");
    }
    return BitString(length, low_mask(length));
}

BitString BitString::unit(std::size_t length, std::size_t index) {
    return zeros(length).with_bit(index, true);
}

BitString BitString::from_string(std::string_view text) {
    if (text.size() > kMaxLength) {
        throw std::invalid_argument("BitString length exceeds 64 bits");
    }
    std::uint64_t value = 0;
    for (char c : text) {
        if (c != '0' && c != '1') {
            throw std::invalid_argument("BitString text must contain only 0 and 1: " + std::string(text));
        }
        value = (value << 1) | static_cast<std::uint64_t>(c == '1');
    }
    return BitString(text.size(), value);
}

BitString BitString::concat(const BitString &left, const BitString &right) {
    std::size_t length = left.size() + right.size();
    if (length > kMaxLength) {
        throw std::invalid_argument("concatenated BitString exceeds 64 bits");
    }
    std::uint64_t high = right.size() == 64 ? 0 : left.value() << right.size();
    return BitString(length, high | right.value());
}

std::uint64_t BitString::mask_for(std::size_t index) const {
    return std::uint64_t{1} << (length_ - 1 - index);
}

void BitString::check_index(std::size_t index) const {
    if (index >= length_) {
        throw std::out_of_range("BitString index " + std::to_string(index) + " out of range for length " +
                                std::to_string(length_));
    }
}

void BitString::check_same_length(const BitString &other) const {
    if (other.length_ != length_) {
        throw std::invalid_argument("BitString length mismatch");
    }
}

bool BitString::operator[](std::size_t index) const {
    check_index(index);
    return (bits_ & mask_for(index)) != 0;
}

BitString BitString::with_bit(std::size_t index, bool bit) const {
    check_index(index);
    BitString result = *this;
    if (bit) {
        result.bits_ |= mask_for(index);
    } else {
        result.bits_ &= ~mask_for(index);
    }
    return result;
}

BitString BitString::flipped(std::size_t index) const {
    check_index(index);
    BitString result = *this;
    result.bits_ ^= mask_for(index);
    return result;
}

BitString BitString::complement() const { return BitString(length_, ~bits_ & low_mask(length_)); }

BitString BitString::first_half() const {
    if (length_ % 2 != 0) {
        throw std::invalid_argument("cannot split an odd-length BitString into halves");
    }
    std::size_t half = length_ / 2;
    return BitString(half, bits_ >> half);
}

BitString BitString::second_half() const {
    if (length_ % 2 != 0) {
        throw std::invalid_argument("cannot split an odd-length BitString into halves");
    }
    std::size_t half = length_ / 2;
    return BitString(half, bits_ & low_mask(half));
}

std::size_t BitString::weight() const { return static_cast<std::size_t>(std::popcount(bits_)); }

std::size_t BitString::dot(const BitString &other) const {
    check_same_length(other);
    return static_cast<std::size_t>(std::popcount(bits_ & other.bits_));
}

BitString BitString::operator^(const BitString &other) const {
    check_same_length(other);
    return BitString(length_, bits_ ^ other.bits_);
}

std::string BitString::to_string() const {
    std::string text(length_, '0');
    for (std::size_t i = 0; i < length_; ++i) {
        if (bits_ & mask_for(i)) {
            text[i] = '1';
        }
    }
    return text;
}

std::strong_ordering BitString::operator<=>(const BitString &other) const {
    if (auto c = length_ <=> other.length_; c != 0) {
        return c;
    }
    return bits_ <=> other.bits_;
}

}  // namespace pchsh
