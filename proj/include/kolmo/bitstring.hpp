// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>

#include "kolmo/error.hpp"

namespace kolmo {

/// A finite binary word. Stored as ASCII '0'/'1' so that text I/O is the identity.
class BitString {
public:
    BitString() = default;

    /// Parses a word of '0'/'1' characters; anything else is a ParseError.
    static BitString parse(std::string_view text) {
        BitString out;
        out.bits_.reserve(text.size());
        for (char c : text) {
            if (c != '0' && c != '1') {
                throw ParseError("not a binary word: '" + std::string(text) + "'");
            }
            out.bits_.push_back(c);
        }
        return out;
    }

    static BitString repeat(bool bit, std::size_t count) {
        BitString out;
        out.bits_.assign(count, bit ? '1' : '0');
        return out;
    }

    std::size_t size() const noexcept { return bits_.size(); }
    bool empty() const noexcept { return bits_.empty(); }

    bool operator[](std::size_t i) const noexcept { return bits_[i] == '1'; }

    void push_back(bool bit) { bits_.push_back(bit ? '1' : '0'); }
    void pop_back() { bits_.pop_back(); }

    BitString& operator+=(const BitString& other) {
        bits_ += other.bits_;
        return *this;
    }

    friend BitString operator+(BitString lhs, const BitString& rhs) {
        lhs += rhs;
        return lhs;
    }

    /// The first `n` bits (the whole word when n >= size()).
    BitString prefix(std::size_t n) const {
        BitString out;
        out.bits_ = bits_.substr(0, n);
        return out;
    }

    BitString suffix_from(std::size_t pos) const {
        BitString out;
        if (pos < bits_.size()) out.bits_ = bits_.substr(pos);
        return out;
    }

    bool is_prefix_of(const BitString& other) const noexcept {
        return bits_.size() <= other.bits_.size() &&
               other.bits_.compare(0, bits_.size(), bits_) == 0;
    }

    bool is_proper_prefix_of(const BitString& other) const noexcept {
        return bits_.size() < other.bits_.size() && is_prefix_of(other);
    }

    const std::string& str() const noexcept { return bits_; }

    friend bool operator==(const BitString&, const BitString&) = default;
    /// Plain lexicographic order ("0" < "00" < "01" < "1").
    friend std::strong_ordering operator<=>(const BitString& a, const BitString& b) {
        return a.bits_ <=> b.bits_;
    }

private:
    std::string bits_;
};

/// Length-increasing lexicographic order: ε, 0, 1, 00, 01, ...
struct ShortLex {
    bool operator()(const BitString& a, const BitString& b) const noexcept {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    }
};

} // namespace kolmo

template <>
struct std::hash<kolmo::BitString> {
    std::size_t operator()(const kolmo::BitString& s) const noexcept {
        return std::hash<std::string>{}(s.str());
    }
};
