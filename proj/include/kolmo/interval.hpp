// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "kolmo/bitstring.hpp"
#include "kolmo/dyadic.hpp"

namespace kolmo {

/// Half-open subinterval [lo, hi) of [0, 1) with dyadic endpoints.
class Interval {
public:
    Interval() : lo_(0), hi_(0) {}

    Interval(Dyadic lo, Dyadic hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
        if (lo_ > hi_ || hi_ > Dyadic(1)) {
            throw InvalidArgument("interval [" + lo_.to_string() + ", " + hi_.to_string() + ") not inside [0,1)");
        }
    }

    const Dyadic& lo() const noexcept { return lo_; }
    const Dyadic& hi() const noexcept { return hi_; }
    Dyadic length() const { return hi_ - lo_; }
    bool empty() const { return lo_ == hi_; }

    bool contains(const Interval& inner) const { return lo_ <= inner.lo_ && inner.hi_ <= hi_; }
    bool disjoint(const Interval& other) const { return hi_ <= other.lo_ || other.hi_ <= lo_; }

    friend bool operator==(const Interval&, const Interval&) = default;

private:
    Dyadic lo_;
    Dyadic hi_;
};

namespace detail {

inline BigInt word_value(const BitString& w) {
    BigInt v = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        v <<= 1;
        if (w[i]) v += 1;
    }
    return v;
}

inline BitString word_of(const BigInt& value, std::uint64_t width) {
    BitString w;
    for (std::uint64_t i = width; i-- > 0;) w.push_back(boost::multiprecision::bit_test(value, static_cast<unsigned>(i)));
    return w;
}

// floor / ceil of d * 2^m as an integer.
inline BigInt floor_scaled(const Dyadic& d, std::uint64_t m) {
    if (m >= d.exponent()) return d.numerator() << static_cast<unsigned>(m - d.exponent());
    return d.numerator() >> static_cast<unsigned>(d.exponent() - m);
}

inline BigInt ceil_scaled(const Dyadic& d, std::uint64_t m) {
    BigInt f = floor_scaled(d, m);
    if (m < d.exponent() && Dyadic(f, m) != d) f += 1;
    return f;
}

} // namespace detail

/// The cylinder Γ_w = [0.w, 0.w + 2^{-|w|}).
class BinaryInterval {
public:
    BinaryInterval() = default;
    explicit BinaryInterval(BitString word) : word_(std::move(word)) {}

    const BitString& word() const noexcept { return word_; }
    Dyadic length() const { return Dyadic::inverse_pow2(word_.size()); }

    Interval to_interval() const {
        const Dyadic lo(detail::word_value(word_), word_.size());
        return Interval(lo, lo + length());
    }

    /// The word w with Γ_w == i, when i is a binary interval.
    static std::optional<BinaryInterval> from_interval(const Interval& i) {
        const Dyadic len = i.length();
        if (len.is_zero() || !len.is_power_of_two()) return std::nullopt;
        const std::uint64_t m = len.exponent();
        const BigInt start = detail::floor_scaled(i.lo(), m);
        if (Dyadic(start, m) != i.lo()) return std::nullopt;
        return BinaryInterval(detail::word_of(start, m));
    }

    friend bool operator==(const BinaryInterval&, const BinaryInterval&) = default;

private:
    BitString word_;
};

/// Leftmost among the longest binary intervals contained in `i`; none for an empty interval.
inline std::optional<BinaryInterval> largest_binary_subinterval(const Interval& i) {
    if (i.empty()) return std::nullopt;
    // A cell of size 2^{-E} always fits once E reaches the finer endpoint exponent.
    const std::uint64_t finest = std::max(i.lo().exponent(), i.hi().exponent());
    for (std::uint64_t m = 0; m <= finest; ++m) {
        const BigInt start = detail::ceil_scaled(i.lo(), m);
        if (Dyadic(start + 1, m) <= i.hi()) return BinaryInterval(detail::word_of(start, m));
    }
    throw InvariantViolation("no binary subinterval in a nonempty dyadic interval");
}

/// All binary intervals of length i_x (the largest contained one) that meet `i`, left to right.
/// At most four are ever needed.
inline std::vector<BinaryInterval> cover_by_binary(const Interval& i) {
    const auto largest = largest_binary_subinterval(i);
    if (!largest) return {};
    const std::uint64_t m = largest->word().size();
    const BigInt first = detail::floor_scaled(i.lo(), m);
    const BigInt end = detail::ceil_scaled(i.hi(), m);
    std::vector<BinaryInterval> out;
    for (BigInt k = first; k < end; ++k) out.emplace_back(detail::word_of(k, m));
    return out;
}

} // namespace kolmo
