// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "kolmo/error.hpp"

namespace kolmo {

using BigInt = boost::multiprecision::cpp_int;

/// Exact nonnegative rational numerator / 2^exponent.
///
/// Always canonical: the numerator is odd, or the value is 0/2^0. Every
/// probability, Kraft sum and interval endpoint in the library is a Dyadic,
/// so equality and ordering are exact.
class Dyadic {
public:
    Dyadic() = default;
    Dyadic(std::uint64_t integer) : num_(integer) {}  // NOLINT(implicit)

    Dyadic(BigInt numerator, std::uint64_t exponent) : num_(std::move(numerator)), exp_(exponent) {
        if (num_ < 0) throw InvalidArgument("Dyadic numerator must be nonnegative");
        canonicalize();
    }

    /// 2^{-k}.
    static Dyadic inverse_pow2(std::uint64_t k) { return Dyadic(BigInt(1), k); }

    /// Parses the canonical text "num/2^exp"; a bare integer is also accepted.
    static Dyadic parse(std::string_view text) {
        const auto slash = text.find('/');
        auto parse_uint = [&](std::string_view digits) {
            if (digits.empty()) throw ParseError("malformed dyadic: '" + std::string(text) + "'");
            for (char c : digits) {
                if (c < '0' || c > '9') throw ParseError("malformed dyadic: '" + std::string(text) + "'");
            }
            return BigInt(std::string(digits));
        };
        if (slash == std::string_view::npos) return Dyadic(parse_uint(text), 0);
        const auto denom = text.substr(slash + 1);
        if (denom.substr(0, 2) != "2^") throw ParseError("malformed dyadic: '" + std::string(text) + "'");
        const BigInt e = parse_uint(denom.substr(2));
        if (e > BigInt(UINT32_MAX)) throw ParseError("dyadic exponent too large: '" + std::string(text) + "'");
        return Dyadic(parse_uint(text.substr(0, slash)), e.convert_to<std::uint64_t>());
    }

    const BigInt& numerator() const noexcept { return num_; }
    std::uint64_t exponent() const noexcept { return exp_; }

    bool is_zero() const noexcept { return num_.is_zero(); }
    bool is_power_of_two() const noexcept { return num_ == 1; }

    /// floor(log2(value)); value must be positive.
    std::int64_t floor_log2() const {
        if (is_zero()) throw InvalidArgument("log2 of zero");
        return static_cast<std::int64_t>(boost::multiprecision::msb(num_)) - static_cast<std::int64_t>(exp_);
    }

    /// ceil(log2(1/value)), the code length a mass of this size asks for.
    std::int64_t ceil_log2_inverse() const { return -floor_log2(); }

    std::string to_string() const { return num_.str() + "/2^" + std::to_string(exp_); }

    /// value * 2^shift (shift may be negative).
    Dyadic scaled(std::int64_t shift) const {
        if (is_zero()) return {};
        if (shift >= 0) {
            const auto s = static_cast<std::uint64_t>(shift);
            if (s <= exp_) return Dyadic(num_, exp_ - s);
            return Dyadic(BigInt(num_ << static_cast<unsigned>(s - exp_)), 0);
        }
        return Dyadic(num_, exp_ + static_cast<std::uint64_t>(-shift));
    }

    Dyadic half() const { return scaled(-1); }

    Dyadic& operator+=(const Dyadic& o) {
        if (exp_ >= o.exp_) {
            num_ += BigInt(o.num_ << static_cast<unsigned>(exp_ - o.exp_));
        } else {
            num_ = BigInt(num_ << static_cast<unsigned>(o.exp_ - exp_)) + o.num_;
            exp_ = o.exp_;
        }
        canonicalize();
        return *this;
    }

    /// Throws InvalidArgument when the result would be negative.
    Dyadic& operator-=(const Dyadic& o) {
        if (*this < o) throw InvalidArgument("negative Dyadic difference");
        if (exp_ >= o.exp_) {
            num_ -= BigInt(o.num_ << static_cast<unsigned>(exp_ - o.exp_));
        } else {
            num_ = BigInt(num_ << static_cast<unsigned>(o.exp_ - exp_)) - o.num_;
            exp_ = o.exp_;
        }
        canonicalize();
        return *this;
    }

    Dyadic& operator*=(const Dyadic& o) {
        num_ *= o.num_;
        exp_ += o.exp_;
        canonicalize();
        return *this;
    }

    friend Dyadic operator+(Dyadic a, const Dyadic& b) { return a += b; }
    friend Dyadic operator-(Dyadic a, const Dyadic& b) { return a -= b; }
    friend Dyadic operator*(Dyadic a, const Dyadic& b) { return a *= b; }

    friend bool operator==(const Dyadic& a, const Dyadic& b) { return a.exp_ == b.exp_ && a.num_ == b.num_; }

    friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
        const std::uint64_t e = a.exp_ > b.exp_ ? a.exp_ : b.exp_;
        const BigInt lhs = a.num_ << static_cast<unsigned>(e - a.exp_);
        const BigInt rhs = b.num_ << static_cast<unsigned>(e - b.exp_);
        if (lhs < rhs) return std::strong_ordering::less;
        if (lhs > rhs) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

private:
    void canonicalize() {
        if (num_.is_zero()) {
            exp_ = 0;
            return;
        }
        const auto tz = boost::multiprecision::lsb(num_);
        const std::uint64_t shift = tz < exp_ ? tz : exp_;
        if (shift > 0) {
            num_ >>= static_cast<unsigned>(shift);
            exp_ -= shift;
        }
    }

    BigInt num_{0};
    std::uint64_t exp_{0};
};

} // namespace kolmo
