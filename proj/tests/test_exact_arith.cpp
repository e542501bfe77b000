// SPDX-License-Identifier: Apache-2.0
#include <random>

#include <gtest/gtest.h>

#include "kolmo/interval.hpp"
#include "oracles.hpp"

using kolmo::BinaryInterval;
using kolmo::BitString;
using kolmo::Dyadic;
using kolmo::Interval;

namespace {

Dyadic d(std::uint64_t num, std::uint64_t exp) { return Dyadic(kolmo::BigInt(num), exp); }
BitString bits(const char* s) { return BitString::parse(s); }

} // namespace

TEST(Dyadic, CanonicalForm) {
    EXPECT_EQ(d(4, 3), d(1, 1));
    EXPECT_EQ(d(4, 3).to_string(), "1/2^1");
    EXPECT_EQ(d(0, 9).to_string(), "0/2^0");
    EXPECT_EQ(d(6, 0).to_string(), "6/2^0");
    EXPECT_EQ(Dyadic::parse("12/2^4"), d(3, 2));
    EXPECT_EQ(Dyadic::parse("5"), Dyadic(5));
    EXPECT_THROW(Dyadic::parse("1/3"), kolmo::ParseError);
    EXPECT_THROW(Dyadic::parse("x/2^1"), kolmo::ParseError);
    EXPECT_THROW(Dyadic::parse("-1/2^1"), kolmo::ParseError);
}

TEST(Dyadic, ArithmeticIsExact) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 2000; ++trial) {
        const Dyadic a = d(rng() % 100000, rng() % 70);
        const Dyadic b = d(rng() % 100000, rng() % 70);
        EXPECT_EQ((a + b) - b, a);
        EXPECT_EQ(a + b, b + a);
        EXPECT_EQ(a * b, b * a);
        EXPECT_EQ((a + b) * Dyadic(2), a.scaled(1) + b.scaled(1));
        EXPECT_EQ(Dyadic::parse(a.to_string()), a);
        EXPECT_EQ(a <= a + b, true);
    }
    EXPECT_THROW(d(1, 2) - d(1, 1), kolmo::InvalidArgument);
}

TEST(Dyadic, Logarithms) {
    EXPECT_EQ(d(1, 0).floor_log2(), 0);
    EXPECT_EQ(d(3, 3).floor_log2(), -2);
    EXPECT_EQ(d(3, 3).ceil_log2_inverse(), 2);   // 8/3 -> ceil(log2) = 2
    EXPECT_EQ(d(1, 5).ceil_log2_inverse(), 5);
    EXPECT_EQ(d(5, 0).floor_log2(), 2);
    EXPECT_THROW(Dyadic().floor_log2(), kolmo::InvalidArgument);
}

TEST(Interval, RejectsOutOfRange) {
    EXPECT_THROW(Interval(d(1, 1), d(1, 2)), kolmo::InvalidArgument);
    EXPECT_THROW(Interval(d(0, 0), d(3, 1)), kolmo::InvalidArgument);
}

TEST(BinaryInterval, RoundTrip) {
    for (const char* w : {"", "0", "1", "01", "110", "0001"}) {
        const BinaryInterval b(bits(w));
        EXPECT_EQ(b.length(), Dyadic::inverse_pow2(b.word().size()));
        EXPECT_EQ(BinaryInterval::from_interval(b.to_interval()), b);
    }
    EXPECT_FALSE(BinaryInterval::from_interval(Interval(d(1, 3), d(3, 3))).has_value());
}

TEST(LargestBinarySubinterval, WorkedExamples) {
    EXPECT_EQ(kolmo::largest_binary_subinterval(Interval(Dyadic(0), Dyadic(1)))->word(), BitString());
    EXPECT_EQ(kolmo::largest_binary_subinterval(Interval(d(1, 2), d(1, 1)))->word(), bits("01"));
    // Candidates Γ_01 and Γ_100; the longer (and leftmost) one wins.
    EXPECT_EQ(kolmo::largest_binary_subinterval(Interval(d(1, 2), d(5, 3)))->word(),
              oracle::brute_largest_binary(Interval(d(1, 2), d(5, 3)), 8));
    EXPECT_EQ(kolmo::largest_binary_subinterval(Interval(d(1, 2), d(5, 3)))->word(), bits("01"));
    EXPECT_FALSE(kolmo::largest_binary_subinterval(Interval(d(1, 2), d(1, 2))).has_value());
}

TEST(LargestBinarySubinterval, MatchesExhaustiveScan) {
    // All intervals with endpoints k/2^6.
    for (std::uint64_t lo = 0; lo < 64; ++lo) {
        for (std::uint64_t hi = lo + 1; hi <= 64; ++hi) {
            const Interval i(d(lo, 6), d(hi, 6));
            const auto got = kolmo::largest_binary_subinterval(i);
            ASSERT_TRUE(got.has_value());
            EXPECT_EQ(got->word(), oracle::brute_largest_binary(i, 6));
            // Length is at least a quarter of the interval: |w| <= ceil(log2 1/len) + 2.
            EXPECT_LE(static_cast<std::int64_t>(got->word().size()), i.length().ceil_log2_inverse() + 2);
        }
    }
}

TEST(CoverByBinary, WorkedExamples) {
    const auto whole_half = kolmo::cover_by_binary(Interval(Dyadic(0), d(1, 1)));
    ASSERT_EQ(whole_half.size(), 1U);
    EXPECT_EQ(whole_half[0].word(), bits("0"));

    const Interval i(d(1, 2), d(5, 3));
    const auto cover = kolmo::cover_by_binary(i);
    EXPECT_EQ(cover, oracle::brute_cover(i, 2));
    ASSERT_EQ(cover.size(), 2U);
    EXPECT_EQ(cover[0].word(), bits("01"));
    EXPECT_EQ(cover[1].word(), bits("10"));
    EXPECT_TRUE(kolmo::cover_by_binary(Interval(d(1, 1), d(1, 1))).empty());
}

TEST(CoverByBinary, RandomIntervalsNeedAtMostFour) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 3000; ++trial) {
        const std::uint64_t e = rng() % 12;
        const std::uint64_t scale = std::uint64_t{1} << e;
        std::uint64_t a = rng() % (scale + 1);
        std::uint64_t b = rng() % (scale + 1);
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        const Interval i(d(a, e), d(b, e));
        const auto cover = kolmo::cover_by_binary(i);
        const auto largest = kolmo::largest_binary_subinterval(i);
        EXPECT_LE(cover.size(), 4U);
        EXPECT_TRUE(oracle::union_covers(cover, i));
        for (const auto& c : cover) EXPECT_EQ(c.word().size(), largest->word().size());
    }
}
