// SPDX-License-Identifier: Apache-2.0
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "kolmo/fixtures.hpp"
#include "kolmo/quotient_demo.hpp"

using kolmo::BitString;
using kolmo::ConditioningSet;
using kolmo::Dyadic;
using kolmo::Ratio;

namespace {

BitString bits(const char* s) { return BitString::parse(s); }

Dyadic frac(std::uint64_t num, std::uint64_t exp) { return Dyadic(kolmo::BigInt(num), exp); }

// Reduced "p/q" of a/b for dyadics, through a common power-of-two scale.
std::string brute_quotient(const Dyadic& a, const Dyadic& b) {
    const std::uint64_t e = std::max(a.exponent(), b.exponent());
    kolmo::BigInt p = a.numerator() << static_cast<unsigned>(e - a.exponent());
    kolmo::BigInt q = b.numerator() << static_cast<unsigned>(e - b.exponent());
    if (p == 0) return "0/1";
    kolmo::BigInt x = p, y = q;
    while (y != 0) {
        kolmo::BigInt r = x % y;
        x = y;
        y = r;
    }
    return kolmo::BigInt(p / x).str() + "/" + kolmo::BigInt(q / x).str();
}

kolmo::JointTable random_joint(std::mt19937_64& rng, std::size_t xs, std::size_t ys) {
    kolmo::JointTable j;
    Dyadic left(1);
    for (std::size_t a = 0; a < xs; ++a) {
        for (std::size_t b = 0; b < ys; ++b) {
            if (rng() % 3 == 0) continue;
            const Dyadic v(kolmo::BigInt(1 + rng() % 15), 4 + rng() % 5);
            if (v > left) continue;
            left -= v;
            j.entries[{kolmo::nat_to_string(a), kolmo::nat_to_string(b)}] = v;
        }
    }
    return j;
}

kolmo::SingleGapReport nested_report() {
    std::vector<ConditioningSet> family;
    for (std::uint64_t size : {2U, 4U, 8U}) family.push_back(ConditioningSet::first(size, 8));
    return kolmo::single_gap_report(kolmo::fixtures::bar_echo(), "bar_echo", family, 17, 60);
}

} // namespace

TEST(Ratio, TextAndLogs) {
    EXPECT_EQ(Ratio(frac(1, 1), frac(3, 2)).str(), "2/3");
    EXPECT_EQ(Ratio(Dyadic(3), Dyadic(1)).str(), "3/1");
    EXPECT_EQ(Ratio(Dyadic(), frac(3, 2)).str(), "0/1");
    EXPECT_EQ(Ratio(frac(1, 1), frac(3, 2)).ceil_log2_inverse(), 1);
    EXPECT_EQ(Ratio(frac(1, 1), frac(3, 1)).ceil_log2_inverse(), 2);
    EXPECT_EQ(Ratio(Dyadic(1), Dyadic(1)).ceil_log2_inverse(), 0);
    EXPECT_EQ(Ratio(Dyadic(3), Dyadic(1)).ceil_log2_inverse(), -1);
    EXPECT_EQ(Ratio(frac(1, 5), Dyadic(1)).ceil_log2_inverse(), 5);
    EXPECT_EQ(Ratio(frac(1, 1), frac(3, 2)), Ratio(frac(1, 2), frac(3, 3)));
    EXPECT_LT(Ratio(frac(1, 2), Dyadic(1)), Ratio(frac(1, 1), frac(3, 2)));
    EXPECT_THROW(Ratio(Dyadic(1), Dyadic()), kolmo::UndefinedConditional);
    EXPECT_THROW(Ratio().ceil_log2_inverse(), kolmo::InvalidArgument);
}

TEST(ConditioningSet, CharacteristicString) {
    const ConditioningSet b({BitString(), bits("1")}, 4);
    EXPECT_EQ(b.characteristic(), bits("1010"));
    EXPECT_EQ(ConditioningSet::first(2, 8).characteristic(), bits("11000000"));
    EXPECT_EQ(ConditioningSet({}, 3).characteristic(), bits("000"));
    EXPECT_THROW(ConditioningSet({bits("00")}, 3), kolmo::InvalidArgument);
}

TEST(ConditionalOnSet, WorkedExamples) {
    const kolmo::Distribution uniform = {
        {BitString(), frac(1, 2)}, {bits("0"), frac(1, 2)}, {bits("1"), frac(1, 2)}, {bits("00"), frac(1, 2)}};
    const auto c = kolmo::conditional_on_set(uniform, ConditioningSet({bits("0"), bits("00")}, 4));
    EXPECT_EQ(c.at(bits("0")).str(), "1/2");
    EXPECT_EQ(c.at(bits("00")).str(), "1/2");
    EXPECT_TRUE(c.at(BitString()).is_zero());
    EXPECT_TRUE(c.at(bits("1")).is_zero());

    const auto point = kolmo::conditional_on_set(uniform, ConditioningSet({bits("1")}, 4));
    EXPECT_EQ(point.at(bits("1")), Ratio(Dyadic(1), Dyadic(1)));

    EXPECT_THROW(kolmo::conditional_on_set({{bits("0"), frac(1, 1)}}, ConditioningSet({bits("1")}, 3)),
                 kolmo::UndefinedConditional);
    EXPECT_THROW(kolmo::conditional_on_set({{bits("0"), frac(3, 1)}}, ConditioningSet({bits("0")}, 3)),
                 kolmo::InvalidArgument);
}

TEST(ConditionalOnSet, MatchesBruteQuotientOnSmallSupports) {
    std::mt19937_64 rng(41);
    for (std::uint64_t n = 1; n <= 16; ++n) {
        for (int trial = 0; trial < 4; ++trial) {
            kolmo::Distribution p;
            Dyadic left(1);
            for (std::uint64_t i = 0; i < n; ++i) {
                Dyadic v(kolmo::BigInt(rng() % 9), 4 + rng() % 4);
                if (v > left) v = left;
                left -= v;
                if (!v.is_zero()) p[kolmo::nat_to_string(i)] = v;
            }
            // Every subset for small supports, a random sample for large ones.
            const std::uint64_t subsets = n <= 10 ? (1ULL << n) : 1024;
            for (std::uint64_t s = 0; s < subsets; ++s) {
                const std::uint64_t mask = n <= 10 ? s : rng() & ((1ULL << n) - 1);
                std::set<BitString, kolmo::ShortLex> members;
                Dyadic in_b;
                for (std::uint64_t i = 0; i < n; ++i) {
                    if ((mask >> i & 1U) == 0) continue;
                    members.insert(kolmo::nat_to_string(i));
                    if (p.contains(kolmo::nat_to_string(i))) in_b += p.at(kolmo::nat_to_string(i));
                }
                const ConditioningSet b(members, n);
                if (in_b.is_zero()) {
                    EXPECT_THROW(kolmo::conditional_on_set(p, b), kolmo::UndefinedConditional);
                    continue;
                }
                const auto c = kolmo::conditional_on_set(p, b);
                Ratio sum(Dyadic(), Dyadic(1));
                for (const auto& [x, r] : c) {
                    const Dyadic px = p.contains(x) ? p.at(x) : Dyadic();
                    EXPECT_EQ(r.str(), brute_quotient(b.contains(x) ? px : Dyadic(), in_b));
                    if (!b.contains(x)) {
                        EXPECT_TRUE(r.is_zero());
                    }
                    sum = sum + r;
                }
                EXPECT_EQ(sum, Ratio(Dyadic(1), Dyadic(1)));
            }
        }
    }
}

TEST(Quotient, WorkedExamples) {
    kolmo::JointTable j;
    j.entries[{bits("0"), bits("0")}] = frac(1, 1);
    j.entries[{bits("1"), bits("0")}] = frac(1, 1);
    EXPECT_EQ(kolmo::quotient_conditional(j, bits("0"), bits("0")).str(), "1/2");
    EXPECT_TRUE(kolmo::quotient_conditional(j, bits("00"), bits("0")).is_zero());
    EXPECT_THROW(kolmo::quotient_conditional(j, bits("0"), bits("1")), kolmo::UndefinedConditional);
    j.entries[{bits("1"), bits("0")}] = frac(3, 1);
    EXPECT_THROW(j.check(), kolmo::InvalidArgument);
}

TEST(Quotient, BothComputationOrdersAgreeOnRandomMixtures) {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 500; ++trial) {
        kolmo::JointMixture mix;
        const std::size_t parts = 1 + rng() % 4;
        for (std::size_t c = 0; c < parts; ++c) {
            mix.components.emplace_back(Dyadic::inverse_pow2(c + 1), random_joint(rng, 1 + rng() % 5, 1 + rng() % 4));
        }
        const auto summed = mix.summed();
        summed.check();
        for (std::uint64_t b = 0; b < 4; ++b) {
            const BitString y = kolmo::nat_to_string(b);
            if (summed.marginal(y).is_zero()) {
                EXPECT_THROW(kolmo::quotient_by_components(mix, BitString(), y), kolmo::UndefinedConditional);
                continue;
            }
            Ratio total(Dyadic(), Dyadic(1));
            for (std::uint64_t a = 0; a < 5; ++a) {
                const BitString x = kolmo::nat_to_string(a);
                const Ratio direct = kolmo::quotient_conditional(summed, x, y);
                const Ratio split = kolmo::quotient_by_components(mix, x, y);
                EXPECT_EQ(direct, split);
                EXPECT_EQ(direct.str(), split.str());
                total = total + direct;
            }
            EXPECT_EQ(total, Ratio(Dyadic(1), Dyadic(1)));
        }
    }
}

TEST(SingleGap, SingletonAndOutsideRows) {
    const auto report = kolmo::single_gap_report(kolmo::fixtures::bar_echo(), "bar_echo",
                                                 {ConditioningSet({bits("0")}, 3)}, 9, 60);
    ASSERT_EQ(report.rows.size(), 3U);
    const auto& inside = report.rows[1];
    EXPECT_TRUE(inside.in_b);
    EXPECT_EQ(inside.conditional, Ratio(Dyadic(1), Dyadic(1)));
    EXPECT_EQ(inside.neg_log, 0);
    ASSERT_TRUE(inside.k_x_given_chi);
    EXPECT_EQ(*inside.k_x_given_chi, 3U);
    for (std::size_t i : {0U, 2U}) {
        const auto& outside = report.rows[i];
        EXPECT_FALSE(outside.in_b);
        ASSERT_TRUE(outside.conditional);
        EXPECT_TRUE(outside.conditional->is_zero());
        EXPECT_FALSE(outside.neg_log);
        EXPECT_TRUE(outside.k_x_given_chi);
    }
    std::ostringstream out;
    kolmo::write_single_gap_tsv(out, report);
    EXPECT_NE(out.str().find("\tinf\t"), std::string::npos);
}

TEST(SingleGap, MissingEstimatesAreFlagged) {
    // chi has 8 bits, so K of it needs 17 bits on this machine.
    const auto report = kolmo::single_gap_report(kolmo::fixtures::bar_echo(), "bar_echo",
                                                 {ConditioningSet::first(2, 8)}, 9, 60);
    for (const auto& row : report.rows) {
        EXPECT_FALSE(row.k_chi);
        EXPECT_TRUE(row.incomplete());
    }
}

TEST(SingleGap, NestedFamilyTrendAndGoldenFile) {
    const auto report = nested_report();
    ASSERT_EQ(report.rows.size(), 24U);
    // Each member's conditional shrinks as B grows.
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_GT(*report.rows[i].conditional, *report.rows[8 + i].conditional);
        EXPECT_GT(*report.rows[8 + i].conditional, *report.rows[16 + i].conditional);
    }
    for (const auto& row : report.rows) EXPECT_FALSE(row.incomplete()) << row.x.str();

    std::ostringstream produced;
    kolmo::write_single_gap_tsv(produced, report);
    std::ifstream in(std::string(KOLMO_SOURCE_DIR) + "/tests/golden/single_gap_bar_echo.tsv");
    ASSERT_TRUE(in);
    const std::string golden((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    EXPECT_EQ(produced.str(), golden);
}

TEST(QuotientReport, ColumnsNormalizePerCondition) {
    const auto report = kolmo::quotient_report(kolmo::fixtures::bar_echo(), "bar_echo", 9, 60);
    ASSERT_FALSE(report.rows.empty());
    std::map<BitString, Ratio> per_y;
    for (const auto& row : report.rows) {
        EXPECT_EQ(row.quotient, Ratio(row.joint, row.marginal));
        auto [it, fresh] = per_y.try_emplace(row.y, row.quotient);
        if (!fresh) it->second = it->second + row.quotient;
    }
    for (const auto& [y, total] : per_y) EXPECT_EQ(total, Ratio(Dyadic(1), Dyadic(1))) << y.str();
    std::ostringstream out;
    kolmo::write_quotient_tsv(out, report);
    EXPECT_NE(out.str().find("upper-bound estimate"), std::string::npos);
}
