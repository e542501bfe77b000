// SPDX-License-Identifier: Apache-2.0
#include <sstream>

#include <gtest/gtest.h>

#include "kolmo/apriori.hpp"
#include "kolmo/fixtures.hpp"
#include "kolmo/universal.hpp"
#include "oracles.hpp"

using kolmo::AprioriTable;
using kolmo::BitString;
using kolmo::Dyadic;

namespace {

BitString bits(const char* s) { return BitString::parse(s); }

Dyadic frac(std::uint64_t num, std::uint64_t exp) { return Dyadic(kolmo::BigInt(num), exp); }

// Program number j (1 for ε) is given stage - j steps; every word is run on its own.
std::map<BitString, Dyadic, kolmo::ShortLex> brute_apriori(const kolmo::TableMachine& m, const BitString& y,
                                                           std::uint64_t stage, std::size_t max_len) {
    std::map<BitString, Dyadic, kolmo::ShortLex> out;
    std::uint64_t j = 0;
    for (const auto& p : oracle::words_up_to(max_len)) {
        ++j;
        if (j >= stage) break;
        const auto r = kolmo::run(m, p, y, stage - j);
        if (r.halted()) out[r.output] += Dyadic::inverse_pow2(p.size());
    }
    return out;
}

std::vector<kolmo::TableMachine> test_machines(std::uint64_t count) {
    std::vector<kolmo::TableMachine> out;
    for (const auto& [name, text] : kolmo::fixtures::texts()) out.push_back(kolmo::TableMachine::parse(text));
    for (std::uint64_t i = 1; i <= count; ++i) out.push_back(*kolmo::enumerate_machines(i));
    return out;
}

} // namespace

TEST(Apriori, FixtureValues) {
    const auto halt = kolmo::approx_apriori(kolmo::fixtures::halt_immediately(), BitString(), 100, 6);
    ASSERT_EQ(halt.entries.size(), 1U);
    EXPECT_EQ(halt.at(BitString()), Dyadic(1));

    const auto echo = kolmo::approx_apriori(kolmo::fixtures::echo_bit(), bits("11"), 100, 6);
    ASSERT_EQ(echo.entries.size(), 2U);
    EXPECT_EQ(echo.at(bits("0")), frac(1, 1));
    EXPECT_EQ(echo.at(bits("1")), frac(1, 1));

    const auto copy = kolmo::approx_apriori(kolmo::fixtures::copy2(), BitString(), 200, 6);
    ASSERT_EQ(copy.entries.size(), 4U);
    for (const auto& x : oracle::words_of_length(2)) EXPECT_EQ(copy.at(x), frac(1, 2));
    EXPECT_EQ(copy.total(), Dyadic(1));

    const auto two = kolmo::approx_apriori(kolmo::fixtures::two_paths(), BitString(), 200, 6);
    EXPECT_EQ(two.at(bits("1")), frac(3, 3));  // "00" and "010"
    EXPECT_EQ(two.at(bits("0")), frac(5, 3));  // "1" and "011"
}

TEST(Apriori, MatchesIndependentRunOfEveryProgram) {
    for (const auto& m : test_machines(30)) {
        for (const char* y : {"", "1"}) {
            for (std::uint64_t stage : {1U, 3U, 10U, 40U, 130U}) {
                for (std::size_t len : {1U, 3U, 6U}) {
                    const auto table = kolmo::approx_apriori(m, bits(y), stage, len);
                    ASSERT_EQ(table.entries, brute_apriori(m, bits(y), stage, len)) << stage << ' ' << len;
                }
            }
        }
    }
}

TEST(Apriori, MonotoneRefinementAndKraft) {
    for (const auto& m : test_machines(50)) {
        for (const char* y : {"", "1"}) {
            for (std::uint64_t stage : {5U, 40U, 300U}) {
                for (std::size_t len : {2U, 5U}) {
                    const auto base = kolmo::approx_apriori(m, bits(y), stage, len);
                    const auto later = kolmo::approx_apriori(m, bits(y), stage + 1, len);
                    const auto longer = kolmo::approx_apriori(m, bits(y), stage, len + 1);
                    EXPECT_LE(base.total(), Dyadic(1));
                    for (const auto& [x, q] : base.entries) {
                        EXPECT_GT(q, Dyadic());
                        EXPECT_LE(q, later.at(x));
                        EXPECT_LE(q, longer.at(x));
                    }
                }
            }
        }
    }
}

TEST(Apriori, ParallelAccumulationEqualsSequential) {
    const kolmo::UniversalMachine u;
    EXPECT_EQ(kolmo::approx_apriori(u, bits("1"), 3000, 11, "U", 4), kolmo::approx_apriori(u, bits("1"), 3000, 11, "U"));
}

TEST(Apriori, MergedRunEqualsPerConditionRuns) {
    const std::vector<BitString> auxes = {BitString(), bits("0"), bits("1"), bits("01"), bits("110")};
    for (const auto& m : test_machines(12)) {
        for (std::uint64_t time : {0U, 7U, 60U, 400U}) {
            const auto merged = kolmo::approx_apriori_merged(m, auxes, time, 5, "m");
            ASSERT_EQ(merged.size(), auxes.size());
            for (std::size_t a = 0; a < auxes.size(); ++a) {
                const std::uint64_t stage = kolmo::merged_stage_reached(time, a);
                EXPECT_EQ(merged[a].stage, stage);
                if (stage == 0) {
                    EXPECT_TRUE(merged[a].entries.empty());
                    continue;
                }
                EXPECT_EQ(merged[a], kolmo::approx_apriori(m, auxes[a], stage, 5, "m"));
            }
            const auto events = kolmo::merged_dovetail(m, auxes, time, 5);
            for (std::size_t k = 1; k < events.size(); ++k) EXPECT_LE(events[k - 1].time, events[k].time);
        }
    }
}

TEST(Apriori, StageCoveringIncludesEveryBoundedProgram) {
    EXPECT_EQ(kolmo::stage_covering(10, 10000), 2047U + 10000U);
    // Every program of length <= 3 that halts within 20 steps is counted.
    for (const auto& m : test_machines(20)) {
        const auto table = kolmo::approx_apriori(m, BitString(), kolmo::stage_covering(3, 20), 3);
        std::map<BitString, Dyadic, kolmo::ShortLex> expected;
        for (const auto& p : oracle::words_up_to(3)) {
            const auto r = kolmo::run(m, p, BitString(), 20);
            if (r.halted()) expected[r.output] += Dyadic::inverse_pow2(p.size());
        }
        for (const auto& [x, q] : expected) EXPECT_LE(q, table.at(x));
    }
}

TEST(AprioriVsK, WorkedExamples) {
    const auto copy = kolmo::fixtures::copy2();
    const auto table = kolmo::approx_apriori(copy, BitString(), kolmo::stage_covering(4, 100), 4);
    std::vector<kolmo::KEstimate> ests;
    for (const auto& [x, est] : kolmo::all_estimates(copy, BitString(), 4, 100)) ests.push_back(est);
    const auto rows = kolmo::apriori_vs_k(table, ests);
    ASSERT_EQ(rows.size(), 4U);
    for (const auto& r : rows) {
        EXPECT_TRUE(r.holds);
        EXPECT_EQ(r.q, frac(1, 2));
        EXPECT_EQ(r.log_gap, 0);
    }

    const auto two = kolmo::fixtures::two_paths();
    const auto two_table = kolmo::approx_apriori(two, BitString(), kolmo::stage_covering(4, 100), 4);
    const auto k1 = kolmo::approx_k(two, bits("1"), BitString(), 4, 100);
    const auto two_rows = kolmo::apriori_vs_k(two_table, {*k1});
    ASSERT_EQ(two_rows.size(), 1U);
    EXPECT_EQ(two_rows[0].k_bits, 2U);
    EXPECT_EQ(two_rows[0].q, frac(3, 3));
    EXPECT_TRUE(two_rows[0].holds);
    EXPECT_GT(two_rows[0].q, frac(1, 2));
}

TEST(AprioriVsK, ProvenanceIsChecked) {
    const auto copy = kolmo::fixtures::copy2();
    const auto table = kolmo::approx_apriori(copy, BitString(), kolmo::stage_covering(4, 100), 4);
    const auto other_aux = kolmo::approx_k(copy, bits("10"), bits("1"), 4, 100);
    EXPECT_THROW(kolmo::apriori_vs_k(table, {*other_aux}), kolmo::ProvenanceMismatch);
    const auto too_long = kolmo::approx_k(copy, bits("10"), BitString(), 5, 100);
    EXPECT_THROW(kolmo::apriori_vs_k(table, {*too_long}), kolmo::ProvenanceMismatch);
    const auto too_slow = kolmo::approx_k(copy, bits("10"), BitString(), 4, 101);
    EXPECT_THROW(kolmo::apriori_vs_k(table, {*too_slow}), kolmo::ProvenanceMismatch);
}

TEST(AprioriVsK, LowerBoundHoldsOnEnumeratedMachines) {
    for (const auto& m : test_machines(50)) {
        for (const char* y : {"", "1"}) {
            const auto table = kolmo::approx_apriori(m, bits(y), kolmo::stage_covering(6, 200), 6);
            std::vector<kolmo::KEstimate> ests;
            for (const auto& [x, est] : kolmo::all_estimates(m, bits(y), 6, 200)) ests.push_back(est);
            const auto rows = kolmo::apriori_vs_k(table, ests);
            EXPECT_EQ(rows.size(), ests.size());
            for (const auto& r : rows) EXPECT_TRUE(r.holds) << r.x.str();
        }
    }
}

TEST(AprioriFile, RoundTripAndExtension) {
    const auto m = kolmo::fixtures::bar_echo();
    const auto small = kolmo::approx_apriori(m, BitString(), 60, 5, "bar_echo");
    std::stringstream buf;
    kolmo::write_table(buf, small);
    const auto loaded = kolmo::read_table(buf);
    EXPECT_EQ(loaded, small);

    const auto extended = kolmo::extend_apriori(loaded, m, "bar_echo", 500, 9);
    EXPECT_EQ(extended, kolmo::approx_apriori(m, BitString(), 500, 9, "bar_echo"));
    EXPECT_THROW(kolmo::extend_apriori(loaded, m, "copy2", 500, 9), kolmo::ProvenanceMismatch);
    EXPECT_THROW(kolmo::extend_apriori(loaded, m, "bar_echo", 50, 9), kolmo::InvalidArgument);
}

TEST(AprioriFile, Format) {
    AprioriTable t{"copy2", bits("1"), {}, 17, 4};
    t.entries[BitString()] = frac(1, 1);
    t.entries[bits("01")] = frac(3, 3);
    std::ostringstream out;
    kolmo::write_table(out, t);
    EXPECT_EQ(out.str(), "# machine copy2\n# aux 1\n# stage 17\n# length_bound 4\n\t1/2^1\n01\t3/2^3\n");

    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return kolmo::read_table(in);
    };
    EXPECT_EQ(parse(out.str()), t);
    EXPECT_THROW(parse("# machine a\n# aux\n# stage x\n# length_bound 1\n"), kolmo::ParseError);
    EXPECT_THROW(parse("# machine a\n# aux\n"), kolmo::ParseError);
    EXPECT_THROW(parse("# machine a\n# aux\n# stage 1\n# length_bound 1\n0\t1\n1\t1/2^1\n"), kolmo::ParseError);
    EXPECT_THROW(parse("# machine a\n# aux\n# stage 1\n# length_bound 1\n0 1/2^1\n"), kolmo::ParseError);
    EXPECT_THROW(parse("# machine a\n# aux\n# stage 1\n# length_bound 1\n0\t0\n"), kolmo::ParseError);
}
