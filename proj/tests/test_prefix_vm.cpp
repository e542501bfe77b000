// SPDX-License-Identifier: Apache-2.0
#include <fstream>
#include <set>

#include <gtest/gtest.h>

#include "kolmo/dovetail.hpp"
#include "kolmo/fixtures.hpp"
#include "kolmo/universal.hpp"
#include "oracles.hpp"

using kolmo::BitString;
using kolmo::RunOutcome;
using kolmo::TableMachine;

namespace {

BitString bits(const char* s) { return BitString::parse(s); }

TableMachine looping() { return TableMachine::parse("states 1\n0 * * * -> 0 0 S S - -\n"); }

std::vector<TableMachine> fixture_machines() {
    std::vector<TableMachine> out;
    for (const auto& [name, text] : kolmo::fixtures::texts()) out.push_back(TableMachine::parse(text));
    return out;
}

} // namespace

TEST(Run, WorkedExamples) {
    const auto halt = kolmo::run(kolmo::fixtures::halt_immediately(), BitString(), BitString(), 5);
    EXPECT_EQ(halt.kind, RunOutcome::Kind::Halted);
    EXPECT_EQ(halt.output, BitString());
    EXPECT_EQ(halt.bits_read, 0U);

    const auto copy = kolmo::run(kolmo::fixtures::copy2(), bits("10"), BitString(), 100);
    EXPECT_EQ(copy.kind, RunOutcome::Kind::Halted);
    EXPECT_EQ(copy.output, bits("10"));
    EXPECT_EQ(copy.bits_read, 2U);

    EXPECT_EQ(kolmo::run(kolmo::fixtures::copy2(), bits("1"), BitString(), 100).kind,
              RunOutcome::Kind::RequestedPastEnd);
    EXPECT_EQ(kolmo::run(looping(), BitString(), BitString(), 1).kind, RunOutcome::Kind::OutOfFuel);
    EXPECT_THROW(kolmo::run(looping(), BitString(), BitString(), 0), kolmo::InvalidArgument);
}

TEST(Run, HaltingBeforeReadingTheWholeProgramIsNotAcceptance) {
    const auto r = kolmo::run(kolmo::fixtures::halt_immediately(), bits("0"), BitString(), 5);
    EXPECT_EQ(r.kind, RunOutcome::Kind::Rejected);
    EXPECT_FALSE(r.halted());
}

TEST(Run, AuxiliaryTape) {
    for (const char* y : {"", "0", "1101", "000111"}) {
        const auto r = kolmo::run(kolmo::fixtures::copy_aux(), BitString(), bits(y), 100);
        ASSERT_TRUE(r.halted());
        EXPECT_EQ(r.output, bits(y));
    }
}

TEST(Run, BarEcho) {
    for (const auto& x : oracle::words_up_to(5)) {
        const auto r = kolmo::run(kolmo::fixtures::bar_echo(), kolmo::bar_encode(x), BitString(), 1000);
        ASSERT_TRUE(r.halted()) << x.str();
        EXPECT_EQ(r.output, x);
    }
}

TEST(MachineText, RejectsNondeterminismAndBadFields) {
    EXPECT_THROW(TableMachine::parse("states 1\n0 * * * -> 0 0 S S - -\n0 n * * -> 0 0 S S - -\n"),
                 kolmo::InvalidArgument);
    EXPECT_THROW(TableMachine::parse("states 1\n0 n * * -> 1 0 S S - -\n"), kolmo::InvalidArgument);
    EXPECT_THROW(TableMachine::parse("states 1\n0 x * * -> 0 0 S S - -\n"), kolmo::ParseError);
    EXPECT_THROW(TableMachine::parse("0 n * * -> 0 0 S S - -\n"), kolmo::ParseError);
}

TEST(MachineText, FixtureFilesMatchBuiltins) {
    for (const auto& [name, text] : kolmo::fixtures::texts()) {
        std::ifstream in(std::string(KOLMO_FIXTURE_DIR) + "/" + name + ".tm");
        ASSERT_TRUE(in) << name;
        const std::string file((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        EXPECT_EQ(file, text) << name;
        const auto m = TableMachine::parse(text);
        EXPECT_EQ(TableMachine::parse(m.to_text()).to_description(), m.to_description());
        EXPECT_EQ(TableMachine::from_description(m.to_description())->to_text(), m.to_text());
    }
}

TEST(PrefixProperty, HaltingProgramsArePrefixFreeAndExtensionStable) {
    auto machines = fixture_machines();
    for (std::uint64_t i = 1; i <= 50; ++i) machines.push_back(*kolmo::enumerate_machines(i));
    for (const auto& m : machines) {
        for (const char* y : {"", "1"}) {
            std::vector<BitString> halting;
            for (const auto& p : oracle::words_up_to(6)) {
                const auto r = kolmo::run(m, p, bits(y), 500);
                if (!r.halted()) continue;
                halting.push_back(p);
                for (const auto& s : oracle::words_up_to(3)) {
                    const auto ext = kolmo::run(m, p + s, bits(y), 500);
                    if (s.empty()) continue;
                    // Reads exactly p and no further, so the extension is never accepted.
                    EXPECT_EQ(ext.kind, RunOutcome::Kind::Rejected);
                    EXPECT_EQ(ext.bits_read, p.size());
                }
            }
            EXPECT_TRUE(kolmo::is_prefix_free(halting));
        }
    }
}

TEST(Enumeration, FirstDescriptions) {
    auto& e = kolmo::MachineEnumeration::shared();
    EXPECT_EQ(e.description(1), bits("00"));
    EXPECT_EQ(e.machine(1)->states(), 1U);
    EXPECT_TRUE(e.machine(1)->transitions().empty());
    EXPECT_THROW(e.description(0), kolmo::InvalidArgument);
}

TEST(Enumeration, MatchesGoldenFile) {
    std::ifstream in(std::string(KOLMO_SOURCE_DIR) + "/tests/golden/enumeration_first100.txt");
    ASSERT_TRUE(in);
    std::vector<BitString> golden;
    for (std::string line; std::getline(in, line);) golden.push_back(BitString::parse(line));
    ASSERT_EQ(golden.size(), 100U);
    for (std::uint64_t i = 1; i <= 100; ++i) {
        const BitString d = kolmo::MachineEnumeration::shared().description(i);
        EXPECT_EQ(d, golden[i - 1]) << i;
        const auto m = TableMachine::from_description(d);
        ASSERT_TRUE(m.has_value());
        EXPECT_EQ(m->to_description(), d);
    }
}

TEST(Enumeration, IsOrderedAndSkipsExactlyTheInvalidDescriptions) {
    // Every description of length <= 18 is checked directly against the decoder.
    std::vector<BitString> valid;
    for (std::size_t len = 0; len <= 18; ++len) {
        for (const auto& w : oracle::words_of_length(len)) {
            if (TableMachine::from_description(w)) valid.push_back(w);
        }
    }
    ASSERT_GT(valid.size(), 100U);
    for (std::uint64_t i = 1; i <= valid.size(); ++i) {
        ASSERT_EQ(kolmo::MachineEnumeration::shared().description(i), valid[i - 1]) << i;
    }
}

TEST(Universal, WorkedExamples) {
    // Machine 1 halts immediately.
    const auto r = kolmo::universal_run(kolmo::UniversalMachine::program_for(1, BitString()), BitString(), 100);
    ASSERT_TRUE(r.halted());
    EXPECT_EQ(r.output, BitString());
    EXPECT_EQ(kolmo::universal_run(bits("0"), BitString(), 100).kind, RunOutcome::Kind::Rejected);
    EXPECT_EQ(kolmo::universal_run(bits("11"), BitString(), 100).kind, RunOutcome::Kind::RequestedPastEnd);
}

TEST(Universal, AgreesWithDirectRuns) {
    for (std::uint64_t i = 1; i <= 20; ++i) {
        const auto machine = kolmo::enumerate_machines(i);
        const std::size_t cost = kolmo::UniversalMachine::index_cost(i);
        for (const auto& p : oracle::words_up_to(6)) {
            for (const char* y : {"", "1"}) {
                const auto direct = kolmo::run(*machine, p, bits(y), 200);
                const auto viaU = kolmo::universal_run(kolmo::UniversalMachine::program_for(i, p), bits(y), 200 + cost);
                ASSERT_EQ(direct.kind, viaU.kind) << i << ' ' << p.str();
                EXPECT_EQ(direct.output, viaU.output);
                EXPECT_EQ(direct.bits_read + cost, viaU.bits_read);
                EXPECT_EQ(direct.steps + cost, viaU.steps);
            }
        }
    }
}

TEST(Explore, MatchesBruteForceRuns) {
    auto machines = fixture_machines();
    for (std::uint64_t i = 1; i <= 40; ++i) machines.push_back(*kolmo::enumerate_machines(i));
    for (const auto& m : machines) {
        for (const char* y : {"", "01"}) {
            for (std::uint64_t budget : {1U, 3U, 7U, 60U}) {
                const auto found =
                    kolmo::explore_halting(m, bits(y), 7, [budget](const BitString&) { return budget; });
                std::vector<kolmo::HaltingProgram> brute;
                for (const auto& p : oracle::words_up_to(7)) {
                    const auto r = kolmo::run(m, p, bits(y), budget);
                    if (r.halted()) brute.push_back({p, r.output, r.steps});
                }
                EXPECT_EQ(found, brute);
            }
        }
    }
}

TEST(Dovetail, WorkedExamples) {
    const auto halt = kolmo::dovetail(kolmo::fixtures::halt_immediately(), BitString(), 50);
    ASSERT_EQ(halt.size(), 1U);
    EXPECT_EQ(halt[0].program, BitString());
    EXPECT_EQ(halt[0].output, BitString());
    EXPECT_EQ(halt[0].stage, 2U);  // program 1 is first scheduled at stage 2

    const auto copy = kolmo::dovetail(kolmo::fixtures::copy2(), BitString(), 200);
    std::set<BitString> programs;
    for (const auto& e : copy) programs.insert(e.program);
    EXPECT_EQ(copy.size(), 4U);
    EXPECT_EQ(programs, (std::set<BitString>{bits("00"), bits("01"), bits("10"), bits("11")}));
}

TEST(Dovetail, FastPathEqualsLiteralSchedule) {
    auto machines = fixture_machines();
    for (std::uint64_t i = 1; i <= 30; ++i) machines.push_back(*kolmo::enumerate_machines(i));
    for (const auto& m : machines) {
        for (const char* y : {"", "1"}) {
            for (std::uint64_t stage : {1U, 2U, 5U, 33U, 160U}) {
                EXPECT_EQ(kolmo::dovetail(m, bits(y), stage), kolmo::dovetail_round_robin(m, bits(y), stage));
            }
            kolmo::DovetailOptions opts;
            opts.length_bound = 2;
            EXPECT_EQ(kolmo::dovetail(m, bits(y), 120, opts), kolmo::dovetail_round_robin(m, bits(y), 120, 2));
        }
    }
}

TEST(Dovetail, MonotoneInStageAndThreadIndependent) {
    const auto m = kolmo::fixtures::bar_echo();
    std::vector<kolmo::HaltEvent> previous;
    for (std::uint64_t stage = 1; stage <= 300; ++stage) {
        const auto events = kolmo::dovetail(m, BitString(), stage);
        ASSERT_GE(events.size(), previous.size());
        EXPECT_TRUE(std::equal(previous.begin(), previous.end(), events.begin()));
        previous = events;
    }
    kolmo::DovetailOptions par;
    par.threads = 4;
    EXPECT_EQ(kolmo::dovetail(m, BitString(), 5000, par), kolmo::dovetail(m, BitString(), 5000));
    const kolmo::UniversalMachine u;
    EXPECT_EQ(kolmo::dovetail(u, bits("1"), 3000, par), kolmo::dovetail(u, bits("1"), 3000));
}

TEST(Dovetail, HaltingProgramSetIsPrefixFree) {
    const kolmo::UniversalMachine u;
    for (const char* y : {"", "1"}) {
        const auto events = kolmo::dovetail(u, bits(y), 4000);
        std::vector<BitString> programs;
        for (const auto& e : events) programs.push_back(e.program);
        EXPECT_FALSE(programs.empty());
        EXPECT_TRUE(kolmo::is_prefix_free(programs));
    }
}
