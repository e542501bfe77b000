// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "kolmo/apriori.hpp"
#include "kolmo/fixtures.hpp"
#include "kolmo/generators.hpp"
#include "kolmo/manifest.hpp"
#include "kolmo/quotient_demo.hpp"
#include "kolmo/semimeasures.hpp"
#include "kolmo/sf_coder.hpp"
#include "kolmo/universal.hpp"

// A compact run of the library invariants. Each check prints one line with a
// digest of everything it computed; the digests do not depend on the thread
// count, so two runs can be compared byte for byte.

namespace kolmo {

namespace selftest_detail {

struct Check {
    std::string name;
    std::function<bool(std::ostream& transcript, unsigned threads)> body;
};

inline bool codes_roundtrip(std::ostream& t, unsigned) {
    bool ok = true;
    std::vector<BitString> bars;
    for (std::uint64_t n = 0; n < 2047; ++n) {
        const BitString x = nat_to_string(n);
        bars.push_back(bar_encode(x));
        ok = ok && bar_decode(bars.back()).first == x && std_decode(std_encode(x)).first == x;
        const BitString y = nat_to_string(2046 - n);
        ok = ok && unpair_strings(pair_strings(x, y)) == std::make_pair(x, y);
    }
    ok = ok && is_prefix_free(bars) && kraft_sum(bars) <= Dyadic(1);
    t << kraft_sum(bars).to_string() << '\n';
    return ok;
}

inline bool shannon_fano_bound(std::ostream& t, unsigned) {
    gen::Rng rng(1);
    bool ok = true;
    for (int trial = 0; trial < 200; ++trial) {
        const auto masses = gen::mass_list(rng, 64);
        const auto book = shannon_fano(masses);
        std::vector<BitString> words;
        for (std::size_t i = 0; i < masses.size(); ++i) {
            words.push_back(book.entries[i].codeword);
            ok = ok && static_cast<std::int64_t>(words.back().size()) <= masses[i].second.ceil_log2_inverse() + 2;
            t << words.back().str() << ' ';
        }
        ok = ok && is_prefix_free(words) && kraft_sum(words) <= Dyadic(1);
        t << '\n';
    }
    return ok;
}

inline bool binary_cover(std::ostream& t, unsigned) {
    bool ok = true;
    const std::uint64_t e = 6;
    for (std::uint64_t a = 0; a < (1U << e); ++a) {
        for (std::uint64_t b = a + 1; b <= (1U << e); ++b) {
            const Interval i(Dyadic(BigInt(a), e), Dyadic(BigInt(b), e));
            const auto cover = cover_by_binary(i);
            ok = ok && !cover.empty() && cover.size() <= 4;
            Dyadic reach = i.lo();
            for (const auto& c : cover) {
                const Interval ci = c.to_interval();
                ok = ok && ci.lo() <= reach;
                if (ci.hi() > reach) reach = ci.hi();
                t << c.word().str() << ' ';
            }
            ok = ok && reach >= i.hi();
        }
        t << '\n';
    }
    return ok;
}

inline bool vm_prefix_free(std::ostream& t, unsigned threads) {
    bool ok = true;
    for (std::uint64_t i = 1; i <= 20; ++i) {
        for (const char* aux : {"", "1"}) {
            const auto halting = explore_halting(
                *enumerate_machines(i), BitString::parse(aux), 8, [](const BitString&) { return 200; }, threads);
            std::vector<BitString> programs;
            for (const auto& h : halting) {
                programs.push_back(h.program);
                t << h.program.str() << ':' << h.output.str() << ' ';
            }
            ok = ok && is_prefix_free(programs);
            t << '\n';
        }
    }
    return ok;
}

inline bool dovetail_schedule(std::ostream& t, unsigned threads) {
    bool ok = true;
    for (const auto& [name, text] : fixtures::texts()) {
        const auto m = TableMachine::parse(text);
        DovetailOptions opts;
        opts.threads = threads;
        const auto fast = dovetail(m, BitString(), 300, opts);
        ok = ok && fast == dovetail_round_robin(m, BitString(), 300);
        for (const auto& e : fast) t << e.stage << ':' << e.program.str() << ':' << e.output.str() << ' ';
        t << '\n';
    }
    return ok;
}

inline bool apriori_tables(std::ostream& t, unsigned threads) {
    const auto q = [&](const TableMachine& m, const char* aux) {
        return approx_apriori(m, BitString::parse(aux), stage_covering(6, 200), 6, {}, threads);
    };
    const Dyadic half = Dyadic::inverse_pow2(1);
    const Dyadic quarter = Dyadic::inverse_pow2(2);
    bool ok = q(fixtures::halt_immediately(), "").at(BitString()) == Dyadic(1);
    const auto echo = q(fixtures::echo_bit(), "");
    ok = ok && echo.entries.size() == 2 && echo.at(BitString::parse("0")) == half;
    const auto copy = q(fixtures::copy2(), "");
    ok = ok && copy.entries.size() == 4 && copy.at(BitString::parse("10")) == quarter;
    for (std::uint64_t i = 1; i <= 20; ++i) {
        for (const char* aux : {"", "1"}) {
            const auto table = q(*enumerate_machines(i), aux);
            std::vector<KEstimate> ests;
            for (const auto& [x, est] : all_estimates(*enumerate_machines(i), BitString::parse(aux), 6, 200, threads)) {
                ests.push_back(est);
            }
            ok = ok && table.total() <= Dyadic(1);
            for (const auto& row : apriori_vs_k(table, ests)) ok = ok && row.holds;
            write_table(t, table);
        }
    }
    return ok;
}

inline bool normalize_runs(std::ostream& t, unsigned) {
    bool ok = true;
    const MonotoneApproximator one([](std::uint64_t, std::uint64_t, std::uint64_t) { return std::optional(Dyadic(1)); },
                                   "one");
    const auto p1 = normalize(one, 6);
    ok = ok && p1.values.size() == 1 && p1.at(1, 1) == Dyadic(1);
    write_semimeasure(t, p1);
    gen::Rng rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        const auto table = gen::staircase(rng, 1 + gen::below(rng, 7), 12);
        std::optional<ConditionalSemimeasure> frozen;
        const auto p = normalize(table.approximator("s"), 14, FreezeMode::AllColumns,
                                 [&](const ConditionalSemimeasure& s) {
                                     for (const auto y : s.columns()) ok = ok && s.column_sum(y) <= Dyadic(1);
                                     if (frozen) ok = ok && s.values == frozen->values;
                                     if (!frozen && !s.frozen_y.empty()) frozen = s;
                                 });
        write_semimeasure(t, p);
    }
    return ok;
}

inline bool mixture_domination(std::ostream& t, unsigned) {
    gen::Rng rng(3);
    bool ok = true;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> domain;
    for (std::uint64_t x = 1; x <= 6; ++x) {
        for (std::uint64_t y = 1; y <= 6; ++y) domain.emplace_back(x, y);
    }
    for (int trial = 0; trial < 50; ++trial) {
        const auto spec = gen::mixture_spec(rng, 5, 6, 8);
        const auto m = mixture(spec, 8);
        ok = ok && check_domination(m, spec, domain);
        write_semimeasure(t, m);
    }
    return ok;
}

inline bool psi_codebooks(std::ostream& t, unsigned) {
    gen::Rng rng(4);
    bool ok = true;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + gen::below(rng, 8);
        const auto phi = gen::code_mixture(rng, n, 1, 40);
        std::vector<BitString> xs;
        for (std::size_t s = 0; s < n; ++s) xs.push_back(nat_to_string(s + 1));
        PsiOptions opts;
        opts.max_t = 40;
        const auto book = build_codebook(phi.approximator("c"), xs, BitString(), opts);
        for (const auto& x : xs) {
            const Dyadic m = *phi(program_index(x), 1, opts.max_t);
            if (m.is_zero()) continue;
            const auto w = book.codeword(x);
            ok = ok && w && Dyadic::inverse_pow2(w->size()) >= m.scaled(-3) && decode(book, *w, BitString()) == x;
            Dyadic psi;
            for (const auto& e : book.entries) {
                if (e.x == x) psi += e.source.mass;
            }
            ok = ok && psi < m.scaled(1);
        }
        write_codebook(t, book);
    }
    return ok;
}

inline bool quotient_orders(std::ostream& t, unsigned) {
    gen::Rng rng(5);
    bool ok = true;
    for (int trial = 0; trial < 100; ++trial) {
        const auto mix = gen::joint_mixture(rng);
        const auto summed = mix.summed();
        for (std::uint64_t b = 0; b < 4; ++b) {
            const BitString y = nat_to_string(b);
            if (summed.marginal(y).is_zero()) continue;
            for (std::uint64_t a = 0; a < 5; ++a) {
                const Ratio direct = quotient_conditional(summed, nat_to_string(a), y);
                ok = ok && direct.str() == quotient_by_components(mix, nat_to_string(a), y).str();
                t << direct.str() << ' ';
            }
        }
        t << '\n';
    }
    return ok;
}

inline bool universal_overhead(std::ostream& t, unsigned threads) {
    const UniversalMachine u;
    bool ok = true;
    for (const char* aux : {"", "1"}) {
        for (std::uint64_t i = 1; i <= 8; ++i) {
            const std::size_t cost = UniversalMachine::index_cost(i);
            const auto direct = all_estimates(*enumerate_machines(i), BitString::parse(aux), 5, 50, threads);
            const auto via_u = all_estimates(u, BitString::parse(aux), 5 + cost, 50 + cost, threads);
            for (const auto& [x, est] : direct) {
                const auto it = via_u.find(x);
                ok = ok && it != via_u.end() && it->second.bits <= est.bits + cost;
                if (it != via_u.end()) t << x.str() << ':' << it->second.bits << ' ';
            }
            t << '\n';
        }
    }
    return ok;
}

inline const std::vector<Check>& checks() {
    static const std::vector<Check> list = {
        {"codes-roundtrip", codes_roundtrip},
        {"shannon-fano-bound", shannon_fano_bound},
        {"binary-cover", binary_cover},
        {"vm-prefix-free", vm_prefix_free},
        {"dovetail-schedule", dovetail_schedule},
        {"apriori-tables", apriori_tables},
        {"normalize", normalize_runs},
        {"mixture-domination", mixture_domination},
        {"psi-codebooks", psi_codebooks},
        {"quotient-orders", quotient_orders},
        {"universal-overhead", universal_overhead},
    };
    return list;
}

} // namespace selftest_detail

/// Runs every check, printing "ok <name> <digest>" or "FAIL <name> <reason>"
/// per check and a summary line. Returns true when all pass.
inline bool run_selftest(std::ostream& out, unsigned threads = 1) {
    std::size_t passed = 0;
    const auto& list = selftest_detail::checks();
    for (const auto& c : list) {
        std::ostringstream transcript;
        bool ok = false;
        std::string reason = "invariant violated";
        try {
            ok = c.body(transcript, threads);
        } catch (const std::exception& e) {
            reason = e.what();
        }
        if (ok) {
            ++passed;
            out << "ok " << c.name << ' ' << fnv1a_hex(transcript.str()) << '\n';
        } else {
            out << "FAIL " << c.name << ' ' << reason << '\n';
        }
    }
    out << "selftest " << passed << '/' << list.size() << " passed\n";
    return passed == list.size();
}

} // namespace kolmo
