// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "kolmo/interval.hpp"
#include "kolmo/semimeasures.hpp"

// Interval codes.
//
// shannon_fano cuts consecutive intervals of length p(x) from [0, 1) and gives
// x the word of the leftmost largest binary interval inside its piece, which
// costs at most ceil(log2 1/p(x)) + 2 bits.
//
// The conditional construction works from a lower approximation of m(.|y).
// Each time the approximation of m(x|y) first reaches a new power of two
// 2^{-k}, a psi event of mass 2^{-k} is emitted and an interval of length
// 2^{-k-1} is cut for it. Summed over the events of one x this is below
// m(x|y), so the intervals of one condition y fit into [0, 1). Every x gets
// a codeword of at most ceil(log2 1/m(x|y)) + 3 bits.

namespace kolmo {

struct SimpleCodeEntry {
    BitString x;
    BitString codeword;
    Interval interval;

    friend bool operator==(const SimpleCodeEntry&, const SimpleCodeEntry&) = default;
};

struct SimpleCodeBook {
    std::vector<SimpleCodeEntry> entries;
};

inline SimpleCodeBook shannon_fano(const std::vector<std::pair<BitString, Dyadic>>& masses) {
    Dyadic total;
    for (const auto& [x, p] : masses) {
        if (p.is_zero()) throw InvalidArgument("mass of '" + x.str() + "' is zero");
        total += p;
    }
    if (total > Dyadic(1)) throw InvalidArgument("masses sum to " + total.to_string() + " > 1");
    SimpleCodeBook book;
    Dyadic cursor;
    for (const auto& [x, p] : masses) {
        const Interval piece(cursor, cursor + p);
        book.entries.push_back({x, largest_binary_subinterval(piece)->word(), piece});
        cursor = piece.hi();
    }
    return book;
}

/// The first time the approximation of m(x|y) reaches [2^{-k}, 2^{-k+1}) for a k
/// smaller than every k emitted before for (x, y).
struct PsiEvent {
    BitString x;
    BitString y;
    std::uint64_t t = 0;  // position in the evaluation schedule, from 1
    std::uint64_t k = 0;
    Dyadic mass;          // 2^{-k}

    friend bool operator==(const PsiEvent&, const PsiEvent&) = default;
};

/// Turns a stream of approximation values into psi events.
class PsiDiscretizer {
public:
    /// Records that the approximation of (x, y) is `value` at schedule position t.
    std::optional<PsiEvent> observe(const BitString& x, const BitString& y, std::uint64_t t, const Dyadic& value) {
        auto& s = state_[{x, y}];
        if (s.seen && value < s.last) {
            throw MonotonicityViolation("approximation of (" + x.str() + "|" + y.str() + ") fell from " +
                                        s.last.to_string() + " to " + value.to_string() + " at t=" + std::to_string(t));
        }
        if (value > Dyadic(1)) {
            throw InvalidArgument("approximation of (" + x.str() + "|" + y.str() + ") exceeds 1: " + value.to_string());
        }
        s.seen = true;
        s.last = value;
        if (value.is_zero()) return std::nullopt;
        const auto k = static_cast<std::uint64_t>(-value.floor_log2());
        if (s.last_k && *s.last_k <= k) return std::nullopt;
        s.last_k = k;
        return PsiEvent{x, y, t, k, Dyadic::inverse_pow2(k)};
    }

private:
    struct PairState {
        bool seen = false;
        Dyadic last;
        std::optional<std::uint64_t> last_k;
    };
    std::map<std::pair<BitString, BitString>, PairState> state_;
};

/// Order in which (pair, t) evaluations happen.
enum class Schedule {
    RoundRobin,  // t = 1, 2, ...: every pair once per round
    Dovetail,    // n = 0, 1, ...: (pair a, t) with cantor_pair(t - 1, a) = n
};

inline const char* to_string(Schedule s) { return s == Schedule::RoundRobin ? "round-robin" : "dovetail"; }

struct PsiOptions {
    Schedule schedule = Schedule::Dovetail;
    std::uint64_t max_t = 64;          // largest stage handed to phi
    std::uint64_t max_events = 1 << 20;
};

/// Psi events of phi over a finite set of (x, y) pairs. Strings are handed to
/// phi as program_index(x), program_index(y). An undefined value produces no event.
inline std::vector<PsiEvent> psi_discretize(const MonotoneApproximator& phi,
                                            const std::vector<std::pair<BitString, BitString>>& pairs,
                                            const PsiOptions& opts = {}) {
    if (opts.max_t < 1) throw InvalidArgument("max_t must be at least 1");
    std::vector<PsiEvent> out;
    PsiDiscretizer disc;
    std::uint64_t position = 0;
    auto visit = [&](std::size_t a, std::uint64_t t) {
        ++position;
        const auto& [x, y] = pairs[a];
        const auto v = phi(program_index(x), program_index(y), t);
        if (!v) return;
        if (auto e = disc.observe(x, y, position, *v)) out.push_back(std::move(*e));
    };
    if (opts.schedule == Schedule::RoundRobin) {
        for (std::uint64_t t = 1; t <= opts.max_t && out.size() < opts.max_events; ++t) {
            for (std::size_t a = 0; a < pairs.size() && out.size() < opts.max_events; ++a) visit(a, t);
        }
    } else {
        const std::uint64_t last = pairs.empty() ? 0 : cantor_pair(opts.max_t - 1, pairs.size() - 1);
        for (std::uint64_t n = 0; n <= last && out.size() < opts.max_events && !pairs.empty(); ++n) {
            const auto [t0, a] = cantor_unpair(n);
            if (a < pairs.size() && t0 < opts.max_t) visit(a, t0 + 1);
        }
    }
    return out;
}

struct CodeEntry {
    BitString x;
    BitString codeword;
    Interval interval;
    PsiEvent source;

    friend bool operator==(const CodeEntry&, const CodeEntry&) = default;
};

/// Prefix code for one condition y.
struct CodeBook {
    BitString aux;
    std::vector<CodeEntry> entries;
    Dyadic layout_cursor;
    std::string provenance;

    /// The shortest codeword of x, or nullopt.
    std::optional<BitString> codeword(const BitString& x) const {
        std::optional<BitString> best;
        for (const auto& e : entries) {
            if (e.x == x && (!best || e.codeword.size() < best->size())) best = e.codeword;
        }
        return best;
    }

    std::vector<BitString> codewords() const {
        std::vector<BitString> out;
        for (const auto& e : entries) out.push_back(e.codeword);
        return out;
    }
};

/// Allocates the events of condition y left to right; events for other conditions are skipped.
inline CodeBook build_codebook(const std::vector<PsiEvent>& events, const BitString& y, std::string provenance = {}) {
    CodeBook book{y, {}, Dyadic(), std::move(provenance)};
    for (const auto& e : events) {
        if (e.y != y) continue;
        const Dyadic hi = book.layout_cursor + e.mass.half();
        if (hi > Dyadic(1)) {
            throw InvariantViolation("interval for '" + e.x.str() + "' ends at " + hi.to_string() +
                                     " > 1; the approximation of m(.|" + y.str() + ") sums to more than 1");
        }
        const Interval piece(book.layout_cursor, hi);
        book.entries.push_back({e.x, largest_binary_subinterval(piece)->word(), piece, e});
        book.layout_cursor = hi;
    }
    return book;
}

inline CodeBook build_codebook(const MonotoneApproximator& phi, const std::vector<BitString>& xs, const BitString& y,
                               const PsiOptions& opts = {}) {
    std::vector<std::pair<BitString, BitString>> pairs;
    for (const auto& x : xs) pairs.emplace_back(x, y);
    return build_codebook(psi_discretize(phi, pairs, opts), y,
                          std::string(to_string(opts.schedule)) + " max_t=" + std::to_string(opts.max_t) +
                              " max_events=" + std::to_string(opts.max_events));
}

/// x if p is exactly the codeword of an allocated interval; nullopt otherwise
/// (the decoding machine would run forever).
inline std::optional<BitString> decode(const CodeBook& book, const BitString& p, const BitString& y) {
    if (y != book.aux) throw ProvenanceMismatch("code book was built for aux '" + book.aux.str() + "', not '" + y.str() + "'");
    for (const auto& e : book.entries) {
        if (e.codeword == p) return e.x;
    }
    return std::nullopt;
}

/// A prefix machine that outputs x on program codeword(x) and runs forever on
/// any program that leaves the code tree. The aux tape is ignored.
inline TableMachine codebook_to_machine(const CodeBook& book) {
    std::map<BitString, BitString> leaves;  // codeword -> x
    std::set<BitString> internal;
    for (const auto& e : book.entries) {
        leaves.emplace(e.codeword, e.x);
        for (std::size_t n = 0; n < e.codeword.size(); ++n) internal.insert(e.codeword.prefix(n));
    }
    // State 0 starts, then one state per internal node, output chains, halt, loop.
    std::map<BitString, std::uint32_t> node_state;
    std::uint32_t next_state = 1;
    for (const auto& v : internal) node_state[v] = next_state++;
    std::vector<Transition> ts;
    std::map<BitString, std::uint32_t> chain_start;
    std::vector<std::pair<std::uint32_t, bool>> chain_bits;  // state, output bit
    std::vector<std::uint32_t> chain_last;
    for (const auto& [word, x] : leaves) {
        if (x.empty()) continue;
        chain_start[word] = next_state;
        for (std::size_t i = 0; i < x.size(); ++i) chain_bits.emplace_back(next_state++, x[i]);
        chain_last.push_back(next_state - 1);
    }
    const std::uint32_t halt = next_state++;
    const std::uint32_t loop = next_state++;
    auto enter = [&](const BitString& node) -> std::pair<std::uint32_t, bool> {  // state, read
        if (internal.contains(node)) return {node_state.at(node), true};
        if (const auto it = leaves.find(node); it != leaves.end()) {
            return {it->second.empty() ? halt : chain_start.at(node), false};
        }
        return {loop, false};
    };
    auto make = [](std::uint32_t state, InKey in, std::uint32_t next, OutBit out, bool read) {
        Transition t;
        t.state = state;
        t.in = in;
        t.next = next;
        t.out = out;
        t.read = read;
        return t;
    };
    const auto [first, first_read] = enter(BitString());
    ts.push_back(make(0, InKey::Any, first, OutBit::None, first_read));
    for (const auto& [v, s] : node_state) {
        for (bool bit : {false, true}) {
            BitString child = v;
            child.push_back(bit);
            const auto [to, read] = enter(child);
            ts.push_back(make(s, bit ? InKey::One : InKey::Zero, to, OutBit::None, read));
        }
    }
    std::set<std::uint32_t> ends(chain_last.begin(), chain_last.end());
    for (const auto& [s, bit] : chain_bits) {
        ts.push_back(make(s, InKey::Any, ends.contains(s) ? halt : s + 1, bit ? OutBit::One : OutBit::Zero, false));
    }
    ts.push_back(make(loop, InKey::Any, loop, OutBit::None, false));
    return TableMachine(next_state, std::move(ts));
}

inline void write_codebook(std::ostream& out, const CodeBook& book) {
    out << "# aux " << book.aux.str() << '\n' << "# schedule " << book.provenance << '\n';
    for (const auto& e : book.entries) {
        out << e.x.str() << '\t' << e.codeword.str() << '\t' << e.interval.lo().to_string() << '\t'
            << e.interval.hi().to_string() << '\n';
    }
}

inline CodeBook read_codebook(std::istream& in) {
    CodeBook book;
    std::string line;
    auto header = [&](const std::string& key) {
        const std::string tag = "# " + key;
        if (!std::getline(in, line) || line.rfind(tag, 0) != 0) throw ParseError("missing code book header '" + key + "'");
        return line.size() > tag.size() ? line.substr(tag.size() + 1) : std::string();
    };
    book.aux = BitString::parse(header("aux"));
    book.provenance = header("schedule");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, '\t');) f.push_back(cell);
        if (line.back() == '\t') f.emplace_back();
        if (f.size() != 4) throw ParseError("code book line needs 4 fields: " + line);
        CodeEntry e{BitString::parse(f[0]), BitString::parse(f[1]), Interval(Dyadic::parse(f[2]), Dyadic::parse(f[3])), {}};
        e.source = PsiEvent{e.x, book.aux, 0, 0, e.interval.length().scaled(1)};
        if (!(e.interval.lo() == book.layout_cursor)) throw ParseError("code book intervals are not consecutive: " + line);
        book.layout_cursor = e.interval.hi();
        book.entries.push_back(std::move(e));
    }
    return book;
}

/// One row of the coding gap report.
struct GapRow {
    BitString x;
    std::optional<Dyadic> q;             // a priori lower bound, when a machine is involved
    std::optional<std::uint64_t> k_bits;  // complexity upper bound, when a machine is involved
    Dyadic m_hat;                        // the approximation reached within budget
    std::int64_t target = 0;             // ceil(log2 1/m_hat)
    std::optional<std::uint64_t> code_length;
    bool lower_ok = true;                // 2^{-k} <= q when both exist
    bool code_ok = false;                // code_length <= target + 3
};

struct GapReport {
    BitString aux;
    std::vector<GapRow> rows;
    std::optional<std::int64_t> max_k_vs_q_gap;   // max of k_bits - ceil(log2 1/q), observed only
    std::int64_t max_code_gap = 0;                // max of code_length - target
};

namespace detail {

inline void finish_rows(GapReport& report, const CodeBook& book) {
    for (auto& r : report.rows) {
        r.target = r.m_hat.ceil_log2_inverse();
        if (const auto w = book.codeword(r.x)) r.code_length = w->size();
        r.code_ok = r.code_length && static_cast<std::int64_t>(*r.code_length) <= r.target + 3;
        if (r.code_length) {
            report.max_code_gap = std::max(report.max_code_gap, static_cast<std::int64_t>(*r.code_length) - r.target);
        }
        if (r.q && r.k_bits) {
            r.lower_ok = Dyadic::inverse_pow2(*r.k_bits) <= *r.q;
            const std::int64_t gap = static_cast<std::int64_t>(*r.k_bits) - r.q->ceil_log2_inverse();
            report.max_k_vs_q_gap = std::max(report.max_k_vs_q_gap.value_or(gap), gap);
        }
    }
}

} // namespace detail

/// Gap report for a machine: the a priori table at stage_covering(L, S) plays
/// the role of m, its growth along the dovetail is the approximation fed to
/// the psi construction, and the complexity estimates use the same bounds.
template <PrefixMachine M>
GapReport coding_gap_report(const M& machine, const BitString& aux, std::size_t length_bound, std::uint64_t step_bound) {
    const std::uint64_t stage = stage_covering(length_bound, step_bound);
    DovetailOptions opts;
    opts.length_bound = length_bound;
    const auto events = dovetail(machine, aux, stage, opts);
    PsiDiscretizer disc;
    std::map<BitString, Dyadic, ShortLex> q;
    std::vector<PsiEvent> psi;
    for (const auto& e : events) {
        q[e.output] += Dyadic::inverse_pow2(e.program.size());
        if (auto p = disc.observe(e.output, aux, e.stage, q[e.output])) psi.push_back(std::move(*p));
    }
    const CodeBook book = build_codebook(psi, aux, "machine dovetail stage=" + std::to_string(stage));
    const auto k = all_estimates(machine, aux, length_bound, step_bound);
    GapReport report{aux, {}, {}, 0};
    for (const auto& [x, mass] : q) {
        GapRow r;
        r.x = x;
        r.q = mass;
        r.m_hat = mass;
        if (const auto it = k.find(x); it != k.end()) r.k_bits = it->second.bits;
        report.rows.push_back(std::move(r));
    }
    detail::finish_rows(report, book);
    return report;
}

/// Gap report for an approximator over the given outputs under condition y;
/// m_hat is the last value reached within the schedule.
inline GapReport coding_gap_report(const MonotoneApproximator& phi, const std::vector<BitString>& xs,
                                   const BitString& y, const PsiOptions& opts = {}) {
    std::vector<std::pair<BitString, BitString>> pairs;
    for (const auto& x : xs) pairs.emplace_back(x, y);
    const auto events = psi_discretize(phi, pairs, opts);
    const CodeBook book = build_codebook(events, y);
    GapReport report{y, {}, {}, 0};
    for (const auto& x : xs) {
        const auto v = phi(program_index(x), program_index(y), opts.max_t);
        if (!v || v->is_zero()) continue;
        GapRow r;
        r.x = x;
        r.m_hat = *v;
        report.rows.push_back(std::move(r));
    }
    detail::finish_rows(report, book);
    return report;
}

inline void write_gap_tsv(std::ostream& out, const GapReport& report) {
    out << "# aux " << report.aux.str() << '\n';
    out << "x\tq\tneg_log_q_ceil\tk_bits\tm_hat\tceil_log_inv_m\tcode_length\tlower_ok\tcode_ok\n";
    for (const auto& r : report.rows) {
        out << r.x.str() << '\t' << (r.q ? r.q->to_string() : "-") << '\t'
            << (r.q ? std::to_string(r.q->ceil_log2_inverse()) : "-") << '\t'
            << (r.k_bits ? std::to_string(*r.k_bits) : "-") << '\t' << r.m_hat.to_string() << '\t' << r.target << '\t'
            << (r.code_length ? std::to_string(*r.code_length) : "-") << '\t' << (r.lower_ok ? "yes" : "no") << '\t'
            << (r.code_ok ? "yes" : "no") << '\n';
    }
    out << "# max k - ceil(log2 1/q): " << (report.max_k_vs_q_gap ? std::to_string(*report.max_k_vs_q_gap) : "-") << '\n';
    out << "# max code length - ceil(log2 1/m): " << report.max_code_gap << '\n';
}

} // namespace kolmo
