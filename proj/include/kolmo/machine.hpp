// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <bit>
#include <concepts>
#include <cstdint>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kolmo/bitstring.hpp"
#include "kolmo/codes.hpp"
#include "kolmo/error.hpp"

// Toy prefix machines.
//
// A machine has Q control states (0 is the start state), a one-way read-only
// input tape holding the program, a read-only two-way auxiliary tape holding
// the condition y between two end markers, a binary work tape (blank 0,
// unbounded both ways) and a one-way output tape.
//
// Each step looks up the situation
//     (state, input register, aux symbol, work symbol)
// in the transition table. No applicable transition means the machine halts;
// the lookup that discovers this still costs one step. A transition writes
// the work cell, moves the work and aux heads, optionally appends an output
// bit, switches state and optionally requests the next program bit. A
// requested bit lands in the input register and is visible to the following
// step only; every other step sees the register as `n` (empty).
//
// The aux head starts on the left end marker (cell 0); cells 1..|y| hold y and
// cell |y|+1 is the right marker. Aux moves are clamped to the markers.
//
// Text format (fixtures), one transition per line, '#' starts a comment:
//
//     states <Q>
//     <state> <in> <aux> <work> -> <next> <write> <wmove> <amove> <out> <read>
//
//     in    n | 0 | 1 | *        register empty / bit / any
//     aux   0 | 1 | e | *        e = either end marker
//     work  0 | 1 | *
//     write 0 | 1
//     wmove, amove  L | S | R
//     out   - | 0 | 1
//     read  r | -
//
// Binary description (used by the enumeration, bit exact):
//
//     bar(nat(Q-1)) bar(nat(T)) record_1 ... record_T
//     record = state:w in:2 aux:2 work:2 next:w write:1 wmove:2 amove:2 out:2 read:1
//
// with w = bit_width(Q-1) (zero bits when Q = 1), bar/nat the codes of
// codes.hpp, and field codes
//
//     in    00 n   01 0   10 1   11 *
//     aux   00 *   01 0   10 1   11 e
//     work  00 *   01 0   10 1   11 invalid
//     move  00 S   01 L   10 R   11 invalid
//     out   00 -   01 0   10 1   11 invalid
//     read  0 -    1 r
//
// A description is valid iff it parses with no bits left over, every state
// and next field is < Q, no field uses an invalid code, no two records can
// apply to the same situation, and every state 1..Q-1 occurs in some record.

namespace kolmo {

enum class InKey : std::uint8_t { None, Zero, One, Any };
enum class AuxKey : std::uint8_t { Any, Zero, One, End };
enum class WorkKey : std::uint8_t { Any, Zero, One };
enum class Move : std::uint8_t { Stay, Left, Right };
enum class OutBit : std::uint8_t { None, Zero, One };

struct Transition {
    std::uint32_t state = 0;
    InKey in = InKey::None;
    AuxKey aux = AuxKey::Any;
    WorkKey work = WorkKey::Any;
    std::uint32_t next = 0;
    bool write = false;
    Move work_move = Move::Stay;
    Move aux_move = Move::Stay;
    OutBit out = OutBit::None;
    bool read = false;

    friend bool operator==(const Transition&, const Transition&) = default;
};

/// Why an execution stopped advancing.
enum class Pause {
    NeedsInput,  // the last step requested a program bit; call feed()
    Halted,
    OutOfFuel,
    Rejected,    // can never halt acceptably on any extension of the bits fed so far
};

namespace detail {

// Concrete situation symbols used for the dense lookup table.
enum : std::uint8_t { kRegNone = 0, kRegZero = 1, kRegOne = 2 };
enum : std::uint8_t { kAuxZero = 0, kAuxOne = 1, kAuxEnd = 2 };

constexpr std::size_t kSituationsPerState = 3 * 3 * 2;

inline bool in_matches(InKey k, std::uint8_t reg) {
    switch (k) {
        case InKey::None: return reg == kRegNone;
        case InKey::Zero: return reg == kRegZero;
        case InKey::One: return reg == kRegOne;
        case InKey::Any: return true;
    }
    return false;
}

inline bool aux_matches(AuxKey k, std::uint8_t sym) {
    switch (k) {
        case AuxKey::Any: return true;
        case AuxKey::Zero: return sym == kAuxZero;
        case AuxKey::One: return sym == kAuxOne;
        case AuxKey::End: return sym == kAuxEnd;
    }
    return false;
}

inline bool work_matches(WorkKey k, std::uint8_t bit) {
    return k == WorkKey::Any || (k == WorkKey::Zero && bit == 0) || (k == WorkKey::One && bit == 1);
}

inline std::uint32_t state_width(std::uint32_t states) {
    return static_cast<std::uint32_t>(std::bit_width(states - 1));
}

} // namespace detail

/// A deterministic prefix machine given by a (possibly wildcarded) transition table.
class TableMachine {
public:
    /// Validates determinism and state ranges; throws InvalidArgument otherwise.
    TableMachine(std::uint32_t states, std::vector<Transition> transitions)
        : states_(states), transitions_(std::move(transitions)) {
        if (states_ == 0) throw InvalidArgument("a machine needs at least one state");
        lookup_.assign(static_cast<std::size_t>(states_) * detail::kSituationsPerState, -1);
        for (std::size_t t = 0; t < transitions_.size(); ++t) {
            const Transition& tr = transitions_[t];
            if (tr.state >= states_ || tr.next >= states_) {
                throw InvalidArgument("transition " + std::to_string(t) + " names a state >= " + std::to_string(states_));
            }
            for (std::uint8_t reg = 0; reg < 3; ++reg) {
                for (std::uint8_t aux = 0; aux < 3; ++aux) {
                    for (std::uint8_t work = 0; work < 2; ++work) {
                        if (!detail::in_matches(tr.in, reg) || !detail::aux_matches(tr.aux, aux) ||
                            !detail::work_matches(tr.work, work)) {
                            continue;
                        }
                        auto& slot = lookup_[index(tr.state, reg, aux, work)];
                        if (slot >= 0) {
                            throw InvalidArgument("transitions " + std::to_string(slot) + " and " + std::to_string(t) +
                                                  " overlap");
                        }
                        slot = static_cast<std::int32_t>(t);
                    }
                }
            }
        }
    }

    std::uint32_t states() const noexcept { return states_; }
    const std::vector<Transition>& transitions() const noexcept { return transitions_; }

    const Transition* find(std::uint32_t state, std::uint8_t reg, std::uint8_t aux, std::uint8_t work) const {
        const auto slot = lookup_[index(state, reg, aux, work)];
        return slot < 0 ? nullptr : &transitions_[static_cast<std::size_t>(slot)];
    }

    /// One run of this machine on a fixed condition y.
    class Execution {
    public:
        Execution(const TableMachine& m, std::shared_ptr<const BitString> aux) : machine_(&m), aux_(std::move(aux)) {
            work_.assign(1, 0);
        }

        Pause advance(std::uint64_t step_limit) {
            while (true) {
                if (pending_read_) return Pause::NeedsInput;
                if (halted_) return Pause::Halted;
                if (steps_ >= step_limit) return Pause::OutOfFuel;
                ++steps_;
                const Transition* tr = machine_->find(state_, reg_, aux_symbol(), work_[work_head_]);
                if (tr == nullptr) {
                    halted_ = true;
                    return Pause::Halted;
                }
                work_[work_head_] = tr->write ? 1 : 0;
                move_work(tr->work_move);
                move_aux(tr->aux_move);
                if (tr->out == OutBit::Zero) output_.push_back(false);
                if (tr->out == OutBit::One) output_.push_back(true);
                state_ = tr->next;
                reg_ = detail::kRegNone;
                pending_read_ = tr->read;
            }
        }

        void feed(bool bit) {
            pending_read_ = false;
            reg_ = bit ? detail::kRegOne : detail::kRegZero;
            ++bits_read_;
        }

        std::uint64_t steps() const noexcept { return steps_; }
        std::size_t bits_read() const noexcept { return bits_read_; }
        const BitString& output() const noexcept { return output_; }

    private:
        std::uint8_t aux_symbol() const {
            if (aux_pos_ == 0 || aux_pos_ > aux_->size()) return detail::kAuxEnd;
            return (*aux_)[aux_pos_ - 1] ? detail::kAuxOne : detail::kAuxZero;
        }

        void move_work(Move m) {
            if (m == Move::Right) {
                if (++work_head_ == work_.size()) work_.push_back(0);
            } else if (m == Move::Left) {
                if (work_head_ == 0) {
                    work_.insert(work_.begin(), 0);
                } else {
                    --work_head_;
                }
            }
        }

        void move_aux(Move m) {
            if (m == Move::Right && aux_pos_ <= aux_->size()) ++aux_pos_;
            if (m == Move::Left && aux_pos_ > 0) --aux_pos_;
        }

        const TableMachine* machine_;
        std::shared_ptr<const BitString> aux_;
        std::vector<std::uint8_t> work_;
        std::size_t work_head_ = 0;
        std::size_t aux_pos_ = 0;
        std::uint32_t state_ = 0;
        std::uint8_t reg_ = detail::kRegNone;
        bool pending_read_ = false;
        bool halted_ = false;
        std::uint64_t steps_ = 0;
        std::size_t bits_read_ = 0;
        BitString output_;
    };

    Execution start(const BitString& aux) const { return Execution(*this, std::make_shared<const BitString>(aux)); }

    // --- binary description -------------------------------------------------

    BitString to_description() const {
        BitString out = bar_encode(nat_to_string(states_ - 1)) + bar_encode(nat_to_string(transitions_.size()));
        const std::uint32_t w = detail::state_width(states_);
        auto put = [&](std::uint64_t v, std::uint32_t width) {
            for (std::uint32_t i = width; i-- > 0;) out.push_back(((v >> i) & 1U) != 0);
        };
        for (const Transition& t : transitions_) {
            put(t.state, w);
            put(static_cast<std::uint64_t>(t.in), 2);
            put(static_cast<std::uint64_t>(t.aux), 2);
            put(static_cast<std::uint64_t>(t.work), 2);
            put(t.next, w);
            put(t.write ? 1 : 0, 1);
            put(static_cast<std::uint64_t>(t.work_move), 2);
            put(static_cast<std::uint64_t>(t.aux_move), 2);
            put(static_cast<std::uint64_t>(t.out), 2);
            put(t.read ? 1 : 0, 1);
        }
        return out;
    }

    static std::uint32_t record_width(std::uint32_t states) { return 2 * detail::state_width(states) + 14; }

    /// Decodes one record; nullopt when a field is out of range.
    static std::optional<Transition> decode_record(const BitString& bits, std::size_t pos, std::uint32_t states) {
        const std::uint32_t w = detail::state_width(states);
        auto take = [&](std::uint32_t width) {
            std::uint64_t v = 0;
            for (std::uint32_t i = 0; i < width; ++i) v = (v << 1) | (bits[pos++] ? 1U : 0U);
            return v;
        };
        Transition t;
        t.state = static_cast<std::uint32_t>(take(w));
        t.in = static_cast<InKey>(take(2));
        t.aux = static_cast<AuxKey>(take(2));
        const auto work = take(2);
        t.next = static_cast<std::uint32_t>(take(w));
        t.write = take(1) != 0;
        const auto wmove = take(2);
        const auto amove = take(2);
        const auto out = take(2);
        t.read = take(1) != 0;
        if (work == 3 || wmove == 3 || amove == 3 || out == 3) return std::nullopt;
        if (t.state >= states || t.next >= states) return std::nullopt;
        t.work = static_cast<WorkKey>(work);
        t.work_move = static_cast<Move>(wmove);
        t.aux_move = static_cast<Move>(amove);
        t.out = static_cast<OutBit>(out);
        return t;
    }

    /// Every state 1..Q-1 is named by some transition.
    static bool mentions_all_states(std::uint32_t states, const std::vector<Transition>& ts) {
        std::vector<bool> seen(states, false);
        seen[0] = true;
        for (const auto& t : ts) seen[t.state] = seen[t.next] = true;
        for (bool s : seen) {
            if (!s) return false;
        }
        return true;
    }

    /// The machine a description denotes, or nullopt when the description is invalid.
    static std::optional<TableMachine> from_description(const BitString& d) {
        try {
            BitReader in(d);
            const std::uint64_t q1 = string_to_nat(bar_decode(in));
            const std::uint64_t count = string_to_nat(bar_decode(in));
            if (q1 >= (std::uint64_t{1} << 31) || count > d.size()) return std::nullopt;
            const auto states = static_cast<std::uint32_t>(q1 + 1);
            const std::uint32_t rec = record_width(states);
            if (d.size() - in.position() != count * rec) return std::nullopt;
            std::vector<Transition> ts;
            for (std::uint64_t k = 0; k < count; ++k) {
                auto t = decode_record(d, in.position() + k * rec, states);
                if (!t) return std::nullopt;
                ts.push_back(*t);
            }
            if (!mentions_all_states(states, ts)) return std::nullopt;
            return TableMachine(states, std::move(ts));
        } catch (const Error&) {
            return std::nullopt;
        }
    }

    // --- text format --------------------------------------------------------

    static TableMachine parse(const std::string& text) {
        std::istringstream lines(text);
        std::string line;
        std::optional<std::uint32_t> states;
        std::vector<Transition> ts;
        int lineno = 0;
        auto fail = [&](const std::string& why) {
            throw ParseError("machine text line " + std::to_string(lineno) + ": " + why);
        };
        while (std::getline(lines, line)) {
            ++lineno;
            if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            std::istringstream fields(line);
            std::vector<std::string> tok;
            for (std::string f; fields >> f;) tok.push_back(f);
            if (tok.empty()) continue;
            if (tok[0] == "states") {
                if (tok.size() != 2 || states) fail("expected a single 'states <Q>'");
                states = static_cast<std::uint32_t>(std::stoul(tok[1]));
                continue;
            }
            if (tok.size() != 11 || tok[4] != "->") fail("expected 10 fields around '->'");
            auto one = [&](const std::string& s, const std::string& allowed) {
                if (s.size() != 1 || allowed.find(s[0]) == std::string::npos) fail("bad field '" + s + "'");
                return static_cast<std::uint8_t>(allowed.find(s[0]));
            };
            Transition t;
            t.state = static_cast<std::uint32_t>(std::stoul(tok[0]));
            t.in = static_cast<InKey>(one(tok[1], "n01*"));
            t.aux = static_cast<AuxKey>(one(tok[2], "*01e"));
            t.work = static_cast<WorkKey>(one(tok[3], "*01"));
            t.next = static_cast<std::uint32_t>(std::stoul(tok[5]));
            t.write = one(tok[6], "01") == 1;
            t.work_move = static_cast<Move>(one(tok[7], "SLR"));
            t.aux_move = static_cast<Move>(one(tok[8], "SLR"));
            t.out = static_cast<OutBit>(one(tok[9], "-01"));
            t.read = one(tok[10], "-r") == 1;
            ts.push_back(t);
        }
        if (!states) fail("missing 'states <Q>'");
        return TableMachine(*states, std::move(ts));
    }

    std::string to_text() const {
        std::string s = "states " + std::to_string(states_) + "\n";
        for (const auto& t : transitions_) {
            s += std::to_string(t.state) + ' ' + "n01*"[static_cast<int>(t.in)] + ' ' + "*01e"[static_cast<int>(t.aux)] +
                 ' ' + "*01"[static_cast<int>(t.work)] + " -> " + std::to_string(t.next) + ' ' + (t.write ? '1' : '0') +
                 ' ' + "SLR"[static_cast<int>(t.work_move)] + ' ' + "SLR"[static_cast<int>(t.aux_move)] + ' ' +
                 "-01"[static_cast<int>(t.out)] + ' ' + (t.read ? 'r' : '-') + '\n';
        }
        return s;
    }

private:
    static std::size_t index(std::uint32_t state, std::uint8_t reg, std::uint8_t aux, std::uint8_t work) {
        return static_cast<std::size_t>(state) * detail::kSituationsPerState + reg * 6U + aux * 2U + work;
    }

    std::uint32_t states_;
    std::vector<Transition> transitions_;
    std::vector<std::int32_t> lookup_;
};

/// Anything that can be started on a condition y and stepped like a prefix machine.
template <class M>
concept PrefixMachine = requires(const M& m, typename M::Execution e, const BitString& aux, std::uint64_t limit) {
    { m.start(aux) } -> std::same_as<typename M::Execution>;
    { e.advance(limit) } -> std::same_as<Pause>;
    e.feed(true);
    { e.steps() } -> std::convertible_to<std::uint64_t>;
    { e.bits_read() } -> std::convertible_to<std::size_t>;
    { e.output() } -> std::convertible_to<const BitString&>;
} && std::copy_constructible<typename M::Execution>;

/// Result of running one program to completion or exhaustion.
struct RunOutcome {
    enum class Kind {
        Halted,
        OutOfFuel,
        RequestedPastEnd,
        // Halted before reading the whole program, or rejected its own input
        // (for example an unparseable universal index). Treated exactly like
        // RequestedPastEnd: the program is not a halting program.
        Rejected,
    };

    Kind kind = Kind::OutOfFuel;
    BitString output;
    std::size_t bits_read = 0;
    std::uint64_t steps = 0;

    bool halted() const noexcept { return kind == Kind::Halted; }
};

inline const char* to_string(RunOutcome::Kind k) {
    switch (k) {
        case RunOutcome::Kind::Halted: return "halted";
        case RunOutcome::Kind::OutOfFuel: return "out-of-fuel";
        case RunOutcome::Kind::RequestedPastEnd: return "requested-past-end";
        case RunOutcome::Kind::Rejected: return "rejected";
    }
    return "?";
}

/// Runs `program` with `aux` on the auxiliary tape for at most `step_budget` steps.
template <PrefixMachine M>
RunOutcome run(const M& machine, const BitString& program, const BitString& aux, std::uint64_t step_budget) {
    if (step_budget == 0) throw InvalidArgument("step budget must be positive");
    auto exec = machine.start(aux);
    RunOutcome out;
    while (true) {
        const Pause p = exec.advance(step_budget);
        if (p == Pause::NeedsInput) {
            if (exec.bits_read() < program.size()) {
                exec.feed(program[exec.bits_read()]);
                continue;
            }
            out.kind = RunOutcome::Kind::RequestedPastEnd;
        } else if (p == Pause::Halted) {
            out.kind = exec.bits_read() == program.size() ? RunOutcome::Kind::Halted : RunOutcome::Kind::Rejected;
        } else if (p == Pause::Rejected) {
            out.kind = RunOutcome::Kind::Rejected;
        } else {
            out.kind = RunOutcome::Kind::OutOfFuel;
        }
        out.bits_read = exec.bits_read();
        out.steps = exec.steps();
        if (out.kind == RunOutcome::Kind::Halted) out.output = exec.output();
        return out;
    }
}

} // namespace kolmo
