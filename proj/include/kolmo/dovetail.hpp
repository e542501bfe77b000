// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <atomic>
#include <functional>
#include <optional>
#include <thread>
#include <vector>

#include "kolmo/machine.hpp"

namespace kolmo {

/// A program that halted after reading exactly itself.
struct HaltingProgram {
    BitString program;
    BitString output;
    std::uint64_t steps = 0;

    friend bool operator==(const HaltingProgram&, const HaltingProgram&) = default;
};

/// Position of a program in length-increasing lexicographic order, starting at 1 for ε.
inline std::uint64_t program_index(const BitString& p) { return string_to_nat(p) + 1; }

namespace detail {

template <PrefixMachine M, class Limit>
void explore_from(typename M::Execution exec, BitString prefix, std::size_t max_len, const Limit& limit_of,
                  std::vector<HaltingProgram>& out) {
    const std::uint64_t limit = limit_of(prefix);
    switch (exec.advance(limit)) {
        case Pause::Halted:
            out.push_back({prefix, exec.output(), exec.steps()});
            return;
        case Pause::NeedsInput: {
            // Extensions get no more fuel than this prefix, and they need at least one more step.
            if (prefix.size() >= max_len || exec.steps() >= limit) return;
            auto zero = exec;
            zero.feed(false);
            prefix.push_back(false);
            explore_from<M>(std::move(zero), prefix, max_len, limit_of, out);
            prefix.pop_back();
            exec.feed(true);
            prefix.push_back(true);
            explore_from<M>(std::move(exec), std::move(prefix), max_len, limit_of, out);
            return;
        }
        case Pause::OutOfFuel:
        case Pause::Rejected:
            return;
    }
}

} // namespace detail

/// Finds every program p with |p| <= max_len that halts on `machine` with `aux`
/// within limit_of(p) steps, after reading exactly p.
///
/// Programs sharing a prefix share the computation up to the point where they
/// differ, so the work is proportional to the input-reading tree rather than
/// to the number of programs. `limit_of` must not increase along extensions.
/// The result is in length-increasing lexicographic order for any thread count.
template <PrefixMachine M, class Limit>
std::vector<HaltingProgram> explore_halting(const M& machine, const BitString& aux, std::size_t max_len,
                                            const Limit& limit_of, unsigned threads = 1) {
    std::vector<HaltingProgram> out;
    if (threads <= 1) {
        detail::explore_from<M>(machine.start(aux), BitString(), max_len, limit_of, out);
    } else {
        // Expand breadth first until there is enough independent work.
        struct Node {
            typename M::Execution exec;
            BitString prefix;
        };
        std::vector<Node> frontier;
        frontier.push_back({machine.start(aux), BitString()});
        const std::size_t want = static_cast<std::size_t>(threads) * 8;
        while (frontier.size() < want) {
            std::vector<Node> next;
            bool expanded = false;
            for (auto& node : frontier) {
                const std::uint64_t limit = limit_of(node.prefix);
                const Pause p = node.exec.advance(limit);
                if (p == Pause::Halted) {
                    out.push_back({node.prefix, node.exec.output(), node.exec.steps()});
                } else if (p == Pause::NeedsInput && node.prefix.size() < max_len && node.exec.steps() < limit) {
                    for (bool bit : {false, true}) {
                        Node child{node.exec, node.prefix};
                        child.exec.feed(bit);
                        child.prefix.push_back(bit);
                        next.push_back(std::move(child));
                    }
                    expanded = true;
                }
            }
            frontier = std::move(next);
            if (!expanded) break;
        }
        std::vector<std::vector<HaltingProgram>> parts(frontier.size());
        std::atomic<std::size_t> cursor{0};
        auto worker = [&]() {
            for (std::size_t k = cursor++; k < frontier.size(); k = cursor++) {
                detail::explore_from<M>(frontier[k].exec, frontier[k].prefix, max_len, limit_of, parts[k]);
            }
        };
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
        for (auto& part : parts) out.insert(out.end(), part.begin(), part.end());
    }
    std::sort(out.begin(), out.end(),
              [](const HaltingProgram& a, const HaltingProgram& b) { return ShortLex{}(a.program, b.program); });
    return out;
}

/// Emitted when a program halts during the dovetailed run.
struct HaltEvent {
    BitString program;
    BitString output;
    std::uint64_t stage = 0;
    std::uint64_t program_index = 0;
    std::uint64_t steps = 0;
    std::uint64_t machine_index = 0;  // 0 when the machine is not from the enumeration

    friend bool operator==(const HaltEvent&, const HaltEvent&) = default;
};

struct DovetailOptions {
    std::optional<std::size_t> length_bound;  // ignore programs longer than this
    unsigned threads = 1;
    std::uint64_t machine_index = 0;
};

/// Dovetailed run of all programs: at stage k, program j (j = 1, 2, ... in
/// length-increasing lexicographic order, j = 1 being ε) executes its
/// (k - j)-th step, for every j < k. Events are ordered by stage, then by j.
///
/// A program that halts at its s-th step is reported at stage j + s, so the
/// stream is computed from the shared-prefix exploration and is identical to
/// the literal round-robin schedule (dovetail_round_robin).
template <PrefixMachine M>
std::vector<HaltEvent> dovetail(const M& machine, const BitString& aux, std::uint64_t max_stage,
                                const DovetailOptions& opts = {}) {
    if (max_stage == 0) throw InvalidArgument("max_stage must be at least 1");
    // Program j only runs if j < max_stage; indices of length-n programs start at 2^n.
    std::size_t max_len = 0;
    while (max_len < 63 && (std::uint64_t{1} << (max_len + 1)) < max_stage) ++max_len;
    if (opts.length_bound) max_len = std::min(max_len, *opts.length_bound);
    auto limit_of = [max_stage](const BitString& p) {
        const std::uint64_t j = program_index(p);
        return j < max_stage ? max_stage - j : 0;
    };
    const auto halting = explore_halting(machine, aux, max_len, limit_of, opts.threads);
    std::vector<HaltEvent> events;
    events.reserve(halting.size());
    for (const auto& h : halting) {
        const std::uint64_t j = program_index(h.program);
        events.push_back({h.program, h.output, j + h.steps, j, h.steps, opts.machine_index});
    }
    std::sort(events.begin(), events.end(), [](const HaltEvent& a, const HaltEvent& b) {
        return a.stage != b.stage ? a.stage < b.stage : a.program_index < b.program_index;
    });
    return events;
}

/// The schedule executed literally, one step per active program per stage.
/// Quadratic in max_stage; kept as the reference the fast path is checked against.
template <PrefixMachine M>
std::vector<HaltEvent> dovetail_round_robin(const M& machine, const BitString& aux, std::uint64_t max_stage,
                                            std::optional<std::size_t> length_bound = std::nullopt) {
    if (max_stage == 0) throw InvalidArgument("max_stage must be at least 1");
    struct Active {
        BitString program;
        typename M::Execution exec;
        bool done = false;
    };
    std::vector<Active> active;
    std::vector<HaltEvent> events;
    for (std::uint64_t k = 2; k <= max_stage; ++k) {
        active.push_back({nat_to_string(k - 2), machine.start(aux)});
        for (std::uint64_t j = 1; j < k; ++j) {
            Active& a = active[j - 1];
            if (a.done) continue;
            if (length_bound && a.program.size() > *length_bound) {
                a.done = true;
                continue;
            }
            const std::uint64_t target = k - j;  // this stage runs step number k - j
            while (true) {
                const Pause p = a.exec.advance(target);
                if (p == Pause::NeedsInput) {
                    if (a.exec.bits_read() < a.program.size()) {
                        a.exec.feed(a.program[a.exec.bits_read()]);
                        continue;
                    }
                    a.done = true;
                } else if (p == Pause::Halted) {
                    a.done = true;
                    if (a.exec.bits_read() == a.program.size()) {
                        events.push_back({a.program, a.exec.output(), k, j, a.exec.steps(), 0});
                    }
                } else if (p == Pause::Rejected) {
                    a.done = true;
                }
                break;
            }
        }
    }
    return events;
}

} // namespace kolmo
