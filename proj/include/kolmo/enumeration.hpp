// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "kolmo/machine.hpp"

namespace kolmo {

namespace detail {

// Bitmask over the 18 concrete situations of one state that a record covers.
inline std::uint32_t situation_mask(const Transition& t) {
    std::uint32_t mask = 0;
    for (std::uint8_t reg = 0; reg < 3; ++reg) {
        for (std::uint8_t aux = 0; aux < 3; ++aux) {
            for (std::uint8_t work = 0; work < 2; ++work) {
                if (in_matches(t.in, reg) && aux_matches(t.aux, aux) && work_matches(t.work, work)) {
                    mask |= 1U << (reg * 6U + aux * 2U + work);
                }
            }
        }
    }
    return mask;
}

struct RecordChoice {
    BitString bits;
    Transition transition;
    std::uint32_t mask;
};

inline const std::vector<RecordChoice>& valid_records(std::uint32_t states) {
    static std::mutex mu;
    static std::map<std::uint32_t, std::vector<RecordChoice>> cache;
    const std::lock_guard lock(mu);
    auto [it, inserted] = cache.try_emplace(states);
    if (inserted) {
        const std::uint32_t width = TableMachine::record_width(states);
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << width); ++v) {
            BitString bits;
            for (std::uint32_t i = width; i-- > 0;) bits.push_back(((v >> i) & 1U) != 0);
            if (auto t = TableMachine::decode_record(bits, 0, states)) {
                it->second.push_back({bits, *t, situation_mask(*t)});
            }
        }
    }
    return it->second;
}

} // namespace detail

/// Visits every valid machine description in length-increasing lexicographic
/// order until `visit` returns false.
inline void for_each_machine_description(const std::function<bool(const BitString&, TableMachine&&)>& visit) {
    for (std::size_t n = 1;; ++n) {
        struct Header {
            BitString bits;
            std::uint32_t states;
            std::uint64_t count;
        };
        std::vector<Header> headers;
        for (std::uint32_t q = 1;; ++q) {
            const BitString hq = bar_encode(nat_to_string(q - 1));
            const std::uint64_t rec = TableMachine::record_width(q);
            if (q > 1 && hq.size() + 3 + rec > n) break;
            for (std::uint64_t t = 0;; ++t) {
                const BitString ht = bar_encode(nat_to_string(t));
                const std::uint64_t total = hq.size() + ht.size() + t * rec;
                if (total > n) break;
                if (total == n && (t > 0 || q == 1)) headers.push_back({hq + ht, q, t});
            }
        }
        std::sort(headers.begin(), headers.end(), [](const Header& a, const Header& b) { return a.bits < b.bits; });

        for (const Header& h : headers) {
            const auto& records = detail::valid_records(h.states);
            std::vector<std::uint32_t> occupied(h.states, 0);
            std::vector<const detail::RecordChoice*> chosen;
            bool keep_going = true;
            std::function<void()> dfs = [&]() {
                if (!keep_going) return;
                if (chosen.size() == h.count) {
                    std::vector<Transition> ts;
                    BitString desc = h.bits;
                    for (const auto* c : chosen) {
                        ts.push_back(c->transition);
                        desc += c->bits;
                    }
                    if (!TableMachine::mentions_all_states(h.states, ts)) return;
                    keep_going = visit(desc, TableMachine(h.states, std::move(ts)));
                    return;
                }
                for (const auto& r : records) {
                    if ((occupied[r.transition.state] & r.mask) != 0) continue;
                    occupied[r.transition.state] |= r.mask;
                    chosen.push_back(&r);
                    dfs();
                    chosen.pop_back();
                    occupied[r.transition.state] &= ~r.mask;
                    if (!keep_going) return;
                }
            };
            dfs();
            if (!keep_going) return;
        }
    }
}

/// The standard enumeration T_1, T_2, ... of table machines, cached and thread safe.
class MachineEnumeration {
public:
    static MachineEnumeration& shared() {
        static MachineEnumeration instance;
        return instance;
    }

    /// Description of machine i (i >= 1).
    BitString description(std::uint64_t i) {
        const std::lock_guard lock(mu_);
        ensure(i);
        return entries_[i - 1].description;
    }

    std::shared_ptr<const TableMachine> machine(std::uint64_t i) {
        const std::lock_guard lock(mu_);
        ensure(i);
        return entries_[i - 1].machine;
    }

private:
    struct Entry {
        BitString description;
        std::shared_ptr<const TableMachine> machine;
    };

    void ensure(std::uint64_t i) {
        if (i == 0) throw InvalidArgument("machine indices start at 1");
        if (i <= entries_.size()) return;
        const std::uint64_t target = std::max<std::uint64_t>({i, 2 * entries_.size(), 128});
        std::vector<Entry> fresh;
        for_each_machine_description([&](const BitString& d, TableMachine&& m) {
            fresh.push_back({d, std::make_shared<const TableMachine>(std::move(m))});
            return fresh.size() < target;
        });
        entries_ = std::move(fresh);
    }

    std::mutex mu_;
    std::vector<Entry> entries_;
};

/// Machine i of the standard enumeration (i >= 1).
inline std::shared_ptr<const TableMachine> enumerate_machines(std::uint64_t i) {
    return MachineEnumeration::shared().machine(i);
}

} // namespace kolmo
