// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "kolmo/complexity.hpp"

namespace kolmo {

/// Lower approximation of the a priori probability Q(x|aux) of one machine:
/// the total mass 2^{-|p|} of programs that halted with output x within the
/// dovetailed run up to `stage`, counting only programs of length <= length_bound.
struct AprioriTable {
    std::string machine_id;
    BitString aux;
    std::map<BitString, Dyadic, ShortLex> entries;  // only positive values are stored
    std::uint64_t stage = 0;
    std::size_t length_bound = 0;

    Dyadic at(const BitString& x) const {
        const auto it = entries.find(x);
        return it == entries.end() ? Dyadic() : it->second;
    }

    Dyadic total() const {
        Dyadic sum;
        for (const auto& [x, q] : entries) sum += q;
        return sum;
    }

    friend bool operator==(const AprioriTable&, const AprioriTable&) = default;
};

/// Smallest dovetail stage at which every program of length <= length_bound
/// that halts within step_bound steps has been reported.
inline std::uint64_t stage_covering(std::size_t length_bound, std::uint64_t step_bound) {
    if (length_bound > 62) throw InvalidArgument("length bound too large for a stage count");
    return (std::uint64_t{1} << (length_bound + 1)) - 1 + step_bound;
}

namespace detail {

inline void add_events(AprioriTable& table, const std::vector<HaltEvent>& events) {
    for (const auto& e : events) table.entries[e.output] += Dyadic::inverse_pow2(e.program.size());
}

} // namespace detail

template <PrefixMachine M>
AprioriTable approx_apriori(const M& machine, const BitString& aux, std::uint64_t max_stage, std::size_t length_bound,
                            std::string machine_id = {}, unsigned threads = 1) {
    if (max_stage < 1 || length_bound < 1) throw InvalidArgument("stage and length bounds must be at least 1");
    AprioriTable table{std::move(machine_id), aux, {}, max_stage, length_bound};
    DovetailOptions opts;
    opts.length_bound = length_bound;
    opts.threads = threads;
    detail::add_events(table, dovetail(machine, aux, max_stage, opts));
    return table;
}

/// Continues a table (for instance one loaded from disk) to larger bounds.
/// Events already counted under the old bounds are skipped, so the result
/// equals a fresh computation at the new bounds.
template <PrefixMachine M>
AprioriTable extend_apriori(const AprioriTable& table, const M& machine, const std::string& machine_id,
                            std::uint64_t max_stage, std::size_t length_bound, unsigned threads = 1) {
    if (machine_id != table.machine_id) {
        throw ProvenanceMismatch("table was built for machine '" + table.machine_id + "', not '" + machine_id + "'");
    }
    if (max_stage < table.stage || length_bound < table.length_bound) {
        throw InvalidArgument("bounds can only be extended");
    }
    DovetailOptions opts;
    opts.length_bound = length_bound;
    opts.threads = threads;
    AprioriTable out = table;
    out.stage = max_stage;
    out.length_bound = length_bound;
    for (const auto& e : dovetail(machine, table.aux, max_stage, opts)) {
        if (e.stage <= table.stage && e.program.size() <= table.length_bound) continue;
        out.entries[e.output] += Dyadic::inverse_pow2(e.program.size());
    }
    return out;
}

/// A halting event of the merged run over several conditions.
struct MergedEvent {
    std::uint64_t time = 0;  // cantor_pair(stage, aux_index)
    std::size_t aux_index = 0;
    HaltEvent event;
};

/// Largest stage k of condition number a that the merged run reaches by time max_time.
inline std::uint64_t merged_stage_reached(std::uint64_t max_time, std::uint64_t a) {
    std::uint64_t reached = 0;
    while (cantor_pair(reached + 1, a) <= max_time) ++reached;
    return reached;
}

/// One dovetailed run over (stage, condition) pairs: merged time t executes
/// stage k of the run for condition number a, where t = cantor_pair(k, a).
/// Events come out ordered by merged time, then by condition.
template <PrefixMachine M>
std::vector<MergedEvent> merged_dovetail(const M& machine, const std::vector<BitString>& auxes,
                                         std::uint64_t max_time, std::size_t length_bound) {
    std::vector<MergedEvent> out;
    for (std::size_t a = 0; a < auxes.size(); ++a) {
        const std::uint64_t reached = merged_stage_reached(max_time, a);
        if (reached == 0) continue;
        DovetailOptions opts;
        opts.length_bound = length_bound;
        for (auto& e : dovetail(machine, auxes[a], reached, opts)) {
            const std::uint64_t t = cantor_pair(e.stage, a);
            out.push_back({t, a, std::move(e)});
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const MergedEvent& l, const MergedEvent& r) {
        return l.time != r.time ? l.time < r.time : l.aux_index < r.aux_index;
    });
    return out;
}

/// Tables for several conditions accumulated from one merged run. Table a
/// equals approx_apriori at stage merged_stage_reached(max_time, a).
template <PrefixMachine M>
std::vector<AprioriTable> approx_apriori_merged(const M& machine, const std::vector<BitString>& auxes,
                                                std::uint64_t max_time, std::size_t length_bound,
                                                const std::string& machine_id = {}) {
    std::vector<AprioriTable> out;
    for (std::size_t a = 0; a < auxes.size(); ++a) {
        out.push_back(AprioriTable{machine_id, auxes[a], {}, merged_stage_reached(max_time, a), length_bound});
    }
    for (const auto& m : merged_dovetail(machine, auxes, max_time, length_bound)) {
        out[m.aux_index].entries[m.event.output] += Dyadic::inverse_pow2(m.event.program.size());
    }
    return out;
}

/// One row of the comparison between the a priori table and complexity estimates.
struct AprioriKRow {
    BitString x;
    Dyadic q;
    std::uint64_t k_bits = 0;
    bool holds = false;         // 2^{-k} <= q
    std::int64_t log_gap = 0;   // floor(log2(q * 2^k)); 0 when the bound is tight within a factor of 2
};

/// Checks 2^{-K} <= Q for every x present in both. The estimates must share
/// the table's aux and be covered by its bounds, or the comparison means nothing.
inline std::vector<AprioriKRow> apriori_vs_k(const AprioriTable& table, const std::vector<KEstimate>& estimates) {
    std::vector<AprioriKRow> rows;
    for (const auto& est : estimates) {
        if (est.aux != table.aux) throw ProvenanceMismatch("estimate aux differs from table aux");
        if (est.length_bound > table.length_bound ||
            stage_covering(est.length_bound, est.step_bound) > table.stage) {
            throw ProvenanceMismatch("estimate bounds are not covered by the table");
        }
        const auto it = table.entries.find(est.x);
        if (it == table.entries.end()) continue;
        const Dyadic floor_mass = Dyadic::inverse_pow2(est.bits);
        rows.push_back({est.x, it->second, est.bits, floor_mass <= it->second,
                        it->second.scaled(static_cast<std::int64_t>(est.bits)).floor_log2()});
    }
    return rows;
}

inline void write_table(std::ostream& out, const AprioriTable& table) {
    out << "# machine " << table.machine_id << '\n'
        << "# aux " << table.aux.str() << '\n'
        << "# stage " << table.stage << '\n'
        << "# length_bound " << table.length_bound << '\n';
    for (const auto& [x, q] : table.entries) out << x.str() << '\t' << q.to_string() << '\n';
}

inline AprioriTable read_table(std::istream& in) {
    AprioriTable table;
    std::string line;
    auto header_value = [&](const std::string& key) -> std::string {
        const std::string tag = "# " + key;
        if (!std::getline(in, line) || line.rfind(tag, 0) != 0) throw ParseError("missing table header '" + key + "'");
        return line.size() > tag.size() ? line.substr(tag.size() + 1) : std::string();
    };
    try {
        table.machine_id = header_value("machine");
        table.aux = BitString::parse(header_value("aux"));
        table.stage = std::stoull(header_value("stage"));
        table.length_bound = std::stoull(header_value("length_bound"));
    } catch (const std::logic_error&) {
        throw ParseError("bad numeric table header");
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw ParseError("table line without a tab: " + line);
        const Dyadic q = Dyadic::parse(line.substr(tab + 1));
        if (q.is_zero()) throw ParseError("table entries must be positive: " + line);
        if (!table.entries.emplace(BitString::parse(line.substr(0, tab)), q).second) {
            throw ParseError("duplicate table entry: " + line);
        }
    }
    if (table.total() > Dyadic(1)) throw ParseError("table mass exceeds 1");
    return table;
}

} // namespace kolmo
