// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <ostream>

#include "kolmo/dovetail.hpp"

// Resource-bounded upper-bound estimates of conditional prefix complexity.
//
// Every number produced here is an upper bound on the complexity relative to
// the given machine: the length of the shortest program found among those of
// length <= length_bound that halt within step_bound steps. The estimate can
// only shrink as either bound grows.

namespace kolmo {

/// Shortest program found for x with aux on the auxiliary tape.
struct KEstimate {
    std::uint64_t bits = 0;   // == witness.size()
    BitString witness;        // length-increasing lexicographically first among the shortest
    BitString x;
    BitString aux;
    std::size_t length_bound = 0;
    std::uint64_t step_bound = 0;

    friend bool operator==(const KEstimate&, const KEstimate&) = default;
};

/// x*: the first shortest halting program for x in the fixed enumeration order.
struct StarWitness {
    BitString program;
};

namespace detail {

inline void check_bounds(std::size_t length_bound, std::uint64_t step_bound) {
    if (length_bound < 1 || step_bound < 1) throw InvalidArgument("length and step bounds must be at least 1");
}

} // namespace detail

/// Upper bounds for every output reachable within the bounds, keyed by output.
template <PrefixMachine M>
std::map<BitString, KEstimate, ShortLex> all_estimates(const M& machine, const BitString& aux,
                                                       std::size_t length_bound, std::uint64_t step_bound,
                                                       unsigned threads = 1) {
    detail::check_bounds(length_bound, step_bound);
    const auto halting =
        explore_halting(machine, aux, length_bound, [step_bound](const BitString&) { return step_bound; }, threads);
    std::map<BitString, KEstimate, ShortLex> out;
    // The exploration returns programs in length-increasing lexicographic
    // order, so the first program seen for an output is the witness.
    for (const auto& h : halting) {
        out.try_emplace(h.output, KEstimate{h.program.size(), h.program, h.output, aux, length_bound, step_bound});
    }
    return out;
}

/// Upper bound on the complexity of x given aux; nullopt if no program within the bounds outputs x.
template <PrefixMachine M>
std::optional<KEstimate> approx_k(const M& machine, const BitString& x, const BitString& aux,
                                  std::size_t length_bound, std::uint64_t step_bound, unsigned threads = 1) {
    auto all = all_estimates(machine, aux, length_bound, step_bound, threads);
    const auto it = all.find(x);
    if (it == all.end()) return std::nullopt;
    return it->second;
}

template <PrefixMachine M>
std::optional<StarWitness> star_witness(const M& machine, const BitString& x, std::size_t length_bound,
                                        std::uint64_t step_bound) {
    const auto k = approx_k(machine, x, BitString(), length_bound, step_bound);
    if (!k) return std::nullopt;
    return StarWitness{k->witness};
}

/// One row of the symmetry-of-information report. Missing estimates leave the
/// row incomplete and the residual empty.
struct SoiRow {
    BitString x;
    BitString y;
    std::optional<std::uint64_t> k_pair;          // estimate for <x,y> given ε
    std::optional<std::uint64_t> k_x;             // estimate for x given ε
    std::optional<std::uint64_t> k_y_given_star;  // estimate for y given x*
    std::optional<BitString> x_star;
    std::optional<std::int64_t> residual;         // k_pair - k_x - k_y_given_star

    bool incomplete() const noexcept { return !residual.has_value(); }
};

template <PrefixMachine M>
SoiRow soi_report(const M& machine, const BitString& x, const BitString& y, std::size_t length_bound,
                  std::uint64_t step_bound) {
    detail::check_bounds(length_bound, step_bound);
    SoiRow row{x, y, {}, {}, {}, {}, {}};
    const auto unconditional = all_estimates(machine, BitString(), length_bound, step_bound);
    if (const auto it = unconditional.find(pair_strings(x, y)); it != unconditional.end()) row.k_pair = it->second.bits;
    if (const auto it = unconditional.find(x); it != unconditional.end()) {
        row.k_x = it->second.bits;
        row.x_star = it->second.witness;
        if (const auto k = approx_k(machine, y, it->second.witness, length_bound, step_bound)) {
            row.k_y_given_star = k->bits;
        }
    }
    if (row.k_pair && row.k_x && row.k_y_given_star) {
        row.residual = static_cast<std::int64_t>(*row.k_pair) - static_cast<std::int64_t>(*row.k_x) -
                       static_cast<std::int64_t>(*row.k_y_given_star);
    }
    return row;
}

/// Tab-separated rows; missing values print as "-".
inline void write_soi_tsv(std::ostream& out, const std::vector<SoiRow>& rows) {
    auto cell = [&out](const auto& v) {
        if (v) {
            out << *v;
        } else {
            out << '-';
        }
    };
    out << "x\ty\tk_pair\tk_x\tk_y_given_xstar\tresidual\tstatus\n";
    for (const auto& r : rows) {
        out << r.x.str() << '\t' << r.y.str() << '\t';
        cell(r.k_pair);
        out << '\t';
        cell(r.k_x);
        out << '\t';
        cell(r.k_y_given_star);
        out << '\t';
        cell(r.residual);
        out << '\t' << (r.incomplete() ? "incomplete" : "ok") << '\n';
    }
}

} // namespace kolmo
