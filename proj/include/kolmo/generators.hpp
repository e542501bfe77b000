// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "kolmo/quotient_demo.hpp"
#include "kolmo/semimeasures.hpp"

// Seeded random instances for the property checks in selftest and the
// acceptance run. Only raw mt19937_64 output is used (the std distributions
// are implementation-defined), so a seed gives the same instance everywhere.

namespace kolmo::gen {

using Rng = std::mt19937_64;

inline std::uint64_t below(Rng& rng, std::uint64_t n) { return rng() % n; }

/// Up to max_size masses, each at least 2^{-min_exp_cap}, summing to at most 1.
/// Symbols are nat_to_string(0), nat_to_string(1), ...
inline std::vector<std::pair<BitString, Dyadic>> mass_list(Rng& rng, std::size_t max_size,
                                                           std::uint64_t min_exp_cap = 12) {
    const std::size_t n = 1 + below(rng, max_size);
    std::vector<std::pair<BitString, Dyadic>> out;
    Dyadic left(1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t e = 1 + below(rng, min_exp_cap);
        // numerator in [1, 2^{e-1}], so the mass lies in [2^{-e}, 1/2]
        const std::uint64_t top = std::uint64_t{1} << (e - 1);
        const Dyadic p(BigInt(1 + below(rng, top)), e);
        if (p > left) continue;
        left -= p;
        out.emplace_back(nat_to_string(out.size()), p);
    }
    if (out.empty()) out.emplace_back(BitString(), Dyadic::inverse_pow2(min_exp_cap));
    return out;
}

/// Monotone staircase over x, y <= size: each (x, y) climbs through a few dyadic
/// values at random stages. Column sums are unconstrained.
inline TableApproximator staircase(Rng& rng, std::uint64_t size, std::uint64_t max_k) {
    TableApproximator t;
    for (std::uint64_t x = 1; x <= size; ++x) {
        for (std::uint64_t y = 1; y <= size; ++y) {
            if (below(rng, 3) == 0) continue;
            Dyadic v;
            std::uint64_t k = 1 + below(rng, max_k);
            const std::uint64_t steps = 1 + below(rng, 3);
            for (std::uint64_t s = 0; s < steps && k <= max_k; ++s) {
                v += Dyadic(BigInt(1 + below(rng, 4)), 3 + below(rng, 4));
                t.set(x, y, k, v);
                k += 1 + below(rng, 4);
            }
        }
    }
    return t;
}

/// A lower-semicomputable approximation of a conditional semimeasure in the
/// column y_index: `symbols` nonempty words (rows 2, 3, ...) each climb to a
/// final value; the final column sums to at most 1.
inline TableApproximator code_mixture(Rng& rng, std::size_t symbols, std::uint64_t y_index, std::uint64_t max_t) {
    TableApproximator t;
    Dyadic budget(1);
    for (std::size_t s = 0; s < symbols; ++s) {
        const std::uint64_t x = s + 2;
        Dyadic target(BigInt(1 + below(rng, 7)), 3 + below(rng, 6));
        if (target > budget) target = budget;
        if (target.is_zero()) break;
        budget -= target;
        const std::uint64_t steps = 1 + below(rng, 4);
        std::uint64_t k = 1 + below(rng, 4);
        Dyadic v;
        for (std::uint64_t i = 1; i <= steps && k <= max_t; ++i) {
            // climb by a random dyadic share of what is left, ending at the target
            if (i == steps) {
                v = target;
            } else {
                v += (target - v).scaled(-static_cast<std::int64_t>(1 + below(rng, 3)));
            }
            if (!v.is_zero()) t.set(x, y_index, k, v);
            k += 1 + below(rng, 5);
        }
    }
    return t;
}

/// Up to max_components normalized staircases over size x size with bar-code
/// weights, each possibly doubled once, skipping draws whose weights exceed 1.
inline MixtureSpec mixture_spec(Rng& rng, std::size_t max_components, std::uint64_t size, std::uint64_t max_k) {
    while (true) {
        MixtureSpec spec;
        const std::size_t n = 1 + below(rng, max_components);
        const auto weights = bar_weight_exponents(n);
        for (std::size_t j = 0; j < n; ++j) {
            spec.components.push_back(
                {weights[j] - below(rng, 2), staircase(rng, size, max_k).approximator("s" + std::to_string(j)),
                 "s" + std::to_string(j)});
        }
        if (below(rng, 4) == 0) spec.mode = FreezeMode::PerColumn;
        if (spec.weight_sum() <= Dyadic(1)) return spec;
    }
}

inline JointTable joint_table(Rng& rng, std::size_t xs, std::size_t ys) {
    JointTable j;
    Dyadic left(1);
    for (std::size_t a = 0; a < xs; ++a) {
        for (std::size_t b = 0; b < ys; ++b) {
            if (below(rng, 3) == 0) continue;
            const Dyadic v(BigInt(1 + below(rng, 15)), 4 + below(rng, 5));
            if (v > left) continue;
            left -= v;
            j.entries[{nat_to_string(a), nat_to_string(b)}] = v;
        }
    }
    return j;
}

/// sum_j 2^{-j} Q_j over up to four random joint tables on at most 5 x 4 pairs.
inline JointMixture joint_mixture(Rng& rng) {
    JointMixture mix;
    const std::size_t parts = 1 + below(rng, 4);
    for (std::size_t c = 0; c < parts; ++c) {
        mix.components.emplace_back(Dyadic::inverse_pow2(c + 1), joint_table(rng, 1 + below(rng, 5), 1 + below(rng, 4)));
    }
    return mix;
}

} // namespace kolmo::gen
