// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "kolmo/bitstring.hpp"
#include "kolmo/dyadic.hpp"

// Self-delimiting codes and pairings. Lengths are stated exactly: where the
// usual asymptotic form says "log n" the code uses |nat_to_string(n)|.

namespace kolmo {

/// 0 -> ε, 1 -> 0, 2 -> 1, 3 -> 00, 4 -> 01, ...  (n+1 in binary without its leading 1).
inline BitString nat_to_string(std::uint64_t n) {
    if (n == std::numeric_limits<std::uint64_t>::max()) {
        // n + 1 = 2^64: sixty-four zeros.
        return BitString::repeat(false, 64);
    }
    const std::uint64_t v = n + 1;
    const int width = 63 - std::countl_zero(v);
    BitString out;
    for (int i = width - 1; i >= 0; --i) out.push_back(((v >> i) & 1U) != 0);
    return out;
}

inline std::uint64_t string_to_nat(const BitString& s) {
    if (s.size() > 64 || (s.size() == 64 && s.str().find('1') != std::string::npos)) {
        throw InvalidArgument("string too long for a 64-bit natural");
    }
    if (s.size() == 64) return std::numeric_limits<std::uint64_t>::max();
    std::uint64_t v = 1;
    for (std::size_t i = 0; i < s.size(); ++i) v = (v << 1) | (s[i] ? 1U : 0U);
    return v - 1;
}

/// One-pass reader over a bit stream; it never backs up.
class BitReader {
public:
    explicit BitReader(const BitString& stream, std::size_t pos = 0) : stream_(&stream), pos_(pos) {}

    bool at_end() const noexcept { return pos_ >= stream_->size(); }
    std::size_t position() const noexcept { return pos_; }

    bool read() {
        if (at_end()) throw MalformedStream("bit stream ended inside a codeword");
        return (*stream_)[pos_++];
    }

    BitString read_word(std::size_t n) {
        if (stream_->size() - std::min(pos_, stream_->size()) < n) {
            throw MalformedStream("bit stream ended inside a codeword");
        }
        BitString w = stream_->suffix_from(pos_).prefix(n);
        pos_ += n;
        return w;
    }

private:
    const BitString* stream_;
    std::size_t pos_;
};

/// x̄ = 1^{|x|} 0 x.
inline BitString bar_encode(const BitString& x) {
    return BitString::repeat(true, x.size()) + BitString::parse("0") + x;
}

inline BitString bar_decode(BitReader& in) {
    std::size_t n = 0;
    while (in.read()) ++n;
    return in.read_word(n);
}

/// Decodes one x̄ from the front of `stream`; returns the word and the bits consumed.
inline std::pair<BitString, std::size_t> bar_decode(const BitString& stream) {
    BitReader in(stream);
    BitString x = bar_decode(in);
    return {std::move(x), in.position()};
}

/// x' = bar(nat_to_string(|x|)) x, of length |x| + 2|nat_to_string(|x|)| + 1.
inline BitString std_encode(const BitString& x) { return bar_encode(nat_to_string(x.size())) + x; }

inline BitString std_decode(BitReader& in) {
    const std::uint64_t n = string_to_nat(bar_decode(in));
    return in.read_word(n);
}

inline std::pair<BitString, std::size_t> std_decode(const BitString& stream) {
    BitReader in(stream);
    BitString x = std_decode(in);
    return {std::move(x), in.position()};
}

/// <x, y> = x' y.
inline BitString pair_strings(const BitString& x, const BitString& y) { return std_encode(x) + y; }

inline std::pair<BitString, BitString> unpair_strings(const BitString& z) {
    BitReader in(z);
    BitString x = std_decode(in);
    return {std::move(x), z.suffix_from(in.position())};
}

/// <x, <y, z>>.
inline BitString pair_strings(const BitString& x, const BitString& y, const BitString& z) {
    return pair_strings(x, pair_strings(y, z));
}

/// (i + j)(i + j + 1)/2 + j.
inline std::uint64_t cantor_pair(std::uint64_t i, std::uint64_t j) {
    const unsigned __int128 s = static_cast<unsigned __int128>(i) + j;
    const unsigned __int128 v = s * (s + 1) / 2 + j;
    if (v > std::numeric_limits<std::uint64_t>::max()) throw InvalidArgument("cantor_pair overflow");
    return static_cast<std::uint64_t>(v);
}

inline std::pair<std::uint64_t, std::uint64_t> cantor_unpair(std::uint64_t z) {
    auto tri = [](unsigned __int128 w) { return w * (w + 1) / 2; };
    auto w = static_cast<unsigned __int128>(std::floor((std::sqrt(8.0L * z + 1) - 1) / 2));
    while (tri(w) > z) --w;
    while (tri(w + 1) <= z) ++w;
    const auto j = static_cast<std::uint64_t>(z - tri(w));
    return {static_cast<std::uint64_t>(w) - j, j};
}

/// True iff no word is a proper prefix of another (duplicates count once).
inline bool is_prefix_free(std::span<const BitString> words) {
    std::vector<BitString> sorted(words.begin(), words.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    // In lexicographic order every word sharing a prefix w directly follows w.
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        if (sorted[i].is_proper_prefix_of(sorted[i + 1])) return false;
    }
    return true;
}

inline Dyadic kraft_sum(std::span<const BitString> words) {
    Dyadic sum;
    for (const auto& w : words) sum += Dyadic::inverse_pow2(w.size());
    return sum;
}

} // namespace kolmo
