// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kolmo/apriori.hpp"
#include "kolmo/complexity.hpp"

// Classical quotient conditionals: P(x|B) = P(x)/P(B) and
// P(x|y) = P(x,y) / sum_z P(z,y). Quotients of dyadics are not dyadic in
// general, so results here are carried as a pair of Dyadics.

namespace kolmo {

/// Exact nonnegative rational num/den with den > 0.
class Ratio {
public:
    Ratio() : den_(1) {}
    Ratio(Dyadic num, Dyadic den) : num_(std::move(num)), den_(std::move(den)) {
        if (den_.is_zero()) throw UndefinedConditional("ratio with zero denominator");
    }

    const Dyadic& numerator() const noexcept { return num_; }
    const Dyadic& denominator() const noexcept { return den_; }
    bool is_zero() const noexcept { return num_.is_zero(); }

    /// Integer numerator and denominator in lowest terms.
    std::pair<BigInt, BigInt> reduced() const {
        // a/2^e / (b/2^f) = a 2^f / (b 2^e)
        BigInt p = num_.numerator() << static_cast<unsigned>(den_.exponent());
        BigInt q = den_.numerator() << static_cast<unsigned>(num_.exponent());
        if (p.is_zero()) return {BigInt(0), BigInt(1)};
        const BigInt g = boost::multiprecision::gcd(p, q);
        return {p / g, q / g};
    }

    /// "p/q" in lowest terms; integers keep the "/1".
    std::string str() const {
        const auto [p, q] = reduced();
        return p.str() + "/" + q.str();
    }

    /// Smallest integer k with 2^{-k} <= value, i.e. ceil(log2(1/value)); value must be positive.
    std::int64_t ceil_log2_inverse() const {
        if (is_zero()) throw InvalidArgument("log of zero ratio");
        const auto [p, q] = reduced();
        auto fits = [&](std::int64_t k) {  // 2^{-k} <= p/q  <=>  q <= p 2^k
            if (k >= 0) return q <= (p << static_cast<unsigned>(k));
            return (q << static_cast<unsigned>(-k)) <= p;
        };
        std::int64_t k = static_cast<std::int64_t>(boost::multiprecision::msb(q)) -
                         static_cast<std::int64_t>(boost::multiprecision::msb(p));
        while (!fits(k)) ++k;
        while (fits(k - 1)) --k;
        return k;
    }

    friend bool operator==(const Ratio& a, const Ratio& b) { return a.num_ * b.den_ == b.num_ * a.den_; }
    friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
        return a.num_ * b.den_ <=> b.num_ * a.den_;
    }

    friend Ratio operator+(const Ratio& a, const Ratio& b) {
        return Ratio(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }

private:
    Dyadic num_;
    Dyadic den_;
};

/// A finite event B over the first `range` words nat_to_string(0), ...,
/// nat_to_string(range - 1), together with its characteristic string.
class ConditioningSet {
public:
    ConditioningSet(std::set<BitString, ShortLex> members, std::uint64_t range)
        : members_(std::move(members)), range_(range) {
        for (const auto& x : members_) {
            if (string_to_nat(x) >= range_) {
                throw InvalidArgument("member '" + x.str() + "' lies outside the index range");
            }
        }
    }

    /// The first `size` words of the index range.
    static ConditioningSet first(std::uint64_t size, std::uint64_t range) {
        std::set<BitString, ShortLex> m;
        for (std::uint64_t i = 0; i < size; ++i) m.insert(nat_to_string(i));
        return ConditioningSet(std::move(m), range);
    }

    const std::set<BitString, ShortLex>& members() const noexcept { return members_; }
    std::uint64_t range() const noexcept { return range_; }
    bool contains(const BitString& x) const { return members_.contains(x); }

    /// Bit i is 1 iff nat_to_string(i) is a member.
    BitString characteristic() const {
        std::string s(range_, '0');
        for (const auto& x : members_) s[string_to_nat(x)] = '1';
        return BitString::parse(s);
    }

    std::vector<BitString> universe() const {
        std::vector<BitString> out;
        for (std::uint64_t i = 0; i < range_; ++i) out.push_back(nat_to_string(i));
        return out;
    }

private:
    std::set<BitString, ShortLex> members_;
    std::uint64_t range_;
};

using Distribution = std::map<BitString, Dyadic, ShortLex>;

/// P(x|B) for every x in the support of p and every member of B.
inline std::map<BitString, Ratio, ShortLex> conditional_on_set(const Distribution& p, const ConditioningSet& b) {
    Dyadic total;
    Dyadic in_b;
    for (const auto& [x, v] : p) {
        total += v;
        if (b.contains(x)) in_b += v;
    }
    if (total > Dyadic(1)) throw InvalidArgument("mass function sums to more than 1");
    if (in_b.is_zero()) throw UndefinedConditional("P(B) = 0");
    std::map<BitString, Ratio, ShortLex> out;
    for (const auto& [x, v] : p) out.emplace(x, Ratio(b.contains(x) ? v : Dyadic(), in_b));
    for (const auto& x : b.members()) out.try_emplace(x, Ratio(Dyadic(), in_b));
    return out;
}

/// A joint semimeasure on pairs (x, y).
struct JointTable {
    std::map<std::pair<BitString, BitString>, Dyadic> entries;

    Dyadic at(const BitString& x, const BitString& y) const {
        const auto it = entries.find({x, y});
        return it == entries.end() ? Dyadic() : it->second;
    }

    Dyadic total() const {
        Dyadic s;
        for (const auto& [k, v] : entries) s += v;
        return s;
    }

    /// sum_z P(z, y)
    Dyadic marginal(const BitString& y) const {
        Dyadic s;
        for (const auto& [k, v] : entries) {
            if (k.second == y) s += v;
        }
        return s;
    }

    void check() const {
        if (total() > Dyadic(1)) throw InvalidArgument("joint table sums to more than 1");
    }
};

/// P(x, y) / sum_z P(z, y).
inline Ratio quotient_conditional(const JointTable& j, const BitString& x, const BitString& y) {
    const Dyadic m = j.marginal(y);
    if (m.is_zero()) throw UndefinedConditional("zero marginal for y = '" + y.str() + "'");
    return Ratio(j.at(x, y), m);
}

/// A weighted sum of joint tables, sum_j alpha_j Q_j.
struct JointMixture {
    std::vector<std::pair<Dyadic, JointTable>> components;

    JointTable summed() const {
        JointTable out;
        for (const auto& [w, q] : components) {
            for (const auto& [k, v] : q.entries) out.entries[k] += w * v;
        }
        return out;
    }
};

/// (sum_j alpha_j Q_j(x,y)) / (sum_j alpha_j sum_z Q_j(z,y)), evaluated
/// component by component without forming the summed table.
inline Ratio quotient_by_components(const JointMixture& mix, const BitString& x, const BitString& y) {
    Dyadic num;
    Dyadic den;
    for (const auto& [w, q] : mix.components) {
        num += w * q.at(x, y);
        den += w * q.marginal(y);
    }
    if (den.is_zero()) throw UndefinedConditional("zero marginal for y = '" + y.str() + "'");
    return Ratio(num, den);
}

/// One row of the single-argument report: x against one event B.
struct SingleGapRow {
    BitString chi;
    BitString x;
    bool in_b = false;
    Dyadic m_x;
    Dyadic m_b;                             // sum of m_x over B
    std::optional<Ratio> conditional;       // absent when m_b = 0
    std::optional<std::int64_t> neg_log;    // ceil(-log2 conditional); absent means infinity
    std::optional<std::uint64_t> k_x;
    std::optional<std::uint64_t> k_chi;
    std::optional<std::uint64_t> k_x_given_chi;

    bool incomplete() const {
        return !conditional || !k_x || !k_chi || !k_x_given_chi || (in_b && m_x.is_zero());
    }
};

struct SingleGapReport {
    std::string machine_id;
    std::size_t length_bound = 0;
    std::uint64_t step_bound = 0;
    std::uint64_t stage = 0;
    std::vector<SingleGapRow> rows;
};

namespace detail {

inline std::optional<std::uint64_t> bits_of(const std::map<BitString, KEstimate, ShortLex>& ests,
                                            const BitString& x) {
    const auto it = ests.find(x);
    if (it == ests.end()) return std::nullopt;
    return it->second.bits;
}

} // namespace detail

/// For each event B, compares -log2(m(x)/m(B)) with K(x|chi_B) on every word of
/// B's index range. m is the a priori table with empty aux at the stage covering
/// the bounds; complexities are upper-bound estimates within the same bounds.
template <PrefixMachine M>
SingleGapReport single_gap_report(const M& machine, const std::string& machine_id,
                                  const std::vector<ConditioningSet>& family, std::size_t length_bound,
                                  std::uint64_t step_bound) {
    detail::check_bounds(length_bound, step_bound);
    SingleGapReport report{machine_id, length_bound, step_bound, stage_covering(length_bound, step_bound), {}};
    const auto table = approx_apriori(machine, BitString(), report.stage, length_bound, machine_id);
    const auto k_plain = all_estimates(machine, BitString(), length_bound, step_bound);
    for (const auto& b : family) {
        const BitString chi = b.characteristic();
        const auto k_given = all_estimates(machine, chi, length_bound, step_bound);
        Dyadic m_b;
        for (const auto& x : b.members()) m_b += table.at(x);
        for (const auto& x : b.universe()) {
            SingleGapRow row;
            row.chi = chi;
            row.x = x;
            row.in_b = b.contains(x);
            row.m_x = table.at(x);
            row.m_b = m_b;
            if (!m_b.is_zero()) {
                row.conditional = Ratio(row.in_b ? row.m_x : Dyadic(), m_b);
                if (!row.conditional->is_zero()) row.neg_log = row.conditional->ceil_log2_inverse();
            }
            row.k_x = detail::bits_of(k_plain, x);
            row.k_chi = detail::bits_of(k_plain, chi);
            row.k_x_given_chi = detail::bits_of(k_given, x);
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

namespace detail {

template <class T>
std::string or_dash(const std::optional<T>& v) {
    if (!v) return "-";
    if constexpr (std::is_same_v<T, Ratio>) {
        return v->str();
    } else {
        return std::to_string(*v);
    }
}

} // namespace detail

inline void write_single_gap_tsv(std::ostream& out, const SingleGapReport& r) {
    out << "# machine " << r.machine_id << "\n# length_bound " << r.length_bound << "\n# step_bound "
        << r.step_bound << "\n# stage " << r.stage << '\n';
    out << "chi\tx\tin_b\tm_x\tm_b\tconditional\tneg_log\tk_x\tk_chi\tk_x_minus_k_chi\tk_x_given_chi\tstatus\n";
    for (const auto& row : r.rows) {
        std::string diff = "-";
        if (row.k_x && row.k_chi) {
            diff = std::to_string(static_cast<std::int64_t>(*row.k_x) - static_cast<std::int64_t>(*row.k_chi));
        }
        std::string neg_log = "-";
        if (row.conditional) neg_log = row.neg_log ? std::to_string(*row.neg_log) : "inf";
        out << row.chi.str() << '\t' << row.x.str() << '\t' << (row.in_b ? 1 : 0) << '\t' << row.m_x.to_string() << '\t'
            << row.m_b.to_string() << '\t' << detail::or_dash(row.conditional) << '\t' << neg_log << '\t'
            << detail::or_dash(row.k_x) << '\t' << detail::or_dash(row.k_chi) << '\t' << diff << '\t'
            << detail::or_dash(row.k_x_given_chi) << '\t' << (row.incomplete() ? "incomplete" : "ok") << '\n';
    }
}

/// Reads machine outputs of the form <x, y> as a joint table. Outputs that do
/// not parse as a pair are skipped.
inline JointTable joint_from_outputs(const AprioriTable& table) {
    JointTable j;
    for (const auto& [z, q] : table.entries) {
        try {
            auto [x, y] = unpair_strings(z);
            j.entries[{std::move(x), std::move(y)}] += q;
        } catch (const Error&) {
            continue;
        }
    }
    return j;
}

/// One row of the joint report: the quotient conditional of x given y next to
/// K(x | <y, K(y)>), where K(y) is replaced by its estimate.
struct QuotientRow {
    BitString x;
    BitString y;
    Dyadic joint;
    Dyadic marginal;
    Ratio quotient;
    std::int64_t neg_log = 0;
    std::optional<std::uint64_t> k_y;
    std::optional<std::uint64_t> k_x_given_y_ky;

    bool incomplete() const { return !k_y || !k_x_given_y_ky; }
};

struct QuotientReport {
    std::string machine_id;
    std::size_t length_bound = 0;
    std::uint64_t step_bound = 0;
    std::uint64_t stage = 0;
    std::vector<QuotientRow> rows;
};

template <PrefixMachine M>
QuotientReport quotient_report(const M& machine, const std::string& machine_id, std::size_t length_bound,
                               std::uint64_t step_bound) {
    detail::check_bounds(length_bound, step_bound);
    QuotientReport report{machine_id, length_bound, step_bound, stage_covering(length_bound, step_bound), {}};
    const auto joint =
        joint_from_outputs(approx_apriori(machine, BitString(), report.stage, length_bound, machine_id));
    const auto k_plain = all_estimates(machine, BitString(), length_bound, step_bound);
    std::map<BitString, std::map<BitString, KEstimate, ShortLex>, ShortLex> given;
    for (const auto& [key, v] : joint.entries) {
        const auto& [x, y] = key;
        QuotientRow row{x, y, v, joint.marginal(y), quotient_conditional(joint, x, y), 0, {}, {}};
        row.neg_log = row.quotient.ceil_log2_inverse();
        row.k_y = detail::bits_of(k_plain, y);
        if (row.k_y) {
            const BitString aux = pair_strings(y, nat_to_string(*row.k_y));
            auto it = given.find(aux);
            if (it == given.end()) {
                it = given.emplace(aux, all_estimates(machine, aux, length_bound, step_bound)).first;
            }
            row.k_x_given_y_ky = detail::bits_of(it->second, x);
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

inline void write_quotient_tsv(std::ostream& out, const QuotientReport& r) {
    out << "# machine " << r.machine_id << "\n# length_bound " << r.length_bound << "\n# step_bound "
        << r.step_bound << "\n# stage " << r.stage << '\n';
    out << "# k_x_given_y_ky conditions on <y, K(y)> with K(y) replaced by its upper-bound estimate k_y\n";
    out << "x\ty\tjoint\tmarginal\tquotient\tneg_log\tk_y\tk_x_given_y_ky\tstatus\n";
    for (const auto& row : r.rows) {
        out << row.x.str() << '\t' << row.y.str() << '\t' << row.joint.to_string() << '\t' << row.marginal.to_string() << '\t'
            << row.quotient.str() << '\t' << row.neg_log << '\t' << detail::or_dash(row.k_y) << '\t'
            << detail::or_dash(row.k_x_given_y_ky) << '\t' << (row.incomplete() ? "incomplete" : "ok") << '\n';
    }
}

} // namespace kolmo
