// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <functional>
#include <istream>
#include <iterator>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "kolmo/apriori.hpp"

// Conditional semimeasures on N x N (arguments start at 1), their
// normalization from arbitrary monotone approximators, and weighted mixtures.

namespace kolmo {

/// A stage function phi(x, y, k) that must be nondecreasing in k.
/// Returning nullopt models a computation that never returns a value.
using ApproximatorFn = std::function<std::optional<Dyadic>(std::uint64_t x, std::uint64_t y, std::uint64_t k)>;

/// Wraps an approximator and rejects any decrease in k for a fixed (x, y).
///
/// Not safe to share between threads: it remembers the last value returned
/// for every (x, y) it has been asked about.
class MonotoneApproximator {
public:
    MonotoneApproximator() = default;
    MonotoneApproximator(ApproximatorFn fn, std::string name = {})
        : fn_(std::move(fn)), name_(std::move(name)), seen_(std::make_shared<Seen>()) {}

    std::optional<Dyadic> operator()(std::uint64_t x, std::uint64_t y, std::uint64_t k) const {
        std::optional<Dyadic> v = fn_(x, y, k);
        if (!v) return v;
        auto& last = (*seen_)[{x, y}];
        if (last.k != 0) {
            const bool decreased = (k > last.k && *v < last.value) || (k < last.k && *v > last.value) ||
                                   (k == last.k && *v != last.value);
            if (decreased) {
                throw MonotonicityViolation(name_ + ": phi(" + std::to_string(x) + "," + std::to_string(y) + "," +
                                            std::to_string(k) + ") = " + v->to_string() + " after " +
                                            last.value.to_string() + " at k=" + std::to_string(last.k));
            }
        }
        if (k >= last.k) last = {k, *v};
        return v;
    }

    const std::string& name() const noexcept { return name_; }

private:
    struct Last {
        std::uint64_t k = 0;
        Dyadic value;
    };
    using Seen = std::map<std::pair<std::uint64_t, std::uint64_t>, Last>;

    ApproximatorFn fn_;
    std::string name_;
    std::shared_ptr<Seen> seen_;
};

/// Values P(x|y) with every column sum at most 1.
struct ConditionalSemimeasure {
    std::map<std::pair<std::uint64_t, std::uint64_t>, Dyadic> values;  // (x, y) -> P(x|y), positive only
    std::uint64_t stage = 0;
    std::set<std::uint64_t> frozen_y;            // columns whose sum exceeded 1 at some stage
    std::optional<std::uint64_t> diverged_at;    // stage at which phi failed to return
    std::string provenance;

    Dyadic at(std::uint64_t x, std::uint64_t y) const {
        const auto it = values.find({x, y});
        return it == values.end() ? Dyadic() : it->second;
    }

    Dyadic column_sum(std::uint64_t y) const {
        Dyadic s;
        for (const auto& [key, v] : values) {
            if (key.second == y) s += v;
        }
        return s;
    }

    std::set<std::uint64_t> columns() const {
        std::set<std::uint64_t> ys;
        for (const auto& [key, v] : values) ys.insert(key.second);
        return ys;
    }

    friend bool operator==(const ConditionalSemimeasure&, const ConditionalSemimeasure&) = default;
};

enum class FreezeMode {
    AllColumns,  // any column over 1 keeps every value at this stage
    PerColumn,   // only the offending columns keep their values
};

/// Called after every stage with the current state.
using StageObserver = std::function<void(const ConditionalSemimeasure&)>;

/// Turns an arbitrary monotone approximator into a conditional semimeasure.
///
/// Stage k evaluates phi(i, j, k) for 1 <= i, j <= k. If any value is
/// undefined, the values of P stay as they are at this and every later stage
/// (the evaluation never returns). Otherwise, if some column j has
/// sum_i phi(i, j, k) > 1 the stage changes nothing, else P(i|j) := phi(i, j, k)
/// for all i, j <= k. With FreezeMode::PerColumn only the offending columns
/// are left alone.
inline ConditionalSemimeasure normalize(const MonotoneApproximator& phi, std::uint64_t max_stage,
                                        FreezeMode mode = FreezeMode::AllColumns,
                                        const StageObserver& observe = {}) {
    if (max_stage < 1) throw InvalidArgument("max_stage must be at least 1");
    ConditionalSemimeasure p;
    p.provenance = "normalize(" + phi.name() + ")";
    for (std::uint64_t k = 1; k <= max_stage; ++k) {
        p.stage = k;
        if (!p.diverged_at) {
            std::vector<std::vector<Dyadic>> cols(k);
            for (std::uint64_t j = 1; j <= k && !p.diverged_at; ++j) {
                cols[j - 1].reserve(k);
                for (std::uint64_t i = 1; i <= k; ++i) {
                    auto v = phi(i, j, k);
                    if (!v) {
                        p.diverged_at = k;
                        break;
                    }
                    cols[j - 1].push_back(std::move(*v));
                }
            }
            if (!p.diverged_at) {
                std::vector<bool> over(k, false);
                bool any_over = false;
                for (std::uint64_t j = 1; j <= k; ++j) {
                    Dyadic sum;
                    for (const auto& v : cols[j - 1]) sum += v;
                    if (sum > Dyadic(1)) {
                        over[j - 1] = true;
                        any_over = true;
                        p.frozen_y.insert(j);
                    }
                }
                for (std::uint64_t j = 1; j <= k; ++j) {
                    if (mode == FreezeMode::AllColumns ? any_over : over[j - 1]) continue;
                    for (std::uint64_t i = 1; i <= k; ++i) {
                        const Dyadic& v = cols[j - 1][i - 1];
                        if (v.is_zero()) {
                            p.values.erase({i, j});
                        } else {
                            p.values[{i, j}] = v;
                        }
                    }
                }
            }
        }
        if (observe) observe(p);
    }
    return p;
}

/// A fixed semimeasure from a priori tables: the table for aux y is column
/// program_index(y), and output x is row program_index(x).
inline ConditionalSemimeasure from_apriori(const std::vector<AprioriTable>& tables) {
    ConditionalSemimeasure p;
    std::uint64_t stage = 0;
    for (const auto& t : tables) {
        const std::uint64_t y = program_index(t.aux);
        for (const auto& [x, q] : t.entries) p.values[{program_index(x), y}] += q;
        stage = std::max(stage, t.stage);
        p.provenance += (p.provenance.empty() ? "" : ";") + ("apriori(" + t.machine_id + "|" + t.aux.str() + ")");
    }
    p.stage = stage;
    for (const auto y : p.columns()) {
        if (p.column_sum(y) > Dyadic(1)) throw InvalidArgument("a priori column sum exceeds 1");
    }
    return p;
}

/// A mixture: sum_j 2^{-weight_exponent_j} P_j where each P_j is either the
/// normalization of an approximator or a fixed semimeasure.
struct MixtureSpec {
    struct Component {
        std::uint64_t weight_exponent = 0;
        std::variant<MonotoneApproximator, ConditionalSemimeasure> source;
        std::string name;
    };

    std::vector<Component> components;
    FreezeMode mode = FreezeMode::AllColumns;

    Dyadic weight_sum() const {
        Dyadic s;
        for (const auto& c : components) s += Dyadic::inverse_pow2(c.weight_exponent);
        return s;
    }

    std::string provenance() const {
        std::string out = "mixture[";
        for (std::size_t j = 0; j < components.size(); ++j) {
            out += (j ? "," : "") + std::to_string(components[j].weight_exponent) + ":" + components[j].name;
        }
        return out + (mode == FreezeMode::AllColumns ? "]" : "]/per-column");
    }
};

/// Weight exponents |bar(nat(j))| + extra_j for j = 1..count; they satisfy Kraft
/// because the bar code is prefix-free. `extra` may be shorter than count.
inline std::vector<std::uint64_t> bar_weight_exponents(std::size_t count, const std::vector<std::uint64_t>& extra = {}) {
    std::vector<std::uint64_t> out;
    for (std::size_t j = 1; j <= count; ++j) {
        out.push_back(bar_encode(nat_to_string(j)).size() + (j <= extra.size() ? extra[j - 1] : 0));
    }
    return out;
}

/// Component j of the spec as a semimeasure at the given stage.
inline ConditionalSemimeasure component_at(const MixtureSpec::Component& c, std::uint64_t stage, FreezeMode mode) {
    if (const auto* phi = std::get_if<MonotoneApproximator>(&c.source)) return normalize(*phi, stage, mode);
    return std::get<ConditionalSemimeasure>(c.source);
}

/// m(x|y) = sum_j alpha_j P_j(x|y) with every P_j taken at max_stage.
/// The weight condition is checked before anything is evaluated.
inline ConditionalSemimeasure mixture(const MixtureSpec& spec, std::uint64_t max_stage) {
    if (spec.weight_sum() > Dyadic(1)) {
        throw InvalidArgument("mixture weights sum to " + spec.weight_sum().to_string() + " > 1");
    }
    ConditionalSemimeasure m;
    m.stage = max_stage;
    m.provenance = spec.provenance();
    for (const auto& c : spec.components) {
        const ConditionalSemimeasure p = component_at(c, max_stage, spec.mode);
        for (const auto& [key, v] : p.values) m.values[key] += v.scaled(-static_cast<std::int64_t>(c.weight_exponent));
    }
    return m;
}

/// True iff m(x|y) >= alpha_j P_j(x|y) for every component j and every (x, y)
/// in the domain. m must come from this spec at its recorded stage.
inline bool check_domination(const ConditionalSemimeasure& m, const MixtureSpec& spec,
                             const std::vector<std::pair<std::uint64_t, std::uint64_t>>& domain) {
    if (m.provenance != spec.provenance()) {
        throw ProvenanceMismatch("semimeasure '" + m.provenance + "' was not built from '" + spec.provenance() + "'");
    }
    for (const auto& c : spec.components) {
        const ConditionalSemimeasure p = component_at(c, m.stage, spec.mode);
        if (const auto* fixed = std::get_if<ConditionalSemimeasure>(&c.source); fixed && fixed->stage > m.stage) {
            throw ProvenanceMismatch("component '" + c.name + "' is at stage " + std::to_string(fixed->stage) +
                                     ", after the mixture stage " + std::to_string(m.stage));
        }
        for (const auto& [x, y] : domain) {
            if (m.at(x, y) < p.at(x, y).scaled(-static_cast<std::int64_t>(c.weight_exponent))) return false;
        }
    }
    return true;
}

/// An approximator given by a finite table of (x, y, k, value) rows: phi(x, y, k)
/// is the value of the row with the largest k' <= k, or 0 if there is none. A
/// value written "undefined" makes phi undefined from that k on.
class TableApproximator {
public:
    void set(std::uint64_t x, std::uint64_t y, std::uint64_t k, std::optional<Dyadic> v) {
        rows_[{x, y}][k] = std::move(v);
    }

    std::optional<Dyadic> operator()(std::uint64_t x, std::uint64_t y, std::uint64_t k) const {
        const auto it = rows_.find({x, y});
        if (it == rows_.end()) return Dyadic();
        auto row = it->second.upper_bound(k);
        if (row == it->second.begin()) return Dyadic();
        return std::prev(row)->second;
    }

    /// Every (x, y) with at least one row.
    std::vector<std::pair<std::uint64_t, std::uint64_t>> keys() const {
        std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
        for (const auto& [key, row] : rows_) out.push_back(key);
        return out;
    }

    /// The last listed value for (x, y); the supremum of phi when defined.
    std::optional<Dyadic> final_value(std::uint64_t x, std::uint64_t y) const {
        const auto it = rows_.find({x, y});
        if (it == rows_.end() || it->second.empty()) return Dyadic();
        return it->second.rbegin()->second;
    }

    std::uint64_t last_stage() const {
        std::uint64_t k = 0;
        for (const auto& [key, row] : rows_) {
            if (!row.empty()) k = std::max(k, row.rbegin()->first);
        }
        return k;
    }

    MonotoneApproximator approximator(std::string name) const {
        return MonotoneApproximator([self = *this](std::uint64_t x, std::uint64_t y, std::uint64_t k) { return self(x, y, k); },
                                    std::move(name));
    }

    /// Reads lines "x,y,k,value"; blank lines and lines starting with '#' are skipped.
    static TableApproximator read_csv(std::istream& in) {
        TableApproximator t;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty() || line[0] == '#') continue;
            std::vector<std::string> fields;
            std::stringstream ss(line);
            for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
            if (fields.size() != 4) throw ParseError("line " + std::to_string(lineno) + ": expected x,y,k,value");
            std::uint64_t n[3];
            for (int c = 0; c < 3; ++c) {
                try {
                    std::size_t used = 0;
                    n[c] = std::stoull(fields[c], &used);
                    if (used != fields[c].size()) throw std::invalid_argument("trailing text");
                } catch (const std::logic_error&) {
                    throw ParseError("line " + std::to_string(lineno) + ": bad integer '" + fields[c] + "'");
                }
            }
            if (n[0] < 1 || n[1] < 1 || n[2] < 1) throw ParseError("line " + std::to_string(lineno) + ": x, y, k start at 1");
            if (fields[3] == "undefined") {
                t.set(n[0], n[1], n[2], std::nullopt);
            } else {
                t.set(n[0], n[1], n[2], Dyadic::parse(fields[3]));
            }
        }
        return t;
    }

    void write_csv(std::ostream& out) const {
        for (const auto& [key, row] : rows_) {
            for (const auto& [k, v] : row) {
                out << key.first << ',' << key.second << ',' << k << ',' << (v ? v->to_string() : "undefined") << '\n';
            }
        }
    }

private:
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::map<std::uint64_t, std::optional<Dyadic>>> rows_;
};

/// Snapshot lines "x<TAB>y<TAB>value" after a header like the a priori tables.
inline void write_semimeasure(std::ostream& out, const ConditionalSemimeasure& p) {
    out << "# provenance " << p.provenance << '\n' << "# stage " << p.stage << '\n';
    out << "# frozen_y";
    for (const auto y : p.frozen_y) out << ' ' << y;
    out << '\n' << "# diverged_at " << (p.diverged_at ? std::to_string(*p.diverged_at) : "-") << '\n';
    for (const auto& [key, v] : p.values) out << key.first << '\t' << key.second << '\t' << v.to_string() << '\n';
}

} // namespace kolmo
