// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>

#include "kolmo/enumeration.hpp"

namespace kolmo {

/// The reference universal prefix machine U.
///
/// U reads bar(nat_to_string(i)) from its input, one bit per step, and then
/// behaves exactly like machine T_i of the standard enumeration on the rest
/// of the input with the same auxiliary tape. A run of T_i with budget B
/// corresponds to a run of U with budget B + |bar(nat_to_string(i))|.
class UniversalMachine {
public:
    /// Indices above this are rejected instead of enumerated.
    static constexpr std::uint64_t kMaxIndex = std::uint64_t{1} << 16;

    explicit UniversalMachine(MachineEnumeration& machines = MachineEnumeration::shared()) : machines_(&machines) {}

    class Execution {
    public:
        Execution(MachineEnumeration& machines, std::shared_ptr<const BitString> aux)
            : machines_(&machines), aux_(std::move(aux)) {}

        Pause advance(std::uint64_t step_limit) {
            if (phase_ == Phase::Rejected) return Pause::Rejected;
            if (phase_ == Phase::Inner) {
                return inner_->advance(step_limit > index_steps_ ? step_limit - index_steps_ : 0);
            }
            if (pending_) return Pause::NeedsInput;
            if (index_steps_ >= step_limit) return Pause::OutOfFuel;
            ++index_steps_;
            pending_ = true;
            return Pause::NeedsInput;
        }

        void feed(bool bit) {
            if (phase_ == Phase::Inner) {
                inner_->feed(bit);
                return;
            }
            pending_ = false;
            ++index_bits_;
            if (phase_ == Phase::Ones) {
                if (bit) {
                    ++ones_;
                } else {
                    phase_ = Phase::IndexBits;
                }
            } else {
                index_.push_back(bit);
            }
            if (phase_ == Phase::IndexBits && index_.size() == ones_) select_machine();
        }

        std::uint64_t steps() const noexcept { return index_steps_ + (inner_ ? inner_->steps() : 0); }
        std::size_t bits_read() const noexcept { return index_bits_ + (inner_ ? inner_->bits_read() : 0); }

        const BitString& output() const noexcept {
            static const BitString none;
            return inner_ ? inner_->output() : none;
        }

    private:
        enum class Phase { Ones, IndexBits, Inner, Rejected };

        void select_machine() {
            const std::uint64_t i = index_.size() < 64 ? string_to_nat(index_) : 0;
            if (i == 0 || i > kMaxIndex) {
                phase_ = Phase::Rejected;
                return;
            }
            machine_ = machines_->machine(i);
            inner_.emplace(machine_->start(*aux_));
            phase_ = Phase::Inner;
        }

        MachineEnumeration* machines_;
        std::shared_ptr<const BitString> aux_;
        Phase phase_ = Phase::Ones;
        std::size_t ones_ = 0;
        BitString index_;
        bool pending_ = false;
        std::uint64_t index_steps_ = 0;
        std::size_t index_bits_ = 0;
        std::shared_ptr<const TableMachine> machine_;
        std::optional<TableMachine::Execution> inner_;
    };

    Execution start(const BitString& aux) const {
        return Execution(*machines_, std::make_shared<const BitString>(aux));
    }

    /// bar(nat_to_string(i)) ++ program.
    static BitString program_for(std::uint64_t i, const BitString& program) {
        return bar_encode(nat_to_string(i)) + program;
    }

    static std::size_t index_cost(std::uint64_t i) { return bar_encode(nat_to_string(i)).size(); }

private:
    MachineEnumeration* machines_;
};

/// φ_U(<i, p>, y) = φ_i(p, y).
inline RunOutcome universal_run(const BitString& pair, const BitString& aux, std::uint64_t step_budget) {
    return run(UniversalMachine{}, pair, aux, step_budget);
}

} // namespace kolmo
