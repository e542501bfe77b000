// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>

#include "kolmo/machine.hpp"

// Built-in copies of fixtures/*.tm; tests keep the two in sync.

namespace kolmo::fixtures {

inline const std::map<std::string, std::string>& texts() {
    static const std::map<std::string, std::string> table = {
        {"halt_immediately", R"tm(# Halts at once without reading: the empty program is its only halting program.
states 1
)tm"},
        {"echo_bit", R"tm(# Reads one bit, writes it to the output and halts.
states 2
0 n * * -> 0 0 S S - r
0 0 * * -> 1 0 S S 0 -
0 1 * * -> 1 0 S S 1 -
)tm"},
        {"copy2", R"tm(# Copies the first two program bits to the output and halts.
states 3
0 n * * -> 0 0 S S - r
0 0 * * -> 1 0 S S 0 r
0 1 * * -> 1 0 S S 1 r
1 0 * * -> 2 0 S S 0 -
1 1 * * -> 2 0 S S 1 -
)tm"},
        {"two_paths", R"tm(# Halting programs: 1 -> "0", 00 -> "1", 010 -> "1", 011 -> "0".
states 4
0 n * * -> 0 0 S S - r
0 1 * * -> 3 0 S S 0 -
0 0 * * -> 1 0 S S - r
1 0 * * -> 3 0 S S 1 -
1 1 * * -> 2 0 S S - r
2 0 * * -> 3 0 S S 1 -
2 1 * * -> 3 0 S S 0 -
)tm"},
        {"copy_aux", R"tm(# Copies the auxiliary word to the output; the empty program is the only halting one.
states 2
0 n e * -> 1 0 S R - -
1 n 0 * -> 1 0 S R 0 -
1 n 1 * -> 1 0 S R 1 -
)tm"},
        {"bar_echo", R"tm(# Reads a self-delimiting word 1^n 0 x (|x| = n) and outputs x.
# The ones are counted on the work tape, then consumed right to left.
states 4
0 n * * -> 1 0 S S - r
1 1 * * -> 1 1 R S - r
1 0 * * -> 2 0 L S - -
2 n * 1 -> 3 0 L S - r
3 0 * 0 -> 2 0 S S 0 -
3 0 * 1 -> 2 1 S S 0 -
3 1 * 0 -> 2 0 S S 1 -
3 1 * 1 -> 2 1 S S 1 -
)tm"},
    };
    return table;
}

inline std::optional<TableMachine> builtin(const std::string& name) {
    const auto& t = texts();
    const auto it = t.find(name);
    if (it == t.end()) return std::nullopt;
    return TableMachine::parse(it->second);
}

inline TableMachine halt_immediately() { return *builtin("halt_immediately"); }
inline TableMachine echo_bit() { return *builtin("echo_bit"); }
inline TableMachine copy2() { return *builtin("copy2"); }
inline TableMachine two_paths() { return *builtin("two_paths"); }
inline TableMachine copy_aux() { return *builtin("copy_aux"); }
inline TableMachine bar_echo() { return *builtin("bar_echo"); }

} // namespace kolmo::fixtures
