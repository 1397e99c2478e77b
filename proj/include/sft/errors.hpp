#pragma once

#include <stdexcept>
#include <string>

namespace sft {

// Malformed input data or an argument outside an operation's precondition.
struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A bounded search or enumeration exceeded its configured budget.
struct capacity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A caller-supplied procedure broke its declared contract (e.g. a
// displacement outside F, or an orbit representative that does not walk back).
struct contract_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Higher-block decoding met two transversal decompositions that disagree.
struct decode_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An operation that needs an exact emptiness oracle ran on a group that has
// only the semi-oracle.
struct oracle_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Synthesis was asked for a point of an empty subshift.
struct emptiness_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace sft
