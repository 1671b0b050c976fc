#pragma once

#include <stdexcept>
#include <string>

namespace qpec {

struct NotPrimePower : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DivisionByZero : std::domain_error {
    using std::domain_error::domain_error;
};

struct EmptySet : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ZeroScalar : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct BadOutputCardinality : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct BadDistribution : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InfeasibleDegreeSequence : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A variable-node intersection came out empty. Cannot happen on outputs of a
// real channel run (every message keeps containing the transmitted symbol);
// indicates inconsistent inputs.
struct EmptyIntersection : std::logic_error {
    using std::logic_error::logic_error;
};

struct ComplexityCapExceeded : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SingularMatrix : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Infeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoHorizon : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BracketFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace qpec
