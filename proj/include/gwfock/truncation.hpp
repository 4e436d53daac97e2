#pragma once

#include <compare>
#include <stdexcept>
#include <string>

namespace gwfock {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Arithmetic between values built under different truncation specs.
class SpecMismatchError : public Error {
public:
    using Error::Error;
};

// A windowed check could not be decided because information left the window.
// Distinct from a negative verdict.
class WindowError : public Error {
public:
    using Error::Error;
};

// An exact flow endpoint was requested but the generator does not stabilize
// at this truncation.
class StabilizationError : public Error {
public:
    using Error::Error;
};

// Finite working window for the formal structures: rank N, descendent indices
// k <= max_desc, total polynomial degree <= max_degree, genus <= max_genus,
// and epsilon-Taylor order for one-parameter flows.
struct TruncationSpec {
    int rank = 1;       // N
    int max_desc = 3;   // K
    int max_degree = 6; // D
    int max_genus = 2;  // G
    int flow_order = 4; // E

    friend bool operator==(const TruncationSpec&, const TruncationSpec&) = default;

    void validate() const
    {
        if (rank < 1)
            throw Error("truncation: rank must be >= 1");
        if (max_desc < 0)
            throw Error("truncation: max_desc must be >= 0");
        if (max_degree < 1)
            throw Error("truncation: max_degree must be >= 1");
        if (max_genus < 0)
            throw Error("truncation: max_genus must be >= 0");
        if (flow_order < 0)
            throw Error("truncation: flow_order must be >= 0");
    }
};

inline void require_same_spec(const TruncationSpec& a, const TruncationSpec& b)
{
    if (!(a == b))
        throw SpecMismatchError("mixed truncation specs");
}

// Index of a descendent variable t^mu_k (or q^mu_k): direction mu in [0, N),
// descendent index k in [0, K]. mu = 0 is the unit direction by convention.
struct VarIndex {
    int mu = 0;
    int k = 0;

    friend auto operator<=>(const VarIndex&, const VarIndex&) = default;
};

inline void require_in_spec(const VarIndex& v, const TruncationSpec& s)
{
    if (v.mu < 0 || v.mu >= s.rank || v.k < 0 || v.k > s.max_desc)
        throw Error("variable index (mu=" + std::to_string(v.mu) + ", k=" + std::to_string(v.k) +
                    ") outside truncation bounds");
}

} // namespace gwfock
