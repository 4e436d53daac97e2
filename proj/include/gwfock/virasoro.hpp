#pragma once

#include "gwfock/quantize.hpp"
#include "gwfock/tau.hpp"
#include "gwfock/truncation.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gwfock {

// Quantized Virasoro operators of the N-point theory (or a conjugated
// family), indices m in [-1, mmax]. Operators are index-truncated at
// spec.max_desc; safe_index_loss records how much of the exact index range
// conjugation has eaten up.
struct VirasoroFamily {
    TruncationSpec spec;
    int mmax = 2;
    std::map<int, FockOperator> ops;
    Rational central;       // constant carried by the m = 0 operator
    int safe_index_loss = 0;
    std::string provenance = "point";

    const FockOperator& op(int m) const
    {
        auto it = ops.find(m);
        if (it == ops.end())
            throw Error("virasoro family: operator L_" + std::to_string(m) + " not built");
        return it->second;
    }
};

// weyl_quantize(quadratic_hamiltonian(virasoro_generator(m))) over the
// orthonormal N-point loop space, plus, for m = 0, the central constant that
// makes the family close under the commutator. That constant is derived from
// the normal-ordered algebra (half the scalar discrepancy of the (1,-1)
// commutator), not hard-coded.
FockOperator build_point_virasoro(int m, const TruncationSpec& spec);

// The m = 0 constant by itself.
Rational virasoro_central_constant(const TruncationSpec& spec);

VirasoroFamily build_point_virasoro_family(const TruncationSpec& spec, int mmax);

enum class CheckStatus { pass, fail, undecidable };

struct RelationReport {
    CheckStatus status = CheckStatus::undecidable;
    int safe_index = -1; // discrepancy compared on terms with all k <= safe_index
    // Leftover terms of [L_m, L_n] - (m-n) L_{m+n} inside the safe range.
    std::vector<std::pair<FockOperator::TermKey, Rational>> discrepancy;
};

// Verifies [L_m, L_n] = (m-n) L_{m+n} on the index range untouched by
// truncation, including exact cancellation of the central constants.
RelationReport check_virasoro_relations(const VirasoroFamily& family, int m, int n);

struct AnnihilationWitness {
    int hbar_slot = 0;
    Monomial monomial;
    Rational value;
};

struct AnnihilationReport {
    CheckStatus status = CheckStatus::undecidable;
    int safe_index = -1;
    int safe_degree = -1;
    long checked = 0;
    std::vector<AnnihilationWitness> witnesses;
};

// Every safe coefficient of every hbar slot of (L_m tau)/tau must vanish.
AnnihilationReport check_annihilation(const VirasoroFamily& family, int m, const LogTau& tau);

// L^T_m = S-hat (R-hat L_m R-hat^{-1}) S-hat^{-1}, computed order by order
// as the adjoint flow at its exact termination point.
VirasoroFamily conjugated_virasoro(const VirasoroFamily& family, const SRData& sr,
                                   const Metric& metric);

} // namespace gwfock
