#pragma once

#include "gwfock/loop.hpp"
#include "gwfock/poly.hpp"
#include "gwfock/rational.hpp"
#include "gwfock/tau.hpp"
#include "gwfock/truncation.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gwfock {

enum class AxiomId { dilaton, string, trr };
enum class AxiomStatus { pass, fail, undecidable };

const char* to_string(AxiomId id);
const char* to_string(AxiomStatus s);

struct AxiomWitness {
    // Index tuple (TRR only) rendered as text, offending monomial, and the
    // two sides' coefficients.
    std::string where;
    Monomial monomial;
    Rational lhs;
    Rational rhs;
};

// Outcome of one genus-zero axiom check. Comparisons run only over monomials
// whose full dependency cone sits inside the truncation window, so a pass is
// exact on the safe region and anything deeper is undecidable, not false.
struct AxiomReport {
    AxiomId id = AxiomId::dilaton;
    AxiomStatus status = AxiomStatus::undecidable;
    std::vector<AxiomWitness> witnesses;
    long compared = 0; // coefficients compared inside the safe region
};

// dG0/dt^unit_1 = sum t^mu_k dG0/dt^mu_k - 2 G0, compared through degree
// max_degree - 1.
AxiomReport check_dilaton(const PolyT& g0, const Metric& metric);

// dG0/dt^unit_0 = (1/2) <t_0, t_0> + sum t^nu_{k+1} dG0/dt^nu_k, compared
// through degree max_degree - 1.
AxiomReport check_string(const PolyT& g0, const Metric& metric);

// Topological recursion relations, all index tuples with k+1 within bounds,
// compared through degree max_degree - 3.
AxiomReport check_trr(const PolyT& g0, const Metric& metric);

std::vector<AxiomReport> check_axioms(const PolyT& g0, const Metric& metric);

// Frobenius coordinates s^mu = d^2 G0 / dt^mu_0 dt^unit_0.
std::vector<PolyT> frobenius_coordinates(const PolyT& g0, const Metric& metric);

// Quantum product at a small-phase-space base point: structure constants
// A^gamma_{alpha beta} from the third derivatives of G0, indices raised by
// the inverse metric.
struct QuantumProduct {
    int rank = 1;
    std::vector<Rational> base_point;
    std::vector<MatQ> structure; // structure[gamma](alpha, beta)
    bool unit_ok = false;        // phi_unit acts as the identity

    // Matrix of multiplication by sum_alpha probe[alpha] phi_alpha.
    MatQ multiplication_matrix(const std::vector<Rational>& probe) const;
};

QuantumProduct quantum_product(const PolyT& g0, const Metric& metric,
                               const std::vector<Rational>& base_point);

enum class SemisimpleStatus { semisimple, not_semisimple, undecidable };

struct SemisimpleReport {
    SemisimpleStatus status = SemisimpleStatus::undecidable;
    // Minimal polynomial of the deciding multiplication operator, highest
    // degree first, monic.
    std::vector<Rational> minimal_polynomial;
    std::vector<Rational> probe;
    int probes_tried = 0;
};

// Semisimple iff some multiplication operator has a squarefree minimal
// polynomial of full degree N. A squarefree polynomial of lower degree is
// inconclusive for that probe; deterministic probes (1, j, j^2, ...) are
// retried up to N + 2 times before reporting undecidable. A square factor
// for any probe certifies non-semisimplicity.
SemisimpleReport is_semisimple(const QuantumProduct& qp, const std::vector<Rational>& probe);

// Monic minimal polynomial of a square rational matrix (highest degree
// first).
std::vector<Rational> minimal_polynomial(const MatQ& m);

// True iff gcd(p, p') is constant.
bool is_squarefree(const std::vector<Rational>& monic_poly);

struct ActResult {
    Theory theory;
    std::vector<AxiomReport> axiom_reports;
};

// Loop group element acting on a genus-zero theory: the genus-0 part of the
// flowed tau, with the three axiom checks re-run on the result.
ActResult act_genus0(const SRData& sr, const Theory& theory);

} // namespace gwfock
