#pragma once

#include "gwfock/loop.hpp"
#include "gwfock/monomial.hpp"
#include "gwfock/poly.hpp"
#include "gwfock/rational.hpp"
#include "gwfock/truncation.hpp"

#include <map>
#include <tuple>
#include <vector>

namespace gwfock {

// Darboux coordinate label: p_k^mu or q_k^mu.
struct DarbouxVar {
    bool is_p = false;
    VarIndex idx;

    friend auto operator<=>(const DarbouxVar&, const DarbouxVar&) = default;
};

// Quadratic form in the Darboux coordinates p, q with descendent indices
// bounded by the spec. Stored as coefficient-of-monomial over canonically
// ordered variable pairs, so x*y and y*x never double-count.
class QuadHamiltonian {
public:
    using Key = std::pair<DarbouxVar, DarbouxVar>; // key.first <= key.second

    explicit QuadHamiltonian(TruncationSpec spec) : spec_(spec) {}

    const TruncationSpec& spec() const { return spec_; }
    const std::map<Key, Rational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(DarbouxVar x, DarbouxVar y, const Rational& c)
    {
        require_in_spec(x.idx, spec_);
        require_in_spec(y.idx, spec_);
        if (c == 0)
            return;
        Key key = x <= y ? Key{x, y} : Key{y, x};
        auto [it, inserted] = terms_.try_emplace(key, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0)
                terms_.erase(it);
        }
    }

    Rational coefficient(DarbouxVar x, DarbouxVar y) const
    {
        Key key = x <= y ? Key{x, y} : Key{y, x};
        auto it = terms_.find(key);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    QuadHamiltonian& operator+=(const QuadHamiltonian& other)
    {
        require_same_spec(spec_, other.spec_);
        for (const auto& [k, c] : other.terms_)
            add_term(k.first, k.second, c);
        return *this;
    }

    QuadHamiltonian& scale(const Rational& c)
    {
        if (c == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& [k, v] : terms_)
            v *= c;
        return *this;
    }

    friend QuadHamiltonian operator+(QuadHamiltonian a, const QuadHamiltonian& b) { return a += b; }
    friend bool operator==(const QuadHamiltonian& a, const QuadHamiltonian& b)
    {
        return a.spec_ == b.spec_ && a.terms_ == b.terms_;
    }

    // The three classical coefficient tables (pp and qq symmetric).
    std::map<std::pair<VarIndex, VarIndex>, Rational> pp() const { return table(true, true); }
    std::map<std::pair<VarIndex, VarIndex>, Rational> qq() const { return table(false, false); }
    // Keyed (p index, q index).
    std::map<std::pair<VarIndex, VarIndex>, Rational> pq() const;

private:
    std::map<std::pair<VarIndex, VarIndex>, Rational> table(bool first_p, bool second_p) const;

    TruncationSpec spec_;
    std::map<Key, Rational> terms_;
};

// P(A)(f) = (1/2) Omega(Af, f) expanded in the Darboux coordinates of the
// polarization: q^mu_k on phi_mu z^k and p^mu_k on the metric-dual direction
// (g^{-1} phi)_mu (-z)^{-k-1}, for k <= spec.max_desc. Every Darboux source
// must be trusted in A; otherwise the extraction would silently drop terms
// and a WindowError is thrown instead.
QuadHamiltonian quadratic_hamiltonian(const LoopEndo& a, const Metric& metric,
                                      const TruncationSpec& spec);

// Poisson bracket sum_i dP1/dp_i dP2/dq_i - dP2/dp_i dP1/dq_i.
QuadHamiltonian poisson_bracket(const QuadHamiltonian& p1, const QuadHamiltonian& p2);

// The central cocycle in orthonormal coordinates: bilinear, antisymmetric,
// supported on (pp, qq) pairs with matching index sets, where it equals
// 1 + delta_{xy}.
Rational cocycle(const QuadHamiltonian& p1, const QuadHamiltonian& p2);

// Normal-ordered differential operator on the Fock space: finite sum of
// terms hbar^h * q^qmon * d^dmon with rational coefficients, q factors to
// the left of derivatives.
class FockOperator {
public:
    struct TermKey {
        int hbar = 0;
        Monomial qmon;
        Monomial dmon;

        friend bool operator<(const TermKey& a, const TermKey& b)
        {
            if (a.hbar != b.hbar)
                return a.hbar < b.hbar;
            if (a.qmon < b.qmon)
                return true;
            if (b.qmon < a.qmon)
                return false;
            return a.dmon < b.dmon;
        }
        friend bool operator==(const TermKey&, const TermKey&) = default;
    };

    explicit FockOperator(TruncationSpec spec) : spec_(spec) {}

    static FockOperator constant(TruncationSpec spec, const Rational& c)
    {
        FockOperator op(spec);
        op.add_term(0, Monomial{}, Monomial{}, c);
        return op;
    }

    const TruncationSpec& spec() const { return spec_; }
    const std::map<TermKey, Rational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(int hbar, const Monomial& qmon, const Monomial& dmon, const Rational& c)
    {
        if (c == 0)
            return;
        for (const auto& [v, e] : qmon.factors())
            require_in_spec(v, spec_);
        for (const auto& [v, e] : dmon.factors())
            require_in_spec(v, spec_);
        TermKey key{hbar, qmon, dmon};
        auto [it, inserted] = terms_.try_emplace(key, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0)
                terms_.erase(it);
        }
    }

    FockOperator& operator+=(const FockOperator& other)
    {
        require_same_spec(spec_, other.spec_);
        for (const auto& [k, c] : other.terms_)
            add_term(k.hbar, k.qmon, k.dmon, c);
        return *this;
    }

    FockOperator& scale(const Rational& c)
    {
        if (c == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& [k, v] : terms_)
            v *= c;
        return *this;
    }

    friend FockOperator operator+(FockOperator a, const FockOperator& b) { return a += b; }
    friend FockOperator operator-(FockOperator a, FockOperator b)
    {
        b.scale(Rational(-1));
        return a += b;
    }
    friend bool operator==(const FockOperator& a, const FockOperator& b)
    {
        return a.spec_ == b.spec_ && a.terms_ == b.terms_;
    }

    // The constant (hbar^0, no q, no d) part.
    Rational constant_term() const
    {
        auto it = terms_.find(TermKey{0, Monomial{}, Monomial{}});
        return it == terms_.end() ? Rational(0) : it->second;
    }

    int max_desc_index() const
    {
        int k = -1;
        for (const auto& [key, c] : terms_) {
            k = std::max(k, key.qmon.max_desc_index());
            k = std::max(k, key.dmon.max_desc_index());
        }
        return k;
    }

private:
    TruncationSpec spec_;
    std::map<TermKey, Rational> terms_;
};

// hbar^1 dd / hbar^0 q d / hbar^-1 qq table applied termwise; linear.
FockOperator weyl_quantize(const QuadHamiltonian& p);

// Normal-ordered composition (exact for any finite term shapes).
FockOperator compose(const FockOperator& a, const FockOperator& b);

// [A, B] via normal ordering. Inputs must be of quantized-quadratic shape
// (each term one of hbar dd, q d, qq/hbar, or an hbar^0 constant).
FockOperator operator_commutator(const FockOperator& a, const FockOperator& b);

void require_quantized_quadratic(const FockOperator& op, const char* who);

// Genus-graded logarithm of a tau-function: slot g holds F_g, the
// coefficient of hbar^{g-1}. Potentials are kept in the t-frame; operators
// cross the dilaton shift on their side (q^unit_1 acts as t^unit_1 - 1), so
// the truncation residue stays confined to top degree instead of being
// resummed downward.
struct LogTau {
    TruncationSpec spec;
    std::vector<PolyT> f; // size max_genus + 1

    static LogTau zero(TruncationSpec spec)
    {
        LogTau t{spec, {}};
        t.f.assign(spec.max_genus + 1, PolyT::zero(spec));
        return t;
    }

    friend bool operator==(const LogTau&, const LogTau&) = default;
};

// (O tau)/tau as a finite hbar-graded family: slot h in [-1, G-1] holds the
// coefficient of hbar^h. Slots above G-1 are incomplete at this genus
// truncation; dropping one sets the flag.
struct AppliedValue {
    TruncationSpec spec;
    std::map<int, PolyT> slots;
    bool truncated_high = false;

    bool is_zero() const
    {
        for (const auto& [h, p] : slots)
            if (!p.is_zero())
                return false;
        return true;
    }
};

// The dilaton-shift image of a q-monomial as a t-frame multiplier:
// prod (t_v - [v = unit, k = 1])^{e_v}.
PolyT q_monomial_multiplier(const TruncationSpec& spec, const Monomial& qmon);

// Computed through log-derivatives: d tau/tau = sum hbar^{g-1} dF_g and
// dd tau/tau = sum hbar^{g-1} ddF_g + (sum hbar^{g-1} dF_g)(sum hbar^{h-1} dF_h).
// Derivative monomials of size > 2 are rejected. A slot below hbar^{-1} can
// never arise for quantized quadratics and is asserted against.
AppliedValue apply_fock_operator(const FockOperator& op, const LogTau& tau);

// Largest extra degree the operator reads beyond a coefficient's own degree
// when applied to a log: 2 with second derivatives, 1 when a q-monomial
// crosses the dilaton shift, else 0. Applied values are exact on degrees
// <= max_degree - depth.
int read_depth(const FockOperator& op);

struct FlowResult {
    // Taylor coefficients in epsilon, orders 0..R.
    std::vector<LogTau> orders;
    // True when the series provably terminated (all higher orders vanish);
    // the exact endpoint at epsilon = 1 is then the sum of the orders.
    bool stabilized = false;
};

// epsilon-Taylor expansion of exp(eps O) tau on the log, to the requested
// order. The genus-0 sector is closed under the flow, so callers wanting
// only F_0 can hand in a max_genus = 0 truncation.
FlowResult flow_taylor(const FockOperator& op, const LogTau& tau, int order);

// Exact endpoint at epsilon = 1. Requires the series to terminate at this
// truncation, which it does when the q d part of the operator strictly
// raises or strictly lowers the descendent index; otherwise throws
// StabilizationError.
LogTau flow_endpoint(const FockOperator& op, const LogTau& tau);

// Conjugation flow exp(ad_O) applied to another operator, summed at its
// exact termination point: e^{O} B e^{-O}.
FockOperator conjugate_by_exp(const FockOperator& o, const FockOperator& b);

} // namespace gwfock
