#pragma once

#include "gwfock/monomial.hpp"
#include "gwfock/rational.hpp"
#include "gwfock/truncation.hpp"

#include <map>
#include <vector>

namespace gwfock {

// Variable frames. Potentials live in the t-frame; the symplectic loop space
// sees the q-frame. The two differ by the dilaton shift t^mu_k = q^mu_k +
// delta^{mu,unit} delta_{k,1}, and that shift is the only bridge: mixing
// frames is a type error.
struct TVars {
    static constexpr char letter = 't';
};
struct QVars {
    static constexpr char letter = 'q';
};

// Sparse truncated polynomial over Q in the descendent variables of one
// frame. Terms above max_degree are cut eagerly; zero coefficients are never
// stored. Immutable in spirit: all operations return new values.
template <class Frame>
class Poly {
public:
    using TermMap = std::map<Monomial, Rational>;

    explicit Poly(TruncationSpec spec) : spec_(spec) { spec_.validate(); }

    static Poly zero(TruncationSpec spec) { return Poly(spec); }

    static Poly constant(TruncationSpec spec, Rational c)
    {
        Poly p(spec);
        p.add_term(Monomial{}, c);
        return p;
    }

    static Poly variable(TruncationSpec spec, VarIndex v)
    {
        require_in_spec(v, spec);
        Poly p(spec);
        p.add_term(Monomial::variable(v), Rational(1));
        return p;
    }

    const TruncationSpec& spec() const { return spec_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    // Adds c * m, truncating degrees above the cutoff and validating indices.
    void add_term(const Monomial& m, const Rational& c)
    {
        if (c == 0 || m.degree() > spec_.max_degree)
            return;
        for (const auto& [v, e] : m.factors())
            require_in_spec(v, spec_);
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0)
                terms_.erase(it);
        }
    }

    Rational coefficient(const Monomial& m) const
    {
        auto it = terms_.find(m);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    Poly& operator+=(const Poly& other)
    {
        require_same_spec(spec_, other.spec_);
        for (const auto& [m, c] : other.terms_)
            add_term(m, c);
        return *this;
    }

    Poly& operator-=(const Poly& other)
    {
        require_same_spec(spec_, other.spec_);
        for (const auto& [m, c] : other.terms_)
            add_term(m, -c);
        return *this;
    }

    Poly& scale(const Rational& c)
    {
        if (c == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& [m, v] : terms_)
            v *= c;
        return *this;
    }

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }

    friend Poly operator*(const Poly& a, const Poly& b)
    {
        require_same_spec(a.spec_, b.spec_);
        Poly out(a.spec_);
        // Terms sorted by degree: once a degree pairing overflows the cutoff,
        // every later b-term does too.
        for (const auto& [ma, ca] : a.terms_) {
            for (const auto& [mb, cb] : b.terms_) {
                if (ma.degree() + mb.degree() > a.spec_.max_degree)
                    break;
                out.add_term(ma.times(mb), ca * cb);
            }
        }
        return out;
    }

    friend Poly operator*(const Rational& c, Poly p) { return p.scale(c); }
    friend Poly operator-(Poly p) { return p.scale(Rational(-1)); }

    friend bool operator==(const Poly& a, const Poly& b)
    {
        return a.spec_ == b.spec_ && a.terms_ == b.terms_;
    }

private:
    TruncationSpec spec_;
    TermMap terms_;
};

using PolyT = Poly<TVars>;
using PolyQ = Poly<QVars>;

// Exact formal partial derivative.
template <class Frame>
Poly<Frame> diff(const Poly<Frame>& p, VarIndex v)
{
    require_in_spec(v, p.spec());
    Poly<Frame> out(p.spec());
    for (const auto& [m, c] : p.terms()) {
        int e = m.exponent(v);
        if (e > 0)
            out.add_term(*m.divided_by(v), c * e);
    }
    return out;
}

// Multiplication by a single variable (cheaper than a full product).
template <class Frame>
Poly<Frame> times_variable(const Poly<Frame>& p, VarIndex v)
{
    require_in_spec(v, p.spec());
    Poly<Frame> out(p.spec());
    for (const auto& [m, c] : p.terms())
        out.add_term(m.times(v), c);
    return out;
}

namespace detail {

// Substitutes shift_var -> shift_var + delta, re-truncating. Shared by both
// dilaton shift directions.
template <class FromFrame, class ToFrame>
Poly<ToFrame> shift_unit_variable(const Poly<FromFrame>& p, const Rational& delta)
{
    if (p.spec().max_desc < 1)
        throw Error("dilaton shift needs max_desc >= 1: shift variable absent");
    const VarIndex shift_var{0, 1};
    Poly<ToFrame> out(p.spec());
    for (const auto& [m, c] : p.terms()) {
        int e = m.exponent(shift_var);
        if (e == 0) {
            out.add_term(m, c);
            continue;
        }
        Monomial rest = m;
        for (int i = 0; i < e; ++i)
            rest = *rest.divided_by(shift_var);
        // (x + delta)^e expanded exactly.
        Rational dpow(1);
        for (int i = e; i >= 0; --i) {
            Monomial mi = rest;
            for (int j = 0; j < i; ++j)
                mi = mi.times(shift_var);
            out.add_term(mi, c * binomial(e, i) * dpow);
            dpow *= delta;
        }
    }
    return out;
}

} // namespace detail

// t^unit_1 = q^unit_1 + 1: rewriting a t-frame polynomial in q-variables
// substitutes t^unit_1 -> q^unit_1 + 1.
inline PolyQ dilaton_shift_to_q(const PolyT& p)
{
    return detail::shift_unit_variable<TVars, QVars>(p, Rational(1));
}

inline PolyT dilaton_shift_to_t(const PolyQ& p)
{
    return detail::shift_unit_variable<QVars, TVars>(p, Rational(-1));
}

// Rebuilds a polynomial under another truncation spec; every stored term
// must fit the new bounds.
template <class Frame>
Poly<Frame> respec(const Poly<Frame>& p, const TruncationSpec& spec)
{
    Poly<Frame> out(spec);
    for (const auto& [m, c] : p.terms()) {
        if (m.degree() > spec.max_degree)
            throw Error("respec: stored degree exceeds the new cutoff");
        out.add_term(m, c);
    }
    return out;
}

// Evaluates at the small phase space point t^mu_0 = values[mu], t^mu_k = 0
// for k >= 1.
template <class Frame>
Rational evaluate_small_phase(const Poly<Frame>& p, const std::vector<Rational>& values)
{
    if (static_cast<int>(values.size()) != p.spec().rank)
        throw Error("evaluate_small_phase: wrong number of base point values");
    Rational acc(0);
    for (const auto& [m, c] : p.terms()) {
        Rational term = c;
        bool vanish = false;
        for (const auto& [v, e] : m.factors()) {
            if (v.k >= 1) {
                vanish = true;
                break;
            }
            for (int i = 0; i < e && !vanish; ++i) {
                term *= values[v.mu];
                if (term == 0)
                    vanish = true;
            }
        }
        if (!vanish)
            acc += term;
    }
    return acc;
}

} // namespace gwfock
