#include "gwfock/quantize.hpp"

#include <algorithm>

namespace gwfock {

std::map<std::pair<VarIndex, VarIndex>, Rational> QuadHamiltonian::table(bool first_p,
                                                                         bool second_p) const
{
    std::map<std::pair<VarIndex, VarIndex>, Rational> out;
    for (const auto& [key, c] : terms_)
        if (key.first.is_p == first_p && key.second.is_p == second_p)
            out.emplace(std::pair{key.first.idx, key.second.idx}, c);
    return out;
}

std::map<std::pair<VarIndex, VarIndex>, Rational> QuadHamiltonian::pq() const
{
    std::map<std::pair<VarIndex, VarIndex>, Rational> out;
    for (const auto& [key, c] : terms_) {
        if (key.first.is_p == key.second.is_p)
            continue;
        const DarbouxVar& p = key.first.is_p ? key.first : key.second;
        const DarbouxVar& q = key.first.is_p ? key.second : key.first;
        out.emplace(std::pair{p.idx, q.idx}, c);
    }
    return out;
}

QuadHamiltonian quadratic_hamiltonian(const LoopEndo& a, const Metric& metric,
                                      const TruncationSpec& spec)
{
    const int n = spec.rank;
    if (a.rank() != n || metric.rank() != n)
        throw Error("quadratic_hamiltonian: rank mismatch");

    auto symp = is_inf_symplectic(a, metric);
    if (!symp.ok)
        throw Error("quadratic_hamiltonian: generator is not infinitesimally symplectic");

    struct DarbouxBasis {
        DarbouxVar var;
        LoopVector vec;
    };
    std::vector<DarbouxBasis> basis;
    const Window& win = a.window();
    if (!win.contains(spec.max_desc) || !win.contains(-spec.max_desc - 1))
        throw WindowError("quadratic_hamiltonian: window does not cover the Darboux range");
    for (int k = 0; k <= spec.max_desc; ++k) {
        for (int mu = 0; mu < n; ++mu) {
            basis.push_back({DarbouxVar{false, {mu, k}}, LoopVector::basis(n, win, mu, k)});
            // p^mu_k sits on the metric-dual direction times (-z)^{-k-1}.
            LoopVector pvec(n, win);
            VecQ dual = metric.g_inv.col(mu);
            if (k % 2 == 0)
                dual = -dual;
            pvec.add(-k - 1, dual);
            basis.push_back({DarbouxVar{true, {mu, k}}, std::move(pvec)});
        }
    }

    std::vector<LoopVector> images;
    images.reserve(basis.size());
    for (const auto& db : basis) {
        auto [img, exact] = a.apply(db.vec);
        if (!exact)
            throw WindowError("quadratic_hamiltonian: window loss over the Darboux range");
        images.push_back(std::move(img));
    }

    QuadHamiltonian ham(spec);
    for (std::size_t x = 0; x < basis.size(); ++x) {
        Rational diag = omega(images[x], basis[x].vec, metric) / 2;
        ham.add_term(basis[x].var, basis[x].var, diag);
        for (std::size_t y = x + 1; y < basis.size(); ++y) {
            Rational c =
                (omega(images[x], basis[y].vec, metric) + omega(images[y], basis[x].vec, metric)) / 2;
            ham.add_term(basis[x].var, basis[y].var, c);
        }
    }
    return ham;
}

namespace {

using LinearForm = std::map<DarbouxVar, Rational>;

// d/dx of the quadratic form, as a linear form.
LinearForm derivative(const QuadHamiltonian& p, const DarbouxVar& x)
{
    LinearForm out;
    for (const auto& [key, c] : p.terms()) {
        if (key.first == x) {
            out[key.second] += c;
        }
        if (key.second == x) {
            out[key.first] += c;
        }
    }
    for (auto it = out.begin(); it != out.end();) {
        if (it->second == 0)
            it = out.erase(it);
        else
            ++it;
    }
    return out;
}

} // namespace

QuadHamiltonian poisson_bracket(const QuadHamiltonian& p1, const QuadHamiltonian& p2)
{
    require_same_spec(p1.spec(), p2.spec());
    const TruncationSpec& spec = p1.spec();
    QuadHamiltonian out(spec);
    auto accumulate_product = [&](const LinearForm& a, const LinearForm& b, int sign) {
        for (const auto& [u, cu] : a)
            for (const auto& [v, cv] : b)
                out.add_term(u, v, sign * cu * cv);
    };
    for (int mu = 0; mu < spec.rank; ++mu) {
        for (int k = 0; k <= spec.max_desc; ++k) {
            DarbouxVar p{true, {mu, k}};
            DarbouxVar q{false, {mu, k}};
            LinearForm dp1 = derivative(p1, p);
            LinearForm dq1 = derivative(p1, q);
            LinearForm dp2 = derivative(p2, p);
            LinearForm dq2 = derivative(p2, q);
            accumulate_product(dp1, dq2, 1);
            accumulate_product(dp2, dq1, -1);
        }
    }
    return out;
}

Rational cocycle(const QuadHamiltonian& p1, const QuadHamiltonian& p2)
{
    require_same_spec(p1.spec(), p2.spec());
    Rational acc(0);
    for (const auto& [key, c1] : p1.terms()) {
        const auto& [x, y] = key;
        if (x.is_p != y.is_p)
            continue;
        Rational weight = (x.idx == y.idx) ? Rational(2) : Rational(1);
        if (x.is_p) {
            Rational c2 = p2.coefficient(DarbouxVar{false, x.idx}, DarbouxVar{false, y.idx});
            acc += c1 * c2 * weight;
        } else {
            Rational c2 = p2.coefficient(DarbouxVar{true, x.idx}, DarbouxVar{true, y.idx});
            acc -= c1 * c2 * weight;
        }
    }
    return acc;
}

FockOperator weyl_quantize(const QuadHamiltonian& p)
{
    FockOperator op(p.spec());
    for (const auto& [key, c] : p.terms()) {
        const auto& [x, y] = key;
        Monomial mx = Monomial::variable(x.idx);
        Monomial my = Monomial::variable(y.idx);
        if (x.is_p && y.is_p)
            op.add_term(1, Monomial{}, mx.times(my), c);
        else if (!x.is_p && !y.is_p)
            op.add_term(-1, mx.times(my), Monomial{}, c);
        else if (x.is_p)
            op.add_term(0, my, mx, c); // q factor left of the derivative
        else
            op.add_term(0, mx, my, c);
    }
    return op;
}

namespace {

Rational falling_factorial(int b, int j)
{
    Rational acc(1);
    for (int i = 0; i < j; ++i)
        acc *= b - i;
    return acc;
}

Monomial remove_powers(const Monomial& m, VarIndex v, int count)
{
    Monomial out = m;
    for (int i = 0; i < count; ++i)
        out = *out.divided_by(v);
    return out;
}

} // namespace

FockOperator compose(const FockOperator& a, const FockOperator& b)
{
    require_same_spec(a.spec(), b.spec());
    FockOperator out(a.spec());
    for (const auto& [ka, ca] : a.terms()) {
        for (const auto& [kb, cb] : b.terms()) {
            // Normal order d^{d1} q^{q2} via per-variable contractions:
            // d_x^a q_x^b = sum_j C(a,j) (b)_j q_x^{b-j} d_x^{a-j}.
            std::vector<std::tuple<VarIndex, int, int>> overlap; // var, a_v, b_v
            for (const auto& [v, av] : ka.dmon.factors()) {
                int bv = kb.qmon.exponent(v);
                if (bv > 0)
                    overlap.push_back({v, av, bv});
            }
            std::vector<int> js(overlap.size(), 0);
            while (true) {
                Rational factor = ca * cb;
                Monomial dred = ka.dmon;
                Monomial qred = kb.qmon;
                for (std::size_t i = 0; i < overlap.size(); ++i) {
                    const auto& [v, av, bv] = overlap[i];
                    int j = js[i];
                    factor *= binomial(av, j) * falling_factorial(bv, j);
                    dred = remove_powers(dred, v, j);
                    qred = remove_powers(qred, v, j);
                }
                if (factor != 0)
                    out.add_term(ka.hbar + kb.hbar, ka.qmon.times(qred), dred.times(kb.dmon),
                                 factor);
                // Odometer over contraction counts.
                std::size_t pos = 0;
                for (; pos < overlap.size(); ++pos) {
                    const auto& [v, av, bv] = overlap[pos];
                    if (js[pos] < std::min(av, bv)) {
                        ++js[pos];
                        std::fill(js.begin(), js.begin() + pos, 0);
                        break;
                    }
                }
                if (pos == overlap.size())
                    break;
            }
        }
    }
    return out;
}

void require_quantized_quadratic(const FockOperator& op, const char* who)
{
    for (const auto& [key, c] : op.terms()) {
        int q = key.qmon.degree();
        int d = key.dmon.degree();
        bool ok = (key.hbar == 1 && q == 0 && d == 2) || (key.hbar == 0 && q == 1 && d == 1) ||
                  (key.hbar == -1 && q == 2 && d == 0) || (key.hbar == 0 && q == 0 && d == 0);
        if (!ok)
            throw Error(std::string(who) + ": operator is not of quantized-quadratic shape");
    }
}

FockOperator operator_commutator(const FockOperator& a, const FockOperator& b)
{
    require_quantized_quadratic(a, "operator_commutator");
    require_quantized_quadratic(b, "operator_commutator");
    return compose(a, b) - compose(b, a);
}

PolyT q_monomial_multiplier(const TruncationSpec& spec, const Monomial& qmon)
{
    PolyT acc = PolyT::constant(spec, Rational(1));
    for (const auto& [v, e] : qmon.factors()) {
        PolyT factor = PolyT::variable(spec, v);
        if (v.mu == 0 && v.k == 1)
            factor += PolyT::constant(spec, Rational(-1));
        for (int i = 0; i < e; ++i)
            acc = acc * factor;
    }
    return acc;
}

int read_depth(const FockOperator& op)
{
    int depth = 0;
    for (const auto& [key, c] : op.terms()) {
        if (key.dmon.degree() >= 2)
            depth = std::max(depth, 2);
        else if (key.dmon.degree() == 1 && key.qmon.exponent(VarIndex{0, 1}) > 0)
            depth = std::max(depth, 1);
    }
    return depth;
}

namespace {

using SlotMap = std::map<int, PolyT>;

void add_slot(SlotMap& slots, int h, const PolyT& p)
{
    if (p.is_zero())
        return;
    auto it = slots.find(h);
    if (it == slots.end())
        slots.emplace(h, p);
    else
        it->second += p;
}

// Contributions independent of and linear in the log. dmon sizes 0, 1, 2.
void accumulate_const_and_linear(const FockOperator& op, const LogTau& tau, SlotMap& slots)
{
    const TruncationSpec& spec = tau.spec;
    for (const auto& [key, c] : op.terms()) {
        int d = key.dmon.degree();
        PolyT mult = q_monomial_multiplier(spec, key.qmon);
        if (d == 0) {
            mult.scale(c);
            add_slot(slots, key.hbar, mult);
        } else if (d == 1) {
            VarIndex x = key.dmon.factors()[0].first;
            for (int g = 0; g <= spec.max_genus; ++g) {
                PolyT term = mult * diff(tau.f[g], x);
                term.scale(c);
                add_slot(slots, key.hbar + g - 1, term);
            }
        } else if (d == 2) {
            auto vars = key.dmon.factors();
            VarIndex x = vars[0].first;
            VarIndex y = vars.size() == 2 ? vars[1].first : vars[0].first;
            for (int g = 0; g <= spec.max_genus; ++g) {
                PolyT term = mult * diff(diff(tau.f[g], x), y);
                term.scale(c);
                add_slot(slots, key.hbar + g - 1, term);
            }
        } else {
            throw Error("apply_fock_operator: derivative order beyond 2 unsupported");
        }
    }
}

// The (dA)(dB) part of second derivatives, bilinear in the two logs.
void accumulate_bilinear(const FockOperator& op, const LogTau& ta, const LogTau& tb,
                         SlotMap& slots)
{
    const TruncationSpec& spec = ta.spec;
    for (const auto& [key, c] : op.terms()) {
        if (key.dmon.degree() != 2)
            continue;
        auto vars = key.dmon.factors();
        VarIndex x = vars[0].first;
        VarIndex y = vars.size() == 2 ? vars[1].first : vars[0].first;
        PolyT mult = q_monomial_multiplier(spec, key.qmon);
        for (int g = 0; g <= spec.max_genus; ++g) {
            PolyT dxa = diff(ta.f[g], x);
            if (dxa.is_zero())
                continue;
            for (int h = 0; h <= spec.max_genus; ++h) {
                PolyT dyb = diff(tb.f[h], y);
                if (dyb.is_zero())
                    continue;
                PolyT term = mult * (dxa * dyb);
                term.scale(c);
                add_slot(slots, key.hbar + g + h - 2, term);
            }
        }
    }
}

// Clamp raw slots to [-1, G-1]; anything below -1 is a grading violation.
AppliedValue finish_slots(SlotMap&& slots, const TruncationSpec& spec)
{
    AppliedValue out{spec, {}, false};
    for (auto& [h, p] : slots) {
        if (p.is_zero())
            continue;
        if (h < -1)
            throw Error("hbar grading violated: slot below hbar^-1");
        if (h > spec.max_genus - 1) {
            out.truncated_high = true;
            continue;
        }
        out.slots.emplace(h, std::move(p));
    }
    return out;
}

} // namespace

AppliedValue apply_fock_operator(const FockOperator& op, const LogTau& tau)
{
    require_same_spec(op.spec(), tau.spec);
    SlotMap slots;
    accumulate_const_and_linear(op, tau, slots);
    accumulate_bilinear(op, tau, tau, slots);
    return finish_slots(std::move(slots), tau.spec);
}

namespace {

LogTau slots_to_logtau(const AppliedValue& value)
{
    LogTau out = LogTau::zero(value.spec);
    for (const auto& [h, p] : value.slots)
        out.f[h + 1] = p;
    return out;
}

bool logtau_is_zero(const LogTau& t)
{
    for (const auto& p : t.f)
        if (!p.is_zero())
            return false;
    return true;
}

LogTau scale_logtau(LogTau t, const Rational& c)
{
    for (auto& p : t.f)
        p.scale(c);
    return t;
}

int flow_order_cap(const TruncationSpec& spec)
{
    return 2 * (spec.max_degree + 1) * (spec.max_desc + 2) + 2 * spec.flow_order + 16;
}

// Derivative-only terms vanish on higher orders automatically; the constant
// part enters only at order 0 of N(L).
LogTau flow_rhs(const FockOperator& op, const std::vector<LogTau>& orders, int r)
{
    const TruncationSpec& spec = orders[0].spec;
    SlotMap slots;
    if (r == 0) {
        // Constant part: dmon-free terms.
        for (const auto& [key, c] : op.terms())
            if (key.dmon.degree() == 0) {
                PolyT mult = q_monomial_multiplier(spec, key.qmon);
                mult.scale(c);
                add_slot(slots, key.hbar, mult);
            }
    }
    // Linear part applied to L_r (derivative terms only).
    FockOperator deriv_only(spec);
    for (const auto& [key, c] : op.terms())
        if (key.dmon.degree() > 0)
            deriv_only.add_term(key.hbar, key.qmon, key.dmon, c);
    if (!logtau_is_zero(orders[r]))
        accumulate_const_and_linear(deriv_only, orders[r], slots);
    for (int a = 0; a <= r; ++a) {
        int b = r - a;
        if (logtau_is_zero(orders[a]) || logtau_is_zero(orders[b]))
            continue;
        accumulate_bilinear(op, orders[a], orders[b], slots);
    }
    return slots_to_logtau(finish_slots(std::move(slots), spec));
}

} // namespace

FlowResult flow_taylor(const FockOperator& op, const LogTau& tau, int order)
{
    require_same_spec(op.spec(), tau.spec);
    if (order < 0 || order > tau.spec.flow_order)
        throw Error("flow_taylor: order outside [0, flow_order]");
    FlowResult out;
    out.orders.push_back(tau);
    int last_nonzero = 0;
    for (int r = 0; r < order; ++r) {
        LogTau next = scale_logtau(flow_rhs(op, out.orders, r), Rational(1, r + 1));
        if (!logtau_is_zero(next))
            last_nonzero = r + 1;
        out.orders.push_back(std::move(next));
    }
    out.stabilized = order >= 2 * last_nonzero + 1;
    return out;
}

namespace {

// Stabilization precondition: the q d part must shift the descendent index
// strictly one way, and hbar-lowering (qq) and hbar-raising (dd) sources
// must not both be present.
void require_nilpotent_shape(const FockOperator& op)
{
    bool has_dd = false, has_qq = false, raises = false, lowers = false, diagonal = false;
    for (const auto& [key, c] : op.terms()) {
        int q = key.qmon.degree();
        int d = key.dmon.degree();
        if (d == 2)
            has_dd = true;
        else if (q == 2 && d == 0)
            has_qq = true;
        else if (q == 1 && d == 1) {
            int shift = key.qmon.factors()[0].first.k - key.dmon.factors()[0].first.k;
            if (shift > 0)
                raises = true;
            else if (shift < 0)
                lowers = true;
            else
                diagonal = true;
        }
    }
    bool ok = !diagonal && !(raises && lowers) && !(has_dd && has_qq) &&
              !(raises && has_dd) && !(lowers && has_qq);
    if (!ok)
        throw StabilizationError("flow generator not nilpotent at this truncation");
}

} // namespace

LogTau flow_endpoint(const FockOperator& op, const LogTau& tau)
{
    require_same_spec(op.spec(), tau.spec);
    require_nilpotent_shape(op);
    std::vector<LogTau> orders{tau};
    int last_nonzero = 0;
    const int cap = flow_order_cap(tau.spec);
    for (int r = 0;; ++r) {
        if (r > 0 && r >= 2 * last_nonzero + 1)
            break;
        if (r >= cap)
            throw StabilizationError("flow failed to stabilize within the order cap");
        LogTau next = scale_logtau(flow_rhs(op, orders, r), Rational(1, r + 1));
        if (!logtau_is_zero(next))
            last_nonzero = r + 1;
        orders.push_back(std::move(next));
    }
    LogTau acc = LogTau::zero(tau.spec);
    for (const auto& o : orders)
        for (int g = 0; g <= tau.spec.max_genus; ++g)
            acc.f[g] += o.f[g];
    return acc;
}

FockOperator conjugate_by_exp(const FockOperator& o, const FockOperator& b)
{
    require_same_spec(o.spec(), b.spec());
    FockOperator acc = b;
    FockOperator current = b;
    const int cap = flow_order_cap(o.spec());
    for (int r = 1; !current.is_zero(); ++r) {
        if (r >= cap)
            throw StabilizationError("operator conjugation failed to stabilize");
        current = operator_commutator(o, current);
        current.scale(Rational(1, r));
        acc += current;
    }
    return acc;
}

} // namespace gwfock
