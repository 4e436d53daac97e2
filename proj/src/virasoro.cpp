#include "gwfock/virasoro.hpp"

#include <algorithm>
#include <functional>

namespace gwfock {

namespace {

FockOperator build_naive(int m, const TruncationSpec& spec)
{
    const int pad = std::abs(m) + 1;
    Window win{-(spec.max_desc + 1) - pad, spec.max_desc + pad};
    LoopEndo gen = virasoro_generator(m, spec.rank, win);
    return weyl_quantize(quadratic_hamiltonian(gen, Metric::identity(spec.rank), spec));
}

} // namespace

Rational virasoro_central_constant(const TruncationSpec& spec)
{
    // [L_1, L_-1] = 2 L_0 + C with C a scalar; the honest family absorbs
    // C/2 into L_0. The constant term of a normal-ordered commutator is
    // exact at any index truncation.
    FockOperator comm = operator_commutator(build_naive(1, spec), build_naive(-1, spec));
    FockOperator two_l0 = build_naive(0, spec);
    two_l0.scale(Rational(2));
    return (comm - two_l0).constant_term() / 2;
}

FockOperator build_point_virasoro(int m, const TruncationSpec& spec)
{
    if (m < -1)
        throw Error("build_point_virasoro: m must be >= -1");
    FockOperator op = build_naive(m, spec);
    if (m == 0)
        op += FockOperator::constant(spec, virasoro_central_constant(spec));
    return op;
}

VirasoroFamily build_point_virasoro_family(const TruncationSpec& spec, int mmax)
{
    VirasoroFamily family;
    family.spec = spec;
    family.mmax = mmax;
    family.central = virasoro_central_constant(spec);
    for (int m = -1; m <= mmax; ++m) {
        FockOperator op = build_naive(m, spec);
        if (m == 0)
            op += FockOperator::constant(spec, family.central);
        family.ops.emplace(m, std::move(op));
    }
    return family;
}

RelationReport check_virasoro_relations(const VirasoroFamily& family, int m, int n)
{
    RelationReport rep;
    const FockOperator& lm = family.op(m);
    const FockOperator& ln = family.op(n);
    const FockOperator& lmn = family.op(m + n);

    int reach = std::max({m, n, m + n, 0});
    rep.safe_index = family.spec.max_desc - family.safe_index_loss - reach;
    if (rep.safe_index < 0)
        return rep;

    FockOperator rhs = lmn;
    rhs.scale(Rational(m - n));
    FockOperator disc = operator_commutator(lm, ln) - rhs;
    for (const auto& [key, c] : disc.terms()) {
        int top = std::max(key.qmon.max_desc_index(), key.dmon.max_desc_index());
        if (top <= rep.safe_index)
            rep.discrepancy.push_back({key, c});
    }
    rep.status = rep.discrepancy.empty() ? CheckStatus::pass : CheckStatus::fail;
    return rep;
}

namespace {

void enumerate_safe_monomials(const TruncationSpec& spec, int safe_index, int safe_degree,
                              const std::function<void(const Monomial&)>& visit)
{
    std::vector<VarIndex> vars;
    for (int mu = 0; mu < spec.rank; ++mu)
        for (int k = 0; k <= safe_index; ++k)
            vars.push_back({mu, k});
    std::vector<Monomial::Factor> current;
    // Multisets over vars with total degree <= safe_degree.
    auto rec = [&](auto&& self, std::size_t from, int room) -> void {
        visit(Monomial::from_factors(current));
        if (room == 0)
            return;
        for (std::size_t i = from; i < vars.size(); ++i) {
            current.push_back({vars[i], 1});
            self(self, i, room - 1);
            current.pop_back();
        }
    };
    rec(rec, 0, safe_degree);
}

} // namespace

AnnihilationReport check_annihilation(const VirasoroFamily& family, int m, const LogTau& tau)
{
    AnnihilationReport rep;
    const FockOperator& op = family.op(m);
    require_same_spec(family.spec, tau.spec);

    rep.safe_index = family.spec.max_desc - family.safe_index_loss - std::max(m, 0);
    rep.safe_degree = family.spec.max_degree - read_depth(op);
    if (rep.safe_index < 0 || rep.safe_degree < 0)
        return rep;

    AppliedValue value = apply_fock_operator(op, tau);
    // Every coefficient over the safe lattice, slot by slot. Coefficients
    // outside it are truncation residue, not evidence either way.
    for (const auto& [slot, poly] : value.slots) {
        enumerate_safe_monomials(tau.spec, rep.safe_index, rep.safe_degree,
                                 [&](const Monomial& mono) {
                                     ++rep.checked;
                                     Rational c = poly.coefficient(mono);
                                     if (c != 0)
                                         rep.witnesses.push_back({slot, mono, c});
                                 });
    }
    rep.status = rep.witnesses.empty() ? CheckStatus::pass : CheckStatus::fail;
    return rep;
}

VirasoroFamily conjugated_virasoro(const VirasoroFamily& family, const SRData& sr,
                                   const Metric& metric)
{
    validate_sr(sr, metric);
    FockOperator r_hat = quantize_jet_generator(sr.r, metric, family.spec);
    FockOperator s_hat = quantize_jet_generator(sr.s, metric, family.spec);

    auto generator_reach = [](const FockOperator& op) {
        int reach = 0;
        for (const auto& [key, c] : op.terms()) {
            if (key.qmon.degree() == 1 && key.dmon.degree() == 1) {
                int shift = key.qmon.factors()[0].first.k - key.dmon.factors()[0].first.k;
                reach = std::max(reach, std::abs(shift));
            } else {
                reach = std::max({reach, key.qmon.max_desc_index() + 1,
                                  key.dmon.max_desc_index() + 1});
            }
        }
        return reach;
    };

    VirasoroFamily out;
    out.spec = family.spec;
    out.mmax = family.mmax;
    out.central = family.central;
    out.provenance = "conjugated(" + family.provenance + ")";
    int worst_orders_r = 0, worst_orders_s = 0;
    const int cap = 4 * (family.spec.max_desc + 2) * (family.spec.max_desc + 2) + 32;
    auto adjoint_flow = [&](const FockOperator& gen, FockOperator x, int& worst) {
        FockOperator acc = x;
        int orders = 0;
        for (int r = 1; !x.is_zero(); ++r) {
            if (r >= cap)
                throw StabilizationError("virasoro conjugation failed to stabilize");
            x = operator_commutator(gen, x);
            x.scale(Rational(1, r));
            acc += x;
            if (!x.is_zero())
                orders = r;
        }
        worst = std::max(worst, orders);
        return acc;
    };
    for (const auto& [m, op] : family.ops) {
        FockOperator inner = adjoint_flow(r_hat, op, worst_orders_r);
        out.ops.emplace(m, adjoint_flow(s_hat, inner, worst_orders_s));
    }
    out.safe_index_loss = family.safe_index_loss + generator_reach(r_hat) * worst_orders_r +
                          generator_reach(s_hat) * worst_orders_s;
    return out;
}

} // namespace gwfock
