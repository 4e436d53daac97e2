#include "gwfock/axioms.hpp"

#include <algorithm>
#include <set>

namespace gwfock {

const char* to_string(AxiomId id)
{
    switch (id) {
    case AxiomId::dilaton: return "dilaton";
    case AxiomId::string: return "string";
    case AxiomId::trr: return "trr";
    }
    return "?";
}

const char* to_string(AxiomStatus s)
{
    switch (s) {
    case AxiomStatus::pass: return "pass";
    case AxiomStatus::fail: return "fail";
    case AxiomStatus::undecidable: return "undecidable";
    }
    return "?";
}

namespace {

// Coefficientwise comparison of lhs and rhs over every monomial of degree
// <= degree_bound appearing on either side.
void compare_into(const PolyT& lhs, const PolyT& rhs, int degree_bound, const std::string& where,
                  AxiomReport& rep)
{
    std::set<Monomial> support;
    for (const auto& [m, c] : lhs.terms())
        if (m.degree() <= degree_bound)
            support.insert(m);
    for (const auto& [m, c] : rhs.terms())
        if (m.degree() <= degree_bound)
            support.insert(m);
    for (const auto& m : support) {
        Rational l = lhs.coefficient(m);
        Rational r = rhs.coefficient(m);
        ++rep.compared;
        if (l != r)
            rep.witnesses.push_back({where, m, l, r});
    }
}

void finish(AxiomReport& rep)
{
    if (!rep.witnesses.empty())
        rep.status = AxiomStatus::fail;
    else
        rep.status = AxiomStatus::pass;
}

} // namespace

AxiomReport check_dilaton(const PolyT& g0, const Metric& metric)
{
    AxiomReport rep;
    rep.id = AxiomId::dilaton;
    const TruncationSpec& spec = g0.spec();
    if (spec.max_desc < 1)
        return rep; // t^unit_1 absent: undecidable at this truncation
    PolyT lhs = diff(g0, VarIndex{metric.unit_index, 1});
    // sum t^mu_k d/dt^mu_k is the degree operator.
    PolyT rhs(spec);
    for (const auto& [m, c] : g0.terms())
        rhs.add_term(m, c * (m.degree() - 2));
    compare_into(lhs, rhs, spec.max_degree - 1, "", rep);
    finish(rep);
    return rep;
}

AxiomReport check_string(const PolyT& g0, const Metric& metric)
{
    AxiomReport rep;
    rep.id = AxiomId::string;
    const TruncationSpec& spec = g0.spec();
    PolyT lhs = diff(g0, VarIndex{metric.unit_index, 0});
    PolyT rhs(spec);
    for (int mu = 0; mu < spec.rank; ++mu)
        for (int nu = 0; nu < spec.rank; ++nu) {
            Monomial m =
                Monomial::variable(VarIndex{mu, 0}).times(Monomial::variable(VarIndex{nu, 0}));
            rhs.add_term(m, metric.g(mu, nu) / 2);
        }
    for (int k = 0; k + 1 <= spec.max_desc; ++k)
        for (int nu = 0; nu < spec.rank; ++nu)
            rhs += times_variable(diff(g0, VarIndex{nu, k}), VarIndex{nu, k + 1});
    compare_into(lhs, rhs, spec.max_degree - 1, "", rep);
    finish(rep);
    return rep;
}

AxiomReport check_trr(const PolyT& g0, const Metric& metric)
{
    AxiomReport rep;
    rep.id = AxiomId::trr;
    const TruncationSpec& spec = g0.spec();
    const int n = spec.rank;
    const int kmax = spec.max_desc;
    const int bound = spec.max_degree - 3;
    if (bound < 0 || kmax < 1)
        return rep; // no tuple is decidable at this truncation

    std::vector<PolyT> d1;
    d1.reserve(n * (kmax + 1));
    for (int mu = 0; mu < n; ++mu)
        for (int k = 0; k <= kmax; ++k)
            d1.push_back(diff(g0, VarIndex{mu, k}));
    auto first = [&](VarIndex v) -> const PolyT& { return d1[v.mu * (kmax + 1) + v.k]; };

    // d^3 G0 / dt^nu_0 dt^beta_l dt^gamma_m, keyed by (nu, (beta,l) <= (gamma,m)).
    std::map<std::tuple<int, VarIndex, VarIndex>, PolyT> d3;
    auto third = [&](int nu, VarIndex b, VarIndex c) -> const PolyT& {
        if (c < b)
            std::swap(b, c);
        auto key = std::make_tuple(nu, b, c);
        auto it = d3.find(key);
        if (it == d3.end())
            it = d3.emplace(key, diff(diff(first(VarIndex{nu, 0}), b), c)).first;
        return it->second;
    };

    for (int alpha = 0; alpha < n; ++alpha) {
        for (int k = 0; k + 1 <= kmax; ++k) {
            for (int bi = 0; bi < n * (kmax + 1); ++bi) {
                VarIndex vb{bi / (kmax + 1), bi % (kmax + 1)};
                for (int ci = bi; ci < n * (kmax + 1); ++ci) {
                    VarIndex vc{ci / (kmax + 1), ci % (kmax + 1)};
                    PolyT lhs = diff(diff(first(VarIndex{alpha, k + 1}), vb), vc);
                    PolyT rhs(spec);
                    for (int mu = 0; mu < n; ++mu) {
                        PolyT dd = diff(first(VarIndex{alpha, k}), VarIndex{mu, 0});
                        if (dd.is_zero())
                            continue;
                        for (int nu = 0; nu < n; ++nu) {
                            if (metric.g_inv(mu, nu) == 0)
                                continue;
                            PolyT term = dd * third(nu, vb, vc);
                            term.scale(metric.g_inv(mu, nu));
                            rhs += term;
                        }
                    }
                    std::string where = "alpha=" + std::to_string(alpha) + ",k+1=" +
                                        std::to_string(k + 1) + ";beta=" + std::to_string(vb.mu) +
                                        ",l=" + std::to_string(vb.k) + ";gamma=" +
                                        std::to_string(vc.mu) + ",m=" + std::to_string(vc.k);
                    compare_into(lhs, rhs, bound, where, rep);
                }
            }
        }
    }
    finish(rep);
    return rep;
}

std::vector<AxiomReport> check_axioms(const PolyT& g0, const Metric& metric)
{
    return {check_dilaton(g0, metric), check_string(g0, metric), check_trr(g0, metric)};
}

std::vector<PolyT> frobenius_coordinates(const PolyT& g0, const Metric& metric)
{
    std::vector<PolyT> out;
    PolyT base = diff(g0, VarIndex{metric.unit_index, 0});
    for (int mu = 0; mu < g0.spec().rank; ++mu)
        out.push_back(diff(base, VarIndex{mu, 0}));
    return out;
}

MatQ QuantumProduct::multiplication_matrix(const std::vector<Rational>& probe) const
{
    if (static_cast<int>(probe.size()) != rank)
        throw Error("quantum product: probe has wrong length");
    MatQ m = MatQ::Zero(rank, rank);
    for (int gamma = 0; gamma < rank; ++gamma)
        for (int beta = 0; beta < rank; ++beta)
            for (int alpha = 0; alpha < rank; ++alpha)
                m(gamma, beta) += probe[alpha] * structure[gamma](alpha, beta);
    return m;
}

QuantumProduct quantum_product(const PolyT& g0, const Metric& metric,
                               const std::vector<Rational>& base_point)
{
    const TruncationSpec& spec = g0.spec();
    const int n = spec.rank;
    if (static_cast<int>(base_point.size()) != n)
        throw Error("quantum product: base point has wrong length");
    QuantumProduct qp;
    qp.rank = n;
    qp.base_point = base_point;

    // Lower tensor A_{alpha beta gamma} evaluated at the base point.
    std::vector<MatQ> lower(n, MatQ::Zero(n, n));
    for (int alpha = 0; alpha < n; ++alpha) {
        PolyT da = diff(g0, VarIndex{alpha, 0});
        for (int beta = alpha; beta < n; ++beta) {
            PolyT dab = diff(da, VarIndex{beta, 0});
            for (int gamma = beta; gamma < n; ++gamma) {
                Rational v =
                    evaluate_small_phase(diff(dab, VarIndex{gamma, 0}), base_point);
                lower[alpha](beta, gamma) = v;
                lower[alpha](gamma, beta) = v;
                lower[beta](alpha, gamma) = v;
                lower[beta](gamma, alpha) = v;
                lower[gamma](alpha, beta) = v;
                lower[gamma](beta, alpha) = v;
            }
        }
    }

    qp.structure.assign(n, MatQ::Zero(n, n));
    for (int gamma = 0; gamma < n; ++gamma)
        for (int alpha = 0; alpha < n; ++alpha)
            for (int beta = 0; beta < n; ++beta) {
                Rational acc(0);
                for (int mu = 0; mu < n; ++mu)
                    acc += lower[alpha](beta, mu) * metric.g_inv(mu, gamma);
                qp.structure[gamma](alpha, beta) = acc;
            }

    qp.unit_ok = true;
    for (int beta = 0; beta < n && qp.unit_ok; ++beta)
        for (int gamma = 0; gamma < n && qp.unit_ok; ++gamma) {
            Rational expect = (beta == gamma) ? 1 : 0;
            if (qp.structure[gamma](metric.unit_index, beta) != expect)
                qp.unit_ok = false;
        }
    return qp;
}

std::vector<Rational> minimal_polynomial(const MatQ& m)
{
    const int n = static_cast<int>(m.rows());
    const int dim = n * n;
    // Row-reduced flattened powers, each with the combination that produced
    // it in terms of the original powers.
    struct Row {
        std::vector<Rational> mat;
        std::vector<Rational> combo;
        int pivot = -1;
    };
    std::vector<Row> rows;

    MatQ power = MatQ::Identity(n, n);
    for (int r = 0;; ++r) {
        Row row;
        row.mat.resize(dim);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                row.mat[i * n + j] = power(i, j);
        row.combo.assign(r + 1, Rational(0));
        row.combo[r] = 1;

        for (const Row& prev : rows) {
            if (row.mat[prev.pivot] == 0)
                continue;
            Rational factor = row.mat[prev.pivot];
            for (int i = 0; i < dim; ++i)
                row.mat[i] -= factor * prev.mat[i];
            for (std::size_t i = 0; i < prev.combo.size(); ++i)
                row.combo[i] -= factor * prev.combo[i];
        }

        int pivot = -1;
        for (int i = 0; i < dim; ++i)
            if (row.mat[i] != 0) {
                pivot = i;
                break;
            }
        if (pivot < 0) {
            // x^r - sum_{i<r} c_i x^i with the combo normalized so the top
            // coefficient is 1; descending order on output.
            std::vector<Rational> out(r + 1);
            Rational lead = row.combo[r];
            for (int i = 0; i <= r; ++i)
                out[r - i] = row.combo[i] / lead;
            return out;
        }
        Rational lead = row.mat[pivot];
        for (int i = 0; i < dim; ++i)
            row.mat[i] /= lead;
        for (auto& c : row.combo)
            c /= lead;
        row.pivot = pivot;
        rows.push_back(std::move(row));
        power = power * m;
        if (r > n)
            throw Error("minimal_polynomial: no dependence found (unreachable)");
    }
}

namespace {

// Descending-coefficient univariate polynomials over Q.
std::vector<Rational> trim(std::vector<Rational> p)
{
    std::size_t lead = 0;
    while (lead < p.size() && p[lead] == 0)
        ++lead;
    return {p.begin() + lead, p.end()};
}

std::vector<Rational> poly_derivative(const std::vector<Rational>& p)
{
    if (p.size() <= 1)
        return {};
    int deg = static_cast<int>(p.size()) - 1;
    std::vector<Rational> out(p.size() - 1);
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
        out[i] = p[i] * (deg - static_cast<int>(i));
    return trim(out);
}

std::vector<Rational> poly_mod(std::vector<Rational> a, const std::vector<Rational>& b)
{
    a = trim(a);
    while (a.size() >= b.size() && !a.empty()) {
        Rational factor = a[0] / b[0];
        for (std::size_t i = 0; i < b.size(); ++i)
            a[i] -= factor * b[i];
        a = trim(a);
    }
    return a;
}

std::vector<Rational> poly_gcd(std::vector<Rational> a, std::vector<Rational> b)
{
    a = trim(a);
    b = trim(b);
    while (!b.empty()) {
        auto r = poly_mod(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

} // namespace

bool is_squarefree(const std::vector<Rational>& monic_poly)
{
    auto d = poly_derivative(monic_poly);
    if (d.empty())
        return monic_poly.size() <= 1;
    return poly_gcd(monic_poly, d).size() == 1;
}

SemisimpleReport is_semisimple(const QuantumProduct& qp, const std::vector<Rational>& probe)
{
    const int n = qp.rank;
    SemisimpleReport rep;
    auto attempt = [&](const std::vector<Rational>& pr) -> bool {
        ++rep.probes_tried;
        auto mp = minimal_polynomial(qp.multiplication_matrix(pr));
        rep.minimal_polynomial = mp;
        rep.probe = pr;
        if (!is_squarefree(mp)) {
            rep.status = SemisimpleStatus::not_semisimple;
            return true;
        }
        if (static_cast<int>(mp.size()) == n + 1) {
            rep.status = SemisimpleStatus::semisimple;
            return true;
        }
        return false; // squarefree but degenerate probe
    };
    if (attempt(probe))
        return rep;
    for (int j = 1; j <= n + 2; ++j) {
        std::vector<Rational> pr(n);
        Rational v(1);
        for (int mu = 0; mu < n; ++mu) {
            pr[mu] = v;
            v *= j;
        }
        if (attempt(pr))
            return rep;
    }
    rep.status = SemisimpleStatus::undecidable;
    return rep;
}

ActResult act_genus0(const SRData& sr, const Theory& theory)
{
    TruncationSpec spec0 = theory.spec;
    spec0.max_genus = 0;
    Theory base0{spec0, theory.metric, {respec(theory.potentials.at(0), spec0)},
                 theory.semisimple_claimed};
    Theory moved = axiomatic_tau(base0, sr);
    ActResult out{std::move(moved), {}};
    out.axiom_reports = check_axioms(out.theory.potentials.at(0), out.theory.metric);
    return out;
}

} // namespace gwfock
