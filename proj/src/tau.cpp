#include "gwfock/tau.hpp"

#include <algorithm>
#include <numeric>

namespace gwfock {

namespace {

bool stable(int genus, int n) { return 2 * genus - 2 + n > 0; }

int dimension_sum(int genus, int n) { return 3 * genus - 3 + n; }

} // namespace

Rational PointCorrelators::operator()(int genus, std::vector<int> ks)
{
    std::sort(ks.begin(), ks.end());
    const int n = static_cast<int>(ks.size());
    if (genus < 0 || n == 0 || !stable(genus, n))
        return Rational(0);
    if (std::accumulate(ks.begin(), ks.end(), 0) != dimension_sum(genus, n))
        return Rational(0);

    CorrelatorKey key{genus, ks};
    if (auto it = memo_.find(key); it != memo_.end())
        return it->second;

    Rational out(0);
    auto& self = *this;
    if (genus == 0 && n == 3) {
        // <tau_0^3>_0 = 1 is the seed; the dimension filter already forces
        // all indices to zero here.
        out = Rational(1);
    } else if (genus == 1 && n == 1) {
        // One-point genus one does not reduce by string or dilaton. Combining
        // the L_1 recursion for <tau_2 tau_0>_1,
        //   15 <tau_2 tau_0>_1 = 3 <tau_1>_1 + (1/2) <tau_0^3>_0,
        // with the string equation <tau_2 tau_0>_1 = <tau_1>_1 gives
        // 12 <tau_1>_1 = (1/2) <tau_0^3>_0.
        out = self(0, {0, 0, 0}) / 24;
    } else if (ks.front() == 0) {
        // String equation.
        std::vector<int> rest(ks.begin() + 1, ks.end());
        for (std::size_t i = 0; i < rest.size(); ++i) {
            if (rest[i] == 0)
                continue;
            std::vector<int> lowered = rest;
            lowered[i] -= 1;
            out += self(genus, lowered);
        }
    } else if (ks.front() == 1) {
        // Dilaton equation.
        std::vector<int> rest(ks.begin() + 1, ks.end());
        out = Rational(2 * genus - 2 + n - 1) * self(genus, rest);
    } else {
        // Virasoro recursion on the largest insertion k = m + 1, m >= 1:
        // (2m+3)!! <tau_{m+1} X>_g =
        //     sum_j [(2k_j+2m+1)!!/(2k_j-1)!!] <tau_{k_j+m} X-j>_g
        //   + (1/2) sum_{a+b=m-1} (2a+1)!!(2b+1)!! [ <tau_a tau_b X>_{g-1}
        //       + sum over ordered genus and insertion splits
        //         <tau_a X'>_{g'} <tau_b X''>_{g''} ].
        std::vector<int> rest(ks.begin(), ks.end() - 1);
        const int m = ks.back() - 1;

        for (std::size_t j = 0; j < rest.size(); ++j) {
            std::vector<int> moved = rest;
            moved[j] += m;
            Rational c = odd_double_factorial(rest[j] + m + 1) / odd_double_factorial(rest[j]);
            out += c * self(genus, moved);
        }
        for (int a = 0; a <= m - 1; ++a) {
            const int b = m - 1 - a;
            Rational c = odd_double_factorial(a + 1) * odd_double_factorial(b + 1) / 2;
            std::vector<int> joined = rest;
            joined.push_back(a);
            joined.push_back(b);
            out += c * self(genus - 1, joined);

            const int nrest = static_cast<int>(rest.size());
            for (int mask = 0; mask < (1 << nrest); ++mask) {
                std::vector<int> left{a}, right{b};
                for (int i = 0; i < nrest; ++i)
                    ((mask >> i) & 1 ? left : right).push_back(rest[i]);
                for (int g1 = 0; g1 <= genus; ++g1)
                    out += c * self(g1, left) * self(genus - g1, right);
            }
        }
        out /= odd_double_factorial(m + 2);
    }

    memo_.emplace(std::move(key), out);
    return out;
}

namespace {

// All sorted multisets of given size with entries in [0, kmax] summing to
// total.
void enumerate_multisets(int size, int total, int kmax, int minval, std::vector<int>& current,
                         std::vector<std::vector<int>>& out)
{
    if (size == 0) {
        if (total == 0)
            out.push_back(current);
        return;
    }
    for (int k = minval; k <= std::min(kmax, total); ++k) {
        if (total - k > (size - 1) * kmax)
            continue;
        current.push_back(k);
        enumerate_multisets(size - 1, total - k, kmax, k, current, out);
        current.pop_back();
    }
}

} // namespace

CorrelatorTable point_correlators(const TruncationSpec& spec)
{
    spec.validate();
    CorrelatorTable table(spec);
    PointCorrelators corr;
    for (int g = 0; g <= spec.max_genus; ++g) {
        for (int n = 1; n <= spec.max_degree; ++n) {
            if (!stable(g, n))
                continue;
            int total = dimension_sum(g, n);
            if (total < 0 || total > n * spec.max_desc)
                continue;
            std::vector<std::vector<int>> multisets;
            std::vector<int> current;
            enumerate_multisets(n, total, spec.max_desc, 0, current, multisets);
            for (auto& ks : multisets) {
                Rational v = corr(g, ks);
                table.set(CorrelatorKey{g, std::move(ks)}, std::move(v));
            }
        }
    }
    return table;
}

std::vector<PolyT> point_potentials(const TruncationSpec& spec)
{
    if (spec.rank != 1)
        throw Error("point_potentials: rank-1 truncation required");
    CorrelatorTable table = point_correlators(spec);
    std::vector<PolyT> fs(spec.max_genus + 1, PolyT::zero(spec));
    for (const auto& [key, value] : table.entries()) {
        Rational coeff = value;
        Monomial mono;
        int run = 1;
        for (std::size_t i = 0; i < key.ks.size(); ++i) {
            mono = mono.times(VarIndex{0, key.ks[i]});
            if (i + 1 < key.ks.size() && key.ks[i + 1] == key.ks[i]) {
                ++run;
            } else {
                coeff /= factorial(run);
                run = 1;
            }
        }
        fs[key.genus].add_term(mono, coeff);
    }
    return fs;
}

Theory point_theory(const TruncationSpec& spec)
{
    return Theory{spec, Metric::identity(1), point_potentials(spec), true};
}

Theory n_point_theory(int n, const TruncationSpec& spec)
{
    if (n < 1)
        throw Error("n_point_theory: need n >= 1");
    if (spec.rank != n)
        throw Error("n_point_theory: spec.rank must equal n");
    TruncationSpec point_spec = spec;
    point_spec.rank = 1;
    std::vector<PolyT> point = point_potentials(point_spec);
    std::vector<PolyT> fs(spec.max_genus + 1, PolyT::zero(spec));
    for (int g = 0; g <= spec.max_genus; ++g) {
        for (int i = 0; i < n; ++i) {
            for (const auto& [m, c] : point[g].terms()) {
                Monomial relabeled;
                for (const auto& [v, e] : m.factors())
                    relabeled = relabeled.times(
                        Monomial::from_factors({{VarIndex{i, v.k}, e}}));
                fs[g].add_term(relabeled, c);
            }
        }
    }
    return Theory{spec, Metric::identity(n), std::move(fs), true};
}

JetReport check_jet_property(const std::vector<PolyT>& potentials)
{
    JetReport rep;
    for (int g = 1; g < static_cast<int>(potentials.size()); ++g) {
        int bound = 3 * g - 2;
        for (const auto& [m, c] : potentials[g].terms()) {
            if (m.max_desc_index() > bound)
                rep.witnesses.push_back({g, m});
        }
    }
    rep.ok = rep.witnesses.empty();
    return rep;
}

void validate_sr(const SRData& sr, const Metric& metric)
{
    for (const auto& [j, m] : sr.s.coeffs)
        if (j > 0)
            throw Error("SR data: S must be a series in z^{-1}");
    for (const auto& [j, m] : sr.r.coeffs)
        if (j < 0)
            throw Error("SR data: R must be a series in z");
    if (!is_symplectic(sr.s, metric))
        throw Error("SR data: S is not symplectic at its window");
    if (!is_symplectic(sr.r, metric))
        throw Error("SR data: R is not symplectic at its window");
}

LogTau theory_log_tau(const Theory& theory)
{
    // Potentials already live in the t-frame; the dilaton shift is applied
    // on the operator side when Fock operators act.
    return LogTau{theory.spec, theory.potentials};
}

std::vector<PolyT> potentials_from_log(const LogTau& log_tau)
{
    return log_tau.f;
}

FockOperator quantize_jet_generator(const MatrixSeries& m, const Metric& metric,
                                    const TruncationSpec& spec)
{
    MatrixSeries gen = series_log(m);
    // Window sized so that the whole Darboux range maps inside it under every
    // z-shift the generator carries.
    int reach = 0;
    for (const auto& [j, c] : gen.coeffs)
        reach = std::max(reach, std::abs(j));
    Window win{-(spec.max_desc + 1) - reach, spec.max_desc + reach};
    MatrixSeries widened{gen.rank, win, {}};
    for (const auto& [j, c] : gen.coeffs)
        widened.set(j, c);
    LoopEndo endo = to_loop_endo(widened, win);
    return weyl_quantize(quadratic_hamiltonian(endo, metric, spec));
}

Theory axiomatic_tau(const Theory& base, const SRData& sr)
{
    validate_sr(sr, base.metric);
    if (sr.s.rank != base.spec.rank || sr.r.rank != base.spec.rank)
        throw Error("axiomatic_tau: rank mismatch");

    LogTau log_tau = theory_log_tau(base);
    FockOperator r_hat = quantize_jet_generator(sr.r, base.metric, base.spec);
    log_tau = flow_endpoint(r_hat, log_tau);
    FockOperator s_hat = quantize_jet_generator(sr.s, base.metric, base.spec);
    log_tau = flow_endpoint(s_hat, log_tau);

    Theory out{base.spec, base.metric, potentials_from_log(log_tau), false};
    return out;
}

} // namespace gwfock
