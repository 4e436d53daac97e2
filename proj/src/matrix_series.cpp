#include "gwfock/matrix_series.hpp"

namespace gwfock {

MatrixSeries series_product(const MatrixSeries& a, const MatrixSeries& b)
{
    if (a.rank != b.rank)
        throw Error("matrix series: rank mismatch");
    Window win{std::max(a.win.lo, b.win.lo), std::min(a.win.hi, b.win.hi)};
    if (win.lo > win.hi)
        throw WindowError("matrix series: empty product window");
    MatrixSeries out{a.rank, win, {}};
    for (const auto& [i, ma] : a.coeffs) {
        for (const auto& [j, mb] : b.coeffs) {
            int c = i + j;
            if (!win.contains(c))
                continue;
            auto it = out.coeffs.find(c);
            if (it == out.coeffs.end())
                out.coeffs.emplace(c, MatQ(ma * mb));
            else
                it->second += ma * mb;
        }
    }
    for (auto it = out.coeffs.begin(); it != out.coeffs.end();) {
        if (it->second == MatQ::Zero(out.rank, out.rank))
            it = out.coeffs.erase(it);
        else
            ++it;
    }
    return out;
}

MatrixSeries series_add(const MatrixSeries& a, const MatrixSeries& b)
{
    if (a.rank != b.rank || !(a.win == b.win))
        throw Error("matrix series: incompatible sum");
    MatrixSeries out = a;
    for (const auto& [j, mb] : b.coeffs)
        out.set(j, out.coeff_or_zero(j) + mb);
    return out;
}

MatrixSeries series_scale(const Rational& c, MatrixSeries a)
{
    if (c == 0)
        a.coeffs.clear();
    else
        for (auto& [j, m] : a.coeffs)
            m *= c;
    return a;
}

bool is_symplectic(const MatrixSeries& m, const Metric& metric)
{
    if (m.rank != metric.rank())
        throw Error("is_symplectic: rank mismatch");
    auto adjoint = [&](const MatQ& x) { return MatQ(metric.g_inv * x.transpose() * metric.g); };
    for (int c = m.win.lo; c <= m.win.hi; ++c) {
        MatQ acc = MatQ::Zero(m.rank, m.rank);
        for (const auto& [a, ma] : m.coeffs) {
            const MatQ* mb = m.coeff(c - a);
            if (mb == nullptr)
                continue;
            MatQ term = adjoint(ma) * (*mb);
            acc += (a % 2 == 0) ? term : MatQ(-term);
        }
        MatQ expect = (c == 0) ? MatQ(MatQ::Identity(m.rank, m.rank))
                               : MatQ(MatQ::Zero(m.rank, m.rank));
        if (acc != expect)
            return false;
    }
    return true;
}

namespace {

enum class Side { negative, positive };

// Requires support strictly on one side of exponent 0 (or empty).
Side one_sided(const MatrixSeries& x, const char* who)
{
    bool has_neg = false, has_pos = false;
    for (const auto& [j, m] : x.coeffs) {
        if (j < 0)
            has_neg = true;
        else if (j > 0)
            has_pos = true;
        else
            throw Error(std::string(who) + ": exponent-0 part must vanish");
    }
    if (has_neg && has_pos)
        throw Error(std::string(who) + ": two-sided series does not terminate at the window");
    return has_pos ? Side::positive : Side::negative;
}

} // namespace

MatrixSeries series_log(const MatrixSeries& m)
{
    MatrixSeries x = m;
    x.set(0, m.coeff_or_zero(0) - MatQ::Identity(m.rank, m.rank));
    if (x.coeff(0) != nullptr)
        throw Error("series_log: constant term must be the identity");
    one_sided(x, "series_log");
    // log(I + X) = X - X^2/2 + ...; one-sided X leaves the window, so the
    // series is finite.
    MatrixSeries acc{m.rank, m.win, {}};
    MatrixSeries power = x;
    int sign = 1;
    for (int j = 1; !power.coeffs.empty(); ++j) {
        acc = series_add(acc, series_scale(Rational(sign, j), power));
        power = series_product(power, x);
        sign = -sign;
        if (j > m.win.size() + 2)
            throw Error("series_log: series failed to terminate");
    }
    return acc;
}

MatrixSeries series_exp(const MatrixSeries& a)
{
    one_sided(a, "series_exp");
    MatrixSeries acc = MatrixSeries::identity(a.rank, a.win);
    MatrixSeries power = a;
    Rational inv_fact(1);
    for (int j = 1; !power.coeffs.empty(); ++j) {
        inv_fact /= j;
        acc = series_add(acc, series_scale(inv_fact, power));
        power = series_product(power, a);
        if (j > a.win.size() + 2)
            throw Error("series_exp: series failed to terminate");
    }
    return acc;
}

LoopEndo to_loop_endo(const MatrixSeries& m, Window win)
{
    LoopEndo endo(m.rank, win);
    for (int j = win.lo; j <= win.hi; ++j) {
        bool all_inside = true;
        for (const auto& [c, mc] : m.coeffs)
            if (!win.contains(j + c))
                all_inside = false;
        for (int mu = 0; mu < m.rank; ++mu) {
            LoopVector col(m.rank, win);
            for (const auto& [c, mc] : m.coeffs) {
                if (!win.contains(j + c))
                    continue;
                VecQ v = mc.col(mu);
                col.add(j + c, v);
            }
            endo.set_column(j, mu, std::move(col), all_inside);
        }
    }
    return endo;
}

namespace {

// R_j = M_j - sum_{i >= 1} S_i R_{j+i}, descending in j.
MatrixSeries peel_r(const MatrixSeries& m, const MatrixSeries& s, int b)
{
    MatrixSeries r{m.rank, Window{0, b}, {}};
    for (int j = b; j >= 0; --j) {
        MatQ acc = m.coeff_or_zero(j);
        for (const auto& [neg, si] : s.coeffs) {
            if (neg >= 0)
                continue;
            int other = j - neg; // j + depth
            if (other <= b) {
                const MatQ* rj = r.coeff(other);
                if (rj != nullptr)
                    acc -= si * (*rj);
            }
        }
        r.set(j, std::move(acc));
    }
    return r;
}

// S_k (depth k) = (M_{-k} - sum_{i > k} S_i R_{i-k}) R_0^{-1}, descending in
// depth from the bottom of the window.
MatrixSeries peel_s(const MatrixSeries& m, const MatrixSeries& r, int a, const MatQ& r0_inv)
{
    MatrixSeries s{m.rank, Window{-a, 0}, {}};
    s.set(0, MatQ::Identity(m.rank, m.rank));
    for (int k = a; k >= 1; --k) {
        MatQ acc = m.coeff_or_zero(-k);
        for (int i = k + 1; i <= a; ++i) {
            const MatQ* si = s.coeff(-i);
            const MatQ* rj = r.coeff(i - k);
            if (si != nullptr && rj != nullptr)
                acc -= (*si) * (*rj);
        }
        s.set(-k, MatQ(acc * r0_inv));
    }
    return s;
}

bool recomposes(const MatrixSeries& m, const MatrixSeries& s, const MatrixSeries& r)
{
    MatrixSeries prod{m.rank, m.win, {}};
    for (const auto& [i, si] : s.coeffs) {
        for (const auto& [j, rj] : r.coeffs) {
            int c = i + j;
            if (!m.win.contains(c))
                return false; // factors spill outside the declared window
            auto it = prod.coeffs.find(c);
            if (it == prod.coeffs.end())
                prod.coeffs.emplace(c, MatQ(si * rj));
            else
                it->second += si * rj;
        }
    }
    for (auto it = prod.coeffs.begin(); it != prod.coeffs.end();) {
        if (it->second == MatQ::Zero(m.rank, m.rank))
            it = prod.coeffs.erase(it);
        else
            ++it;
    }
    return prod.coeffs == m.coeffs;
}

} // namespace

BirkhoffFactors birkhoff_factorize(const MatrixSeries& m)
{
    const int a = -m.win.lo;
    const int b = m.win.hi;
    if (a < 0 || b < 0)
        throw Error("birkhoff: window must cover exponent 0");
    const MatQ m0 = m.coeff_or_zero(0);
    Eigen::FullPivLU<MatQ> lu(m0);
    if (!lu.isInvertible())
        throw Error("birkhoff: singular constant term");

    MatrixSeries s = MatrixSeries::identity(m.rank, Window{-a, 0});
    MatrixSeries r{m.rank, Window{0, b}, {}};
    for (const auto& [j, mj] : m.coeffs)
        if (j >= 0)
            r.set(j, mj);

    const int max_rounds = 2 * (a + b + m.rank) + 8;
    for (int round = 0; round <= max_rounds; ++round) {
        if (recomposes(m, s, r))
            return {std::move(s), std::move(r)};
        const MatQ* r0 = r.coeff(0);
        if (r0 == nullptr)
            break;
        Eigen::FullPivLU<MatQ> rlu(*r0);
        if (!rlu.isInvertible())
            break;
        s = peel_s(m, r, a, rlu.inverse());
        r = peel_r(m, s, b);
    }
    throw Error("birkhoff: no exact rational factorization found at this window");
}

} // namespace gwfock
