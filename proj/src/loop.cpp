#include "gwfock/loop.hpp"

namespace gwfock {

Metric Metric::from_matrix(MatQ g, int unit_index)
{
    Metric m;
    if (g.rows() != g.cols() || g.rows() < 1)
        throw Error("metric: square matrix required");
    if (g != MatQ(g.transpose()))
        throw Error("metric: matrix must be symmetric");
    Eigen::FullPivLU<MatQ> lu(g);
    if (!lu.isInvertible())
        throw Error("metric: matrix must be nondegenerate");
    m.g = std::move(g);
    m.g_inv = lu.inverse();
    m.unit_index = unit_index;
    if (unit_index < 0 || unit_index >= m.rank())
        throw Error("metric: unit index out of range");
    return m;
}

Rational omega(const LoopVector& f, const LoopVector& g, const Metric& m)
{
    if (f.rank() != g.rank() || f.rank() != m.rank())
        throw Error("omega: rank mismatch");
    if (!(f.window() == g.window()))
        throw Error("omega: window mismatch");
    Rational acc(0);
    for (const auto& [j, fj] : f.coeffs()) {
        auto it = g.coeffs().find(-1 - j);
        if (it == g.coeffs().end())
            continue;
        Rational pairing = (fj.transpose() * m.g * it->second)(0, 0);
        acc += (j % 2 == 0) ? pairing : -pairing;
    }
    return acc;
}

LoopEndo LoopEndo::identity(int rank, Window win)
{
    return z_power(rank, win, 0);
}

LoopEndo LoopEndo::z_power(int rank, Window win, int p)
{
    LoopEndo a(rank, win);
    for (int j = win.lo; j <= win.hi; ++j) {
        bool inside = win.contains(j + p);
        for (int mu = 0; mu < rank; ++mu) {
            if (inside)
                a.set_column(j, mu, LoopVector::basis(rank, win, mu, j + p), true);
            else
                a.set_column(j, mu, LoopVector(rank, win), false);
        }
    }
    return a;
}

void LoopEndo::set_column(int j, int mu, LoopVector image, bool trusted)
{
    if (!win_.contains(j) || mu < 0 || mu >= rank_)
        throw Error("loop endo: source outside window");
    cols_.insert_or_assign({j, mu}, std::move(image));
    if (trusted)
        trusted_.insert({j, mu});
    else
        trusted_.erase({j, mu});
}

std::pair<LoopVector, bool> LoopEndo::apply(const LoopVector& f) const
{
    LoopVector out(rank_, win_);
    bool exact = true;
    for (const auto& [j, h] : f.coeffs()) {
        for (int mu = 0; mu < rank_; ++mu) {
            if (h(mu) == 0)
                continue;
            const LoopVector* col = column(j, mu);
            if (col == nullptr)
                throw WindowError("loop endo: no column for source in window");
            if (!trusted(j, mu))
                exact = false;
            LoopVector scaled = *col;
            scaled.scale(h(mu));
            out += scaled;
        }
    }
    return {std::move(out), exact};
}

LoopEndo& LoopEndo::operator+=(const LoopEndo& other)
{
    if (rank_ != other.rank_ || !(win_ == other.win_))
        throw Error("loop endo: incompatible sum");
    std::set<LoopBasisIndex> both;
    for (const auto& s : trusted_)
        if (other.trusted_.count(s))
            both.insert(s);
    for (const auto& [src, col] : other.cols_) {
        auto it = cols_.find(src);
        if (it == cols_.end())
            cols_.emplace(src, col);
        else
            it->second += col;
    }
    trusted_ = std::move(both);
    return *this;
}

LoopEndo& LoopEndo::scale(const Rational& c)
{
    for (auto& [src, col] : cols_)
        col.scale(c);
    return *this;
}

LoopEndo compose(const LoopEndo& a, const LoopEndo& b)
{
    if (a.rank() != b.rank() || !(a.window() == b.window()))
        throw Error("loop endo: incompatible composition");
    LoopEndo out(a.rank(), a.window());
    const Window& win = a.window();
    for (int j = win.lo; j <= win.hi; ++j) {
        for (int mu = 0; mu < a.rank(); ++mu) {
            const LoopVector* bcol = b.column(j, mu);
            if (bcol == nullptr) {
                out.set_column(j, mu, LoopVector(a.rank(), win), false);
                continue;
            }
            auto [image, a_exact] = a.apply(*bcol);
            bool ok = b.trusted(j, mu) && a_exact;
            out.set_column(j, mu, std::move(image), ok);
        }
    }
    return out;
}

LoopEndo loop_commutator(const LoopEndo& a, const LoopEndo& b)
{
    LoopEndo ab = compose(a, b);
    LoopEndo ba = compose(b, a);
    ba.scale(Rational(-1));
    LoopEndo out = ab + ba;
    if (out.trusted_sources().empty())
        throw WindowError("loop commutator: empty safe sub-window");
    return out;
}

bool equal_on_trusted(const LoopEndo& a, const LoopEndo& b)
{
    if (a.rank() != b.rank() || !(a.window() == b.window()))
        throw Error("loop endo: incompatible comparison");
    bool any = false;
    for (const auto& src : a.trusted_sources()) {
        if (!b.trusted(src.first, src.second))
            continue;
        any = true;
        const LoopVector* ca = a.column(src.first, src.second);
        const LoopVector* cb = b.column(src.first, src.second);
        LoopVector da = ca ? *ca : LoopVector(a.rank(), a.window());
        if (cb) {
            LoopVector neg = *cb;
            neg.scale(Rational(-1));
            da += neg;
        }
        if (!da.is_zero())
            return false;
    }
    if (!any)
        throw WindowError("loop endo comparison: no common trusted sources");
    return true;
}

InfSymplecticReport is_inf_symplectic(const LoopEndo& a, const Metric& m)
{
    if (a.rank() != m.rank())
        throw Error("is_inf_symplectic: rank mismatch");
    auto sources = a.trusted_sources();
    if (sources.empty())
        throw WindowError("is_inf_symplectic: window too small (no trusted sources)");
    InfSymplecticReport rep;
    for (const auto& x : sources) {
        LoopVector ex = LoopVector::basis(a.rank(), a.window(), x.second, x.first);
        const LoopVector& ax = *a.column(x.first, x.second);
        for (const auto& y : sources) {
            LoopVector ey = LoopVector::basis(a.rank(), a.window(), y.second, y.first);
            const LoopVector& ay = *a.column(y.first, y.second);
            Rational r = omega(ax, ey, m) + omega(ex, ay, m);
            if (r != 0) {
                rep.ok = false;
                rep.witness = {x, y};
                rep.value = r;
                return rep;
            }
        }
    }
    rep.ok = true;
    return rep;
}

namespace {

// Scalar Laurent data with exponents in (1/2)Z, keyed by twice the exponent.
using HalfLaurent = std::map<int, Rational>;

HalfLaurent mult_half_power(const HalfLaurent& x, int twice_power)
{
    HalfLaurent out;
    for (const auto& [h2, c] : x)
        out[h2 + twice_power] = c;
    return out;
}

// D = z (d/dz) z sends z^h to (h+1) z^{h+1}.
HalfLaurent apply_D(const HalfLaurent& x)
{
    HalfLaurent out;
    for (const auto& [h2, c] : x) {
        Rational factor(h2 + 2, 2);
        if (factor != 0)
            out[h2 + 2] += c * factor;
    }
    return out;
}

} // namespace

Rational virasoro_scalar_coefficient(int m, int j)
{
    Rational prod(1);
    for (int i = 0; i <= m; ++i)
        prod *= Rational(2 * j + 1 + 2 * i, 2);
    return -prod;
}

LoopEndo virasoro_generator(int m, int rank, Window win)
{
    if (m < -1)
        throw Error("virasoro_generator: m must be >= -1");
    LoopEndo a(rank, win);
    for (int j = win.lo; j <= win.hi; ++j) {
        HalfLaurent x{{2 * j, Rational(1)}};
        x = mult_half_power(x, -1);
        for (int it = 0; it <= m; ++it)
            x = apply_D(x);
        x = mult_half_power(x, -1);
        for (auto& [h2, c] : x)
            c = -c;

        // The conjugation must land back in integer exponents.
        Rational coeff(0);
        int target = j + m;
        for (const auto& [h2, c] : x) {
            if (c == 0)
                continue;
            if (h2 % 2 != 0)
                throw Error("virasoro_generator: non-integer exponent survived conjugation");
            if (h2 != 2 * target)
                throw Error("virasoro_generator: unexpected target exponent");
            coeff = c;
        }
        if (coeff != virasoro_scalar_coefficient(m, j))
            throw Error("virasoro_generator: closed-form check failed");

        bool inside = win.contains(target);
        for (int mu = 0; mu < rank; ++mu) {
            LoopVector col(rank, win);
            if (inside && coeff != 0) {
                VecQ e = VecQ::Zero(rank);
                e(mu) = coeff;
                col.add(target, e);
            }
            bool trusted = inside || coeff == 0;
            a.set_column(j, mu, std::move(col), trusted);
        }
    }
    return a;
}

} // namespace gwfock
