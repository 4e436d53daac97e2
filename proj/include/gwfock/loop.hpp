#pragma once

#include "gwfock/rational.hpp"
#include "gwfock/truncation.hpp"

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace gwfock {

// Poincare pairing on H: symmetric nondegenerate rational matrix, with the
// distinguished unit direction.
struct Metric {
    MatQ g;
    MatQ g_inv;
    int unit_index = 0;

    int rank() const { return static_cast<int>(g.rows()); }
    bool is_identity() const { return g == MatQ::Identity(g.rows(), g.cols()); }

    static Metric identity(int n)
    {
        Metric m;
        m.g = MatQ::Identity(n, n);
        m.g_inv = m.g;
        return m;
    }

    static Metric from_matrix(MatQ g, int unit_index = 0);
};

// z-exponent window [lo, hi] of the truncated loop space.
struct Window {
    int lo = 0;
    int hi = 0;

    bool contains(int j) const { return lo <= j && j <= hi; }
    int size() const { return hi - lo + 1; }
    friend bool operator==(const Window&, const Window&) = default;
};

// H-valued Laurent polynomial supported on a window. Zero vectors are not
// stored; exponents outside the window are an error (loss is an operator
// concern, not a vector one).
class LoopVector {
public:
    LoopVector(int rank, Window win) : rank_(rank), win_(win) {}

    static LoopVector basis(int rank, Window win, int mu, int j)
    {
        LoopVector v(rank, win);
        VecQ e = VecQ::Zero(rank);
        e(mu) = 1;
        v.add(j, e);
        return v;
    }

    int rank() const { return rank_; }
    const Window& window() const { return win_; }
    const std::map<int, VecQ>& coeffs() const { return coeffs_; }
    bool is_zero() const { return coeffs_.empty(); }

    void add(int j, const VecQ& h)
    {
        if (!win_.contains(j))
            throw WindowError("loop vector exponent " + std::to_string(j) + " outside window");
        auto it = coeffs_.find(j);
        if (it == coeffs_.end()) {
            if (h != VecQ::Zero(rank_))
                coeffs_.emplace(j, h);
        } else {
            it->second += h;
            if (it->second == VecQ::Zero(rank_))
                coeffs_.erase(it);
        }
    }

    LoopVector& operator+=(const LoopVector& other)
    {
        for (const auto& [j, h] : other.coeffs_)
            add(j, h);
        return *this;
    }

    LoopVector& scale(const Rational& c)
    {
        if (c == 0) {
            coeffs_.clear();
            return *this;
        }
        for (auto& [j, h] : coeffs_)
            h *= c;
        return *this;
    }

    friend bool operator==(const LoopVector& a, const LoopVector& b)
    {
        return a.rank_ == b.rank_ && a.win_ == b.win_ && a.coeffs_ == b.coeffs_;
    }

private:
    int rank_;
    Window win_;
    std::map<int, VecQ> coeffs_;
};

// Omega(f, g) = Res_{z=0} <f(-z), g(z)> = sum_j (-1)^j <f_j, g_{-1-j}>.
Rational omega(const LoopVector& f, const LoopVector& g, const Metric& m);

// Source label (z-exponent, direction).
using LoopBasisIndex = std::pair<int, int>;

// Linear endomorphism of the windowed loop space, stored column by column on
// the basis {phi_mu z^j}. A source is "trusted" when its true image lies
// entirely inside the window and is exactly represented; checks that require
// exactness only ever read trusted columns. Compositions propagate trust.
class LoopEndo {
public:
    LoopEndo(int rank, Window win) : rank_(rank), win_(win) {}

    int rank() const { return rank_; }
    const Window& window() const { return win_; }

    static LoopEndo identity(int rank, Window win);
    // Multiplication by z^p.
    static LoopEndo z_power(int rank, Window win, int p);

    void set_column(int j, int mu, LoopVector image, bool trusted);

    const LoopVector* column(int j, int mu) const
    {
        auto it = cols_.find({j, mu});
        return it == cols_.end() ? nullptr : &it->second;
    }

    bool trusted(int j, int mu) const { return trusted_.count({j, mu}) > 0; }

    std::vector<LoopBasisIndex> trusted_sources() const
    {
        return {trusted_.begin(), trusted_.end()};
    }

    // Applies to a vector; second component reports whether the result is the
    // exact image (every source in f's support trusted).
    std::pair<LoopVector, bool> apply(const LoopVector& f) const;

    LoopEndo& operator+=(const LoopEndo& other);
    LoopEndo& scale(const Rational& c);

    friend LoopEndo operator+(LoopEndo a, const LoopEndo& b) { return a += b; }
    friend LoopEndo operator*(const Rational& c, LoopEndo a) { return a.scale(c); }

private:
    int rank_;
    Window win_;
    std::map<LoopBasisIndex, LoopVector> cols_;
    std::set<LoopBasisIndex> trusted_;
};

LoopEndo compose(const LoopEndo& a, const LoopEndo& b);

// AB - BA on the common trusted sub-window; empty trusted set is an error.
LoopEndo loop_commutator(const LoopEndo& a, const LoopEndo& b);

// Compares two endomorphisms on the intersection of their trusted sources;
// throws WindowError when that intersection is empty.
bool equal_on_trusted(const LoopEndo& a, const LoopEndo& b);

struct InfSymplecticReport {
    bool ok = false;
    // First violating pair of basis sources and the nonzero pairing value.
    std::optional<std::pair<LoopBasisIndex, LoopBasisIndex>> witness;
    Rational value;
};

// Checks Omega(Af, g) + Omega(f, Ag) = 0 over all pairs of trusted basis
// sources. Throws WindowError when there is nothing trusted to check.
InfSymplecticReport is_inf_symplectic(const LoopEndo& a, const Metric& m);

// L_m = -z^{-1/2} D^{m+1} z^{-1/2} with D = z (d/dz) z, acting diagonally on
// the N orthonormal directions. Built by symbolic conjugation through
// half-integer powers; integrality of the result and the closed-form product
// of eigen-coefficients are asserted, not assumed.
LoopEndo virasoro_generator(int m, int rank, Window win);

// The scalar coefficient in L_m z^j = c z^{j+m}, for tests and cross-checks:
// c = -prod_{i=0}^{m} (j + 1/2 + i).
Rational virasoro_scalar_coefficient(int m, int j);

} // namespace gwfock
