#pragma once

#include "gwfock/loop.hpp"
#include "gwfock/rational.hpp"
#include "gwfock/truncation.hpp"

#include <map>

namespace gwfock {

// End(H)-valued Laurent polynomial: exponent -> dense N x N rational matrix,
// zero matrices dropped. The window declares which exponents are exactly
// known; outside it the series is treated as unknown, not as zero.
struct MatrixSeries {
    int rank = 1;
    Window win;
    std::map<int, MatQ> coeffs;

    static MatrixSeries identity(int rank, Window win)
    {
        MatrixSeries m{rank, win, {}};
        m.set(0, MatQ::Identity(rank, rank));
        return m;
    }

    const MatQ* coeff(int j) const
    {
        auto it = coeffs.find(j);
        return it == coeffs.end() ? nullptr : &it->second;
    }

    MatQ coeff_or_zero(int j) const
    {
        auto it = coeffs.find(j);
        return it == coeffs.end() ? MatQ(MatQ::Zero(rank, rank)) : it->second;
    }

    void set(int j, MatQ m)
    {
        if (!win.contains(j))
            throw WindowError("matrix series exponent outside window");
        if (m == MatQ::Zero(rank, rank))
            coeffs.erase(j);
        else
            coeffs.insert_or_assign(j, std::move(m));
    }

    friend bool operator==(const MatrixSeries& a, const MatrixSeries& b)
    {
        return a.rank == b.rank && a.win == b.win && a.coeffs == b.coeffs;
    }
};

// Product truncated to the common window.
MatrixSeries series_product(const MatrixSeries& a, const MatrixSeries& b);

MatrixSeries series_add(const MatrixSeries& a, const MatrixSeries& b);
MatrixSeries series_scale(const Rational& c, MatrixSeries a);

// Twisted-loop-group membership at the window: sum_{a+b=c} (-1)^a M_a^* M_b
// equals delta_{c,0} I for every c the window can see. The adjoint is taken
// with respect to the metric.
bool is_symplectic(const MatrixSeries& m, const Metric& metric);

// log(M) for M = I + X with X supported away from exponent 0 on one side
// (strictly positive or strictly negative powers), where the series
// terminates on the window. Throws for other shapes.
MatrixSeries series_log(const MatrixSeries& m);

// exp(A) for A supported strictly on one side of exponent 0.
MatrixSeries series_exp(const MatrixSeries& a);

// Multiplication action of the series on the loop space: phi_mu z^j ->
// sum_c (M_c phi_mu) z^{j+c}. Sources whose image leaves the window are
// marked untrusted.
LoopEndo to_loop_endo(const MatrixSeries& m, Window win);

struct BirkhoffFactors {
    MatrixSeries s; // I + S_1 z^{-1} + ... on [win.lo, 0]
    MatrixSeries r; // R_0 + R_1 z + ... on [0, win.hi]
};

// Splits M = S(z^{-1}) R(z) with S(inf) = I, verifying the recomposition
// bit-exactly before returning. The alternating exponent-triangular peeling
// used here terminates on the class of inputs whose factors are themselves
// polynomial at the window (identity, one-sided series, and products of such
// factors); anything else is rejected rather than approximated.
BirkhoffFactors birkhoff_factorize(const MatrixSeries& m);

} // namespace gwfock
