#pragma once

#include "gwfock/loop.hpp"
#include "gwfock/matrix_series.hpp"
#include "gwfock/poly.hpp"
#include "gwfock/quantize.hpp"
#include "gwfock/rational.hpp"
#include "gwfock/truncation.hpp"

#include <map>
#include <optional>
#include <vector>

namespace gwfock {

// Exact intersection numbers <tau_{k_1} ... tau_{k_n}>_g of the point
// theory, keyed by genus and the sorted insertion multiset. Only entries
// passing the dimension constraint sum k_i = 3g - 3 + n are stored; all
// others are identically zero.
struct CorrelatorKey {
    int genus = 0;
    std::vector<int> ks; // sorted ascending

    friend auto operator<=>(const CorrelatorKey&, const CorrelatorKey&) = default;
};

class CorrelatorTable {
public:
    explicit CorrelatorTable(TruncationSpec spec) : spec_(spec) {}

    const TruncationSpec& spec() const { return spec_; }
    const std::map<CorrelatorKey, Rational>& entries() const { return entries_; }

    void set(CorrelatorKey key, Rational value)
    {
        if (value != 0)
            entries_.insert_or_assign(std::move(key), std::move(value));
    }

    Rational value(const CorrelatorKey& key) const
    {
        auto it = entries_.find(key);
        return it == entries_.end() ? Rational(0) : it->second;
    }

private:
    TruncationSpec spec_;
    std::map<CorrelatorKey, Rational> entries_;
};

// Single correlator, memoised recursion: dimension filter, string equation
// for tau_0, dilaton equation for tau_1, and the Virasoro (KdV) recursion on
// the largest insertion for the rest. Seeded only by <tau_0^3>_0 = 1.
class PointCorrelators {
public:
    Rational operator()(int genus, std::vector<int> ks);

private:
    std::map<CorrelatorKey, Rational> memo_;
};

// Full table within the truncation: g <= max_genus, n <= max_degree,
// k_i <= max_desc.
CorrelatorTable point_correlators(const TruncationSpec& spec);

// A genus-graded family of potentials plus the metric: the t-frame data of
// an axiomatic theory.
struct Theory {
    TruncationSpec spec;
    Metric metric;
    std::vector<PolyT> potentials; // F_0 .. F_G
    bool semisimple_claimed = false;
};

// F_g assembled from the correlator table with the multinomial symmetry
// factors: the coefficient of prod t_k^{m_k} is <tau-multiset>_g / prod m_k!.
std::vector<PolyT> point_potentials(const TruncationSpec& spec);

// rank-1 Witten-Kontsevich theory.
Theory point_theory(const TruncationSpec& spec);

// F_g^{N pt}(t^1, ..., t^N) = sum_i F_g^{pt}(t^i), identity metric in the
// delta-function basis. spec.rank must equal n.
Theory n_point_theory(int n, const TruncationSpec& spec);

struct JetReport {
    bool ok = true;
    // (genus, offending monomial) pairs, one per violating monomial.
    std::vector<std::pair<int, Monomial>> witnesses;
};

// True iff every F_g, g >= 1, within the truncation involves no variable
// with descendent index k > 3g - 2.
JetReport check_jet_property(const std::vector<PolyT>& potentials);

// Upper-triangular-in-z and lower-triangular-in-z jets of a loop group
// element O = S(z^{-1}) R(z). Both factors must be symplectic on their
// windows; for the quantized action the constant terms must be the identity.
struct SRData {
    MatrixSeries s; // I + S_1 z^{-1} + ...
    MatrixSeries r; // I + R_1 z + ...
};

void validate_sr(const SRData& sr, const Metric& metric);

// The dilaton-shifted genus-graded log of the theory's tau-function.
LogTau theory_log_tau(const Theory& theory);

// Inverse of theory_log_tau.
std::vector<PolyT> potentials_from_log(const LogTau& log_tau);

// Quantizes the one-sided generator log(M) of a unipotent series and returns
// the corresponding Fock operator, built through the quadratic Hamiltonian
// of its multiplication action on the loop space.
FockOperator quantize_jet_generator(const MatrixSeries& m, const Metric& metric,
                                    const TruncationSpec& spec);

// tau^T = S-hat (R-hat tau), computed by exact stabilized flows on the log:
// first the R-jet, then the S-jet. Both jets must be symplectic and
// unipotent at the window. The result is returned in the t-frame.
Theory axiomatic_tau(const Theory& base, const SRData& sr);

} // namespace gwfock
