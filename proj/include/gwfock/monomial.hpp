#pragma once

#include "gwfock/truncation.hpp"

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

namespace gwfock {

// A monomial in the descendent variables: sorted (VarIndex, exponent) pairs
// with positive exponents. Ordered graded-lex so map iteration is by degree.
class Monomial {
public:
    using Factor = std::pair<VarIndex, int>;

    Monomial() = default;

    static Monomial variable(VarIndex v, int exp = 1)
    {
        Monomial m;
        if (exp > 0)
            m.factors_.push_back({v, exp});
        m.degree_ = exp;
        return m;
    }

    static Monomial from_factors(std::vector<Factor> factors)
    {
        std::sort(factors.begin(), factors.end());
        Monomial m;
        for (const auto& [v, e] : factors) {
            if (e < 0)
                throw Error("monomial: negative exponent");
            if (e == 0)
                continue;
            if (!m.factors_.empty() && m.factors_.back().first == v)
                m.factors_.back().second += e;
            else
                m.factors_.push_back({v, e});
            m.degree_ += e;
        }
        return m;
    }

    const std::vector<Factor>& factors() const { return factors_; }
    int degree() const { return degree_; }
    bool is_one() const { return factors_.empty(); }

    int exponent(VarIndex v) const
    {
        auto it = std::lower_bound(factors_.begin(), factors_.end(), v,
                                   [](const Factor& f, const VarIndex& w) { return f.first < w; });
        return (it != factors_.end() && it->first == v) ? it->second : 0;
    }

    Monomial times(const Monomial& other) const
    {
        Monomial out;
        out.factors_.reserve(factors_.size() + other.factors_.size());
        auto a = factors_.begin(), b = other.factors_.begin();
        while (a != factors_.end() || b != other.factors_.end()) {
            if (b == other.factors_.end() || (a != factors_.end() && a->first < b->first))
                out.factors_.push_back(*a++);
            else if (a == factors_.end() || b->first < a->first)
                out.factors_.push_back(*b++);
            else {
                out.factors_.push_back({a->first, a->second + b->second});
                ++a, ++b;
            }
        }
        out.degree_ = degree_ + other.degree_;
        return out;
    }

    Monomial times(VarIndex v) const { return times(variable(v)); }

    // Removes one power of v; nullopt if v does not divide this monomial.
    std::optional<Monomial> divided_by(VarIndex v) const
    {
        Monomial out;
        bool found = false;
        for (const auto& f : factors_) {
            if (f.first == v) {
                found = true;
                if (f.second > 1)
                    out.factors_.push_back({f.first, f.second - 1});
            } else {
                out.factors_.push_back(f);
            }
        }
        if (!found)
            return std::nullopt;
        out.degree_ = degree_ - 1;
        return out;
    }

    int max_desc_index() const
    {
        int k = -1;
        for (const auto& f : factors_)
            k = std::max(k, f.first.k);
        return k;
    }

    friend bool operator==(const Monomial& a, const Monomial& b)
    {
        return a.factors_ == b.factors_;
    }

    friend bool operator<(const Monomial& a, const Monomial& b)
    {
        if (a.degree_ != b.degree_)
            return a.degree_ < b.degree_;
        return a.factors_ < b.factors_;
    }

private:
    std::vector<Factor> factors_;
    int degree_ = 0;
};

} // namespace gwfock
