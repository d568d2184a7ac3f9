/*
   Copyright 2026 the trs-reduce authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#ifndef TRS_SERIES_HPP
#define TRS_SERIES_HPP

#include <optional>
#include <string>
#include <vector>

#include "trs/rational.hpp"

namespace trs {

// A power series in x known exactly through degree trunc().  Coefficients
// beyond the truncation order are unknown, not zero; every operation
// computes the largest output order that is sound for its inputs.
class TruncatedSeries {
  public:
    TruncatedSeries() : coeffs_(1, Rational(0)) {}
    explicit TruncatedSeries(int trunc);
    TruncatedSeries(std::vector<Rational> coeffs, int trunc);

    static TruncatedSeries zero(int trunc) { return TruncatedSeries(trunc); }
    static TruncatedSeries constant(const Rational& c, int trunc);
    static TruncatedSeries monomial(const Rational& c, int degree, int trunc);
    static TruncatedSeries identity(int trunc) { return monomial(1, 1, trunc); }

    int trunc() const { return static_cast<int>(coeffs_.size()) - 1; }
    const Rational& operator[](int k) const;
    void set(int k, const Rational& c);
    const std::vector<Rational>& coeffs() const { return coeffs_; }

    // Least known index with a nonzero coefficient; nullopt means all known
    // coefficients vanish (order > trunc).
    std::optional<int> ord() const;
    bool known_zero() const { return !ord().has_value(); }

    TruncatedSeries jet(int k) const;                // requires k <= trunc
    TruncatedSeries restrict_trunc(int k) const;     // lower the truncation
    // Raise the truncation order of exact polynomial data (missing
    // coefficients really are zero; caller asserts that).
    TruncatedSeries widen_exact(int k) const;
    TruncatedSeries shift_up(int k) const;           // multiply by x^k
    TruncatedSeries exact_divide_x(int k) const;     // divide by x^k, exact
    TruncatedSeries derivative() const;
    TruncatedSeries reciprocal() const;              // constant term must be a unit
    // Substitute g into this series; g must have zero constant term.
    TruncatedSeries compose(const TruncatedSeries& g) const;
    // x -> x^r.
    TruncatedSeries ramify(int r) const;

    Rational eval(const Rational& x) const;          // evaluate the known jet
    double eval_double(double x) const;

    bool is_known_equal(const TruncatedSeries& other) const;

    std::string to_string() const;

    friend TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b);
    friend TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b);
    friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b);
    friend TruncatedSeries operator*(const Rational& c, const TruncatedSeries& a);
    friend TruncatedSeries operator-(const TruncatedSeries& a);
    friend bool operator==(const TruncatedSeries& a, const TruncatedSeries& b);

  private:
    // invariant: coeffs_.size() == trunc + 1 >= 1
    std::vector<Rational> coeffs_;
};

// Complex series as a (re, im) pair with a common truncation order; carries
// the c_j(x) entries of exponential parts.
struct ComplexSeries {
    TruncatedSeries re, im;

    ComplexSeries() = default;
    ComplexSeries(TruncatedSeries r, TruncatedSeries i);
    static ComplexSeries from_real(const TruncatedSeries& r);

    int trunc() const { return re.trunc(); }
    bool known_zero() const { return re.known_zero() && im.known_zero(); }
    ComplexSeries conj() const { return {re, -im}; }
    std::string to_string() const;

    friend ComplexSeries operator+(const ComplexSeries& a, const ComplexSeries& b);
    friend ComplexSeries operator-(const ComplexSeries& a, const ComplexSeries& b);
    friend ComplexSeries operator*(const ComplexSeries& a, const ComplexSeries& b);
    friend bool operator==(const ComplexSeries& a, const ComplexSeries& b);
};

} // namespace trs

#endif
