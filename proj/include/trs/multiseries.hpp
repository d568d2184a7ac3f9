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

#ifndef TRS_MULTISERIES_HPP
#define TRS_MULTISERIES_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trs/series.hpp"

namespace trs {

class PolyMatrix;

// Exponent multi-index (x, y_1, ..., y_n); entry 0 is the x power.
using MIdx = std::vector<int>;

inline int midx_degree(const MIdx& a) {
    int d = 0;
    for (int e : a) d += e;
    return d;
}

// Power series in (x, y_1..y_n) with total-degree truncation; absent keys are
// zero coefficients.  Total-degree jets match the determinacy bookkeeping of
// the reduction pipeline.
class MultiSeries {
  public:
    MultiSeries() : yvars_(0), trunc_(0) {}
    MultiSeries(int yvars, int trunc);

    static MultiSeries zero(int yvars, int trunc) { return MultiSeries(yvars, trunc); }
    static MultiSeries constant(const Rational& c, int yvars, int trunc);
    static MultiSeries monomial(const Rational& c, const MIdx& alpha, int trunc);
    static MultiSeries var_x(int yvars, int trunc);
    static MultiSeries var_y(int i, int yvars, int trunc);
    static MultiSeries from_x_series(const TruncatedSeries& f, int yvars);

    int yvars() const { return yvars_; }
    int trunc() const { return trunc_; }
    const std::map<MIdx, Rational>& terms() const { return terms_; }

    Rational coeff(const MIdx& alpha) const;
    void add_term(const MIdx& alpha, const Rational& c);

    std::optional<int> ord() const;         // least total degree of a nonzero term
    bool known_zero() const { return terms_.empty(); }
    int ord_x_floor() const;                // largest e with x^e dividing all known terms

    MultiSeries jet(int k) const;
    MultiSeries restrict_trunc(int k) const;
    MultiSeries homogeneous_part(int d) const;
    MultiSeries mul_x_pow(int k) const;
    MultiSeries exact_divide_x(int k) const;
    MultiSeries derivative_x() const;
    MultiSeries derivative_y(int i) const;
    MultiSeries reciprocal() const;          // constant term must be a unit

    // y_i -> beta_i(x) + y_i with polynomial beta, ord >= 1.
    MultiSeries subst_translation(const std::vector<TruncatedSeries>& beta) const;
    // y -> P(x) . y, P(0) invertible not required here (only polynomial data).
    MultiSeries subst_linear(const PolyMatrix& P) const;
    // (y_1..y_k) -> x*y_i.
    MultiSeries subst_scale_by_x(int k) const;
    // x -> x^r.
    MultiSeries subst_ramify(int r) const;
    // y_i -> g_i(x), ord >= 1: collapse to a series in x.
    TruncatedSeries eval_at_curve(const std::vector<TruncatedSeries>& gamma) const;
    // y_i -> h_i(x, y) for i in [from, from+h.size()), each ord >= 1.
    MultiSeries subst_y_block(int from, const std::vector<MultiSeries>& h) const;
    // Restriction y_i = 0 for i in a mask.
    MultiSeries set_y_zero(const std::vector<bool>& mask) const;

    TruncatedSeries linear_y_coefficient(int i) const; // series coefficient of y_i
    TruncatedSeries y_constant_part() const;           // terms with no y factors

    Rational eval(const Rational& x, const std::vector<Rational>& y) const;
    double eval_double(double x, const std::vector<double>& y) const;

    bool is_known_equal(const MultiSeries& other) const;
    std::string to_string() const;

    friend MultiSeries operator+(const MultiSeries& a, const MultiSeries& b);
    friend MultiSeries operator-(const MultiSeries& a, const MultiSeries& b);
    friend MultiSeries operator*(const MultiSeries& a, const MultiSeries& b);
    friend MultiSeries operator*(const Rational& c, const MultiSeries& a);
    friend MultiSeries operator-(const MultiSeries& a);
    friend bool operator==(const MultiSeries& a, const MultiSeries& b);

  private:
    void check_same_shape(const MultiSeries& other) const;

    int yvars_;
    int trunc_;
    std::map<MIdx, Rational> terms_; // invariant: no zero values, |alpha| <= trunc
};

} // namespace trs

#endif
