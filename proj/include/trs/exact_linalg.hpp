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

#ifndef TRS_EXACT_LINALG_HPP
#define TRS_EXACT_LINALG_HPP

#include <map>
#include <optional>
#include <vector>

#include "trs/matrix.hpp"

namespace trs {

// ---- dense exact linear algebra ----

int rank(const RatMatrix& m);
Rational determinant(const RatMatrix& m);
RatMatrix inverse(const RatMatrix& m); // throws NotRegular when singular
// Basis of the right nullspace, as matrix columns (may have 0 columns).
RatMatrix nullspace(const RatMatrix& m);
// Solve m x = rhs (any consistent solution); nullopt when inconsistent.
std::optional<RatMatrix> solve(const RatMatrix& m, const RatMatrix& rhs);
// Solve the Sylvester equation a x - x b = e; nullopt when singular+inconsistent.
std::optional<RatMatrix> solve_sylvester(const RatMatrix& a, const RatMatrix& b, const RatMatrix& e);
// Extend the independent columns of v to a basis of Q^n; returns n x n invertible.
RatMatrix complete_basis(const RatMatrix& v);

// ---- dense polynomials over Q (index = degree) ----

using RatPoly = std::vector<Rational>;

RatPoly poly_trim(RatPoly p);
int poly_deg(const RatPoly& p); // -1 for zero polynomial
RatPoly poly_add(const RatPoly& a, const RatPoly& b);
RatPoly poly_mul(const RatPoly& a, const RatPoly& b);
// division with remainder (b nonzero)
std::pair<RatPoly, RatPoly> poly_divrem(const RatPoly& a, const RatPoly& b);
RatPoly poly_gcd(RatPoly a, RatPoly b); // monic gcd
RatPoly poly_shift(const RatPoly& p, const Rational& c); // p(x + c)
Rational poly_eval(const RatPoly& p, const Rational& x);

RatPoly charpoly(const RatMatrix& m); // monic, det(xI - m)

// Exact square root of a non-negative rational if it exists.
std::optional<Rational> rat_sqrt_exact(const Rational& r);

// ---- spectrum analysis ----

// One irreducible-over-Q piece of a characteristic polynomial, refined over R.
struct EigenGroup {
    enum class Kind {
        RationalEig,   // eigenvalue re (rational)
        GaussianPair,  // re +- i*im with rational re, im > 0
        IrrationalReal,    // x^2+px+q with positive non-square discriminant
        IrrationalComplex, // x^2+px+q, negative non-perfect-square discriminant
        HighDegree,    // irreducible factor of degree >= 3 (not split exactly)
    };
    Kind kind;
    Rational re, im;   // meaningful for RationalEig / GaussianPair
    RatPoly min_poly;  // the monic factor this group came from
    int mult;          // multiplicity of the factor in the charpoly
    int dim() const { return poly_deg(min_poly) * mult; }
    bool exact_point() const { return kind == Kind::RationalEig || kind == Kind::GaussianPair; }
};

// Factor a monic polynomial into rational roots, quadratics, and a leftover
// high-degree part (leftover returned as HighDegree groups, one per
// irreducible-or-unsplit factor).
std::vector<EigenGroup> analyze_spectrum(const RatPoly& chi);

// Exact predicate: no two roots of chi differ by a nonzero integer.
// Decided by gcd(chi(x), chi(x+k)) over the integer window given by root bounds.
bool spectrum_good_exact(const RatPoly& chi);

// Rational upper bound for the real part of any root (Cauchy bound).
Rational spectrum_real_upper_bound(const RatPoly& chi);

// Float eigenvalues (for reporting; never used for exact decisions).
std::vector<std::pair<double, double>> float_eigenvalues(const RatMatrix& m);

// ---- incremental exact linear system ----

// Equations arrive one at a time over a fixed variable set; rows are kept in
// echelon form so inconsistency is detected on arrival.
class IncrementalSolver {
  public:
    explicit IncrementalSolver(int nvars);
    // Returns false when the equation is inconsistent with those before it.
    bool add_equation(const std::map<int, Rational>& coeffs, const Rational& rhs);
    // Current solution with free variables set to zero.
    std::vector<Rational> solution() const;

  private:
    int nvars_;
    // rows in echelon form: pivot var -> (coefficients, rhs), pivot coeff = 1
    std::map<int, std::pair<std::map<int, Rational>, Rational>> rows_;
};

} // namespace trs

#endif
