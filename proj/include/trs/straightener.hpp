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

#ifndef TRS_STRAIGHTENER_HPP
#define TRS_STRAIGHTENER_HPP

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

#include "trs/vf.hpp"

namespace trs {

// R(x) = Theta(Diag(b_1,...,b_k)) oplus 0 with b_j pure imaginary nonzero
// polynomials; pairs live at explicit row offsets so interleaved layouts work.
struct RotationalMatrix {
    struct Pair {
        int offset;                   // first of the two rows
        std::vector<Rational> b;      // imaginary coefficients b^0..b^deg
        int order_re;                 // v_l = ord Re(c_l) at extraction time
    };
    int n = 0;
    int degree = 0;                   // common degree bound of the b_j
    std::vector<Pair> pairs;

    int axis_dim() const { return n - 2 * static_cast<int>(pairs.size()); }
    PolyMatrix matrix(int trunc) const; // exact Theta-embedded polynomial matrix
};

// Angles alpha_j(x) = b^0/((g+1)x^{g+1}) + b^1/(g x^g) + ... + b^g/x with
// g the stored exponent parameter; evaluation is defined only for x > 0.
struct StraightenerEval {
    RotationalMatrix r;
    int q_param = 0;

    StraightenerEval() = default;
    StraightenerEval(RotationalMatrix rot, int q);
    // angle of pair j at x, exactly reduced mod 2 pi before trig evaluation
    double angle(int pair_index, double x) const;
};

// Collect the dominant-rotation jets b_l = j_{v_l - 1}(c_l); absent when no
// block has dominant rotation.
std::optional<RotationalMatrix> extract_rotational(const std::vector<ExpBlock>& dblocks,
                                                   const BlockStructure& bs, int q);

Eigen::MatrixXd omega_eval(const StraightenerEval& se, double x);

struct OmegaReport {
    bool ode_ok = false;
    bool isometry_ok = false;
    bool decay_ok = false;
    bool commute_ok = true;
    int supported_sign = 0; // -1: Omega' = -R/x^{g+2} Omega (integral convention)
    double max_ode_residual = 0;
    double max_isometry_err = 0;
    double max_commute_err = 0;
};

OmegaReport verify_omega_properties(const StraightenerEval& se, const std::vector<double>& xs, int m_power,
                                    const std::optional<RatMatrix>& compatible_c,
                                    double ode_tol = 1e-6, double iso_tol = 1e-12);

struct StraightenedField {
    int s = 0;          // ord of D - R + x^q C
    int q_reduced = 0;  // q - s
    int N = 0;
    TRSLinearForm principal; // exponential part (D-R)/x^s, residual C
    // numeric vestigial closure g(x, z) = x^M Omega^{-1}(x) V(x, x^M Omega(x) z)
    std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)> vestigial;
    bool vestigial_zero = true;
    StraightenerEval straightener;
};

// Prop.-style straightening of a TRS vector-field form with M-scaling; the
// rotational part is subtracted symbolically, the vestigial part becomes a
// numeric closure.
StraightenedField straighten_field(const TRSVFForm& f, const RotationalMatrix& r);

} // namespace trs

#endif
