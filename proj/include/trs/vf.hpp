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

#ifndef TRS_VF_HPP
#define TRS_VF_HPP

#include <optional>
#include <vector>

#include "trs/linear_system.hpp"
#include "trs/multiseries.hpp"

namespace trs {

// xi = xi_x d/dx + xi_y . d/dy as total-degree jets.
struct VectorFieldJet {
    int n = 0;
    MultiSeries xi_x;
    std::vector<MultiSeries> xi_y;

    VectorFieldJet() = default;
    VectorFieldJet(MultiSeries fx, std::vector<MultiSeries> fy);
    int trunc() const { return xi_x.trunc(); }
    bool vanishes_at_origin() const;
};

// y = Gamma_y(x) with zero constant terms.
struct FormalCurve {
    std::vector<TruncatedSeries> gamma_y;

    FormalCurve() = default;
    explicit FormalCurve(std::vector<TruncatedSeries> g);
    int n() const { return static_cast<int>(gamma_y.size()); }
    int trunc() const;
    // least order with a nonzero coefficient across components (contact order
    // of the adapted coordinates with the curve)
    std::optional<int> contact_order() const;
    FormalCurve jet(int k) const;
    std::vector<double> eval_double(double x) const;
};

struct InvariantCouple {
    VectorFieldJet vf;
    FormalCurve curve;
    int n() const { return vf.n; }
};

struct CoordTransform {
    enum class Kind { PolyTranslation, PolyRegular, DiagMonomial, Ramification };
    Kind kind = Kind::PolyTranslation;
    std::vector<TruncatedSeries> beta; // PolyTranslation: beta in (x R[x])^n
    PolyMatrix P;                      // PolyRegular: P(0) invertible
    int k = 0;                         // DiagMonomial: scale y_1..y_k by x
    int r = 2;                         // Ramification

    static CoordTransform translation(std::vector<TruncatedSeries> beta);
    static CoordTransform poly_regular(PolyMatrix p);
    static CoordTransform diag_monomial(int k);
    static CoordTransform ramification(int r);

    // jet-determinacy shift of Lemma-style bookkeeping: s for affine and
    // ramification steps, s+1 for diagonal monomial steps
    int shift(int s) const { return kind == Kind::DiagMonomial ? s + 1 : s; }
};

struct TransformChain {
    std::vector<CoordTransform> steps;

    int determinacy_shift(int s) const {
        int extra = 0;
        for (const auto& t : steps)
            if (t.kind == CoordTransform::Kind::DiagMonomial) ++extra;
        return s + extra;
    }
};

// TRS normal form of a vector field: the field equals
// x^e u(x,y) [ x^{q+1} d/dx + ((D + x^q C) y + x^{q+1+N} V(x, x^M y)) d/dy ].
struct TRSVFForm {
    int e = 0;
    MultiSeries unit; // jet of u, unit at the origin
    int q = 0, N = 0, M = 0;
    BlockStructure bs;
    std::vector<ExpBlock> dblocks;
    RatMatrix C;
    std::vector<MultiSeries> V; // vestigial components as series in (x, y)

    int n() const { return C.rows(); }
    PolyMatrix d_matrix(int trunc) const;
    TRSLinearForm linear_part() const; // D, C and the y-linear slice of V
};

struct InvarianceReport {
    bool holds = false;
    int verified_order = -1;
    int m = -1; // ord_x of xi_x along the curve
};

InvarianceReport check_invariance(const InvariantCouple& c);

InvariantCouple apply_coord_transform(const InvariantCouple& c, const CoordTransform& t);
InvariantCouple apply_chain(const InvariantCouple& c, const TransformChain& chain);

// Map a point of the transformed chart to the original chart (the chain maps
// new coordinates to old step by step).
std::vector<double> push_forward_point(const TransformChain& chain, const std::vector<double>& pt);
// Inverse map: original chart to the transformed chart.
std::vector<double> pull_back_point(const TransformChain& chain, const std::vector<double>& pt);

struct NormalizedX {
    int e = 0;
    int p = -1;
    MultiSeries unit;         // u with xi_x = x^{e+p+1} u
    VectorFieldJet eta;       // eta_x = x^{p+1} exactly
    TransformChain prep;      // translation + m full diagonal monomial steps
    InvariantCouple prepared; // the couple after prep (full field, unit kept)
};

// Preparation: translate along the curve jet and blow up until
// xi_x = x^m * unit; factors x^e out of the whole field.
NormalizedX normalize_x_component(const InvariantCouple& c);

LinearSystem associated_linear_system(const VectorFieldJet& eta, const FormalCurve& curve);

struct VFReduceOptions {
    int working_order = 0; // 0: pick automatically
    ReduceOptions linear;
};

struct VFReduction {
    TransformChain chain;
    TRSVFForm form;
    InvariantCouple couple; // the transformed couple in TRS coordinates
};

// Theorem-style pipeline to (q,0,0), then the (q,N,M) refinement.
VFReduction reduce_vf_trs(const InvariantCouple& c, const VFReduceOptions& opt = {});
VFReduction refine_trs(const InvariantCouple& c, int N, int M, const VFReduceOptions& opt = {});

// Recognize a couple as being in TRS coordinates of type (q, N, M).
std::optional<TRSVFForm> recognize_trs_vf(const InvariantCouple& c, int N, int M);

} // namespace trs

#endif
