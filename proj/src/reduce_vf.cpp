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

#include "trs/reduce_linear.hpp"
#include "trs/vf.hpp"

#include <algorithm>

namespace trs {

namespace {

// Translate a linear gauge into admissible coordinate transforms.  Diagonal
// monomial gauges decompose into threshold steps, each a permutation-conjugated
// full-or-partial blow-up on a leading coordinate block.
void lift_gauge(const GaugeTransform& g, int n, std::vector<CoordTransform>& out) {
    switch (g.kind) {
        case GaugeTransform::Kind::PolyRegular:
            out.push_back(CoordTransform::poly_regular(g.P));
            return;
        case GaugeTransform::Kind::Ramification:
            out.push_back(CoordTransform::ramification(g.r));
            return;
        case GaugeTransform::Kind::DiagMonomial: {
            int kmax = *std::max_element(g.exponents.begin(), g.exponents.end());
            for (int th = kmax; th >= 1; --th) {
                std::vector<int> sel;
                for (int i = 0; i < n; ++i)
                    if (g.exponents[static_cast<size_t>(i)] >= th) sel.push_back(i);
                bool prefix = true;
                for (size_t i = 0; i < sel.size(); ++i) prefix &= sel[i] == static_cast<int>(i);
                if (prefix) {
                    out.push_back(CoordTransform::diag_monomial(static_cast<int>(sel.size())));
                    continue;
                }
                // permutation sending e_l to e_{sel[l]}: y = P ytilde puts the
                // selected coordinates first in the new chart
                RatMatrix perm(n, n);
                std::vector<bool> used(static_cast<size_t>(n), false);
                int col = 0;
                for (int s : sel) {
                    perm.at(s, col++) = 1;
                    used[static_cast<size_t>(s)] = true;
                }
                for (int i = 0; i < n; ++i)
                    if (!used[static_cast<size_t>(i)]) perm.at(i, col++) = 1;
                out.push_back(CoordTransform::poly_regular(PolyMatrix::from_constant(perm, 0)));
                out.push_back(CoordTransform::diag_monomial(static_cast<int>(sel.size())));
                out.push_back(CoordTransform::poly_regular(PolyMatrix::from_constant(inverse(perm), 0)));
            }
            return;
        }
    }
    throw Error(ErrorKind::Internal, "unreachable");
}

void append_and_apply(InvariantCouple& cur, TransformChain& chain, const CoordTransform& t) {
    cur = apply_coord_transform(cur, t);
    chain.steps.push_back(t);
}

// Remark-style sanity: with a singular origin and contact >= m, the y-components
// restricted to the axis vanish to order >= m.  Vacuous when the contact is lower.
void assert_axis_order(const InvariantCouple& c, int m) {
    auto contact = c.curve.contact_order();
    if (contact && *contact < m) return;
    for (const auto& f : c.vf.xi_y) {
        TruncatedSeries axis = f.y_constant_part();
        auto o = axis.ord();
        if (o && *o < m)
            throw Error(ErrorKind::Internal, "axis order dropped below the contact order");
    }
}

bool spectrum_strictly_negative(const RatMatrix& c) {
    auto groups = analyze_spectrum(charpoly(c));
    for (const auto& g : groups) {
        switch (g.kind) {
            case EigenGroup::Kind::RationalEig:
            case EigenGroup::Kind::GaussianPair:
            case EigenGroup::Kind::IrrationalComplex:
                if (!(g.re < 0)) return false;
                break;
            case EigenGroup::Kind::IrrationalReal: {
                // roots of x^2 + px + q both negative iff p > 0 and q > 0
                if (!(g.min_poly[1] > 0 && g.min_poly[0] > 0)) return false;
                break;
            }
            case EigenGroup::Kind::HighDegree:
                throw Error(ErrorKind::Undecidable, "spectrum sign undecidable for an unfactored part");
        }
    }
    return true;
}

} // namespace

VFReduction reduce_vf_trs(const InvariantCouple& c, const VFReduceOptions& opt) {
    if (!c.vf.vanishes_at_origin())
        throw Error(ErrorKind::Inadmissible, "reduction requires a singular point at the origin");
    InvarianceReport inv = check_invariance(c);
    if (!inv.holds)
        throw Error(ErrorKind::Inadmissible, "couple is not invariant to the verified order");

    VFReduction res;
    InvariantCouple cur = c;

    // fast path: the given coordinates already exhibit the form
    if (auto direct = recognize_trs_vf(cur, 0, 0)) {
        if (has_good_spectrum(direct->C)) {
            res.form = *direct;
            res.couple = cur;
            return res;
        }
    }

    NormalizedX nx = normalize_x_component(cur);
    for (const auto& t : nx.prep.steps) res.chain.steps.push_back(t);
    cur = nx.prepared;
    assert_axis_order(cur, inv.m);

    if (nx.p < 0) {
        // non-singular reduced field: one extra blow-up gives type (0,0,0)
        append_and_apply(cur, res.chain, CoordTransform::diag_monomial(c.n()));
        auto form = recognize_trs_vf(cur, 0, 0);
        if (!form) throw Error(ErrorKind::Internal, "blow-up of a non-singular field missed the TRS shape");
        res.form = *form;
        res.couple = cur;
        return res;
    }

    LinearSystem assoc = associated_linear_system(nx.eta, cur.curve);
    GaugeChain lin_chain;
    int q_target = nx.p;
    if (!assoc.regular()) {
        ReduceOptions lopt = opt.linear;
        if (opt.working_order > 0) lopt.working_order = opt.working_order;
        ReductionResult lin = reduce_linear_full(assoc, lopt);
        lin_chain = lin.chain;
        if (!lin.is_regular()) q_target = lin.form().q;
    }

    std::vector<CoordTransform> lifted;
    for (const auto& g : lin_chain) lift_gauge(g, c.n(), lifted);
    int diag_steps = 0;
    for (const auto& t : lifted)
        if (t.kind == CoordTransform::Kind::DiagMonomial) ++diag_steps;
    const int m_prep = q_target + 1 + diag_steps; // determinacy bound h(q+1)

    // second preparation: deep translation + m_prep blow-ups
    std::vector<TruncatedSeries> beta;
    bool nonzero = false;
    for (const auto& g : cur.curve.gamma_y) {
        TruncatedSeries b = g.jet(std::min(2 * m_prep, g.trunc()));
        nonzero |= !b.known_zero();
        beta.push_back(b);
    }
    if (nonzero) append_and_apply(cur, res.chain, CoordTransform::translation(beta));
    for (int i = 0; i < m_prep; ++i) append_and_apply(cur, res.chain, CoordTransform::diag_monomial(c.n()));

    for (const auto& t : lifted) append_and_apply(cur, res.chain, t);

    auto form = recognize_trs_vf(cur, 0, 0);
    if (!form)
        throw Error(ErrorKind::Internal, "pipeline output not recognized as a TRS form");
    if (!has_good_spectrum(form->C))
        throw Error(ErrorKind::Internal, "pipeline output residual lost good spectrum");
    res.form = *form;
    res.couple = cur;
    return res;
}

VFReduction refine_trs(const InvariantCouple& c, int N, int M, const VFReduceOptions& opt) {
    (void)opt;
    auto base = recognize_trs_vf(c, 0, 0);
    if (!base)
        throw Error(ErrorKind::Inadmissible, "refinement input is not in TRS coordinates of type (q,0,0)");
    if (!has_good_spectrum(base->C))
        throw Error(ErrorKind::Inadmissible, "refinement requires a good-spectrum residual part");
    const int q = base->q;
    const int n = c.n();

    VFReduction res;
    InvariantCouple cur = c;

    // associated system of the unit-normalized field
    NormalizedX nx = normalize_x_component(cur);
    if (!nx.prep.steps.empty())
        throw Error(ErrorKind::Internal, "recognized TRS coordinates should need no preparation");
    LinearSystem assoc = associated_linear_system(nx.eta, cur.curve);
    auto sform = recognize_trs(assoc);
    if (!sform)
        throw Error(ErrorKind::Internal, "associated system of a TRS couple not in TRS form");
    auto [qgauge, killed] = kill_vestigial(*sform, N + M);

    const int m = q + 1 + N + M; // determinacy bound for the polynomial gauge
    Integer lbound = rat_ceil(spectrum_real_upper_bound(charpoly(base->C))) - Integer(M) + 1;
    long l = std::max<long>({1, static_cast<long>(m - q), lbound.convert_to<long>()});
    long lprime = std::max<long>(l + m, l + M + 1);

    std::vector<TruncatedSeries> beta;
    bool nonzero = false;
    for (const auto& g : cur.curve.gamma_y) {
        TruncatedSeries b = g.jet(std::min<int>(static_cast<int>(lprime), g.trunc()));
        nonzero |= !b.known_zero();
        beta.push_back(b);
    }
    if (nonzero) append_and_apply(cur, res.chain, CoordTransform::translation(beta));
    for (long i = 0; i < l; ++i) append_and_apply(cur, res.chain, CoordTransform::diag_monomial(n));
    append_and_apply(cur, res.chain, CoordTransform::poly_regular(qgauge.P));
    for (long i = 0; i < M; ++i) append_and_apply(cur, res.chain, CoordTransform::diag_monomial(n));

    auto form = recognize_trs_vf(cur, N, M);
    if (!form)
        throw Error(ErrorKind::Internal, "refined field not recognized as a TRS form of type (q,N,M)");
    if (!(form->d_matrix(q) == base->d_matrix(q)))
        throw Error(ErrorKind::Internal, "refinement changed the exponential part");
    RatMatrix expected = base->C - Rational(l + M) * RatMatrix::identity(n);
    if (!(form->C == expected))
        throw Error(ErrorKind::Internal, "refined residual is not C - (l+M) I");
    if (!spectrum_strictly_negative(form->C))
        throw Error(ErrorKind::Internal, "refined residual spectrum not strictly negative");
    res.form = *form;
    res.couple = cur;
    return res;
}

} // namespace trs
