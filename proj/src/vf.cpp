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

#include "trs/vf.hpp"

#include <algorithm>

namespace trs {

VectorFieldJet::VectorFieldJet(MultiSeries fx, std::vector<MultiSeries> fy)
    : n(static_cast<int>(fy.size())), xi_x(std::move(fx)), xi_y(std::move(fy)) {
    int t = xi_x.trunc();
    for (const auto& f : xi_y) {
        if (f.yvars() != n || xi_x.yvars() != n)
            throw Error(ErrorKind::ShapeError, "vector field arity mismatch");
        t = std::min(t, f.trunc());
    }
    if (xi_x.trunc() > t) xi_x = xi_x.restrict_trunc(t);
    for (auto& f : xi_y)
        if (f.trunc() > t) f = f.restrict_trunc(t);
}

bool VectorFieldJet::vanishes_at_origin() const {
    MIdx zero(static_cast<size_t>(n) + 1, 0);
    if (xi_x.coeff(zero) != 0) return false;
    for (const auto& f : xi_y)
        if (f.coeff(zero) != 0) return false;
    return true;
}

FormalCurve::FormalCurve(std::vector<TruncatedSeries> g) : gamma_y(std::move(g)) {
    for (const auto& s : gamma_y)
        if (s.trunc() >= 0 && s[0] != 0)
            throw Error(ErrorKind::ShapeError, "formal curve must pass through the origin");
}

int FormalCurve::trunc() const {
    int t = INT32_MAX;
    for (const auto& s : gamma_y) t = std::min(t, s.trunc());
    return gamma_y.empty() ? 0 : t;
}

std::optional<int> FormalCurve::contact_order() const {
    std::optional<int> best;
    for (const auto& s : gamma_y) {
        auto o = s.ord();
        if (o && (!best || *o < *best)) best = o;
    }
    return best;
}

FormalCurve FormalCurve::jet(int k) const {
    std::vector<TruncatedSeries> g;
    g.reserve(gamma_y.size());
    for (const auto& s : gamma_y) g.push_back(s.jet(std::min(k, s.trunc())));
    return FormalCurve(std::move(g));
}

std::vector<double> FormalCurve::eval_double(double x) const {
    std::vector<double> out;
    out.reserve(gamma_y.size());
    for (const auto& s : gamma_y) out.push_back(s.eval_double(x));
    return out;
}

CoordTransform CoordTransform::translation(std::vector<TruncatedSeries> beta) {
    CoordTransform t;
    t.kind = Kind::PolyTranslation;
    for (const auto& b : beta)
        if (b.trunc() >= 0 && b[0] != 0)
            throw Error(ErrorKind::DomainError, "translation polynomials must vanish at 0");
    t.beta = std::move(beta);
    return t;
}

CoordTransform CoordTransform::poly_regular(PolyMatrix p) {
    CoordTransform t;
    t.kind = Kind::PolyRegular;
    if (determinant(p.eval0()) == 0)
        throw Error(ErrorKind::NotRegular, "coordinate change requires invertible constant term");
    t.P = std::move(p);
    return t;
}

CoordTransform CoordTransform::diag_monomial(int k) {
    CoordTransform t;
    t.kind = Kind::DiagMonomial;
    if (k < 1) throw Error(ErrorKind::DomainError, "diagonal monomial block must be >= 1");
    t.k = k;
    return t;
}

CoordTransform CoordTransform::ramification(int r) {
    CoordTransform t;
    t.kind = Kind::Ramification;
    if (r < 2) throw Error(ErrorKind::DomainError, "ramification order must be >= 2");
    t.r = r;
    return t;
}

InvarianceReport check_invariance(const InvariantCouple& c) {
    const auto& g = c.curve.gamma_y;
    TruncatedSeries fx = c.vf.xi_x.eval_at_curve(g);
    bool all_zero = fx.known_zero();
    std::vector<TruncatedSeries> fy;
    fy.reserve(g.size());
    for (const auto& f : c.vf.xi_y) {
        fy.push_back(f.eval_at_curve(g));
        all_zero = all_zero && fy.back().known_zero();
    }
    if (all_zero)
        throw Error(ErrorKind::DegenerateCurve, "field vanishes along the curve to the known order");

    InvarianceReport rep;
    auto mo = fx.ord();
    rep.m = mo ? *mo : -1;
    rep.holds = true;
    rep.verified_order = INT32_MAX;
    for (size_t i = 0; i < g.size(); ++i) {
        TruncatedSeries resid = fx * g[i].derivative() - fy[i];
        rep.verified_order = std::min(rep.verified_order, resid.trunc());
        if (!resid.known_zero()) rep.holds = false;
    }
    return rep;
}

InvariantCouple apply_coord_transform(const InvariantCouple& c, const CoordTransform& t) {
    const int n = c.n();
    InvariantCouple out;
    switch (t.kind) {
        case CoordTransform::Kind::PolyTranslation: {
            if (static_cast<int>(t.beta.size()) != n)
                throw Error(ErrorKind::ShapeError, "translation arity mismatch");
            MultiSeries fx = c.vf.xi_x.subst_translation(t.beta);
            std::vector<MultiSeries> fy;
            fy.reserve(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i) {
                MultiSeries comp = c.vf.xi_y[static_cast<size_t>(i)].subst_translation(t.beta);
                const TruncatedSeries& bi = t.beta[static_cast<size_t>(i)];
                if (bi.trunc() >= 1) {
                    MultiSeries db = MultiSeries::from_x_series(bi.derivative(), n);
                    comp = comp - fx * db;
                }
                fy.push_back(comp);
            }
            std::vector<TruncatedSeries> g;
            g.reserve(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i)
                g.push_back(c.curve.gamma_y[static_cast<size_t>(i)] - t.beta[static_cast<size_t>(i)]);
            out.vf = VectorFieldJet(fx, std::move(fy));
            out.curve = FormalCurve(std::move(g));
            return out;
        }
        case CoordTransform::Kind::PolyRegular: {
            if (t.P.size() != n) throw Error(ErrorKind::ShapeError, "coordinate change size mismatch");
            // gauge matrices are exact polynomial data: widen so the
            // substitution keeps the field's truncation
            PolyMatrix P = t.P.widen_exact(std::max(t.P.trunc(), c.vf.trunc()));
            PolyMatrix Pinv = P.inverse_series();
            MultiSeries fx = c.vf.xi_x.subst_linear(P);
            std::vector<MultiSeries> sy;
            sy.reserve(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i) sy.push_back(c.vf.xi_y[static_cast<size_t>(i)].subst_linear(P));
            // P^{-1} (xi_y o phi) - (xi_x o phi) P^{-1} P' ytilde
            PolyMatrix dP = P.widen_exact(std::max(P.trunc(), 1)).derivative();
            PolyMatrix PinvdP = Pinv * dP;
            std::vector<MultiSeries> fy;
            fy.reserve(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i) {
                MultiSeries acc(n, sy[0].trunc());
                for (int j = 0; j < n; ++j) {
                    const TruncatedSeries& pij = Pinv.at(i, j);
                    if (pij.known_zero()) continue;
                    acc = acc + MultiSeries::from_x_series(pij, n) * sy[static_cast<size_t>(j)];
                }
                MultiSeries corr(n, acc.trunc());
                for (int j = 0; j < n; ++j) {
                    const TruncatedSeries& mij = PinvdP.at(i, j);
                    if (mij.known_zero()) continue;
                    corr = corr + MultiSeries::from_x_series(mij, n) * MultiSeries::var_y(j, n, acc.trunc());
                }
                fy.push_back(acc - fx * corr);
            }
            std::vector<TruncatedSeries> g(static_cast<size_t>(n), TruncatedSeries::zero(c.curve.trunc()));
            for (int i = 0; i < n; ++i) {
                TruncatedSeries acc = TruncatedSeries::zero(std::min(Pinv.trunc(), c.curve.trunc()));
                for (int j = 0; j < n; ++j)
                    acc = acc + (Pinv.at(i, j) * c.curve.gamma_y[static_cast<size_t>(j)])
                                    .restrict_trunc(acc.trunc());
                g[static_cast<size_t>(i)] = acc;
            }
            out.vf = VectorFieldJet(fx, std::move(fy));
            out.curve = FormalCurve(std::move(g));
            return out;
        }
        case CoordTransform::Kind::DiagMonomial: {
            int k = t.k;
            if (k > n) throw Error(ErrorKind::ShapeError, "diagonal monomial block exceeds dimension");
            auto contact = c.curve.contact_order();
            if (contact && *contact < 2)
                throw Error(ErrorKind::Inadmissible, "diagonal monomial needs contact order >= 2");
            // center {x=0, y_1..y_k=0} must be invariant: xi_x and xi_{y_j}, j<=k
            // vanish after setting x=0, y_1..k=0
            std::vector<bool> mask(static_cast<size_t>(n), false);
            for (int i = 0; i < k; ++i) mask[static_cast<size_t>(i)] = true;
            auto vanishes_on_center = [&](const MultiSeries& f) {
                MultiSeries r = f.set_y_zero(mask);
                for (const auto& [a, cc] : r.terms())
                    if (a[0] == 0 && cc != 0) return false;
                return true;
            };
            if (!vanishes_on_center(c.vf.xi_x))
                throw Error(ErrorKind::Inadmissible, "blow-up center not invariant (x-component)");
            for (int i = 0; i < k; ++i)
                if (!vanishes_on_center(c.vf.xi_y[static_cast<size_t>(i)]))
                    throw Error(ErrorKind::Inadmissible, "blow-up center not invariant (y-component)");

            MultiSeries fx = c.vf.xi_x.subst_scale_by_x(k);
            std::vector<MultiSeries> fy;
            fy.reserve(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i) {
                MultiSeries comp = c.vf.xi_y[static_cast<size_t>(i)].subst_scale_by_x(k);
                if (i < k) {
                    comp = comp - fx * MultiSeries::var_y(i, n, comp.trunc());
                    comp = comp.exact_divide_x(1);
                }
                fy.push_back(comp);
            }
            std::vector<TruncatedSeries> g;
            g.reserve(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i) {
                const TruncatedSeries& gi = c.curve.gamma_y[static_cast<size_t>(i)];
                g.push_back(i < k ? gi.exact_divide_x(1) : gi);
            }
            out.vf = VectorFieldJet(fx, std::move(fy));
            out.curve = FormalCurve(std::move(g));
            return out;
        }
        case CoordTransform::Kind::Ramification: {
            if (c.vf.xi_x.ord_x_floor() < 1)
                throw Error(ErrorKind::Inadmissible, "ramification requires {x=0} invariant");
            MultiSeries fx = c.vf.xi_x.subst_ramify(t.r);
            fx = fx.exact_divide_x(t.r - 1);
            fx = Rational(1, t.r) * fx;
            std::vector<MultiSeries> fy;
            fy.reserve(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i) fy.push_back(c.vf.xi_y[static_cast<size_t>(i)].subst_ramify(t.r));
            std::vector<TruncatedSeries> g;
            g.reserve(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i) g.push_back(c.curve.gamma_y[static_cast<size_t>(i)].ramify(t.r));
            out.vf = VectorFieldJet(fx, std::move(fy));
            out.curve = FormalCurve(std::move(g));
            return out;
        }
    }
    throw Error(ErrorKind::Internal, "unreachable");
}

InvariantCouple apply_chain(const InvariantCouple& c, const TransformChain& chain) {
    InvariantCouple cur = c;
    for (const auto& t : chain.steps) cur = apply_coord_transform(cur, t);
    return cur;
}

std::vector<double> push_forward_point(const TransformChain& chain, const std::vector<double>& pt) {
    std::vector<double> p = pt;
    for (auto it = chain.steps.rbegin(); it != chain.steps.rend(); ++it) {
        const CoordTransform& t = *it;
        double x = p[0];
        switch (t.kind) {
            case CoordTransform::Kind::PolyTranslation:
                for (size_t i = 0; i < t.beta.size(); ++i) p[i + 1] += t.beta[i].eval_double(x);
                break;
            case CoordTransform::Kind::PolyRegular: {
                int n = t.P.size();
                std::vector<double> y(p.begin() + 1, p.end());
                for (int i = 0; i < n; ++i) {
                    double acc = 0;
                    for (int j = 0; j < n; ++j) acc += t.P.at(i, j).eval_double(x) * y[static_cast<size_t>(j)];
                    p[static_cast<size_t>(i) + 1] = acc;
                }
                break;
            }
            case CoordTransform::Kind::DiagMonomial:
                for (int i = 0; i < t.k; ++i) p[static_cast<size_t>(i) + 1] *= x;
                break;
            case CoordTransform::Kind::Ramification:
                p[0] = std::pow(x, t.r);
                break;
        }
    }
    return p;
}

NormalizedX normalize_x_component(const InvariantCouple& c) {
    if (!c.vf.vanishes_at_origin())
        throw Error(ErrorKind::Inadmissible, "preparation requires a singular point at the origin");
    InvarianceReport rep = check_invariance(c);
    if (rep.m < 0)
        throw Error(ErrorKind::DegenerateCurve, "order of the x-component along the curve is undefined");
    const int m = rep.m;
    const int n = c.n();

    NormalizedX nx;
    InvariantCouple cur = c;
    // the preparation is skipped when the x-component is already a monomial
    // times a unit; the translation and blow-ups would only distort (e, p)
    MIdx unit_probe(static_cast<size_t>(n) + 1, 0);
    unit_probe[0] = c.vf.xi_x.ord_x_floor();
    bool already = c.vf.xi_x.ord_x_floor() <= c.vf.xi_x.trunc() && c.vf.xi_x.coeff(unit_probe) != 0;
    if (!already) {
        // translation by j_{m+1} Gamma
        std::vector<TruncatedSeries> beta;
        beta.reserve(static_cast<size_t>(n));
        bool nonzero = false;
        for (const auto& g : c.curve.gamma_y) {
            TruncatedSeries b = g.jet(std::min(m + 1, g.trunc()));
            nonzero |= !b.known_zero();
            beta.push_back(b);
        }
        if (nonzero) {
            CoordTransform tr = CoordTransform::translation(beta);
            nx.prep.steps.push_back(tr);
            cur = apply_coord_transform(cur, tr);
        }
        for (int i = 0; i < m; ++i) {
            CoordTransform dm = CoordTransform::diag_monomial(n);
            nx.prep.steps.push_back(dm);
            cur = apply_coord_transform(cur, dm);
        }
    }
    nx.prepared = cur;

    // xi_x = x^m * unit
    MultiSeries u = cur.vf.xi_x.exact_divide_x(m);
    MIdx zero(static_cast<size_t>(n) + 1, 0);
    if (u.coeff(zero) == 0)
        throw Error(ErrorKind::Internal, "prepared x-component is not x^m times a unit");
    // largest power of x dividing the whole field
    int e = m;
    for (const auto& f : cur.vf.xi_y) e = std::min(e, f.ord_x_floor());
    nx.e = e;
    nx.p = m - e - 1;
    nx.unit = u;

    MultiSeries uinv = u.reciprocal();
    MultiSeries eta_x = MultiSeries::monomial(1, [&] {
        MIdx a(static_cast<size_t>(n) + 1, 0);
        a[0] = m - e;
        return a;
    }(), cur.vf.xi_x.trunc());
    std::vector<MultiSeries> eta_y;
    eta_y.reserve(static_cast<size_t>(n));
    for (const auto& f : cur.vf.xi_y) eta_y.push_back((f * uinv).exact_divide_x(e));
    nx.eta = VectorFieldJet(eta_x, std::move(eta_y));
    return nx;
}

LinearSystem associated_linear_system(const VectorFieldJet& eta, const FormalCurve& curve) {
    const int n = eta.n;
    int tr = INT32_MAX;
    std::vector<TruncatedSeries> entries;
    entries.reserve(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            TruncatedSeries e = eta.xi_y[static_cast<size_t>(i)].derivative_y(j).eval_at_curve(curve.gamma_y);
            tr = std::min(tr, e.trunc());
            entries.push_back(e);
        }
    PolyMatrix a(n, tr);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a.at(i, j) = entries[static_cast<size_t>(i) * n + j].restrict_trunc(tr);
    int p = eta.xi_x.ord_x_floor() - 1;
    return LinearSystem::normalized(n, p, a);
}

PolyMatrix TRSVFForm::d_matrix(int trunc) const {
    TRSLinearForm lf;
    lf.q = q;
    lf.bs = bs;
    lf.dblocks = dblocks;
    lf.C = C;
    lf.V = PolyMatrix(n(), 0);
    return lf.d_matrix(trunc);
}

TRSLinearForm TRSVFForm::linear_part() const {
    TRSLinearForm lf;
    lf.q = q;
    lf.bs = bs;
    lf.dblocks = dblocks;
    lf.C = C;
    int vt = INT32_MAX;
    for (const auto& v : V) vt = std::min(vt, std::max(v.trunc() - 1, 0));
    lf.V = PolyMatrix(n(), vt);
    for (int i = 0; i < n(); ++i)
        for (int j = 0; j < n(); ++j)
            lf.V.at(i, j) = V[static_cast<size_t>(i)].linear_y_coefficient(j).restrict_trunc(vt);
    return lf;
}

std::optional<TRSVFForm> recognize_trs_vf(const InvariantCouple& c, int N, int M) {
    // Recognition reads the coordinates as given: xi_x must already be a
    // monomial times a unit.
    const int n = c.n();
    const MultiSeries& fx = c.vf.xi_x;
    int m = fx.ord_x_floor();
    if (m > fx.trunc()) return std::nullopt;
    MIdx probe(static_cast<size_t>(n) + 1, 0);
    probe[0] = m;
    if (fx.coeff(probe) == 0) return std::nullopt; // x-component not x^m * unit
    MultiSeries u = fx.exact_divide_x(m);

    int e = m;
    for (const auto& f : c.vf.xi_y) e = std::min(e, f.ord_x_floor());
    const int q = m - e - 1;
    if (q < 0) return std::nullopt;

    MultiSeries uinv = u.reciprocal();
    std::vector<MultiSeries> eta_y;
    eta_y.reserve(static_cast<size_t>(n));
    for (const auto& f : c.vf.xi_y) eta_y.push_back((f * uinv).exact_divide_x(e));

    // y-linear slice at y = 0
    int tr = INT32_MAX;
    std::vector<TruncatedSeries> lin(static_cast<size_t>(n) * n, TruncatedSeries::zero(0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            TruncatedSeries s = eta_y[static_cast<size_t>(i)].linear_y_coefficient(j);
            tr = std::min(tr, s.trunc());
            lin[static_cast<size_t>(i) * n + j] = s;
        }
    if (tr < q + 1) return std::nullopt;
    PolyMatrix a(n, tr);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a.at(i, j) = lin[static_cast<size_t>(i) * n + j].restrict_trunc(tr);
    if (a.eval0().is_zero()) return std::nullopt;
    auto lf = recognize_trs(LinearSystem(n, q, a));
    if (!lf) return std::nullopt;

    TRSVFForm form;
    form.e = e;
    form.unit = u;
    form.q = q;
    form.N = N;
    form.M = M;
    form.bs = lf->bs;
    form.dblocks = lf->dblocks;
    form.C = lf->C;

    // every non-principal monomial x^a y^beta needs a >= q+1+N+M|beta|; the
    // y-linear principal slots live at a <= q
    PolyMatrix principal = form.d_matrix(q) + PolyMatrix::from_constant(form.C, 0).shift_up(q);
    form.V.assign(static_cast<size_t>(n), MultiSeries(n, 0));
    for (int i = 0; i < n; ++i) {
        const MultiSeries& f = eta_y[static_cast<size_t>(i)];
        int vt = std::max((f.trunc() + 1 - (q + 1 + N)) / (M + 1) - 1, 0);
        MultiSeries vi(n, vt);
        for (const auto& [alpha, coef] : f.terms()) {
            int deg_y = midx_degree(alpha) - alpha[0];
            int a0 = alpha[0];
            if (deg_y == 1 && a0 <= q) continue; // principal slot, verified below
            int need = q + 1 + N + M * deg_y;
            if (a0 < need) return std::nullopt;
            MIdx b = alpha;
            b[0] = a0 - need;
            if (b[0] + deg_y <= vt) vi.add_term(b, coef);
        }
        form.V[static_cast<size_t>(i)] = vi;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int a0 = 0; a0 <= q; ++a0) {
                MIdx alpha(static_cast<size_t>(n) + 1, 0);
                alpha[0] = a0;
                alpha[static_cast<size_t>(j) + 1] = 1;
                if (eta_y[static_cast<size_t>(i)].coeff(alpha) != principal.at(i, j)[a0])
                    return std::nullopt;
            }
    return form;
}

} // namespace trs
