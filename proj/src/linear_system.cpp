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

#include "trs/linear_system.hpp"

#include <algorithm>

namespace trs {

LinearSystem::LinearSystem(int n_, int p_, PolyMatrix a) : n(n_), p(p_), A(std::move(a)) {
    if (A.size() != n) throw Error(ErrorKind::ShapeError, "system matrix size mismatch");
    if (p >= 0 && A.eval0().is_zero() && !A.known_zero())
        throw Error(ErrorKind::ShapeError, "singular system requires A(0) != 0; normalize first");
}

LinearSystem LinearSystem::normalized(int n, int p, const PolyMatrix& a) {
    int w = a.ord_floor();
    if (w > a.trunc()) {
        // zero matrix to truncation: a regular system with zero right side
        LinearSystem s;
        s.n = n;
        s.p = -1;
        s.A = a;
        return s;
    }
    int k = std::min(w, p + 1);
    LinearSystem s;
    s.n = n;
    s.p = p - k;
    s.A = k > 0 ? a.exact_divide_x(k) : a;
    return s;
}

GaugeTransform GaugeTransform::poly_regular(PolyMatrix p) {
    GaugeTransform t;
    t.kind = Kind::PolyRegular;
    if (determinant(p.eval0()) == 0)
        throw Error(ErrorKind::NotRegular, "poly-regular gauge requires invertible constant term");
    t.P = std::move(p);
    return t;
}

GaugeTransform GaugeTransform::diag_monomial(std::vector<int> exponents) {
    GaugeTransform t;
    t.kind = Kind::DiagMonomial;
    bool nonzero = false;
    for (int k : exponents) {
        if (k < 0) throw Error(ErrorKind::DomainError, "diagonal monomial exponents must be >= 0");
        nonzero |= k != 0;
    }
    if (!nonzero) throw Error(ErrorKind::DomainError, "diagonal monomial exponents all zero");
    t.exponents = std::move(exponents);
    return t;
}

GaugeTransform GaugeTransform::ramification(int r) {
    GaugeTransform t;
    t.kind = Kind::Ramification;
    if (r < 2) throw Error(ErrorKind::DomainError, "ramification order must be >= 2");
    t.r = r;
    return t;
}

namespace {

// Raw transformed matrix at the input rank: T^{-1} A T - x^{p+1} T^{-1} T'.
// Throws Inadmissible when a pole appears on known data.
PolyMatrix gauge_raw(const LinearSystem& s, const GaugeTransform& t) {
    switch (t.kind) {
        case GaugeTransform::Kind::PolyRegular: {
            PolyMatrix P = t.P.widen_exact(std::max({s.A.trunc(), t.P.trunc(), 1}));
            PolyMatrix Pinv = P.inverse_series();
            PolyMatrix B = Pinv * s.A * P;
            // the derivative correction sits at order >= p+1; beyond the known
            // window it cannot change known coefficients
            if (s.p + 1 <= B.trunc()) {
                PolyMatrix dP = Pinv * P.derivative();
                B = B - dP.shift_up(s.p + 1);
            }
            return B;
        }
        case GaugeTransform::Kind::DiagMonomial: {
            if (static_cast<int>(t.exponents.size()) != s.n)
                throw Error(ErrorKind::ShapeError, "diagonal monomial arity mismatch");
            if (s.p < 0)
                throw Error(ErrorKind::Inadmissible, "diagonal monomial gauge on a regular system has a pole");
            int kmax = *std::max_element(t.exponents.begin(), t.exponents.end());
            int kmin = *std::min_element(t.exponents.begin(), t.exponents.end());
            int tr = s.A.trunc() + kmin - kmax;
            if (tr < 0) throw Error(ErrorKind::InsufficientPrecision, "truncation exhausted by monomial gauge");
            PolyMatrix B(s.n, tr);
            for (int i = 0; i < s.n; ++i)
                for (int j = 0; j < s.n; ++j) {
                    int shift = t.exponents[static_cast<size_t>(j)] - t.exponents[static_cast<size_t>(i)];
                    TruncatedSeries e = s.A.at(i, j);
                    try {
                        e = shift >= 0 ? e.shift_up(shift) : e.exact_divide_x(-shift);
                    } catch (const Error& err) {
                        if (err.kind() == ErrorKind::NotDivisible)
                            throw Error(ErrorKind::Inadmissible,
                                        "monomial gauge introduces a pole at entry (" + std::to_string(i) +
                                            "," + std::to_string(j) + ")");
                        throw;
                    }
                    // the -k_i x^p correction is invisible beyond the window
                    if (i == j && t.exponents[static_cast<size_t>(i)] != 0 && s.p <= e.trunc()) {
                        TruncatedSeries corr = TruncatedSeries::monomial(
                            Rational(t.exponents[static_cast<size_t>(i)]), s.p, e.trunc());
                        e = e - corr;
                    }
                    B.set(i, j, e.restrict_trunc(std::min(tr, e.trunc())));
                }
            return B;
        }
        case GaugeTransform::Kind::Ramification: {
            if (s.p < 0)
                throw Error(ErrorKind::Inadmissible, "ramification requires a singular system");
            return Rational(1, t.r) * s.A.ramify(t.r);
        }
    }
    throw Error(ErrorKind::Internal, "unreachable");
}

int raw_rank(const LinearSystem& s, const GaugeTransform& t) {
    return t.kind == GaugeTransform::Kind::Ramification ? s.p * t.r : s.p;
}

} // namespace

LinearSystem apply_gauge(const LinearSystem& s, const GaugeTransform& t) {
    PolyMatrix b = gauge_raw(s, t);
    return LinearSystem::normalized(s.n, raw_rank(s, t), b);
}

LinearSystem apply_chain(const LinearSystem& s, const GaugeChain& chain) {
    LinearSystem cur = s;
    for (const auto& t : chain) cur = apply_gauge(cur, t);
    return cur;
}

bool is_admissible(const LinearSystem& s, const GaugeTransform& t) {
    switch (t.kind) {
        case GaugeTransform::Kind::PolyRegular:
            return true;
        case GaugeTransform::Kind::Ramification:
            return s.p >= 0;
        case GaugeTransform::Kind::DiagMonomial: {
            if (static_cast<int>(t.exponents.size()) != s.n)
                throw Error(ErrorKind::ShapeError, "diagonal monomial arity mismatch");
            if (s.p < 0) return false;
            // Elementary decomposition: descending thresholds, each step scales
            // the coordinates with remaining exponent >= threshold by x.
            int kmax = *std::max_element(t.exponents.begin(), t.exponents.end());
            LinearSystem cur = s;
            for (int th = kmax; th >= 1; --th) {
                std::vector<int> step(static_cast<size_t>(s.n), 0);
                for (int i = 0; i < s.n; ++i)
                    if (t.exponents[static_cast<size_t>(i)] >= th) step[static_cast<size_t>(i)] = 1;
                // step admissible iff x divides every entry (i scaled, j unscaled)
                for (int i = 0; i < s.n; ++i)
                    for (int j = 0; j < s.n; ++j) {
                        if (step[static_cast<size_t>(i)] != 1 || step[static_cast<size_t>(j)] != 0) continue;
                        const TruncatedSeries& e = cur.A.at(i, j);
                        if (e.trunc() < 0)
                            throw Error(ErrorKind::InsufficientPrecision, "admissibility undecidable at truncation");
                        if (e[0] != 0) return false;
                    }
                GaugeTransform g = GaugeTransform::diag_monomial(step);
                // keep the rank fixed between elementary steps: the composite
                // acts on the original rank, so no renormalization here
                cur.A = gauge_raw(cur, g);
            }
            return true;
        }
    }
    throw Error(ErrorKind::Internal, "unreachable");
}

PolyMatrix TRSLinearForm::d_matrix(int trunc) const {
    PolyMatrix out(n(), trunc);
    int pos = 0;
    for (const auto& b : dblocks) {
        if (b.is_complex) {
            for (int m = 0; m < b.mult; ++m) {
                out.set(pos, pos, b.c.re.widen_exact(trunc));
                out.set(pos, pos + 1, (-b.c.im).widen_exact(trunc));
                out.set(pos + 1, pos, b.c.im.widen_exact(trunc));
                out.set(pos + 1, pos + 1, b.c.re.widen_exact(trunc));
                pos += 2;
            }
        } else {
            for (int m = 0; m < b.mult; ++m) {
                out.set(pos, pos, b.c.re.widen_exact(trunc));
                pos += 1;
            }
        }
    }
    return out;
}

PolyMatrix TRSLinearForm::matrix(int trunc) const {
    int teff = std::min(trunc, q + 1 + V.trunc());
    if (teff < q + 1)
        throw Error(ErrorKind::InsufficientPrecision, "TRS matrix requested below order q+1");
    PolyMatrix m = d_matrix(teff) + PolyMatrix::from_constant(C, teff - q).shift_up(q);
    return m + V.restrict_trunc(teff - q - 1).shift_up(q + 1);
}

LinearSystem TRSLinearForm::to_system() const {
    int trunc = V.trunc() + q + 1;
    return LinearSystem(n(), q, matrix(trunc));
}

std::optional<TRSLinearForm> recognize_trs(const LinearSystem& s) {
    if (s.p < 0) return std::nullopt;
    int q = s.p;
    if (s.A.trunc() < q + 1)
        throw Error(ErrorKind::InsufficientPrecision, "matrix not known through order q+1");
    int n = s.n;
    int dtr = std::max(q - 1, 0);

    // scan the diagonal for 2x2 Theta cells and real slots
    struct Slot {
        bool is_complex;
        ComplexSeries c;
    };
    std::vector<Slot> slots;
    int pos = 0;
    while (pos < n) {
        bool took_complex = false;
        if (pos + 1 < n && q >= 1) {
            TruncatedSeries a = s.A.at(pos, pos).jet(q - 1).restrict_trunc(dtr);
            TruncatedSeries b = s.A.at(pos + 1, pos).jet(q - 1).restrict_trunc(dtr);
            TruncatedSeries a22 = s.A.at(pos + 1, pos + 1).jet(q - 1).restrict_trunc(dtr);
            TruncatedSeries b12 = s.A.at(pos, pos + 1).jet(q - 1).restrict_trunc(dtr);
            if (!b.known_zero() && a == a22 && b12 == -b) {
                slots.push_back({true, ComplexSeries(a, b)});
                pos += 2;
                took_complex = true;
            }
        }
        if (!took_complex) {
            TruncatedSeries d = q >= 1 ? s.A.at(pos, pos).jet(q - 1).restrict_trunc(dtr)
                                       : TruncatedSeries::zero(0);
            slots.push_back({false, ComplexSeries::from_real(d)});
            pos += 1;
        }
    }

    // group consecutive equal slots
    std::vector<ExpBlock> dblocks;
    BlockStructure bs;
    for (const auto& sl : slots) {
        if (!dblocks.empty() && dblocks.back().is_complex == sl.is_complex && dblocks.back().c == sl.c) {
            dblocks.back().mult += 1;
            bs.blocks.back().mult += 1;
        } else {
            dblocks.push_back({sl.is_complex, 1, sl.c});
            bs.blocks.push_back({sl.is_complex, 1});
        }
    }

    TRSLinearForm form;
    form.q = q;
    form.bs = bs;
    form.dblocks = dblocks;
    form.C = s.A.coeff(q);
    form.V = PolyMatrix(n, 0);

    // D must account for the whole jet below order q
    PolyMatrix dmat = form.d_matrix(dtr);
    if (q >= 1) {
        PolyMatrix jq = s.A.jet(q - 1).restrict_trunc(dtr);
        if (!(jq.is_known_equal(dmat))) return std::nullopt;
    }
    // residual compatibility
    if (!compatible_constant(form.C, bs)) return std::nullopt;
    // principal part nonzero at 0
    bool nonzero_at_0 = q >= 1 ? !dmat.eval0().is_zero() : !form.C.is_zero();
    if (!nonzero_at_0) return std::nullopt;

    // vestigial part: whatever remains above the principal part
    PolyMatrix principal = form.d_matrix(s.A.trunc()) +
                           PolyMatrix::from_constant(form.C, s.A.trunc() - q).shift_up(q);
    form.V = (s.A - principal).exact_divide_x(q + 1);
    return form;
}

Spectrum spectrum_of(const RatMatrix& c) {
    Spectrum sp;
    sp.groups = analyze_spectrum(charpoly(c));
    sp.exact = true;
    for (const auto& g : sp.groups)
        if (g.kind == EigenGroup::Kind::HighDegree) sp.exact = false;
    if (!sp.exact) sp.float_values = float_eigenvalues(c);
    return sp;
}

bool has_good_spectrum(const RatMatrix& c) {
    if (c.rows() != c.cols()) throw Error(ErrorKind::ShapeError, "good spectrum needs a square matrix");
    return spectrum_good_exact(charpoly(c));
}

namespace {

std::optional<int> series_ord(const TruncatedSeries& s) { return s.ord(); }

// sign of the lowest-order coefficient; 0 for the zero polynomial
int leading_sign(const TruncatedSeries& s) {
    auto o = s.ord();
    if (!o) return 0;
    return s[*o] > 0 ? 1 : -1;
}

} // namespace

bool no_dominant_rotation(const TRSLinearForm& f) {
    for (const auto& b : f.dblocks) {
        if (!b.is_complex) continue;
        auto ore = series_ord(b.c.re);
        auto oim = series_ord(b.c.im);
        int vre = ore ? *ore : b.c.re.trunc() + 1;
        int vim = oim ? *oim : b.c.im.trunc() + 1;
        if (vre > vim) return false;
    }
    return true;
}

int unstability_index(const TRSLinearForm& f) {
    int u = 0;
    for (const auto& b : f.dblocks) {
        if (b.is_complex) {
            if (leading_sign(b.c.re) > 0) u += 2 * b.mult;
        } else {
            if (leading_sign(b.c.re) > 0) u += b.mult;
        }
    }
    return u;
}

namespace {

// Common driver for vestigial elimination.  When a partition is given, only
// the matrix components coupling different cells are unknowns and only those
// components of the equations are enforced.
std::pair<GaugeTransform, TRSLinearForm> kill_vestigial_impl(const TRSLinearForm& f, int target_order,
                                                             const std::vector<int>* cells) {
    const int n = f.n();
    const int q = f.q;
    const int N = target_order;
    const bool offdiag_only = cells != nullptr;
    if (N <= 0) {
        GaugeTransform id = GaugeTransform::poly_regular(PolyMatrix::identity(n, 0));
        return {id, f};
    }
    if (f.V.trunc() < N + q + 1)
        throw Error(ErrorKind::InsufficientPrecision,
                    "vestigial data known through " + std::to_string(f.V.trunc()) +
                        ", need >= " + std::to_string(N + q + 1));
    if (!offdiag_only && !has_good_spectrum(f.C))
        throw Error(ErrorKind::Obstruction, "residual part does not have good spectrum", 0);
    if (offdiag_only && static_cast<int>(cells->size()) != n)
        throw Error(ErrorKind::ShapeError, "partition arity mismatch");

    auto is_unknown = [&](int i, int j) {
        return !offdiag_only || (*cells)[static_cast<size_t>(i)] != (*cells)[static_cast<size_t>(j)];
    };

    const int L = q + N; // degree of the gauge polynomial
    auto var_index = [&](int k, int i, int j) { return ((k - 1) * n + i) * n + j; };
    IncrementalSolver solver(L * n * n);

    // M_j, j = 0..q, with residual at order q
    PolyMatrix M = f.d_matrix(q) + PolyMatrix::from_constant(f.C, 0).shift_up(q);
    std::vector<RatMatrix> Mc(static_cast<size_t>(q) + 1, RatMatrix(n, n));
    for (int j = 0; j <= q; ++j) Mc[static_cast<size_t>(j)] = M.coeff(j);
    // W_j = V_{j-q-1}
    auto W = [&](int j) -> RatMatrix {
        if (j < q + 1 || j - q - 1 > f.V.trunc()) return RatMatrix(n, n);
        return f.V.coeff(j - q - 1);
    };

    int obstruction_at = -1;
    for (int K = 1; K <= q + N && obstruction_at < 0; ++K) {
        // coefficient of x^K of  P M - M P + P Wt - W P + x^{q+1} P'
        // with Wt required zero through order q+N.
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (offdiag_only && !is_unknown(i, j)) continue; // enforce only coupled components
                std::map<int, Rational> eq;
                Rational rhs(0);
                auto add_var = [&](int k, int a, int b, const Rational& c) {
                    if (c == 0) return;
                    if (k == 0) {
                        // P_0 = I contributes a constant
                        if (a == b) rhs -= c;
                        return;
                    }
                    if (k < 1 || k > L) return; // no such unknown; higher P's absent
                    if (!is_unknown(a, b)) return; // pinned to zero
                    eq[var_index(k, a, b)] += c;
                };
                // (P M)_ij at order K: sum_j2 sum_{d=0..min(K,q)} P_{K-d}(i,j2) M_d(j2,j)
                for (int d = 0; d <= std::min(K, q); ++d)
                    for (int m = 0; m < n; ++m) add_var(K - d, i, m, Mc[static_cast<size_t>(d)].at(m, j));
                // -(M P)_ij
                for (int d = 0; d <= std::min(K, q); ++d)
                    for (int m = 0; m < n; ++m) add_var(K - d, m, j, -Mc[static_cast<size_t>(d)].at(i, m));
                // -(W P)_ij : W_d known, d >= q+1
                for (int d = q + 1; d <= K; ++d) {
                    RatMatrix wd = W(d);
                    for (int m = 0; m < n; ++m) {
                        if (wd.at(i, m) == 0) continue;
                        add_var(K - d, m, j, -wd.at(i, m));
                    }
                }
                // + x^{q+1} P' at order K: (K - q) P_{K-q}
                if (K - q >= 0) add_var(K - q, i, j, Rational(K - q));
                if (!solver.add_equation(eq, rhs)) obstruction_at = K;
            }
    }
    if (obstruction_at >= 0)
        throw Error(ErrorKind::Obstruction,
                    "homological equation unsolvable at order " + std::to_string(obstruction_at),
                    obstruction_at);

    std::vector<Rational> sol = solver.solution();
    PolyMatrix P = PolyMatrix::identity(n, L);
    for (int k = 1; k <= L; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const Rational& c = sol[static_cast<size_t>(var_index(k, i, j))];
                if (c == 0) continue;
                TruncatedSeries e = P.at(i, j);
                e.set(k, e[k] + c);
                P.at(i, j) = e;
            }

    // verify by re-substitution: the one oracle that counts
    GaugeTransform g = GaugeTransform::poly_regular(P);
    LinearSystem sys = f.to_system();
    LinearSystem out = apply_gauge(sys, g);
    auto rec = recognize_trs(out);
    if (!rec)
        throw Error(ErrorKind::Internal, "vestigial elimination broke the TRS shape");
    if (!(rec->q == f.q) || !(rec->C == f.C) || !(rec->d_matrix(q) == f.d_matrix(q)))
        throw Error(ErrorKind::Internal, "vestigial elimination changed the principal part");
    if (!offdiag_only) {
        int vord = rec->V.ord_floor();
        if (vord < N)
            throw Error(ErrorKind::Internal,
                        "vestigial order " + std::to_string(vord) + " below target " + std::to_string(N));
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (!is_unknown(i, j)) continue;
                auto o = rec->V.at(i, j).ord();
                if (o && *o < N)
                    throw Error(ErrorKind::Internal, "coupling vestigial entry below target order");
            }
    }
    return {g, *rec};
}

} // namespace

std::pair<GaugeTransform, TRSLinearForm> kill_vestigial(const TRSLinearForm& f, int target_order) {
    return kill_vestigial_impl(f, target_order, nullptr);
}

std::pair<GaugeTransform, TRSLinearForm> kill_vestigial_cells(const TRSLinearForm& f, int target_order,
                                                              const std::vector<int>& cells) {
    return kill_vestigial_impl(f, target_order, &cells);
}

std::pair<GaugeTransform, TRSLinearForm> kill_vestigial_offdiag(const TRSLinearForm& f, int target_order) {
    std::vector<int> cells(static_cast<size_t>(f.n()));
    int pos = 0, bi = 0;
    for (const auto& b : f.bs.blocks) {
        int rows = b.is_complex ? 2 * b.mult : b.mult;
        for (int i = 0; i < rows; ++i) cells[static_cast<size_t>(pos + i)] = bi;
        ++bi;
        pos += rows;
    }
    return kill_vestigial_impl(f, target_order, &cells);
}

} // namespace trs
