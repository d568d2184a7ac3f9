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

#include <algorithm>
#include <numeric>

namespace trs {

namespace {

// Internal control flow: a sub-reduction demands a global change of variable.
struct NeedRamification {
    int r;
};

// ---- polynomial-in-lambda with series coefficients ----

using LambdaPoly = std::vector<TruncatedSeries>; // index = lambda power

LambdaPoly lp_mul(const LambdaPoly& a, const LambdaPoly& b) {
    int t = INT32_MAX;
    for (const auto& s : a) t = std::min(t, s.trunc());
    for (const auto& s : b) t = std::min(t, s.trunc());
    LambdaPoly r(a.size() + b.size() - 1, TruncatedSeries::zero(t));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            r[i + j] = r[i + j] + (a[i] * b[j]).restrict_trunc(t);
    return r;
}

// det(lambda I - A) by permutation expansion; n is small here.
LambdaPoly char_lambda_poly(const PolyMatrix& a) {
    int n = a.size();
    std::vector<int> perm(static_cast<size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    LambdaPoly acc(static_cast<size_t>(n) + 1, TruncatedSeries::zero(a.trunc()));
    do {
        int inv = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (perm[static_cast<size_t>(i)] > perm[static_cast<size_t>(j)]) ++inv;
        LambdaPoly term{TruncatedSeries::constant(inv % 2 == 0 ? 1 : -1, a.trunc())};
        for (int i = 0; i < n; ++i) {
            int j = perm[static_cast<size_t>(i)];
            LambdaPoly cell;
            if (i == j)
                cell = {-a.at(i, j), TruncatedSeries::constant(1, a.trunc())};
            else
                cell = {-a.at(i, j)};
            term = lp_mul(term, cell);
        }
        for (size_t d = 0; d < term.size(); ++d)
            acc[d] = acc[d] + term[d].restrict_trunc(std::min(acc[d].trunc(), term[d].trunc()));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return acc;
}

long gcd_long(long a, long b) {
    while (b) {
        long t = a % b;
        a = b;
        b = t;
    }
    return a < 0 ? -a : a;
}

} // namespace

std::vector<PolygonSlope> newton_polygon_slopes(const LinearSystem& s) {
    LambdaPoly chi = char_lambda_poly(s.A);
    int n = s.n;
    std::vector<std::pair<int, int>> pts;
    for (int j = 0; j <= n; ++j) {
        auto o = chi[static_cast<size_t>(j)].ord();
        if (o) pts.emplace_back(j, *o);
    }
    if (pts.empty() || pts.back().first != n)
        throw Error(ErrorKind::Internal, "characteristic polynomial lost its leading term");
    std::vector<std::pair<int, int>> hull;
    for (const auto& p : pts) {
        while (hull.size() >= 2) {
            auto& a = hull[hull.size() - 2];
            auto& b = hull[hull.size() - 1];
            long lhs = static_cast<long>(b.second - a.second) * (p.first - a.first);
            long rhs = static_cast<long>(p.second - a.second) * (b.first - a.first);
            if (lhs >= rhs) hull.pop_back();
            else break;
        }
        hull.push_back(p);
    }
    std::vector<PolygonSlope> slopes;
    for (size_t i = 0; i + 1 < hull.size(); ++i) {
        int dj = hull[i + 1].first - hull[i].first;
        int dv = hull[i].second - hull[i + 1].second;
        if (dj <= 0) continue;
        long g = gcd_long(dv, dj);
        if (g == 0) g = 1;
        slopes.push_back({dv / g, dj / g, dj});
    }
    return slopes;
}

namespace {

// ---- constant-structure helpers ----

RatMatrix std_j(int n) {
    RatMatrix j(n, n);
    for (int i = 0; i + 1 < n; i += 2) {
        j.at(i, i + 1) = -1;
        j.at(i + 1, i) = 1;
    }
    return j;
}

bool subspace_invariant(const RatMatrix& op, const RatMatrix& basis) {
    if (basis.cols() == 0) return true;
    RatMatrix img = op * basis;
    RatMatrix joint(basis.rows(), basis.cols() + img.cols());
    joint.set_block(0, 0, basis);
    joint.set_block(0, basis.cols(), img);
    return rank(joint) == rank(basis);
}

// prune to independent columns
RatMatrix independent_columns(const RatMatrix& m) {
    int n = m.rows();
    int r = rank(m);
    RatMatrix out(n, r);
    int placed = 0;
    RatMatrix acc(n, 0);
    for (int c = 0; c < m.cols() && placed < r; ++c) {
        RatMatrix v = m.block(0, c, n, 1);
        RatMatrix joint(n, acc.cols() + 1);
        joint.set_block(0, 0, acc);
        joint.set_block(0, acc.cols(), v);
        if (rank(joint) > acc.cols()) {
            out.set_block(0, placed, v);
            ++placed;
            acc = out.block(0, 0, n, placed);
        }
    }
    if (placed != r) throw Error(ErrorKind::Internal, "column pruning failed");
    return out;
}

// greedy basis of a J-invariant subspace arranged in (v, J v) pairs
std::optional<RatMatrix> j_adapted_basis(const RatMatrix& basis, const RatMatrix& j) {
    int n = basis.rows(), d = basis.cols();
    if (d % 2 != 0) return std::nullopt;
    if (!subspace_invariant(j, basis)) return std::nullopt;
    RatMatrix out(n, d);
    int placed = 0;
    auto in_span = [&](int cols, const RatMatrix& v) {
        if (cols == 0) return v.is_zero();
        RatMatrix sofar = out.block(0, 0, n, cols);
        RatMatrix joint(n, cols + 1);
        joint.set_block(0, 0, sofar);
        joint.set_block(0, cols, v);
        return rank(joint) == rank(sofar);
    };
    for (int c = 0; c < d && placed < d; ++c) {
        RatMatrix v = basis.block(0, c, n, 1);
        if (in_span(placed, v)) continue;
        out.set_block(0, placed, v);
        out.set_block(0, placed + 1, j * v);
        placed += 2;
    }
    if (placed != d) return std::nullopt;
    return out;
}

// evaluate a rational polynomial at a matrix
RatMatrix poly_at_matrix(const RatPoly& f, const RatMatrix& m) {
    RatMatrix acc(m.rows(), m.cols());
    RatMatrix pw = RatMatrix::identity(m.rows());
    for (size_t d = 0; d < f.size(); ++d) {
        if (f[d] != 0) acc = acc + f[d] * pw;
        if (d + 1 < f.size()) pw = pw * m;
    }
    return acc;
}

// kernel of f(m)^mult
RatMatrix primary_basis(const RatMatrix& m, const RatPoly& f, int mult) {
    RatMatrix fm = poly_at_matrix(f, m);
    RatMatrix pw = RatMatrix::identity(m.rows());
    for (int t = 0; t < mult; ++t) pw = pw * fm;
    return nullspace(pw);
}

// ---- reducer ----

class Reducer {
  public:
    explicit Reducer(const ReduceOptions& opt)
        : opt_(opt), rams_left_(opt.max_ramifications), shears_left_(opt.max_rank_steps) {}

    void consume_ram() {
        if (--rams_left_ < 0) throw Error(ErrorKind::FuelExhausted, "ramification budget exhausted");
    }

    // Reduce cur (mutated in place) until terminal; every applied gauge is
    // appended to chain immediately, so callers always see a consistent pair.
    void reduce(LinearSystem& cur, GaugeChain& chain, bool jmode, int depth) {
        if (depth > 64) throw Error(ErrorKind::FuelExhausted, "recursion depth exceeded");
        while (true) {
            if (cur.regular()) return;
            if (cur.p == 0) {
                normalize_residual_spectrum(cur, chain);
                return;
            }
            RatMatrix a0 = cur.A.eval0();
            auto groups = analyze_spectrum(charpoly(a0));
            if (groups.size() >= 2) {
                split_and_recurse(cur, chain, jmode, depth);
                return;
            }
            const EigenGroup& g = groups.front();
            switch (g.kind) {
                case EigenGroup::Kind::RationalEig:
                    if (g.re == 0) {
                        nilpotent_step(cur, chain, jmode);
                        break; // loop again on the improved system
                    }
                    deflate_rational(cur, chain, g.re, jmode, depth);
                    return;
                case EigenGroup::Kind::GaussianPair:
                    deflate_pair(cur, chain, g, jmode, depth);
                    return;
                default:
                    throw Error(ErrorKind::Undecidable,
                                "leading matrix has an eigenvalue group not representable over the rationals");
            }
        }
    }

    // Bring the residual part of a recognized TRS system to good spectrum by
    // admissible integer shifts.
    void normalize_residual_spectrum(LinearSystem& cur, GaugeChain& chain) {
        for (int guard = 0;; ++guard) {
            if (guard > 16 * cur.n + 64)
                throw Error(ErrorKind::FuelExhausted, "spectral normalization did not converge");
            if (cur.regular()) return; // a shift can collapse the system entirely
            auto form = recognize_trs(cur);
            if (!form) throw Error(ErrorKind::Internal, "spectral normalization on an unrecognized system");
            if (has_good_spectrum(form->C)) return;
            if (phase1_within_block_shift(cur, chain, *form)) continue;
            phase2_cross_block_alignment(cur, chain, *form);
        }
    }

    // ---- single-group deflation ----

    void deflate_rational(LinearSystem& cur, GaugeChain& chain, const Rational& lambda, bool jmode, int depth) {
        PolyMatrix bar = cur.A - PolyMatrix::from_constant(lambda * RatMatrix::identity(cur.n), cur.A.trunc());
        run_deflated(cur, chain, bar, jmode, depth);
    }

    void deflate_pair(LinearSystem& cur, GaugeChain& chain, const EigenGroup& g, bool jmode, int depth) {
        RatMatrix a0 = cur.A.eval0();
        // semisimple part of A0 via Newton iteration on its minimal quadratic
        RatPoly f = g.min_poly;
        RatMatrix s = a0;
        for (int it = 0; it < 10; ++it) {
            RatMatrix fs = poly_at_matrix(f, s);
            if (fs.is_zero()) break;
            RatMatrix fps = Rational(2) * s + f[1] * RatMatrix::identity(cur.n);
            s = s - inverse(fps) * fs;
            if (it == 9 && !poly_at_matrix(f, s).is_zero())
                throw Error(ErrorKind::Internal, "semisimple part iteration did not converge");
        }
        const Rational a = g.re, b = g.im; // eigenvalues a +- ib, b > 0
        RatMatrix js = Rational(1) / b * (s - a * RatMatrix::identity(cur.n));
        if (!((js * js) + RatMatrix::identity(cur.n)).is_zero())
            throw Error(ErrorKind::Internal, "complex structure construction failed");
        if (jmode) {
            RatMatrix amb = std_j(cur.n);
            if (!(js * amb == amb * js) || (!(js == amb) && !(js == Rational(-1) * amb)))
                throw Error(ErrorKind::Undecidable, "nested rotational structures are not aligned");
        }
        auto adapted = j_adapted_basis(RatMatrix::identity(cur.n), js);
        if (!adapted)
            throw Error(ErrorKind::Undecidable, "no rational pairing basis for the complex structure");
        GaugeTransform cg = GaugeTransform::poly_regular(PolyMatrix::from_constant(*adapted, 0));
        chain.push_back(cg);
        cur = apply_gauge(cur, cg);

        if (cur.n == 2) {
            // single rotational cell: remove the conjugation-antilinear parts
            // of the jet through order q; what remains is Theta-pure and is
            // read off directly as exponential + residual data
            pair_principal_normalize(cur, chain, b);
            return;
        }

        RatMatrix theta_mu(cur.n, cur.n);
        for (int i = 0; i + 1 < cur.n; i += 2) {
            theta_mu.at(i, i) = a;
            theta_mu.at(i, i + 1) = -b;
            theta_mu.at(i + 1, i) = b;
            theta_mu.at(i + 1, i + 1) = a;
        }
        PolyMatrix bar = cur.A - PolyMatrix::from_constant(theta_mu, cur.A.trunc());
        // the pair machinery stays inside the Theta subalgebra; couplings that
        // anticommute with J below the residual slot are outside the exact class
        RatMatrix jm = std_j(cur.n);
        for (int k = 1; k <= std::min(cur.p, bar.trunc()); ++k) {
            RatMatrix bk = bar.coeff(k);
            if (!(jm * bk == bk * jm))
                throw Error(ErrorKind::Undecidable,
                            "rotational pair of multiplicity > 1 with conjugation-antilinear coupling");
        }
        run_deflated(cur, chain, bar, true, depth);
    }

    // n = 2 single-pair case: for K = 1..q subtract the antilinear component
    // of the x^K coefficient with a gauge I + P_K x^K, where
    // [Theta(mu), P] = Theta(2ib) P on antilinear P.
    void pair_principal_normalize(LinearSystem& cur, GaugeChain& chain, const Rational& b) {
        RatMatrix jm = std_j(2);
        for (int K = 1; K <= std::min(cur.p, cur.A.trunc()); ++K) {
            RatMatrix ak = cur.A.coeff(K);
            RatMatrix anti = Rational(1, 2) * (ak + jm * ak * jm);
            if (anti.is_zero()) continue;
            RatMatrix pk = Rational(1, 2) / b * (jm * anti);
            PolyMatrix gauge = PolyMatrix::identity(2, std::max(K, 1));
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    if (pk.at(i, j) != 0) {
                        TruncatedSeries e = gauge.at(i, j);
                        e = e.widen_exact(K);
                        e.set(K, pk.at(i, j));
                        gauge.at(i, j) = e;
                    }
            GaugeTransform g = GaugeTransform::poly_regular(gauge.widen_exact(K));
            chain.push_back(g);
            LinearSystem next = apply_gauge(cur, g);
            RatMatrix check = next.A.coeff(K);
            if (!(jm * check == check * jm))
                throw Error(ErrorKind::Internal, "antilinear elimination failed");
            cur = next;
        }
    }

    // Reduce the scalar-shifted matrix as its own system and replay the chain
    // on cur: the scalar part commutes with every gauge, and normalization
    // factors commute formally with the gauge formulas.
    void run_deflated(LinearSystem& cur, GaugeChain& chain, const PolyMatrix& bar, bool jmode, int depth) {
        int v = bar.ord_floor();
        if (v > bar.trunc() || v >= cur.p + 1) return; // principal part is scalar: terminal
        LinearSystem sub = LinearSystem::normalized(cur.n, cur.p, bar);
        GaugeChain subchain;
        reduce(sub, subchain, jmode, depth + 1);
        for (const auto& t : subchain) {
            chain.push_back(t);
            cur = apply_gauge(cur, t);
        }
    }

    // ---- splitting ----

    void split_and_recurse(LinearSystem& cur, GaugeChain& chain, bool jmode, int depth) {
        RatMatrix a0 = cur.A.eval0();
        auto groups = analyze_spectrum(charpoly(a0));
        GaugeTransform split = make_split_gauge(cur, groups, jmode);
        chain.push_back(split);
        cur = apply_gauge(cur, split);

        std::vector<int> sizes;
        for (const auto& g : groups) sizes.push_back(g.dim());
        int off = 0;
        for (size_t b = 0; b < sizes.size(); ++b) {
            int nb = sizes[b];
            while (true) {
                PolyMatrix ab(nb, cur.A.trunc());
                for (int i = 0; i < nb; ++i)
                    for (int j = 0; j < nb; ++j) ab.at(i, j) = cur.A.at(off + i, off + j);
                LinearSystem sub = LinearSystem::normalized(nb, cur.p, ab);
                try {
                    GaugeChain sc;
                    reduce(sub, sc, jmode, depth + 1);
                    for (const auto& t : sc) {
                        GaugeTransform emb = embed_gauge(t, off, cur.n);
                        chain.push_back(emb);
                        cur = apply_gauge(cur, emb);
                    }
                    break;
                } catch (const NeedRamification& nr) {
                    consume_ram();
                    GaugeTransform ram = GaugeTransform::ramification(nr.r);
                    chain.push_back(ram);
                    cur = apply_gauge(cur, ram);
                    // earlier blocks keep their reduced shape under x -> x^r
                }
            }
            off += nb;
        }
    }

    GaugeTransform make_split_gauge(const LinearSystem& cur, const std::vector<EigenGroup>& groups, bool jmode) {
        RatMatrix a0 = cur.A.eval0();
        int n = cur.n;
        RatMatrix u0(n, n);
        int col = 0;
        for (const auto& g : groups) {
            RatMatrix ker = primary_basis(a0, g.min_poly, g.mult);
            if (ker.cols() != g.dim())
                throw Error(ErrorKind::Internal, "primary component dimension mismatch");
            if (jmode) {
                auto adapted = j_adapted_basis(ker, std_j(n));
                if (!adapted)
                    throw Error(ErrorKind::Undecidable,
                                "eigenvalue split is not compatible with the rotational pairing");
                ker = *adapted;
            }
            u0.set_block(0, col, ker);
            col += ker.cols();
        }
        if (col != n || determinant(u0) == 0)
            throw Error(ErrorKind::Internal, "primary decomposition incomplete");

        int worder = std::min(opt_.working_order, cur.A.trunc());
        LinearSystem scratch = apply_gauge(cur, GaugeTransform::poly_regular(PolyMatrix::from_constant(u0, 0)));
        if (scratch.p != cur.p) throw Error(ErrorKind::Internal, "splitting should not change the rank");
        std::vector<int> offs(groups.size() + 1, 0);
        for (size_t b = 0; b < groups.size(); ++b) offs[b + 1] = offs[b] + groups[b].dim();
        std::vector<RatMatrix> diag0;
        for (size_t b = 0; b < groups.size(); ++b)
            diag0.push_back(scratch.A.eval0().block(offs[b], offs[b], groups[b].dim(), groups[b].dim()));
        PolyMatrix ptot = PolyMatrix::identity(n, worder);
        for (int K = 1; K <= std::min(worder, scratch.A.trunc()); ++K) {
            RatMatrix rk = scratch.A.coeff(K);
            RatMatrix e(n, n);
            bool any = false;
            for (size_t bi = 0; bi < groups.size(); ++bi)
                for (size_t bj = 0; bj < groups.size(); ++bj) {
                    if (bi == bj) continue;
                    RatMatrix rij = rk.block(offs[bi], offs[bj], groups[bi].dim(), groups[bj].dim());
                    if (rij.is_zero()) continue;
                    auto x = solve_sylvester(diag0[bi], diag0[bj], Rational(-1) * rij);
                    if (!x) throw Error(ErrorKind::Internal, "splitting Sylvester equation unsolvable");
                    e.set_block(offs[bi], offs[bj], *x);
                    any = true;
                }
            if (!any) continue;
            PolyMatrix ek = PolyMatrix::identity(n, worder);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (e.at(i, j) != 0) {
                        TruncatedSeries sij = ek.at(i, j);
                        sij.set(K, e.at(i, j));
                        ek.at(i, j) = sij;
                    }
            scratch = apply_gauge(scratch, GaugeTransform::poly_regular(ek));
            if (scratch.p != cur.p) throw Error(ErrorKind::Internal, "splitting changed the rank");
            ptot = ptot * ek;
        }
        for (size_t bi = 0; bi < groups.size(); ++bi)
            for (size_t bj = 0; bj < groups.size(); ++bj) {
                if (bi == bj) continue;
                for (int i = 0; i < groups[bi].dim(); ++i)
                    for (int j = 0; j < groups[bj].dim(); ++j) {
                        auto o = scratch.A.at(offs[bi] + i, offs[bj] + j).ord();
                        if (o && *o <= std::min(worder, scratch.A.trunc()))
                            throw Error(ErrorKind::Internal, "off-diagonal block survived the splitting");
                    }
            }
        return GaugeTransform::poly_regular(PolyMatrix::from_constant(u0, worder) * ptot);
    }

    GaugeTransform embed_gauge(const GaugeTransform& t, int off, int n) {
        switch (t.kind) {
            case GaugeTransform::Kind::PolyRegular: {
                PolyMatrix p(n, t.P.trunc());
                for (int i = 0; i < n; ++i) p.at(i, i) = TruncatedSeries::constant(1, t.P.trunc());
                for (int i = 0; i < t.P.size(); ++i)
                    for (int j = 0; j < t.P.size(); ++j) p.at(off + i, off + j) = t.P.at(i, j);
                return GaugeTransform::poly_regular(p);
            }
            case GaugeTransform::Kind::DiagMonomial: {
                std::vector<int> e(static_cast<size_t>(n), 0);
                for (size_t i = 0; i < t.exponents.size(); ++i) e[static_cast<size_t>(off) + i] = t.exponents[i];
                return GaugeTransform::diag_monomial(e);
            }
            case GaugeTransform::Kind::Ramification:
                throw Error(ErrorKind::Internal, "ramification cannot be embedded");
        }
        throw Error(ErrorKind::Internal, "unreachable");
    }

    // ---- nilpotent machinery ----

    std::vector<RatMatrix> canonical_subspaces(const RatMatrix& a0) {
        int n = a0.rows();
        std::vector<RatMatrix> spaces;
        auto same_space = [&](const RatMatrix& a, const RatMatrix& b) {
            if (a.cols() != b.cols()) return false;
            RatMatrix joint(n, a.cols() + b.cols());
            joint.set_block(0, 0, a);
            joint.set_block(0, a.cols(), b);
            return rank(joint) == rank(a);
        };
        auto add_space = [&](const RatMatrix& b) {
            if (b.cols() == 0 || b.cols() == n) return;
            for (const auto& s : spaces)
                if (same_space(s, b)) return;
            spaces.push_back(b);
        };
        std::vector<RatMatrix> base;
        RatMatrix pw = RatMatrix::identity(n);
        for (int k = 1; k <= n; ++k) {
            pw = pw * a0;
            base.push_back(nullspace(pw));
            base.push_back(independent_columns(pw));
            if (pw.is_zero()) break;
        }
        for (const auto& b : base) add_space(b);
        auto meet = [&](const RatMatrix& a, const RatMatrix& b) {
            if (a.cols() == 0 || b.cols() == 0) return RatMatrix(n, 0);
            RatMatrix joint(n, a.cols() + b.cols());
            joint.set_block(0, 0, a);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < b.cols(); ++j) joint.at(i, a.cols() + j) = -b.at(i, j);
            RatMatrix ns = nullspace(joint);
            RatMatrix out(n, ns.cols());
            for (int c = 0; c < ns.cols(); ++c)
                out.set_block(0, c, a * ns.block(0, c, a.cols(), 1));
            return independent_columns(out);
        };
        auto join = [&](const RatMatrix& a, const RatMatrix& b) {
            RatMatrix joint(n, a.cols() + b.cols());
            joint.set_block(0, 0, a);
            joint.set_block(0, a.cols(), b);
            return independent_columns(joint);
        };
        size_t base_count = spaces.size();
        for (size_t i = 0; i < base_count; ++i)
            for (size_t j = i + 1; j < base_count; ++j) {
                add_space(meet(spaces[i], spaces[j]));
                add_space(join(spaces[i], spaces[j]));
            }
        return spaces;
    }

    void nilpotent_step(LinearSystem& cur, GaugeChain& chain, bool jmode) {
        if (--shears_left_ < 0)
            throw Error(ErrorKind::FuelExhausted, "rank-reduction step budget exhausted");
        RatMatrix a0 = cur.A.eval0();
        int n = cur.n;
        int r0 = rank(a0);
        RatMatrix jmat = std_j(n);
        for (const auto& v : canonical_subspaces(a0)) {
            RatMatrix vb = v;
            if (jmode) {
                if (v.cols() % 2 != 0 || !subspace_invariant(jmat, v)) continue;
                auto adapted = j_adapted_basis(v, jmat);
                if (!adapted) continue;
                vb = *adapted;
            }
            RatMatrix u = jmode ? complete_basis_paired(vb, jmat) : complete_basis(vb);
            if (u.rows() == 0) continue;
            for (int dir = 0; dir < 2; ++dir) {
                std::vector<int> exps(static_cast<size_t>(n), 0);
                if (dir == 0)
                    for (int i = vb.cols(); i < n; ++i) exps[static_cast<size_t>(i)] = 1;
                else
                    for (int i = 0; i < vb.cols(); ++i) exps[static_cast<size_t>(i)] = 1;
                GaugeTransform cg = GaugeTransform::poly_regular(PolyMatrix::from_constant(u, 0));
                LinearSystem trial = apply_gauge(cur, cg);
                GaugeTransform dm = GaugeTransform::diag_monomial(exps);
                if (!is_admissible(trial, dm)) continue;
                LinearSystem next = apply_gauge(trial, dm);
                bool progress = next.p < cur.p || next.regular();
                if (!progress && next.p == cur.p) {
                    RatMatrix b0 = next.A.eval0();
                    auto g2 = analyze_spectrum(charpoly(b0));
                    bool still_nilpotent =
                        g2.size() == 1 && g2[0].kind == EigenGroup::Kind::RationalEig && g2[0].re == 0;
                    progress = !still_nilpotent || rank(b0) < r0;
                }
                if (progress) {
                    chain.push_back(cg);
                    chain.push_back(dm);
                    cur = next;
                    return;
                }
            }
        }
        auto slopes = newton_polygon_slopes(cur);
        long lcm = 1;
        for (const auto& sl : slopes) {
            if (sl.num <= 0) continue;
            lcm = lcm / gcd_long(lcm, sl.den) * sl.den;
        }
        if (lcm > 1) throw NeedRamification{static_cast<int>(lcm)};
        throw Error(jmode ? ErrorKind::Undecidable : ErrorKind::Internal,
                    "nilpotent leading matrix resists canonical shears with integral slopes");
    }

    // extend a J-paired basis to a J-paired basis of the whole space
    RatMatrix complete_basis_paired(const RatMatrix& vb, const RatMatrix& jmat) {
        int n = vb.rows();
        RatMatrix acc = vb;
        while (acc.cols() < n) {
            bool extended = false;
            for (int c = 0; c < n && !extended; ++c) {
                RatMatrix e(n, 1);
                e.at(c, 0) = 1;
                RatMatrix joint(n, acc.cols() + 2);
                joint.set_block(0, 0, acc);
                joint.set_block(0, acc.cols(), e);
                joint.set_block(0, acc.cols() + 1, jmat * e);
                if (rank(joint) == acc.cols() + 2) {
                    acc = joint;
                    extended = true;
                }
            }
            if (!extended) return RatMatrix(0, 0);
        }
        return acc;
    }

    // ---- residual spectrum normalization ----

    // Find an integer-shift witness inside one exponential block and apply a
    // single-power shift to the top group.  Returns true when a shift ran.
    bool phase1_within_block_shift(LinearSystem& cur, GaugeChain& chain, const TRSLinearForm& form) {
        int nb = static_cast<int>(form.bs.blocks.size());
        for (int b = 0; b < nb; ++b) {
            int off = form.bs.offset(b);
            int rows = form.bs.block_rows(b);
            RatMatrix cb = form.C.block(off, off, rows, rows);
            auto groups = analyze_spectrum(charpoly(cb));
            for (const auto& g : groups)
                if (g.kind == EigenGroup::Kind::HighDegree)
                    throw Error(ErrorKind::Undecidable, "residual block spectrum not factorable exactly");
            Integer kmax = rat_ceil(2 * spectrum_real_upper_bound(charpoly(cb)));
            // f_j(x) == f_i(x + k) with k > 0 places group j exactly k below
            // group i; a "top" group has someone below it and nobody above.
            int top = -1;
            for (size_t i = 0; i < groups.size() && top < 0; ++i) {
                bool below = false, above = false;
                for (size_t j = 0; j < groups.size(); ++j) {
                    if (i == j) continue;
                    for (Integer k = 1; k <= kmax; ++k) {
                        if (poly_trim(groups[j].min_poly) == poly_shift(groups[i].min_poly, Rational(k))) below = true;
                        if (poly_trim(groups[i].min_poly) == poly_shift(groups[j].min_poly, Rational(k))) above = true;
                    }
                }
                if (below && !above) top = static_cast<int>(i);
            }
            if (top < 0) continue;

            // keep couplings to other blocks above the residual slot
            if (nb > 1) {
                auto [g2, f2] = kill_vestigial_offdiag(form, 2);
                chain.push_back(g2);
                cur = apply_gauge(cur, g2);
            }
            auto fresh = recognize_trs(cur);
            cb = fresh->C.block(off, off, rows, rows);

            // constant split inside the block: [top | rest]
            RatMatrix sub = primary_basis(cb, groups[static_cast<size_t>(top)].min_poly,
                                          groups[static_cast<size_t>(top)].mult);
            RatPoly restpoly = {Rational(1)};
            for (size_t j = 0; j < groups.size(); ++j) {
                if (static_cast<int>(j) == top) continue;
                RatPoly fp = groups[j].min_poly;
                for (int t = 0; t < groups[j].mult; ++t) restpoly = poly_mul(restpoly, fp);
            }
            RatMatrix rest = nullspace(poly_at_matrix(restpoly, cb));
            if (form.bs.blocks[static_cast<size_t>(b)].is_complex) {
                RatMatrix jb = std_j(rows);
                auto asub = j_adapted_basis(sub, jb);
                auto arest = j_adapted_basis(rest, jb);
                if (!asub || !arest)
                    throw Error(ErrorKind::Undecidable, "residual split incompatible with rotational pairing");
                sub = *asub;
                rest = *arest;
            }
            RatMatrix local(rows, sub.cols() + rest.cols());
            local.set_block(0, 0, sub);
            local.set_block(0, sub.cols(), rest);
            if (local.cols() != rows || determinant(local) == 0)
                throw Error(ErrorKind::Internal, "residual primary split incomplete");
            RatMatrix full = RatMatrix::identity(cur.n);
            full.set_block(off, off, local);
            GaugeTransform cgauge = GaugeTransform::poly_regular(PolyMatrix::from_constant(full, 0));
            chain.push_back(cgauge);
            cur = apply_gauge(cur, cgauge);

            std::vector<int> exps(static_cast<size_t>(cur.n), 0);
            for (int i = 0; i < sub.cols(); ++i) exps[static_cast<size_t>(off + i)] = 1;
            GaugeTransform shift = GaugeTransform::diag_monomial(exps);
            if (!is_admissible(cur, shift))
                throw Error(ErrorKind::Internal, "within-block spectral shift unexpectedly inadmissible");
            chain.push_back(shift);
            cur = apply_gauge(cur, shift);
            return true;
        }
        return false;
    }

    // All blocks are internally resonance-free; align integer-related groups
    // across blocks by per-cell shifts after killing cross-cell couplings.
    void phase2_cross_block_alignment(LinearSystem& cur, GaugeChain& chain, const TRSLinearForm& form) {
        int nb = static_cast<int>(form.bs.blocks.size());
        struct Cell {
            int block;
            int off;        // inside the block
            int dim;
            RatPoly poly;   // minimal polynomial of the group
            int mult;
            Rational mid;   // real-part representative
            int cls = -1;
            Integer shift = 0;
            RatMatrix basis; // block-local primary basis
        };
        std::vector<Cell> cells;
        for (int b = 0; b < nb; ++b) {
            int off = form.bs.offset(b);
            int rows = form.bs.block_rows(b);
            RatMatrix cb = form.C.block(off, off, rows, rows);
            auto groups = analyze_spectrum(charpoly(cb));
            for (const auto& g : groups) {
                if (g.kind == EigenGroup::Kind::HighDegree)
                    throw Error(ErrorKind::Undecidable, "residual block spectrum not factorable exactly");
                Cell c;
                c.block = b;
                c.dim = g.dim();
                c.poly = poly_trim(g.min_poly);
                c.mult = g.mult;
                // root mean: -(coefficient of x^{d-1})/d for a monic factor
                int d = poly_deg(c.poly);
                c.mid = -c.poly[static_cast<size_t>(d - 1)] / d;
                c.basis = primary_basis(cb, g.min_poly, g.mult);
                if (form.bs.blocks[static_cast<size_t>(b)].is_complex) {
                    auto ad = j_adapted_basis(c.basis, std_j(rows));
                    if (!ad)
                        throw Error(ErrorKind::Undecidable, "residual split incompatible with rotational pairing");
                    c.basis = *ad;
                }
                cells.push_back(std::move(c));
            }
        }
        // classes: related iff min polys are integer shifts of one another
        int ncls = 0;
        for (size_t i = 0; i < cells.size(); ++i) {
            if (cells[i].cls >= 0) continue;
            cells[i].cls = ncls;
            for (size_t j = i + 1; j < cells.size(); ++j) {
                if (cells[j].cls >= 0) continue;
                // j sits k above i when f_i(x) == f_j(x + k)
                Rational k = cells[j].mid - cells[i].mid;
                if (!rat_is_integer(k)) continue;
                if (poly_trim(cells[i].poly) == poly_shift(cells[j].poly, k)) cells[j].cls = ncls;
            }
            ++ncls;
        }
        // shift each cell down to its class minimum
        Integer max_shift = 0;
        for (int c = 0; c < ncls; ++c) {
            Rational mn;
            bool first = true;
            for (const auto& cell : cells)
                if (cell.cls == c && (first || cell.mid < mn)) {
                    mn = cell.mid;
                    first = false;
                }
            for (auto& cell : cells)
                if (cell.cls == c) {
                    Rational d = cell.mid - mn;
                    if (!rat_is_integer(d)) throw Error(ErrorKind::Internal, "class member at non-integer offset");
                    cell.shift = rat_num(d);
                    if (cell.shift > max_shift) max_shift = cell.shift;
                }
        }
        if (max_shift == 0)
            throw Error(ErrorKind::Internal, "bad spectrum with no cross-block shift witness");

        // constant gauge: split every block into its cells
        RatMatrix full = RatMatrix::identity(cur.n);
        std::vector<int> cell_of(static_cast<size_t>(cur.n), -1);
        std::vector<Integer> shift_of(static_cast<size_t>(cur.n), 0);
        {
            for (int b = 0; b < nb; ++b) {
                int off = form.bs.offset(b);
                int rows = form.bs.block_rows(b);
                RatMatrix local(rows, rows);
                int col = 0;
                for (size_t ci = 0; ci < cells.size(); ++ci) {
                    if (cells[ci].block != b) continue;
                    cells[ci].off = col;
                    local.set_block(0, col, cells[ci].basis);
                    for (int t = 0; t < cells[ci].dim; ++t) {
                        cell_of[static_cast<size_t>(off + col + t)] = static_cast<int>(ci);
                        shift_of[static_cast<size_t>(off + col + t)] = cells[ci].shift;
                    }
                    col += cells[ci].dim;
                }
                if (col != rows || determinant(local) == 0)
                    throw Error(ErrorKind::Internal, "cell split incomplete");
                full.set_block(off, off, local);
            }
        }
        GaugeTransform cgauge = GaugeTransform::poly_regular(PolyMatrix::from_constant(full, 0));
        chain.push_back(cgauge);
        cur = apply_gauge(cur, cgauge);

        // kill couplings across cells deep enough for the shifts
        auto fresh = recognize_trs(cur);
        if (!fresh) throw Error(ErrorKind::Internal, "cell split broke the TRS shape");
        int depth_needed = max_shift.convert_to<int>() + 1;
        auto [kg, kf] = kill_vestigial_cells(*fresh, depth_needed, cell_of);
        chain.push_back(kg);
        cur = apply_gauge(cur, kg);

        std::vector<int> exps(static_cast<size_t>(cur.n), 0);
        for (int i = 0; i < cur.n; ++i)
            exps[static_cast<size_t>(i)] = shift_of[static_cast<size_t>(i)].convert_to<int>();
        GaugeTransform shift = GaugeTransform::diag_monomial(exps);
        if (!is_admissible(cur, shift))
            throw Error(ErrorKind::Internal, "cross-block spectral shift unexpectedly inadmissible");
        chain.push_back(shift);
        cur = apply_gauge(cur, shift);
    }

  private:
    ReduceOptions opt_;
    int rams_left_;
    int shears_left_;
};

} // namespace

ReductionResult reduce_linear_full(const LinearSystem& s0, const ReduceOptions& opt) {
    ReductionResult res;
    LinearSystem cur = LinearSystem::normalized(s0.n, s0.p, s0.A);
    if (cur.regular()) {
        res.outcome = RegularResult{cur};
        return res;
    }
    Reducer red(opt);
    if (auto form = recognize_trs(cur)) {
        if (has_good_spectrum(form->C)) {
            res.outcome = *form;
            return res;
        }
    }
    for (int guard = 0;; ++guard) {
        if (guard > opt.max_ramifications)
            throw Error(ErrorKind::FuelExhausted, "top-level ramification budget exhausted");
        try {
            red.reduce(cur, res.chain, false, 0);
            break;
        } catch (const NeedRamification& nr) {
            red.consume_ram();
            GaugeTransform ram = GaugeTransform::ramification(nr.r);
            res.chain.push_back(ram);
            cur = apply_gauge(cur, ram);
        }
    }
    if (cur.regular()) {
        res.outcome = RegularResult{cur};
        return res;
    }
    auto form = recognize_trs(cur);
    if (!form) throw Error(ErrorKind::Internal, "reduction terminated on an unrecognized system");
    if (!has_good_spectrum(form->C)) {
        red.normalize_residual_spectrum(cur, res.chain);
        form = recognize_trs(cur);
        if (!form || !has_good_spectrum(form->C))
            throw Error(ErrorKind::Internal, "spectral normalization failed to reach good spectrum");
    }
    LinearSystem replay = LinearSystem::normalized(s0.n, s0.p, s0.A);
    for (const auto& t : res.chain) replay = apply_gauge(replay, t);
    if (replay.p != cur.p || !replay.A.is_known_equal(cur.A))
        throw Error(ErrorKind::Internal, "chain replay mismatch");
    res.outcome = *form;
    return res;
}

} // namespace trs
