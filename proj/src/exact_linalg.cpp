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

#include "trs/exact_linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>

namespace trs {

namespace {

// Row echelon via Gauss; returns pivot columns.  aug is modified in place.
std::vector<int> echelon(RatMatrix& m) {
    std::vector<int> pivots;
    int r = 0;
    for (int c = 0; c < m.cols() && r < m.rows(); ++c) {
        int piv = -1;
        for (int i = r; i < m.rows(); ++i)
            if (m.at(i, c) != 0) { piv = i; break; }
        if (piv < 0) continue;
        if (piv != r)
            for (int j = 0; j < m.cols(); ++j) std::swap(m.at(piv, j), m.at(r, j));
        Rational d = m.at(r, c);
        for (int j = c; j < m.cols(); ++j) m.at(r, j) /= d;
        for (int i = 0; i < m.rows(); ++i) {
            if (i == r || m.at(i, c) == 0) continue;
            Rational f = m.at(i, c);
            for (int j = c; j < m.cols(); ++j) m.at(i, j) -= f * m.at(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

} // namespace

int rank(const RatMatrix& m) {
    RatMatrix w = m;
    return static_cast<int>(echelon(w).size());
}

Rational determinant(const RatMatrix& m) {
    if (m.rows() != m.cols()) throw Error(ErrorKind::ShapeError, "determinant of non-square matrix");
    RatMatrix w = m;
    Rational det(1);
    int n = w.rows();
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int i = c; i < n; ++i)
            if (w.at(i, c) != 0) { piv = i; break; }
        if (piv < 0) return Rational(0);
        if (piv != c) {
            for (int j = 0; j < n; ++j) std::swap(w.at(piv, j), w.at(c, j));
            det = -det;
        }
        det *= w.at(c, c);
        Rational d = w.at(c, c);
        for (int i = c + 1; i < n; ++i) {
            if (w.at(i, c) == 0) continue;
            Rational f = w.at(i, c) / d;
            for (int j = c; j < n; ++j) w.at(i, j) -= f * w.at(c, j);
        }
    }
    return det;
}

RatMatrix inverse(const RatMatrix& m) {
    if (m.rows() != m.cols()) throw Error(ErrorKind::ShapeError, "inverse of non-square matrix");
    int n = m.rows();
    RatMatrix aug(n, 2 * n);
    aug.set_block(0, 0, m);
    aug.set_block(0, n, RatMatrix::identity(n));
    auto piv = echelon(aug);
    if (static_cast<int>(piv.size()) < n || piv.back() >= n)
        throw Error(ErrorKind::NotRegular, "matrix not invertible");
    return aug.block(0, n, n, n);
}

RatMatrix nullspace(const RatMatrix& m) {
    RatMatrix w = m;
    auto piv = echelon(w);
    std::vector<bool> is_pivot(static_cast<size_t>(m.cols()), false);
    for (int c : piv) is_pivot[static_cast<size_t>(c)] = true;
    std::vector<int> free_cols;
    for (int c = 0; c < m.cols(); ++c)
        if (!is_pivot[static_cast<size_t>(c)]) free_cols.push_back(c);
    RatMatrix basis(m.cols(), static_cast<int>(free_cols.size()));
    for (size_t k = 0; k < free_cols.size(); ++k) {
        int fc = free_cols[k];
        basis.at(fc, static_cast<int>(k)) = 1;
        for (size_t r = 0; r < piv.size(); ++r) basis.at(piv[r], static_cast<int>(k)) = -w.at(static_cast<int>(r), fc);
    }
    return basis;
}

std::optional<RatMatrix> solve(const RatMatrix& m, const RatMatrix& rhs) {
    if (rhs.rows() != m.rows()) throw Error(ErrorKind::ShapeError, "solve: rhs shape");
    RatMatrix aug(m.rows(), m.cols() + rhs.cols());
    aug.set_block(0, 0, m);
    aug.set_block(0, m.cols(), rhs);
    auto piv = echelon(aug);
    // inconsistent iff a pivot lands in the rhs columns
    for (int c : piv)
        if (c >= m.cols()) return std::nullopt;
    RatMatrix x(m.cols(), rhs.cols());
    for (size_t r = 0; r < piv.size(); ++r)
        for (int j = 0; j < rhs.cols(); ++j) x.at(piv[r], j) = aug.at(static_cast<int>(r), m.cols() + j);
    return x;
}

std::optional<RatMatrix> solve_sylvester(const RatMatrix& a, const RatMatrix& b, const RatMatrix& e) {
    int p = a.rows(), q = b.rows();
    if (e.rows() != p || e.cols() != q) throw Error(ErrorKind::ShapeError, "sylvester shapes");
    // vec(X) with X stored row-major: (a x)_{ij} - (x b)_{ij} = e_{ij}
    RatMatrix sys(p * q, p * q);
    RatMatrix rhs(p * q, 1);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < q; ++j) {
            int row = i * q + j;
            for (int k = 0; k < p; ++k) sys.at(row, k * q + j) += a.at(i, k);
            for (int k = 0; k < q; ++k) sys.at(row, i * q + k) -= b.at(k, j);
            rhs.at(row, 0) = e.at(i, j);
        }
    auto sol = solve(sys, rhs);
    if (!sol) return std::nullopt;
    RatMatrix x(p, q);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < q; ++j) x.at(i, j) = sol->at(i * q + j, 0);
    return x;
}

RatMatrix complete_basis(const RatMatrix& v) {
    int n = v.rows();
    RatMatrix out(n, n);
    int placed = 0;
    // a running echelon copy to test independence
    RatMatrix ech(n, n);
    int ech_rows = 0;
    auto try_add = [&](const RatMatrix& col) {
        // insert row = col^T into echelon form if independent
        std::vector<Rational> row(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) row[static_cast<size_t>(i)] = col.at(i, 0);
        for (int r = 0; r < ech_rows; ++r) {
            int pc = -1;
            for (int c = 0; c < n; ++c)
                if (ech.at(r, c) != 0) { pc = c; break; }
            if (pc >= 0 && row[static_cast<size_t>(pc)] != 0) {
                Rational f = row[static_cast<size_t>(pc)] / ech.at(r, pc);
                for (int c = 0; c < n; ++c) row[static_cast<size_t>(c)] -= f * ech.at(r, c);
            }
        }
        bool zero = true;
        for (const auto& x : row)
            if (x != 0) { zero = false; break; }
        if (zero) return false;
        for (int c = 0; c < n; ++c) ech.at(ech_rows, c) = row[static_cast<size_t>(c)];
        ++ech_rows;
        for (int i = 0; i < n; ++i) out.at(i, placed) = col.at(i, 0);
        ++placed;
        return true;
    };
    for (int j = 0; j < v.cols(); ++j) try_add(v.block(0, j, n, 1));
    for (int j = 0; j < n && placed < n; ++j) {
        RatMatrix e(n, 1);
        e.at(j, 0) = 1;
        try_add(e);
    }
    if (placed < n) throw Error(ErrorKind::Internal, "basis completion failed");
    return out;
}

RatPoly poly_trim(RatPoly p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
    return p;
}

int poly_deg(const RatPoly& p) {
    for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i)
        if (p[static_cast<size_t>(i)] != 0) return i;
    return -1;
}

RatPoly poly_add(const RatPoly& a, const RatPoly& b) {
    RatPoly r(std::max(a.size(), b.size()), Rational(0));
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return poly_trim(r);
}

RatPoly poly_mul(const RatPoly& a, const RatPoly& b) {
    if (poly_deg(a) < 0 || poly_deg(b) < 0) return {};
    RatPoly r(a.size() + b.size() - 1, Rational(0));
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    }
    return poly_trim(r);
}

std::pair<RatPoly, RatPoly> poly_divrem(const RatPoly& a, const RatPoly& b) {
    int db = poly_deg(b);
    if (db < 0) throw Error(ErrorKind::DomainError, "polynomial division by zero");
    RatPoly rem = poly_trim(a);
    RatPoly quot;
    int da = poly_deg(rem);
    if (da >= db) quot.assign(static_cast<size_t>(da - db) + 1, Rational(0));
    while ((da = poly_deg(rem)) >= db) {
        Rational f = rem[static_cast<size_t>(da)] / b[static_cast<size_t>(db)];
        quot[static_cast<size_t>(da - db)] = f;
        for (int i = 0; i <= db; ++i) rem[static_cast<size_t>(da - db + i)] -= f * b[static_cast<size_t>(i)];
        rem = poly_trim(rem);
    }
    return {poly_trim(quot), rem};
}

RatPoly poly_gcd(RatPoly a, RatPoly b) {
    a = poly_trim(a);
    b = poly_trim(b);
    while (poly_deg(b) >= 0) {
        auto [q, r] = poly_divrem(a, b);
        a = b;
        b = r;
    }
    int d = poly_deg(a);
    if (d >= 0) {
        Rational lead = a[static_cast<size_t>(d)];
        for (auto& c : a) c /= lead;
    }
    return a;
}

RatPoly poly_shift(const RatPoly& p, const Rational& c) {
    // p(x + c) via repeated Horner in (x + c)
    RatPoly r;
    for (int i = poly_deg(p); i >= 0; --i) {
        // r = r*(x+c) + p_i
        RatPoly nr(r.size() + 1, Rational(0));
        for (size_t j = 0; j < r.size(); ++j) {
            nr[j + 1] += r[j];
            nr[j] += c * r[j];
        }
        if (nr.empty()) nr.assign(1, Rational(0));
        nr[0] += p[static_cast<size_t>(i)];
        r = poly_trim(nr);
        if (r.empty()) r.assign(1, Rational(0));
    }
    return poly_trim(r);
}

Rational poly_eval(const RatPoly& p, const Rational& x) {
    Rational acc(0);
    for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i) acc = acc * x + p[static_cast<size_t>(i)];
    return acc;
}

RatPoly charpoly(const RatMatrix& m) {
    // Faddeev-LeVerrier: exact over Q, fine for the small sizes used here.
    if (m.rows() != m.cols()) throw Error(ErrorKind::ShapeError, "charpoly of non-square matrix");
    int n = m.rows();
    RatPoly chi(static_cast<size_t>(n) + 1, Rational(0));
    chi[static_cast<size_t>(n)] = 1;
    RatMatrix mk = RatMatrix::identity(n);
    Rational c(1);
    for (int k = 1; k <= n; ++k) {
        mk = m * mk;
        Rational tr(0);
        for (int i = 0; i < n; ++i) tr += mk.at(i, i);
        c = -tr / k;
        chi[static_cast<size_t>(n - k)] = c;
        for (int i = 0; i < n; ++i) mk.at(i, i) += c;
    }
    return chi;
}

std::optional<Rational> rat_sqrt_exact(const Rational& r) {
    if (r < 0) return std::nullopt;
    if (r == 0) return Rational(0);
    Integer num = rat_num(r), den = rat_den(r);
    Integer sn = boost::multiprecision::sqrt(num);
    Integer sd = boost::multiprecision::sqrt(den);
    if (sn * sn != num || sd * sd != den) return std::nullopt;
    return Rational(sn, sd);
}

namespace {

// Rational roots of a polynomial with rational coefficients.
std::vector<Rational> rational_roots(const RatPoly& p0) {
    RatPoly p = poly_trim(p0);
    std::vector<Rational> roots;
    if (poly_deg(p) <= 0) return roots;
    // clear denominators
    Integer lcm = 1;
    for (const auto& c : p) lcm = boost::multiprecision::lcm(lcm, rat_den(c));
    std::vector<Integer> ip;
    ip.reserve(p.size());
    for (const auto& c : p) ip.push_back(rat_num(c) * (lcm / rat_den(c)));
    // strip x^k factor
    size_t low = 0;
    while (low < ip.size() && ip[low] == 0) ++low;
    if (low > 0) roots.push_back(Rational(0));
    if (low >= ip.size() - 1) return roots;
    Integer a0 = boost::multiprecision::abs(ip[low]);
    Integer an = boost::multiprecision::abs(ip.back());
    auto divisors = [](Integer v) {
        std::vector<Integer> d;
        for (Integer i = 1; i * i <= v; ++i) {
            if (v % i == 0) {
                d.push_back(i);
                if (i * i != v) d.push_back(v / i);
            }
        }
        return d;
    };
    // keep the divisor enumeration affordable on random data
    if (a0 > 1000000000 || an > 1000000000) {
        // fall back: test small candidates only
        for (long num = -64; num <= 64; ++num)
            for (long den = 1; den <= 16; ++den) {
                Rational cand(num, den);
                if (poly_eval(p, cand) == 0) roots.push_back(cand);
            }
        std::sort(roots.begin(), roots.end());
        roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
        return roots;
    }
    for (const Integer& dn : divisors(a0))
        for (const Integer& dd : divisors(an))
            for (int s = -1; s <= 1; s += 2) {
                Rational cand(s * dn, dd);
                if (poly_eval(p, cand) == 0) roots.push_back(cand);
            }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return roots;
}

// Try to split a monic quartic into two monic rational quadratics.
std::optional<std::pair<RatPoly, RatPoly>> split_quartic(const RatPoly& p) {
    if (poly_deg(p) != 4 || p[4] != 1) return std::nullopt;
    // x^4+ax^3+bx^2+cx+d = (x^2+px+q)(x^2+rx+s)
    const Rational a = p[3], b = p[2], c = p[1], d = p[0];
    // resolvent cubic in u = q+s: u^3 - b u^2 + (ac - 4d) u - (a^2 d - 4 b d + c^2) = 0
    RatPoly res = {-(a * a * d - 4 * b * d + c * c), a * c - 4 * d, -b, Rational(1)};
    for (const Rational& u : rational_roots(res)) {
        // p + r = a, q + s = u, pr = b - u, ps + qr = c, qs = d
        // p, r roots of t^2 - a t + (b - u)
        Rational disc = a * a - 4 * (b - u);
        auto sd = rat_sqrt_exact(disc);
        if (!sd) continue;
        Rational pp = (a + *sd) / 2, rr = (a - *sd) / 2;
        // q, s from q+s = u, and ps + qr = c
        // if p != r: q = (c - p*u)/(r - p) ... solve linear system
        Rational qq, ss;
        if (pp != rr) {
            // q*rr + s*pp = c, q + s = u
            // q(rr - pp) = c - u*pp
            qq = (c - u * pp) / (rr - pp);
            ss = u - qq;
        } else {
            // equal p=r: need q+s=u and p(q+s)=c -> consistency, and qs=d
            if (pp * u != c) continue;
            Rational disc2 = u * u - 4 * d;
            auto sd2 = rat_sqrt_exact(disc2);
            if (!sd2) continue;
            qq = (u + *sd2) / 2;
            ss = (u - *sd2) / 2;
        }
        if (qq * ss != d) continue;
        RatPoly f1 = {qq, pp, Rational(1)}, f2 = {ss, rr, Rational(1)};
        if (poly_mul(f1, f2) == poly_trim(p)) return std::make_pair(f1, f2);
    }
    return std::nullopt;
}

} // namespace

std::vector<EigenGroup> analyze_spectrum(const RatPoly& chi0) {
    RatPoly rem = poly_trim(chi0);
    int d = poly_deg(rem);
    if (d < 0) throw Error(ErrorKind::DomainError, "zero characteristic polynomial");
    // normalize monic
    Rational lead = rem[static_cast<size_t>(d)];
    for (auto& c : rem) c /= lead;

    std::vector<EigenGroup> groups;
    // rational roots with multiplicity
    for (const Rational& r : rational_roots(rem)) {
        int mult = 0;
        RatPoly lin = {-r, Rational(1)};
        while (true) {
            auto [q, rr] = poly_divrem(rem, lin);
            if (poly_deg(rr) >= 0) break;
            rem = q;
            ++mult;
        }
        if (mult > 0) groups.push_back({EigenGroup::Kind::RationalEig, r, Rational(0), lin, mult});
    }
    // quadratic pieces
    auto classify_quadratic = [&](const RatPoly& q, int mult) {
        Rational p = q[1], c = q[0];
        Rational disc = p * p - 4 * c;
        Rational re = -p / 2;
        if (disc < 0) {
            auto s = rat_sqrt_exact(-disc);
            if (s) {
                groups.push_back({EigenGroup::Kind::GaussianPair, re, *s / 2, q, mult});
            } else {
                groups.push_back({EigenGroup::Kind::IrrationalComplex, re, Rational(0), q, mult});
            }
        } else {
            groups.push_back({EigenGroup::Kind::IrrationalReal, re, Rational(0), q, mult});
        }
    };
    while (poly_deg(rem) > 0) {
        int dr = poly_deg(rem);
        if (dr == 2) {
            classify_quadratic(rem, 1);
            rem = {Rational(1)};
            break;
        }
        if (dr == 4) {
            if (auto sp = split_quartic(rem)) {
                if (sp->first == sp->second) {
                    classify_quadratic(sp->first, 2);
                } else {
                    classify_quadratic(sp->first, 1);
                    classify_quadratic(sp->second, 1);
                }
                rem = {Rational(1)};
                break;
            }
        }
        // give up splitting exactly; may still be a power of a quadratic
        if (dr % 2 == 0) {
            // test rem == g^k for quadratic g via gcd with derivative
            RatPoly der(static_cast<size_t>(dr), Rational(0));
            for (int i = 1; i <= dr; ++i) der[static_cast<size_t>(i - 1)] = Rational(i) * rem[static_cast<size_t>(i)];
            RatPoly g = poly_gcd(rem, der);
            if (poly_deg(g) == dr - 2) {
                auto [q, rr] = poly_divrem(rem, g);
                if (poly_deg(rr) < 0 && poly_deg(q) == 2) {
                    // rem = q * g; check g = q^{k-1}
                    RatPoly pw = q;
                    int mult = 1;
                    while (poly_deg(pw) < dr) {
                        pw = poly_mul(pw, q);
                        ++mult;
                    }
                    if (pw == rem) {
                        classify_quadratic(q, mult);
                        rem = {Rational(1)};
                        break;
                    }
                }
            }
        }
        groups.push_back({EigenGroup::Kind::HighDegree, Rational(0), Rational(0), rem, 1});
        rem = {Rational(1)};
    }
    return groups;
}

Rational spectrum_real_upper_bound(const RatPoly& chi0) {
    RatPoly chi = poly_trim(chi0);
    int d = poly_deg(chi);
    if (d <= 0) return Rational(0);
    Rational lead = chi[static_cast<size_t>(d)];
    Rational m(0);
    for (int i = 0; i < d; ++i) {
        Rational a = boost::multiprecision::abs(chi[static_cast<size_t>(i)] / lead);
        if (a > m) m = a;
    }
    return Rational(1) + m; // Cauchy bound
}

bool spectrum_good_exact(const RatPoly& chi) {
    Rational bound = 2 * spectrum_real_upper_bound(chi);
    Integer kmax = rat_ceil(bound);
    for (Integer k = 1; k <= kmax; ++k) {
        RatPoly shifted = poly_shift(chi, Rational(k));
        RatPoly g = poly_gcd(chi, shifted);
        if (poly_deg(g) > 0) return false;
    }
    return true;
}

std::vector<std::pair<double, double>> float_eigenvalues(const RatMatrix& m) {
    int n = m.rows();
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = rat_to_double(m.at(i, j));
    Eigen::EigenSolver<Eigen::MatrixXd> es(a);
    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) out.emplace_back(es.eigenvalues()[i].real(), es.eigenvalues()[i].imag());
    return out;
}

IncrementalSolver::IncrementalSolver(int nvars) : nvars_(nvars) {}

bool IncrementalSolver::add_equation(const std::map<int, Rational>& coeffs, const Rational& rhs) {
    std::map<int, Rational> row;
    for (const auto& [v, c] : coeffs) {
        if (v < 0 || v >= nvars_) throw Error(ErrorKind::ShapeError, "variable index out of range");
        if (c != 0) row[v] = c;
    }
    Rational b = rhs;
    // Eliminate every variable that is an existing pivot.  Stored rows never
    // contain each other's pivots, so each elimination introduces only free
    // variables and the loop terminates.
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto it = row.begin(); it != row.end(); ++it) {
            auto rt = rows_.find(it->first);
            if (rt == rows_.end()) continue;
            Rational f = it->second;
            for (const auto& [v, c] : rt->second.first) {
                auto jt = row.find(v);
                Rational nv = (jt == row.end() ? Rational(0) : jt->second) - f * c;
                if (nv == 0) {
                    if (jt != row.end()) row.erase(jt);
                } else {
                    row[v] = nv;
                }
            }
            b -= f * rt->second.second;
            changed = true;
            break; // iterators invalidated
        }
    }
    if (row.empty()) return b == 0;
    // normalize pivot to 1 and store
    int pv = row.begin()->first;
    Rational lead = row.begin()->second;
    for (auto& [v, c] : row) c /= lead;
    b /= lead;
    // back-substitute into existing rows to keep reduced form
    for (auto& [opv, data] : rows_) {
        auto jt = data.first.find(pv);
        if (jt == data.first.end()) continue;
        Rational f = jt->second;
        for (const auto& [v, c] : row) {
            auto kt = data.first.find(v);
            Rational nv = (kt == data.first.end() ? Rational(0) : kt->second) - f * c;
            if (nv == 0) data.first.erase(v);
            else data.first[v] = nv;
        }
        data.second -= f * b;
    }
    rows_[pv] = {row, b};
    return true;
}

std::vector<Rational> IncrementalSolver::solution() const {
    std::vector<Rational> x(static_cast<size_t>(nvars_), Rational(0));
    // rows are fully reduced; free variables are zero, so pivot value = rhs
    for (const auto& [pv, data] : rows_) {
        Rational v = data.second;
        for (const auto& [var, c] : data.first)
            if (var != pv && x[static_cast<size_t>(var)] != 0) v -= c * x[static_cast<size_t>(var)];
        x[static_cast<size_t>(pv)] = v;
    }
    return x;
}

} // namespace trs
