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

#include "trs/multiseries.hpp"

#include <algorithm>
#include <sstream>

#include "trs/matrix.hpp"

namespace trs {

namespace {
int ord_or_beyond(const MultiSeries& f) {
    auto o = f.ord();
    return o ? *o : f.trunc() + 1;
}
} // namespace

MultiSeries::MultiSeries(int yvars, int trunc) : yvars_(yvars), trunc_(trunc) {
    if (yvars < 0) throw Error(ErrorKind::ShapeError, "negative variable count");
    if (trunc < 0) throw Error(ErrorKind::EmptyPrecision, "multiseries with negative truncation order");
}

MultiSeries MultiSeries::constant(const Rational& c, int yvars, int trunc) {
    MultiSeries s(yvars, trunc);
    if (c != 0) s.terms_[MIdx(static_cast<size_t>(yvars) + 1, 0)] = c;
    return s;
}

MultiSeries MultiSeries::monomial(const Rational& c, const MIdx& alpha, int trunc) {
    MultiSeries s(static_cast<int>(alpha.size()) - 1, trunc);
    if (midx_degree(alpha) > trunc)
        throw Error(ErrorKind::EmptyPrecision, "monomial degree beyond truncation order");
    if (c != 0) s.terms_[alpha] = c;
    return s;
}

MultiSeries MultiSeries::var_x(int yvars, int trunc) {
    MIdx a(static_cast<size_t>(yvars) + 1, 0);
    a[0] = 1;
    return monomial(1, a, trunc);
}

MultiSeries MultiSeries::var_y(int i, int yvars, int trunc) {
    MIdx a(static_cast<size_t>(yvars) + 1, 0);
    a[static_cast<size_t>(i) + 1] = 1;
    return monomial(1, a, trunc);
}

MultiSeries MultiSeries::from_x_series(const TruncatedSeries& f, int yvars) {
    MultiSeries s(yvars, f.trunc());
    MIdx a(static_cast<size_t>(yvars) + 1, 0);
    for (int k = 0; k <= f.trunc(); ++k) {
        if (f[k] == 0) continue;
        a[0] = k;
        s.terms_[a] = f[k];
    }
    return s;
}

Rational MultiSeries::coeff(const MIdx& alpha) const {
    auto it = terms_.find(alpha);
    return it == terms_.end() ? Rational(0) : it->second;
}

void MultiSeries::add_term(const MIdx& alpha, const Rational& c) {
    if (static_cast<int>(alpha.size()) != yvars_ + 1)
        throw Error(ErrorKind::ShapeError, "multi-index arity mismatch");
    if (midx_degree(alpha) > trunc_)
        throw Error(ErrorKind::InsufficientPrecision, "term beyond truncation order");
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(alpha, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

std::optional<int> MultiSeries::ord() const {
    std::optional<int> best;
    for (const auto& [a, c] : terms_) {
        int d = midx_degree(a);
        if (!best || d < *best) best = d;
    }
    return best;
}

int MultiSeries::ord_x_floor() const {
    int e = trunc_ + 1;
    for (const auto& [a, c] : terms_) e = std::min(e, a[0]);
    return e;
}

MultiSeries MultiSeries::jet(int k) const {
    if (k > trunc_)
        throw Error(ErrorKind::InsufficientPrecision, "jet order beyond truncation");
    MultiSeries out(yvars_, trunc_);
    for (const auto& [a, c] : terms_)
        if (midx_degree(a) <= k) out.terms_[a] = c;
    return out;
}

MultiSeries MultiSeries::restrict_trunc(int k) const {
    if (k > trunc_)
        throw Error(ErrorKind::InsufficientPrecision, "cannot raise truncation order");
    MultiSeries out(yvars_, k);
    for (const auto& [a, c] : terms_)
        if (midx_degree(a) <= k) out.terms_[a] = c;
    return out;
}

MultiSeries MultiSeries::homogeneous_part(int d) const {
    MultiSeries out(yvars_, trunc_);
    for (const auto& [a, c] : terms_)
        if (midx_degree(a) == d) out.terms_[a] = c;
    return out;
}

MultiSeries MultiSeries::mul_x_pow(int k) const {
    MultiSeries out(yvars_, trunc_ + k);
    for (const auto& [a, c] : terms_) {
        MIdx b = a;
        b[0] += k;
        out.terms_[b] = c;
    }
    return out;
}

MultiSeries MultiSeries::exact_divide_x(int k) const {
    if (k == 0) return *this;
    if (trunc_ < k)
        throw Error(ErrorKind::InsufficientPrecision, "divide: truncation below divisor power");
    MultiSeries out(yvars_, trunc_ - k);
    for (const auto& [a, c] : terms_) {
        if (a[0] < k)
            throw Error(ErrorKind::NotDivisible, "term with x-power below x^" + std::to_string(k));
        MIdx b = a;
        b[0] -= k;
        out.terms_[b] = c;
    }
    return out;
}

MultiSeries MultiSeries::derivative_x() const {
    if (trunc_ == 0) throw Error(ErrorKind::EmptyPrecision, "derivative exhausts truncation");
    MultiSeries out(yvars_, trunc_ - 1);
    for (const auto& [a, c] : terms_) {
        if (a[0] == 0) continue;
        MIdx b = a;
        b[0] -= 1;
        if (midx_degree(b) <= out.trunc_) out.terms_[b] = Rational(a[0]) * c;
    }
    return out;
}

MultiSeries MultiSeries::derivative_y(int i) const {
    if (trunc_ == 0) throw Error(ErrorKind::EmptyPrecision, "derivative exhausts truncation");
    MultiSeries out(yvars_, trunc_ - 1);
    for (const auto& [a, c] : terms_) {
        if (a[static_cast<size_t>(i) + 1] == 0) continue;
        MIdx b = a;
        b[static_cast<size_t>(i) + 1] -= 1;
        if (midx_degree(b) <= out.trunc_) out.terms_[b] = Rational(a[static_cast<size_t>(i) + 1]) * c;
    }
    return out;
}

MultiSeries MultiSeries::reciprocal() const {
    MIdx zero_idx(static_cast<size_t>(yvars_) + 1, 0);
    Rational c0 = coeff(zero_idx);
    if (c0 == 0) throw Error(ErrorKind::UnitRequired, "reciprocal of a non-unit multiseries");
    // 1/(c0 + R) built degree by degree: inv_d determined by lower parts.
    MultiSeries inv = MultiSeries::constant(Rational(1) / c0, yvars_, trunc_);
    MultiSeries rest = *this;
    rest.terms_.erase(zero_idx);
    for (int d = 1; d <= trunc_; ++d) {
        // coefficient at degree d of this*inv must vanish
        MultiSeries prod = rest * inv;
        MultiSeries part = prod.homogeneous_part(d);
        for (const auto& [a, c] : part.terms_) inv.terms_[a] = -c / c0;
    }
    return inv;
}

MultiSeries MultiSeries::subst_translation(const std::vector<TruncatedSeries>& beta) const {
    if (static_cast<int>(beta.size()) != yvars_)
        throw Error(ErrorKind::ShapeError, "translation arity mismatch");
    std::vector<MultiSeries> repl;
    repl.reserve(beta.size());
    for (int i = 0; i < yvars_; ++i) {
        if (beta[static_cast<size_t>(i)].trunc() >= 0 && beta[static_cast<size_t>(i)][0] != 0)
            throw Error(ErrorKind::Inadmissible, "translation with nonzero constant term");
        MultiSeries r = MultiSeries::from_x_series(beta[static_cast<size_t>(i)].restrict_trunc(
                            std::min(trunc_, beta[static_cast<size_t>(i)].trunc())),
                        yvars_);
        // polynomial translations are exact data; keep our truncation
        MultiSeries rr(yvars_, trunc_);
        for (const auto& [a, c] : r.terms())
            if (midx_degree(a) <= trunc_) rr.add_term(a, c);
        repl.push_back(rr + MultiSeries::var_y(i, yvars_, trunc_));
    }
    return subst_y_block(0, repl);
}

MultiSeries MultiSeries::subst_linear(const PolyMatrix& P) const {
    if (P.size() != yvars_) throw Error(ErrorKind::ShapeError, "linear substitution size mismatch");
    int t = std::min(trunc_, P.trunc() + 1);
    std::vector<MultiSeries> repl;
    repl.reserve(static_cast<size_t>(yvars_));
    for (int i = 0; i < yvars_; ++i) {
        MultiSeries acc(yvars_, t);
        for (int j = 0; j < yvars_; ++j) {
            const TruncatedSeries& pij = P.at(i, j);
            for (int k = 0; k <= std::min(pij.trunc(), t - 1); ++k) {
                if (pij[k] == 0) continue;
                MIdx a(static_cast<size_t>(yvars_) + 1, 0);
                a[0] = k;
                a[static_cast<size_t>(j) + 1] = 1;
                acc.add_term(a, pij[k]);
            }
        }
        repl.push_back(acc);
    }
    MultiSeries base = trunc_ > t ? restrict_trunc(t) : *this;
    return base.subst_y_block(0, repl);
}

MultiSeries MultiSeries::subst_scale_by_x(int k) const {
    if (k < 1 || k > yvars_) throw Error(ErrorKind::ShapeError, "scale block out of range");
    MultiSeries out(yvars_, trunc_);
    for (const auto& [a, c] : terms_) {
        int extra = 0;
        for (int i = 1; i <= k; ++i) extra += a[static_cast<size_t>(i)];
        MIdx b = a;
        b[0] += extra;
        if (midx_degree(b) <= trunc_) out.add_term(b, c);
    }
    return out;
}

MultiSeries MultiSeries::subst_ramify(int r) const {
    if (r < 1) throw Error(ErrorKind::DomainError, "ramification order must be >= 1");
    if (r == 1) return *this;
    MultiSeries out(yvars_, trunc_);
    for (const auto& [a, c] : terms_) {
        MIdx b = a;
        b[0] *= r;
        if (midx_degree(b) <= trunc_) out.add_term(b, c);
    }
    return out;
}

TruncatedSeries MultiSeries::eval_at_curve(const std::vector<TruncatedSeries>& gamma) const {
    if (static_cast<int>(gamma.size()) != yvars_)
        throw Error(ErrorKind::ShapeError, "curve arity mismatch");
    int t = trunc_;
    for (const auto& g : gamma) {
        if (g.trunc() >= 0 && g[0] != 0)
            throw Error(ErrorKind::Inadmissible, "curve substitution requires zero constant terms");
        t = std::min(t, g.trunc());
    }
    TruncatedSeries acc = TruncatedSeries::zero(t);
    for (const auto& [a, c] : terms_) {
        if (a[0] > t) continue;
        TruncatedSeries term = TruncatedSeries::monomial(c, a[0], t);
        bool dead = false;
        for (int i = 0; i < yvars_ && !dead; ++i) {
            for (int e = 0; e < a[static_cast<size_t>(i) + 1] && !dead; ++e) {
                term = term * gamma[static_cast<size_t>(i)];
                if (term.trunc() < 0) dead = true;
            }
        }
        if (!dead) acc = acc + term.restrict_trunc(std::min(acc.trunc(), term.trunc()));
    }
    return acc;
}

MultiSeries MultiSeries::subst_y_block(int from, const std::vector<MultiSeries>& h) const {
    for (const auto& hi : h) {
        if (hi.yvars_ != yvars_) throw Error(ErrorKind::ShapeError, "substitution arity mismatch");
        auto o = hi.ord();
        if (o && *o < 1)
            throw Error(ErrorKind::Inadmissible, "substitution series must have zero constant term");
    }
    int t = trunc_;
    for (const auto& hi : h) t = std::min(t, hi.trunc());
    MultiSeries out(yvars_, t);
    int to = from + static_cast<int>(h.size());
    for (const auto& [a, c] : terms_) {
        if (midx_degree(a) > t) continue;
        MultiSeries term = MultiSeries::constant(c, yvars_, t);
        MIdx rest(static_cast<size_t>(yvars_) + 1, 0);
        rest[0] = a[0];
        for (int i = 0; i < yvars_; ++i) {
            int e = a[static_cast<size_t>(i) + 1];
            if (i >= from && i < to) continue;
            rest[static_cast<size_t>(i) + 1] = e;
        }
        if (midx_degree(rest) > t) continue;
        term = term * MultiSeries::monomial(1, rest, t);
        bool dead = false;
        for (int i = from; i < to && !dead; ++i) {
            int e = a[static_cast<size_t>(i) + 1];
            for (int j = 0; j < e && !dead; ++j) {
                term = term * h[static_cast<size_t>(i - from)];
                if (term.known_zero() && term.trunc() < 0) dead = true;
            }
        }
        if (!dead)
            for (const auto& [b, cb] : term.terms_)
                if (midx_degree(b) <= out.trunc_) out.add_term(b, cb);
    }
    return out;
}

MultiSeries MultiSeries::set_y_zero(const std::vector<bool>& mask) const {
    if (static_cast<int>(mask.size()) != yvars_)
        throw Error(ErrorKind::ShapeError, "mask arity mismatch");
    MultiSeries out(yvars_, trunc_);
    for (const auto& [a, c] : terms_) {
        bool keep = true;
        for (int i = 0; i < yvars_ && keep; ++i)
            if (mask[static_cast<size_t>(i)] && a[static_cast<size_t>(i) + 1] > 0) keep = false;
        if (keep) out.terms_[a] = c;
    }
    return out;
}

TruncatedSeries MultiSeries::linear_y_coefficient(int i) const {
    TruncatedSeries out = TruncatedSeries::zero(std::max(0, trunc_ - 1));
    for (const auto& [a, c] : terms_) {
        if (a[static_cast<size_t>(i) + 1] != 1) continue;
        if (midx_degree(a) != a[0] + 1) continue; // only x^k * y_i terms
        if (a[0] <= out.trunc()) out.set(a[0], c);
    }
    return out;
}

TruncatedSeries MultiSeries::y_constant_part() const {
    TruncatedSeries out = TruncatedSeries::zero(trunc_);
    for (const auto& [a, c] : terms_) {
        if (midx_degree(a) != a[0]) continue;
        out.set(a[0], c);
    }
    return out;
}

Rational MultiSeries::eval(const Rational& x, const std::vector<Rational>& y) const {
    Rational acc(0);
    for (const auto& [a, c] : terms_) {
        Rational t = c;
        for (int e = 0; e < a[0]; ++e) t *= x;
        for (int i = 0; i < yvars_; ++i)
            for (int e = 0; e < a[static_cast<size_t>(i) + 1]; ++e) t *= y[static_cast<size_t>(i)];
        acc += t;
    }
    return acc;
}

double MultiSeries::eval_double(double x, const std::vector<double>& y) const {
    double acc = 0;
    for (const auto& [a, c] : terms_) {
        double t = rat_to_double(c);
        for (int e = 0; e < a[0]; ++e) t *= x;
        for (int i = 0; i < yvars_; ++i)
            for (int e = 0; e < a[static_cast<size_t>(i) + 1]; ++e) t *= y[static_cast<size_t>(i)];
        acc += t;
    }
    return acc;
}

bool MultiSeries::is_known_equal(const MultiSeries& other) const {
    if (yvars_ != other.yvars_) return false;
    int t = std::min(trunc_, other.trunc_);
    for (const auto& [a, c] : terms_)
        if (midx_degree(a) <= t && other.coeff(a) != c) return false;
    for (const auto& [a, c] : other.terms_)
        if (midx_degree(a) <= t && coeff(a) != c) return false;
    return true;
}

std::string MultiSeries::to_string() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [a, c] : terms_) {
        if (!first) os << " + ";
        os << rat_to_string(c);
        if (a[0] > 0) os << "*x^" << a[0];
        for (int i = 0; i < yvars_; ++i)
            if (a[static_cast<size_t>(i) + 1] > 0) os << "*y" << i + 1 << "^" << a[static_cast<size_t>(i) + 1];
        first = false;
    }
    if (first) os << "0";
    os << " + O(deg " << trunc_ + 1 << ")";
    return os.str();
}

void MultiSeries::check_same_shape(const MultiSeries& other) const {
    if (yvars_ != other.yvars_) throw Error(ErrorKind::ShapeError, "variable count mismatch");
}

MultiSeries operator+(const MultiSeries& a, const MultiSeries& b) {
    a.check_same_shape(b);
    MultiSeries out(a.yvars_, std::min(a.trunc_, b.trunc_));
    for (const auto& [k, c] : a.terms_)
        if (midx_degree(k) <= out.trunc_) out.add_term(k, c);
    for (const auto& [k, c] : b.terms_)
        if (midx_degree(k) <= out.trunc_) out.add_term(k, c);
    return out;
}

MultiSeries operator-(const MultiSeries& a, const MultiSeries& b) { return a + (-b); }

MultiSeries operator*(const MultiSeries& a, const MultiSeries& b) {
    a.check_same_shape(b);
    int oa = ord_or_beyond(a), ob = ord_or_beyond(b);
    long t = std::min<long>({static_cast<long>(a.trunc_) + ob, static_cast<long>(b.trunc_) + oa,
                             static_cast<long>(a.trunc_) + b.trunc_ + 1});
    if (t < 0) throw Error(ErrorKind::EmptyPrecision, "product has no known terms");
    MultiSeries out(a.yvars_, static_cast<int>(t));
    for (const auto& [ka, ca] : a.terms_) {
        int da = midx_degree(ka);
        for (const auto& [kb, cb] : b.terms_) {
            if (da + midx_degree(kb) > out.trunc_) continue;
            MIdx k = ka;
            for (size_t i = 0; i < k.size(); ++i) k[i] += kb[i];
            out.add_term(k, ca * cb);
        }
    }
    return out;
}

MultiSeries operator*(const Rational& c, const MultiSeries& a) {
    MultiSeries out(a.yvars_, a.trunc_);
    if (c == 0) return out;
    for (const auto& [k, v] : a.terms_) out.terms_[k] = c * v;
    return out;
}

MultiSeries operator-(const MultiSeries& a) { return Rational(-1) * a; }

bool operator==(const MultiSeries& a, const MultiSeries& b) {
    return a.yvars_ == b.yvars_ && a.trunc_ == b.trunc_ && a.terms_ == b.terms_;
}

} // namespace trs
