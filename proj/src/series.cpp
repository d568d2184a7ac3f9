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

#include "trs/series.hpp"

#include <algorithm>
#include <sstream>

namespace trs {

namespace {

// First nonzero known index, or trunc+1 when all known coefficients vanish.
// The latter is the sound lower bound for the true order.
int ord_or_beyond(const TruncatedSeries& f) {
    auto o = f.ord();
    return o ? *o : f.trunc() + 1;
}

} // namespace

TruncatedSeries::TruncatedSeries(int trunc) {
    if (trunc < 0) throw Error(ErrorKind::EmptyPrecision, "series with negative truncation order");
    coeffs_.assign(static_cast<size_t>(trunc) + 1, Rational(0));
}

TruncatedSeries::TruncatedSeries(std::vector<Rational> coeffs, int trunc) {
    if (trunc < 0) throw Error(ErrorKind::EmptyPrecision, "series with negative truncation order");
    coeffs.resize(static_cast<size_t>(trunc) + 1, Rational(0));
    coeffs_ = std::move(coeffs);
}

TruncatedSeries TruncatedSeries::constant(const Rational& c, int trunc) {
    TruncatedSeries s(trunc);
    s.coeffs_[0] = c;
    return s;
}

TruncatedSeries TruncatedSeries::monomial(const Rational& c, int degree, int trunc) {
    if (degree > trunc)
        throw Error(ErrorKind::EmptyPrecision, "monomial degree beyond truncation order");
    TruncatedSeries s(trunc);
    s.coeffs_[static_cast<size_t>(degree)] = c;
    return s;
}

const Rational& TruncatedSeries::operator[](int k) const {
    static const Rational zero(0);
    if (k < 0) return zero;
    if (k > trunc())
        throw Error(ErrorKind::InsufficientPrecision,
                    "coefficient " + std::to_string(k) + " beyond truncation order " +
                        std::to_string(trunc()));
    return coeffs_[static_cast<size_t>(k)];
}

void TruncatedSeries::set(int k, const Rational& c) {
    if (k < 0 || k > trunc())
        throw Error(ErrorKind::InsufficientPrecision, "set beyond truncation order");
    coeffs_[static_cast<size_t>(k)] = c;
}

std::optional<int> TruncatedSeries::ord() const {
    for (int k = 0; k <= trunc(); ++k)
        if (coeffs_[static_cast<size_t>(k)] != 0) return k;
    return std::nullopt;
}

TruncatedSeries TruncatedSeries::jet(int k) const {
    if (k > trunc())
        throw Error(ErrorKind::InsufficientPrecision,
                    "jet order " + std::to_string(k) + " beyond truncation " + std::to_string(trunc()));
    TruncatedSeries out(trunc());
    for (int i = 0; i <= std::min(k, trunc()); ++i) out.coeffs_[static_cast<size_t>(i)] = coeffs_[static_cast<size_t>(i)];
    return out;
}

TruncatedSeries TruncatedSeries::restrict_trunc(int k) const {
    if (k > trunc())
        throw Error(ErrorKind::InsufficientPrecision, "cannot raise truncation order");
    TruncatedSeries out(k);
    for (int i = 0; i <= k; ++i) out.coeffs_[static_cast<size_t>(i)] = coeffs_[static_cast<size_t>(i)];
    return out;
}

TruncatedSeries TruncatedSeries::widen_exact(int k) const {
    if (k <= trunc()) return restrict_trunc(k);
    TruncatedSeries out(k);
    for (int i = 0; i <= trunc(); ++i) out.coeffs_[static_cast<size_t>(i)] = coeffs_[static_cast<size_t>(i)];
    return out;
}

TruncatedSeries TruncatedSeries::shift_up(int k) const {
    TruncatedSeries out(trunc() + k);
    for (int i = 0; i <= trunc(); ++i) out.coeffs_[static_cast<size_t>(i + k)] = coeffs_[static_cast<size_t>(i)];
    return out;
}

TruncatedSeries TruncatedSeries::exact_divide_x(int k) const {
    if (k == 0) return *this;
    if (trunc() < k)
        throw Error(ErrorKind::InsufficientPrecision, "divide: truncation below divisor power");
    for (int i = 0; i < k; ++i)
        if (coeffs_[static_cast<size_t>(i)] != 0)
            throw Error(ErrorKind::NotDivisible,
                        "nonzero coefficient at x^" + std::to_string(i) + " below x^" + std::to_string(k));
    TruncatedSeries out(trunc() - k);
    for (int i = k; i <= trunc(); ++i) out.coeffs_[static_cast<size_t>(i - k)] = coeffs_[static_cast<size_t>(i)];
    return out;
}

TruncatedSeries TruncatedSeries::derivative() const {
    if (trunc() == 0)
        throw Error(ErrorKind::EmptyPrecision, "derivative of order-0 series has no known terms");
    TruncatedSeries out(trunc() - 1);
    for (int i = 1; i <= trunc(); ++i)
        out.coeffs_[static_cast<size_t>(i - 1)] = Rational(i) * coeffs_[static_cast<size_t>(i)];
    return out;
}

TruncatedSeries TruncatedSeries::reciprocal() const {
    if (coeffs_[0] == 0)
        throw Error(ErrorKind::UnitRequired, "reciprocal of a series with zero constant term");
    TruncatedSeries out(trunc());
    out.coeffs_[0] = Rational(1) / coeffs_[0];
    for (int k = 1; k <= trunc(); ++k) {
        Rational acc(0);
        for (int j = 1; j <= k; ++j) acc += coeffs_[static_cast<size_t>(j)] * out.coeffs_[static_cast<size_t>(k - j)];
        out.coeffs_[static_cast<size_t>(k)] = -acc / coeffs_[0];
    }
    return out;
}

TruncatedSeries TruncatedSeries::compose(const TruncatedSeries& g) const {
    if (g.trunc() >= 0 && g[0] != 0)
        throw Error(ErrorKind::Inadmissible, "composition requires inner series with zero constant term");
    int og = ord_or_beyond(g);
    // Unknown coefficients of g act at order >= trunc(g)+1; unknown
    // coefficients of this act at order >= (trunc(this)+1) * ord(g).
    long t_from_f = static_cast<long>(trunc() + 1) * std::max(og, 1) - 1;
    int t = static_cast<int>(std::min<long>(g.trunc(), t_from_f));
    if (t < 0) throw Error(ErrorKind::EmptyPrecision, "composition result has no known terms");
    TruncatedSeries out(t);
    out.coeffs_[0] = coeffs_[0];
    // Horner on truncated data: power accumulates g^j.
    TruncatedSeries pw = TruncatedSeries::constant(1, t);
    TruncatedSeries g_t = g.trunc() > t ? g.restrict_trunc(t) : g;
    for (int j = 1; j <= trunc(); ++j) {
        if (static_cast<long>(j) * og > t) break;
        // keep pw at truncation t; products below stay sound since g_t is known through t
        TruncatedSeries next(t);
        for (int a = 0; a <= t; ++a) {
            Rational acc(0);
            for (int b = 0; b <= a; ++b) acc += pw[b] * g_t[a - b];
            next.coeffs_[static_cast<size_t>(a)] = acc;
        }
        pw = next;
        if (coeffs_[static_cast<size_t>(j)] != 0)
            for (int a = 0; a <= t; ++a)
                out.coeffs_[static_cast<size_t>(a)] += coeffs_[static_cast<size_t>(j)] * pw[a];
    }
    return out;
}

TruncatedSeries TruncatedSeries::ramify(int r) const {
    if (r < 1) throw Error(ErrorKind::DomainError, "ramification order must be >= 1");
    if (r == 1) return *this;
    // Unknown terms sit at order >= r*(trunc+1), so the result is known
    // through r*(trunc+1)-1.
    TruncatedSeries out(r * (trunc() + 1) - 1);
    for (int i = 0; i <= trunc(); ++i) out.coeffs_[static_cast<size_t>(i * r)] = coeffs_[static_cast<size_t>(i)];
    return out;
}

Rational TruncatedSeries::eval(const Rational& x) const {
    Rational acc(0);
    for (int i = trunc(); i >= 0; --i) acc = acc * x + coeffs_[static_cast<size_t>(i)];
    return acc;
}

double TruncatedSeries::eval_double(double x) const {
    double acc = 0;
    for (int i = trunc(); i >= 0; --i) acc = acc * x + rat_to_double(coeffs_[static_cast<size_t>(i)]);
    return acc;
}

bool TruncatedSeries::is_known_equal(const TruncatedSeries& other) const {
    int t = std::min(trunc(), other.trunc());
    for (int i = 0; i <= t; ++i)
        if ((*this)[i] != other[i]) return false;
    return true;
}

std::string TruncatedSeries::to_string() const {
    std::ostringstream os;
    bool first = true;
    for (int i = 0; i <= trunc(); ++i) {
        if (coeffs_[static_cast<size_t>(i)] == 0) continue;
        if (!first) os << " + ";
        os << rat_to_string(coeffs_[static_cast<size_t>(i)]);
        if (i > 0) os << "*x^" << i;
        first = false;
    }
    if (first) os << "0";
    os << " + O(x^" << trunc() + 1 << ")";
    return os.str();
}

TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) {
    int t = std::min(a.trunc(), b.trunc());
    TruncatedSeries out(t);
    for (int i = 0; i <= t; ++i) out.coeffs_[static_cast<size_t>(i)] = a[i] + b[i];
    return out;
}

TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b) {
    int t = std::min(a.trunc(), b.trunc());
    TruncatedSeries out(t);
    for (int i = 0; i <= t; ++i) out.coeffs_[static_cast<size_t>(i)] = a[i] - b[i];
    return out;
}

TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
    int oa = ord_or_beyond(a), ob = ord_or_beyond(b);
    long t = std::min<long>({static_cast<long>(a.trunc()) + ob, static_cast<long>(b.trunc()) + oa,
                             static_cast<long>(a.trunc()) + b.trunc() + 1});
    TruncatedSeries out(static_cast<int>(t));
    for (int i = 0; i <= a.trunc(); ++i) {
        if (a[i] == 0) continue;
        for (int j = 0; j <= b.trunc() && i + j <= t; ++j) {
            if (b[j] == 0) continue;
            out.coeffs_[static_cast<size_t>(i + j)] += a[i] * b[j];
        }
    }
    return out;
}

TruncatedSeries operator*(const Rational& c, const TruncatedSeries& a) {
    TruncatedSeries out(a.trunc());
    for (int i = 0; i <= a.trunc(); ++i) out.coeffs_[static_cast<size_t>(i)] = c * a[i];
    return out;
}

TruncatedSeries operator-(const TruncatedSeries& a) { return Rational(-1) * a; }

bool operator==(const TruncatedSeries& a, const TruncatedSeries& b) {
    return a.trunc() == b.trunc() && a.coeffs_ == b.coeffs_;
}

ComplexSeries::ComplexSeries(TruncatedSeries r, TruncatedSeries i) : re(std::move(r)), im(std::move(i)) {
    if (re.trunc() != im.trunc()) {
        int t = std::min(re.trunc(), im.trunc());
        re = re.restrict_trunc(t);
        im = im.restrict_trunc(t);
    }
}

ComplexSeries ComplexSeries::from_real(const TruncatedSeries& r) {
    return ComplexSeries(r, TruncatedSeries::zero(r.trunc()));
}

std::string ComplexSeries::to_string() const {
    return "(" + re.to_string() + ") + i*(" + im.to_string() + ")";
}

ComplexSeries operator+(const ComplexSeries& a, const ComplexSeries& b) {
    return ComplexSeries(a.re + b.re, a.im + b.im);
}

ComplexSeries operator-(const ComplexSeries& a, const ComplexSeries& b) {
    return ComplexSeries(a.re - b.re, a.im - b.im);
}

ComplexSeries operator*(const ComplexSeries& a, const ComplexSeries& b) {
    return ComplexSeries(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
}

bool operator==(const ComplexSeries& a, const ComplexSeries& b) {
    return a.re == b.re && a.im == b.im;
}

} // namespace trs
