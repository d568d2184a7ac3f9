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

#include "trs/matrix.hpp"

#include <algorithm>
#include <sstream>

namespace trs {

RatMatrix RatMatrix::identity(int n) {
    RatMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

bool RatMatrix::is_zero() const {
    for (const auto& v : e_)
        if (v != 0) return false;
    return true;
}

bool RatMatrix::is_identity() const {
    if (rows_ != cols_) return false;
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j)
            if (at(i, j) != Rational(i == j ? 1 : 0)) return false;
    return true;
}

RatMatrix RatMatrix::transpose() const {
    RatMatrix m(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) m.at(j, i) = at(i, j);
    return m;
}

RatMatrix RatMatrix::block(int i0, int j0, int r, int c) const {
    RatMatrix m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m.at(i, j) = at(i0 + i, j0 + j);
    return m;
}

void RatMatrix::set_block(int i0, int j0, const RatMatrix& b) {
    for (int i = 0; i < b.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j) at(i0 + i, j0 + j) = b.at(i, j);
}

std::string RatMatrix::to_string() const {
    std::ostringstream os;
    for (int i = 0; i < rows_; ++i) {
        os << (i == 0 ? "[" : " ");
        for (int j = 0; j < cols_; ++j) os << rat_to_string(at(i, j)) << (j + 1 < cols_ ? ", " : "");
        os << (i + 1 < rows_ ? ";\n" : "]");
    }
    return os.str();
}

RatMatrix operator+(const RatMatrix& a, const RatMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw Error(ErrorKind::ShapeError, "matrix add shape");
    RatMatrix m(a.rows_, a.cols_);
    for (size_t i = 0; i < m.e_.size(); ++i) m.e_[i] = a.e_[i] + b.e_[i];
    return m;
}

RatMatrix operator-(const RatMatrix& a, const RatMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw Error(ErrorKind::ShapeError, "matrix sub shape");
    RatMatrix m(a.rows_, a.cols_);
    for (size_t i = 0; i < m.e_.size(); ++i) m.e_[i] = a.e_[i] - b.e_[i];
    return m;
}

RatMatrix operator*(const RatMatrix& a, const RatMatrix& b) {
    if (a.cols_ != b.rows_) throw Error(ErrorKind::ShapeError, "matrix mul shape");
    RatMatrix m(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
        for (int k = 0; k < a.cols_; ++k) {
            if (a.at(i, k) == 0) continue;
            for (int j = 0; j < b.cols_; ++j) m.at(i, j) += a.at(i, k) * b.at(k, j);
        }
    return m;
}

RatMatrix operator*(const Rational& c, const RatMatrix& a) {
    RatMatrix m(a.rows_, a.cols_);
    for (size_t i = 0; i < m.e_.size(); ++i) m.e_[i] = c * a.e_[i];
    return m;
}

bool operator==(const RatMatrix& a, const RatMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.e_ == b.e_;
}

PolyMatrix::PolyMatrix(int n, int trunc) : n_(n), trunc_(trunc) {
    if (n < 0) throw Error(ErrorKind::ShapeError, "negative matrix size");
    e_.assign(static_cast<size_t>(n) * n, TruncatedSeries::zero(trunc));
}

PolyMatrix PolyMatrix::identity(int n, int trunc) {
    PolyMatrix m(n, trunc);
    for (int i = 0; i < n; ++i) m.at(i, i) = TruncatedSeries::constant(1, trunc);
    return m;
}

PolyMatrix PolyMatrix::from_constant(const RatMatrix& m, int trunc) {
    if (m.rows() != m.cols()) throw Error(ErrorKind::ShapeError, "constant embedding needs square matrix");
    PolyMatrix p(m.rows(), trunc);
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) p.at(i, j) = TruncatedSeries::constant(m.at(i, j), trunc);
    return p;
}

void PolyMatrix::set(int i, int j, const TruncatedSeries& s) {
    TruncatedSeries v = s;
    if (v.trunc() > trunc_) v = v.restrict_trunc(trunc_);
    if (v.trunc() < trunc_) {
        // re-truncate the whole matrix down to the weakest entry
        int t = v.trunc();
        for (auto& entry : e_) entry = entry.restrict_trunc(t);
        trunc_ = t;
    }
    e_[static_cast<size_t>(i) * n_ + j] = v;
}

RatMatrix PolyMatrix::coeff(int k) const {
    RatMatrix m(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) m.at(i, j) = at(i, j)[k];
    return m;
}

bool PolyMatrix::known_zero() const {
    for (const auto& s : e_)
        if (!s.known_zero()) return false;
    return true;
}

int PolyMatrix::ord_floor() const {
    int o = trunc_ + 1;
    for (const auto& s : e_) {
        auto so = s.ord();
        if (so) o = std::min(o, *so);
    }
    return o;
}

PolyMatrix PolyMatrix::jet(int k) const {
    PolyMatrix m(n_, trunc_);
    for (size_t i = 0; i < e_.size(); ++i) m.e_[i] = e_[i].jet(k);
    return m;
}

PolyMatrix PolyMatrix::restrict_trunc(int k) const {
    PolyMatrix m(n_, k);
    for (size_t i = 0; i < e_.size(); ++i) m.e_[i] = e_[i].restrict_trunc(k);
    return m;
}

PolyMatrix PolyMatrix::widen_exact(int k) const {
    PolyMatrix m(n_, k);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) m.at(i, j) = at(i, j).widen_exact(k);
    return m;
}

PolyMatrix PolyMatrix::shift_up(int k) const {
    PolyMatrix m(n_, trunc_ + k);
    for (size_t i = 0; i < e_.size(); ++i) m.e_[i] = e_[i].shift_up(k);
    return m;
}

PolyMatrix PolyMatrix::exact_divide_x(int k) const {
    PolyMatrix m(n_, trunc_ - k);
    for (size_t i = 0; i < e_.size(); ++i) m.e_[i] = e_[i].exact_divide_x(k);
    return m;
}

PolyMatrix PolyMatrix::derivative() const {
    PolyMatrix m(n_, trunc_ - 1);
    for (size_t i = 0; i < e_.size(); ++i) m.e_[i] = e_[i].derivative();
    return m;
}

PolyMatrix PolyMatrix::ramify(int r) const {
    PolyMatrix m(n_, r * (trunc_ + 1) - 1);
    for (size_t i = 0; i < e_.size(); ++i) m.e_[i] = e_[i].ramify(r);
    return m;
}

PolyMatrix PolyMatrix::inverse_series() const {
    // Q_0 = A0^{-1}; Q_k = -A0^{-1} sum_{j=1..k} A_j Q_{k-j}
    RatMatrix a0 = eval0();
    // exact constant inverse via Gauss-Jordan
    int n = n_;
    RatMatrix aug(n, 2 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) aug.at(i, j) = a0.at(i, j);
        aug.at(i, n + i) = 1;
    }
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r)
            if (aug.at(r, col) != 0) { piv = r; break; }
        if (piv < 0) throw Error(ErrorKind::NotRegular, "constant term not invertible");
        if (piv != col)
            for (int j = 0; j < 2 * n; ++j) std::swap(aug.at(piv, j), aug.at(col, j));
        Rational d = aug.at(col, col);
        for (int j = 0; j < 2 * n; ++j) aug.at(col, j) /= d;
        for (int r = 0; r < n; ++r) {
            if (r == col || aug.at(r, col) == 0) continue;
            Rational f = aug.at(r, col);
            for (int j = 0; j < 2 * n; ++j) aug.at(r, j) -= f * aug.at(col, j);
        }
    }
    RatMatrix a0inv = aug.block(0, n, n, n);

    std::vector<RatMatrix> q(static_cast<size_t>(trunc_) + 1, RatMatrix(n, n));
    q[0] = a0inv;
    for (int k = 1; k <= trunc_; ++k) {
        RatMatrix acc(n, n);
        for (int j = 1; j <= k; ++j) acc = acc + coeff(j) * q[static_cast<size_t>(k - j)];
        q[static_cast<size_t>(k)] = Rational(-1) * (a0inv * acc);
    }
    PolyMatrix out(n, trunc_);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            TruncatedSeries s = TruncatedSeries::zero(trunc_);
            for (int k = 0; k <= trunc_; ++k) s.set(k, q[static_cast<size_t>(k)].at(i, j));
            out.at(i, j) = s;
        }
    return out;
}

bool PolyMatrix::is_known_equal(const PolyMatrix& other) const {
    if (n_ != other.n_) return false;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            if (!at(i, j).is_known_equal(other.at(i, j))) return false;
    return true;
}

std::string PolyMatrix::to_string() const {
    std::ostringstream os;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            os << "(" << i << "," << j << ") " << at(i, j).to_string() << "\n";
    return os.str();
}

PolyMatrix operator+(const PolyMatrix& a, const PolyMatrix& b) {
    if (a.n_ != b.n_) throw Error(ErrorKind::ShapeError, "polymatrix add shape");
    PolyMatrix m(a.n_, std::min(a.trunc_, b.trunc_));
    for (int i = 0; i < a.n_; ++i)
        for (int j = 0; j < a.n_; ++j) m.set(i, j, a.at(i, j) + b.at(i, j));
    return m;
}

PolyMatrix operator-(const PolyMatrix& a, const PolyMatrix& b) {
    if (a.n_ != b.n_) throw Error(ErrorKind::ShapeError, "polymatrix sub shape");
    PolyMatrix m(a.n_, std::min(a.trunc_, b.trunc_));
    for (int i = 0; i < a.n_; ++i)
        for (int j = 0; j < a.n_; ++j) m.set(i, j, a.at(i, j) - b.at(i, j));
    return m;
}

PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b) {
    if (a.n_ != b.n_) throw Error(ErrorKind::ShapeError, "polymatrix mul shape");
    // Entry sums can only sharpen truncation, so compute entries then use the
    // weakest as the common order.
    std::vector<TruncatedSeries> prod(static_cast<size_t>(a.n_) * a.n_, TruncatedSeries::zero(0));
    int t = INT32_MAX;
    for (int i = 0; i < a.n_; ++i)
        for (int j = 0; j < a.n_; ++j) {
            TruncatedSeries acc = a.at(i, 0) * b.at(0, j);
            for (int k = 1; k < a.n_; ++k) {
                TruncatedSeries term = a.at(i, k) * b.at(k, j);
                // keep the sound minorder for sums of products
                int tt = std::min(acc.trunc(), term.trunc());
                acc = acc.restrict_trunc(tt) + term.restrict_trunc(tt);
            }
            prod[static_cast<size_t>(i) * a.n_ + j] = acc;
            t = std::min(t, acc.trunc());
        }
    PolyMatrix m(a.n_, t);
    for (int i = 0; i < a.n_; ++i)
        for (int j = 0; j < a.n_; ++j) m.at(i, j) = prod[static_cast<size_t>(i) * a.n_ + j].restrict_trunc(t);
    return m;
}

PolyMatrix operator*(const Rational& c, const PolyMatrix& a) {
    PolyMatrix m(a.n_, a.trunc_);
    for (size_t i = 0; i < a.e_.size(); ++i) m.e_[i] = c * a.e_[i];
    return m;
}

PolyMatrix operator*(const TruncatedSeries& c, const PolyMatrix& a) {
    PolyMatrix m(a.n_, std::min(a.trunc_, c.trunc()));
    for (int i = 0; i < a.n_; ++i)
        for (int j = 0; j < a.n_; ++j) m.set(i, j, c * a.at(i, j));
    return m;
}

bool operator==(const PolyMatrix& a, const PolyMatrix& b) {
    return a.n_ == b.n_ && a.trunc_ == b.trunc_ && a.e_ == b.e_;
}

CMatrix::CMatrix(int n_, int trunc) : n(n_) {
    e.assign(static_cast<size_t>(n) * n,
             ComplexSeries(TruncatedSeries::zero(trunc), TruncatedSeries::zero(trunc)));
}

CMatrix CMatrix::diag(const std::vector<ComplexSeries>& d) {
    CMatrix m(static_cast<int>(d.size()), d.empty() ? 0 : d[0].trunc());
    for (size_t i = 0; i < d.size(); ++i) m.at(static_cast<int>(i), static_cast<int>(i)) = d[i];
    return m;
}

CMatrix operator+(const CMatrix& a, const CMatrix& b) {
    if (a.n != b.n) throw Error(ErrorKind::ShapeError, "cmatrix add shape");
    CMatrix m(a.n, 0);
    for (size_t i = 0; i < a.e.size(); ++i) m.e[i] = a.e[i] + b.e[i];
    return m;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.n != b.n) throw Error(ErrorKind::ShapeError, "cmatrix mul shape");
    CMatrix m(a.n, 0);
    for (int i = 0; i < a.n; ++i)
        for (int j = 0; j < a.n; ++j) {
            ComplexSeries acc = a.at(i, 0) * b.at(0, j);
            for (int k = 1; k < a.n; ++k) acc = acc + a.at(i, k) * b.at(k, j);
            m.at(i, j) = acc;
        }
    return m;
}

PolyMatrix theta_embed(const CMatrix& m) {
    int trunc = m.n > 0 ? m.e[0].trunc() : 0;
    PolyMatrix out(2 * m.n, trunc);
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) {
            const ComplexSeries& c = m.at(i, j);
            out.set(2 * i, 2 * j, c.re);
            out.set(2 * i, 2 * j + 1, -c.im);
            out.set(2 * i + 1, 2 * j, c.im);
            out.set(2 * i + 1, 2 * j + 1, c.re);
        }
    return out;
}

PolyMatrix direct_sum(const PolyMatrix& m, const PolyMatrix& n) {
    if (m.trunc() != n.trunc())
        throw Error(ErrorKind::ShapeError, "direct sum requires equal truncation orders");
    PolyMatrix out(m.size() + n.size(), m.trunc());
    for (int i = 0; i < m.size(); ++i)
        for (int j = 0; j < m.size(); ++j) out.at(i, j) = m.at(i, j);
    for (int i = 0; i < n.size(); ++i)
        for (int j = 0; j < n.size(); ++j) out.at(m.size() + i, m.size() + j) = n.at(i, j);
    return out;
}

RatMatrix direct_sum(const RatMatrix& m, const RatMatrix& n) {
    RatMatrix out(m.rows() + n.rows(), m.cols() + n.cols());
    out.set_block(0, 0, m);
    out.set_block(m.rows(), m.cols(), n);
    return out;
}

namespace {

// Is the 2r x 2r block (viewed as r x r of 2x2 cells) in the image of Theta?
bool block_is_theta_image(const PolyMatrix& c, int off, int r) {
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            const TruncatedSeries& a11 = c.at(off + 2 * i, off + 2 * j);
            const TruncatedSeries& a12 = c.at(off + 2 * i, off + 2 * j + 1);
            const TruncatedSeries& a21 = c.at(off + 2 * i + 1, off + 2 * j);
            const TruncatedSeries& a22 = c.at(off + 2 * i + 1, off + 2 * j + 1);
            if (!(a11 == a22) || !(a12 == -a21)) return false;
        }
    return true;
}

} // namespace

bool compatible(const PolyMatrix& c, const PolyMatrix& d, const BlockStructure& bs) {
    if (c.size() != d.size()) throw Error(ErrorKind::ShapeError, "compatible: size mismatch");
    if (bs.real_dim() != c.size()) throw Error(ErrorKind::ShapeError, "compatible: block structure dimension");
    // off-diagonal blocks must vanish
    int nb = static_cast<int>(bs.blocks.size());
    for (int bi = 0; bi < nb; ++bi)
        for (int bj = 0; bj < nb; ++bj) {
            if (bi == bj) continue;
            int i0 = bs.offset(bi), j0 = bs.offset(bj);
            for (int i = 0; i < bs.block_rows(bi); ++i)
                for (int j = 0; j < bs.block_rows(bj); ++j)
                    if (!c.at(i0 + i, j0 + j).known_zero()) return false;
        }
    // complex blocks must be Theta images
    for (int bi = 0; bi < nb; ++bi)
        if (bs.blocks[static_cast<size_t>(bi)].is_complex &&
            !block_is_theta_image(c, bs.offset(bi), bs.blocks[static_cast<size_t>(bi)].mult))
            return false;
    // the commutator must vanish on known data
    PolyMatrix comm = d * c - c * d;
    if (!comm.known_zero())
        throw Error(ErrorKind::Internal, "compatible structure with nonzero commutator");
    return true;
}

bool compatible_constant(const RatMatrix& c, const BlockStructure& bs) {
    PolyMatrix p = PolyMatrix::from_constant(c, 0);
    PolyMatrix d(c.rows(), 0); // zero matrix commutes with everything
    return compatible(p, d, bs);
}

} // namespace trs
