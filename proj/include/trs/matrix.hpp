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

#ifndef TRS_MATRIX_HPP
#define TRS_MATRIX_HPP

#include <string>
#include <vector>

#include "trs/series.hpp"

namespace trs {

// Dense matrix over the exact rationals.
class RatMatrix {
  public:
    RatMatrix() : rows_(0), cols_(0) {}
    RatMatrix(int rows, int cols) : rows_(rows), cols_(cols), e_(static_cast<size_t>(rows) * cols, Rational(0)) {}

    static RatMatrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Rational& at(int i, int j) { return e_[static_cast<size_t>(i) * cols_ + j]; }
    const Rational& at(int i, int j) const { return e_[static_cast<size_t>(i) * cols_ + j]; }

    bool is_zero() const;
    bool is_identity() const;
    RatMatrix transpose() const;
    RatMatrix block(int i0, int j0, int r, int c) const;
    void set_block(int i0, int j0, const RatMatrix& b);

    std::string to_string() const;

    friend RatMatrix operator+(const RatMatrix& a, const RatMatrix& b);
    friend RatMatrix operator-(const RatMatrix& a, const RatMatrix& b);
    friend RatMatrix operator*(const RatMatrix& a, const RatMatrix& b);
    friend RatMatrix operator*(const Rational& c, const RatMatrix& a);
    friend bool operator==(const RatMatrix& a, const RatMatrix& b);

  private:
    int rows_, cols_;
    std::vector<Rational> e_;
};

// Square matrix of truncated series with one common truncation order.
class PolyMatrix {
  public:
    PolyMatrix() : n_(0), trunc_(0) {}
    PolyMatrix(int n, int trunc);

    static PolyMatrix identity(int n, int trunc);
    static PolyMatrix from_constant(const RatMatrix& m, int trunc);

    int size() const { return n_; }
    int trunc() const { return trunc_; }
    TruncatedSeries& at(int i, int j) { return e_[static_cast<size_t>(i) * n_ + j]; }
    const TruncatedSeries& at(int i, int j) const { return e_[static_cast<size_t>(i) * n_ + j]; }
    void set(int i, int j, const TruncatedSeries& s);

    RatMatrix coeff(int k) const;   // matrix of x^k coefficients
    RatMatrix eval0() const { return coeff(0); }
    bool known_zero() const;
    int ord_floor() const;          // min over entries of first nonzero known order (trunc+1 if none)

    PolyMatrix jet(int k) const;
    PolyMatrix restrict_trunc(int k) const;
    PolyMatrix widen_exact(int k) const; // for exact polynomial payloads
    PolyMatrix shift_up(int k) const;
    PolyMatrix exact_divide_x(int k) const;
    PolyMatrix derivative() const;
    PolyMatrix ramify(int r) const;
    // Truncated series inverse; requires the constant term to be invertible.
    PolyMatrix inverse_series() const;

    bool is_known_equal(const PolyMatrix& other) const;
    std::string to_string() const;

    friend PolyMatrix operator+(const PolyMatrix& a, const PolyMatrix& b);
    friend PolyMatrix operator-(const PolyMatrix& a, const PolyMatrix& b);
    friend PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b);
    friend PolyMatrix operator*(const Rational& c, const PolyMatrix& a);
    friend PolyMatrix operator*(const TruncatedSeries& c, const PolyMatrix& a);
    friend bool operator==(const PolyMatrix& a, const PolyMatrix& b);

  private:
    int n_, trunc_;
    std::vector<TruncatedSeries> e_;
};

// Square matrix of complex series; pre-image data for the Theta embedding.
struct CMatrix {
    int n = 0;
    std::vector<ComplexSeries> e;

    CMatrix() = default;
    CMatrix(int n_, int trunc);
    static CMatrix diag(const std::vector<ComplexSeries>& d);
    ComplexSeries& at(int i, int j) { return e[static_cast<size_t>(i) * n + j]; }
    const ComplexSeries& at(int i, int j) const { return e[static_cast<size_t>(i) * n + j]; }

    friend CMatrix operator+(const CMatrix& a, const CMatrix& b);
    friend CMatrix operator*(const CMatrix& a, const CMatrix& b);
};

// Block-diagonal layout of an exponential part: ordered blocks, each either a
// complex group (occupying 2*mult rows after Theta) or a real group (mult rows).
struct BlockStructure {
    struct Block {
        bool is_complex;
        int mult;
    };
    std::vector<Block> blocks;

    int real_dim() const {
        int d = 0;
        for (const auto& b : blocks) d += b.is_complex ? 2 * b.mult : b.mult;
        return d;
    }
    // Row offset of block k in the embedded matrix.
    int offset(int k) const {
        int o = 0;
        for (int i = 0; i < k; ++i) o += blocks[static_cast<size_t>(i)].is_complex ? 2 * blocks[static_cast<size_t>(i)].mult : blocks[static_cast<size_t>(i)].mult;
        return o;
    }
    int block_rows(int k) const {
        const auto& b = blocks[static_cast<size_t>(k)];
        return b.is_complex ? 2 * b.mult : b.mult;
    }
    bool operator==(const BlockStructure& o) const {
        if (blocks.size() != o.blocks.size()) return false;
        for (size_t i = 0; i < blocks.size(); ++i)
            if (blocks[i].is_complex != o.blocks[i].is_complex || blocks[i].mult != o.blocks[i].mult) return false;
        return true;
    }
};

// a+ib -> aI2 + bJ2 entrywise; doubles the size.
PolyMatrix theta_embed(const CMatrix& m);

PolyMatrix direct_sum(const PolyMatrix& m, const PolyMatrix& n);
RatMatrix direct_sum(const RatMatrix& m, const RatMatrix& n);

// True iff C is block-diagonal per bs with each complex block in the image of
// Theta.  When true the commutator [D, C] is verified to vanish.
bool compatible(const PolyMatrix& c, const PolyMatrix& d, const BlockStructure& bs);
bool compatible_constant(const RatMatrix& c, const BlockStructure& bs);

} // namespace trs

#endif
