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

#ifndef TRS_LINEAR_SYSTEM_HPP
#define TRS_LINEAR_SYSTEM_HPP

#include <optional>
#include <variant>
#include <vector>

#include "trs/exact_linalg.hpp"
#include "trs/matrix.hpp"

namespace trs {

// x^{p+1} y' = A(x) y.  Rank p >= 0 means singular; p == -1 regular.  The
// stored pair is normalized: if p >= 0 then A(0) != 0.
struct LinearSystem {
    int n = 0;
    int p = -1;
    PolyMatrix A;

    LinearSystem() = default;
    LinearSystem(int n_, int p_, PolyMatrix a);

    bool regular() const { return p < 0; }
    // Factor the largest possible power of x out of (p, A).
    static LinearSystem normalized(int n, int p, const PolyMatrix& a);
};

struct GaugeTransform {
    enum class Kind { PolyRegular, DiagMonomial, Ramification };
    Kind kind = Kind::PolyRegular;
    PolyMatrix P;               // PolyRegular: polynomial data, P(0) invertible
    std::vector<int> exponents; // DiagMonomial: k_i >= 0, not all zero
    int r = 2;                  // Ramification order

    static GaugeTransform poly_regular(PolyMatrix p);
    static GaugeTransform diag_monomial(std::vector<int> exponents);
    static GaugeTransform ramification(int r);
};

using GaugeChain = std::vector<GaugeTransform>;

// One diagonal slot group of an exponential part.
struct ExpBlock {
    bool is_complex = false;
    int mult = 1;
    ComplexSeries c; // polynomial data of degree <= q-1; real blocks keep im == 0
};

struct TRSLinearForm {
    int q = 0;
    BlockStructure bs;
    std::vector<ExpBlock> dblocks;
    RatMatrix C;
    PolyMatrix V;

    int n() const { return C.rows(); }
    PolyMatrix d_matrix(int trunc) const; // materialize D(x)
    PolyMatrix matrix(int trunc) const;   // D + x^q C + x^{q+1} V
    LinearSystem to_system() const;
};

struct Spectrum {
    std::vector<EigenGroup> groups;
    std::vector<std::pair<double, double>> float_values; // used when !exact
    bool exact = true;
};

LinearSystem apply_gauge(const LinearSystem& s, const GaugeTransform& t);
LinearSystem apply_chain(const LinearSystem& s, const GaugeChain& chain);
bool is_admissible(const LinearSystem& s, const GaugeTransform& t);

std::optional<TRSLinearForm> recognize_trs(const LinearSystem& s);

Spectrum spectrum_of(const RatMatrix& c);
bool has_good_spectrum(const RatMatrix& c);

bool no_dominant_rotation(const TRSLinearForm& f);
int unstability_index(const TRSLinearForm& f);

// Push the vestigial part to order >= N with a polynomial gauge P, P(0) = I;
// the principal part is preserved bit-exactly.
std::pair<GaugeTransform, TRSLinearForm> kill_vestigial(const TRSLinearForm& f, int target_order);
// Same solver restricted to components coupling different cells of a
// coordinate partition (cells[i] = cell id of coordinate i); used before
// integer spectral shifts.  Solvable whenever distinct cells have either
// different exponential polynomials or residual spectra with no integer gaps.
std::pair<GaugeTransform, TRSLinearForm> kill_vestigial_cells(const TRSLinearForm& f, int target_order,
                                                              const std::vector<int>& cells);
// Partition by exponential blocks.
std::pair<GaugeTransform, TRSLinearForm> kill_vestigial_offdiag(const TRSLinearForm& f, int target_order);

struct RegularResult {
    LinearSystem system;
};

struct ReductionResult {
    GaugeChain chain;
    std::variant<RegularResult, TRSLinearForm> outcome;
    bool is_regular() const { return std::holds_alternative<RegularResult>(outcome); }
    const TRSLinearForm& form() const { return std::get<TRSLinearForm>(outcome); }
};

struct ReduceOptions {
    int working_order = 24;
    int max_ramifications = 16;
    int max_rank_steps = 16;
};

ReductionResult reduce_linear_full(const LinearSystem& s, const ReduceOptions& opt = {});

} // namespace trs

#endif
