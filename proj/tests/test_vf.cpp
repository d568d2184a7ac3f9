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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "trs/vf.hpp"

using namespace trs;

namespace {

std::mt19937 rng(42421);

// the divergent model curve: a_1 = 1, a_{n+1} = n a_n
TruncatedSeries euler_curve(int trunc) {
    TruncatedSeries g(trunc);
    Rational a(1);
    for (int k = 1; k <= trunc; ++k) {
        g.set(k, a);
        a *= k;
    }
    return g;
}

// xi = x^2 d/dx + (y - x) d/dy
InvariantCouple euler_couple(int trunc) {
    MultiSeries fx(1, trunc);
    fx.add_term({2, 0}, 1);
    MultiSeries fy(1, trunc);
    fy.add_term({0, 1}, 1);
    fy.add_term({1, 0}, -1);
    InvariantCouple c;
    c.vf = VectorFieldJet(fx, {fy});
    c.curve = FormalCurve({euler_curve(trunc)});
    return c;
}

InvariantCouple linear_radial(int trunc) {
    // x d/dx + y d/dy with the invariant line y = x
    MultiSeries fx(1, trunc);
    fx.add_term({1, 0}, 1);
    MultiSeries fy(1, trunc);
    fy.add_term({0, 1}, 1);
    InvariantCouple c;
    c.vf = VectorFieldJet(fx, {fy});
    c.curve = FormalCurve({TruncatedSeries::monomial(1, 1, trunc)});
    return c;
}

} // namespace

TEST_CASE("invariance of the divergent model couple") {
    InvariantCouple c = euler_couple(8);
    InvarianceReport rep = check_invariance(c);
    CHECK(rep.holds);
    CHECK(rep.m == 2);
    CHECK(rep.verified_order >= 6);
}

TEST_CASE("invariance of a line and a broken curve") {
    InvariantCouple c = linear_radial(6);
    CHECK(check_invariance(c).holds);

    TruncatedSeries bad(6);
    bad.set(1, 1);
    bad.set(2, 1);
    InvariantCouple b;
    b.vf = c.vf;
    b.curve = FormalCurve({bad});
    InvarianceReport rep = check_invariance(b);
    CHECK_FALSE(rep.holds);
}

TEST_CASE("degenerate curve is rejected") {
    // field vanishing along y = 0: xi = x y d/dx + y d/dy, curve y = 0
    MultiSeries fx(1, 4);
    fx.add_term({1, 1}, 1);
    MultiSeries fy(1, 4);
    fy.add_term({0, 1}, 1);
    InvariantCouple c;
    c.vf = VectorFieldJet(fx, {fy});
    c.curve = FormalCurve({TruncatedSeries::zero(4)});
    CHECK_THROWS_AS(check_invariance(c), Error);
}

TEST_CASE("translation transform formulas") {
    InvariantCouple c = euler_couple(8);
    // beta = x
    CoordTransform t = CoordTransform::translation({TruncatedSeries::monomial(1, 1, 8)});
    InvariantCouple out = apply_coord_transform(c, t);
    // xi_y becomes y - x^2, curve loses its first coefficient
    MIdx y1{0, 1}, x2{2, 0}, x1{1, 0};
    CHECK(out.vf.xi_y[0].coeff(y1) == 1);
    CHECK(out.vf.xi_y[0].coeff(x2) == -1);
    CHECK(out.vf.xi_y[0].coeff(x1) == 0);
    CHECK(out.curve.gamma_y[0][1] == 0);
    CHECK(out.curve.gamma_y[0][2] == 1);

    // zero translation is the identity
    CoordTransform id = CoordTransform::translation({TruncatedSeries::zero(8)});
    InvariantCouple same = apply_coord_transform(c, id);
    CHECK(same.vf.xi_y[0] == c.vf.xi_y[0]);
    CHECK(same.curve.gamma_y[0] == c.curve.gamma_y[0]);
}

TEST_CASE("full blow-up transform formula") {
    // xi = x^2 d/dx + 2y d/dy, curve 0: lifted field x^2 d/dx + (2y - xy) d/dy
    MultiSeries fx(1, 6);
    fx.add_term({2, 0}, 1);
    MultiSeries fy(1, 6);
    fy.add_term({0, 1}, 2);
    InvariantCouple c;
    c.vf = VectorFieldJet(fx, {fy});
    c.curve = FormalCurve({TruncatedSeries::zero(6)});
    InvariantCouple out = apply_coord_transform(c, CoordTransform::diag_monomial(1));
    CHECK(out.vf.xi_y[0].coeff({0, 1}) == 2);
    CHECK(out.vf.xi_y[0].coeff({1, 1}) == -1);
    CHECK(out.vf.xi_x.is_known_equal(c.vf.xi_x));
}

TEST_CASE("blow-up requires an invariant center") {
    // xi = x^2 d/dx + (y + x) d/dy: center {x=0,y=0} is not invariant
    MultiSeries fx(1, 5);
    fx.add_term({2, 0}, 1);
    MultiSeries fy(1, 5);
    fy.add_term({0, 1}, 1);
    fy.add_term({0, 0}, 1); // constant term: not even singular
    InvariantCouple c;
    c.vf = VectorFieldJet(fx, {fy});
    c.curve = FormalCurve({TruncatedSeries::zero(5)});
    CHECK_THROWS_AS(apply_coord_transform(c, CoordTransform::diag_monomial(1)), Error);
}

TEST_CASE("ramification transform") {
    InvariantCouple c = linear_radial(6);
    InvariantCouple out = apply_coord_transform(c, CoordTransform::ramification(2));
    // (1/2) x^{1-2} (x^2) = x/2
    CHECK(out.vf.xi_x.coeff({1, 0}) == Rational(1, 2));
    CHECK(out.curve.gamma_y[0][2] == 1);
    CHECK(out.curve.gamma_y[0][1] == 0);
}

TEST_CASE("normalize x component on the model couples") {
    {
        NormalizedX nx = normalize_x_component(euler_couple(10));
        CHECK(nx.e == 0);
        CHECK(nx.p == 1);
        MIdx zero{0, 0};
        CHECK(nx.unit.coeff(zero) != 0);
    }
    {
        NormalizedX nx = normalize_x_component(linear_radial(8));
        CHECK(nx.e == 0);
        CHECK(nx.p == 0);
        CHECK(nx.prep.steps.empty()); // x-component already monomial times unit
    }
    {
        // xi_x = x^3, xi_y = x^3 y: common factor x^3, regular quotient
        MultiSeries fx(1, 6);
        fx.add_term({3, 0}, 1);
        MultiSeries fy(1, 6);
        fy.add_term({3, 1}, 1);
        InvariantCouple c;
        c.vf = VectorFieldJet(fx, {fy});
        c.curve = FormalCurve({TruncatedSeries::zero(6)});
        NormalizedX nx = normalize_x_component(c);
        CHECK(nx.e == 3);
        CHECK(nx.p == -1);
    }
}

TEST_CASE("associated linear system") {
    {
        // exactly linear field: eta_y = A0 y
        MultiSeries fx(2, 5);
        fx.add_term({2, 0, 0}, 1);
        MultiSeries f1(2, 5), f2(2, 5);
        f1.add_term({0, 1, 0}, 2);
        f1.add_term({0, 0, 1}, 1);
        f2.add_term({0, 0, 1}, -1);
        VectorFieldJet eta(fx, {f1, f2});
        FormalCurve zero({TruncatedSeries::zero(5), TruncatedSeries::zero(5)});
        LinearSystem s = associated_linear_system(eta, zero);
        CHECK(s.p == 1);
        CHECK(s.A.at(0, 0)[0] == 2);
        CHECK(s.A.at(0, 1)[0] == 1);
        CHECK(s.A.at(1, 1)[0] == -1);
    }
    {
        // eta_y = y^2 along y = x: derivative 2x
        MultiSeries fx(1, 6);
        fx.add_term({2, 0}, 1);
        MultiSeries fy(1, 6);
        fy.add_term({0, 2}, 1);
        VectorFieldJet eta(fx, {fy});
        FormalCurve line({TruncatedSeries::monomial(1, 1, 6)});
        LinearSystem s = associated_linear_system(eta, line);
        // x^2 y' = 2x y normalizes to x y' = 2 y
        CHECK(s.p == 0);
        CHECK(s.A.at(0, 0)[0] == 2);
    }
    {
        InvariantCouple c = euler_couple(10);
        NormalizedX nx = normalize_x_component(c);
        LinearSystem s = associated_linear_system(nx.eta, nx.prepared.curve);
        CHECK(s.p == 1);
        CHECK(s.A.at(0, 0)[0] == 1);
    }
}

TEST_CASE("determinacy shift bookkeeping") {
    TransformChain empty;
    CHECK(empty.determinacy_shift(5) == 5);

    TransformChain three;
    for (int i = 0; i < 3; ++i) three.steps.push_back(CoordTransform::diag_monomial(1));
    CHECK(three.determinacy_shift(2) == 5);

    TransformChain mixed;
    mixed.steps.push_back(CoordTransform::translation({TruncatedSeries::zero(3)}));
    mixed.steps.push_back(CoordTransform::diag_monomial(1));
    mixed.steps.push_back(CoordTransform::ramification(2));
    CHECK(mixed.determinacy_shift(4) == 5);
}

TEST_CASE("reduce: model couple to TRS type (q,0,0)") {
    InvariantCouple c = euler_couple(24);
    VFReduction red = reduce_vf_trs(c);
    CHECK(red.form.q == 1);
    CHECK(red.form.e == 0);
    REQUIRE(red.form.dblocks.size() == 1);
    CHECK_FALSE(red.form.dblocks[0].is_complex);
    CHECK(red.form.dblocks[0].c.re[0] == 1); // exponential part (1)
    CHECK(red.form.C.at(0, 0) < 0);          // the blow-ups shift the residual down
    CHECK(red.chain.steps.size() >= 3);

    // chain replay determinism: replaying the recorded chain reproduces the
    // output couple exactly
    InvariantCouple replay = apply_chain(c, red.chain);
    CHECK(replay.vf.xi_x == red.couple.vf.xi_x);
    for (int i = 0; i < c.n(); ++i) {
        CHECK(replay.vf.xi_y[static_cast<size_t>(i)] == red.couple.vf.xi_y[static_cast<size_t>(i)]);
        CHECK(replay.curve.gamma_y[static_cast<size_t>(i)] == red.couple.curve.gamma_y[static_cast<size_t>(i)]);
    }
}

TEST_CASE("reduce: hyperbolic linear field is already in form") {
    // x d/dx - y d/dy with curve 0
    MultiSeries fx(1, 8);
    fx.add_term({1, 0}, 1);
    MultiSeries fy(1, 8);
    fy.add_term({0, 1}, -1);
    InvariantCouple c;
    c.vf = VectorFieldJet(fx, {fy});
    c.curve = FormalCurve({TruncatedSeries::zero(8)});
    VFReduction red = reduce_vf_trs(c);
    CHECK(red.chain.steps.empty());
    CHECK(red.form.q == 0);
    CHECK(red.form.C.at(0, 0) == -1);
}

TEST_CASE("reduce: non-singular quotient branch") {
    // x (d/dx + y d/dy)
    MultiSeries fx(1, 8);
    fx.add_term({1, 0}, 1);
    MultiSeries fy(1, 8);
    fy.add_term({1, 1}, 1);
    InvariantCouple c;
    c.vf = VectorFieldJet(fx, {fy});
    c.curve = FormalCurve({TruncatedSeries::zero(8)});
    VFReduction red = reduce_vf_trs(c);
    CHECK(red.form.q == 0);
    CHECK(red.form.C.at(0, 0) == -1); // the pattern -y + O(x)
}

TEST_CASE("invariance preserved along the pipeline") {
    InvariantCouple c = euler_couple(20);
    VFReduction red = reduce_vf_trs(c);
    InvariantCouple cur = c;
    for (const auto& t : red.chain.steps) {
        cur = apply_coord_transform(cur, t);
        InvarianceReport rep = check_invariance(cur);
        CHECK(rep.holds);
    }
}

TEST_CASE("refinement to type (q,N,0)") {
    InvariantCouple c = euler_couple(40);
    VFReduction base = reduce_vf_trs(c);
    VFReduction ref = refine_trs(base.couple, 4, 0);
    CHECK(ref.form.q == base.form.q);
    CHECK(ref.form.N == 4);
    CHECK(ref.form.d_matrix(base.form.q) == base.form.d_matrix(base.form.q));
    // vestigial y-constant slice has positive order after division by x^{q+1+N}
    // (the definition already divides it out; the slice must simply exist)
    const MultiSeries& v = ref.form.V[0];
    TruncatedSeries slice = v.y_constant_part();
    CHECK(slice.trunc() >= 0);
    // residual moved strictly negative
    CHECK(ref.form.C.at(0, 0) < 0);
}

TEST_CASE("jet determinacy under chain replay") {
    InvariantCouple c = euler_couple(26);
    VFReduction red = reduce_vf_trs(c);
    const int s = 3;
    int h = red.chain.determinacy_shift(s);
    if (h + 1 > c.vf.trunc()) return; // not enough room at this truncation

    for (int rep = 0; rep < 5; ++rep) {
        InvariantCouple pert = c;
        // random y-carrying term of total degree > h keeps every admissibility
        // hypothesis and must not change the j_s jet of the result
        int extra = std::uniform_int_distribution<int>(h + 1, std::min(h + 2, c.vf.trunc()))(rng);
        MIdx alpha{extra - 1, 1};
        MultiSeries bump = MultiSeries::monomial(
            Rational(std::uniform_int_distribution<int>(1, 5)(rng)), alpha, pert.vf.xi_y[0].trunc());
        pert.vf.xi_y[0] = pert.vf.xi_y[0] + bump;
        InvariantCouple out_base = apply_chain(c, red.chain);
        InvariantCouple out_pert = apply_chain(pert, red.chain);
        CHECK(out_base.vf.xi_x.jet(s).is_known_equal(out_pert.vf.xi_x.jet(s)));
        CHECK(out_base.vf.xi_y[0].jet(s).is_known_equal(out_pert.vf.xi_y[0].jet(s)));
    }
}

TEST_CASE("push-forward of numeric points") {
    TransformChain chain;
    chain.steps.push_back(CoordTransform::translation({TruncatedSeries::monomial(1, 1, 4)}));
    chain.steps.push_back(CoordTransform::diag_monomial(1));
    // chart map: y = beta(x) + x*ytilde
    std::vector<double> p = push_forward_point(chain, {0.5, 2.0});
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[1] == doctest::Approx(0.5 + 0.5 * 2.0));
}
