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

#include <cmath>

#include "trs/dynamics.hpp"

using namespace trs;

namespace {

// scalar TRS form x^{q+1} y' = d(x) y with constant residual c
TRSLinearForm scalar_form(int q, const Rational& d0, const Rational& c) {
    TRSLinearForm f;
    f.q = q;
    f.bs.blocks.push_back({false, 1});
    int dtr = std::max(q - 1, 0);
    TruncatedSeries d(dtr);
    if (q >= 1) d.set(0, d0);
    f.dblocks.push_back({false, 1, ComplexSeries::from_real(d)});
    f.C = RatMatrix(1, 1);
    f.C.at(0, 0) = c;
    f.V = PolyMatrix(1, 4);
    return f;
}

NumericTrajectory sample_curve(const std::function<double(double)>& g, double lo, double hi, int npts,
                               double tol = 1e-12) {
    NumericTrajectory t;
    t.meta.tol = tol;
    for (int i = 0; i <= npts; ++i) {
        double x = lo * std::pow(hi / lo, static_cast<double>(i) / npts);
        t.xs.push_back(x);
        Eigen::VectorXd y(1);
        y(0) = g(x);
        t.ys.push_back(y);
    }
    return t;
}

} // namespace

TEST_CASE("integrator against the exponential closed form") {
    // x^2 y' = -y: y = y0 exp(1/x - 1/x0)
    FieldEvaluator f = FieldEvaluator::from_linear_form(scalar_form(1, -1, 0), 1.0);
    Eigen::VectorXd y0(1);
    y0(0) = 1.0;
    double tol = 1e-10;
    NumericTrajectory t = integrate(f, 0.1, y0, 0.5, tol);
    REQUIRE(t.meta.completed);
    double expect = std::exp(1.0 / 0.5 - 1.0 / 0.1);
    CHECK(std::abs(t.ys.back()(0) - expect) <= 10 * tol);

    // convergence: tightening the tolerance improves the answer
    double e1 = std::abs(integrate(f, 0.1, y0, 0.5, 1e-6).ys.back()(0) - expect);
    double e2 = std::abs(integrate(f, 0.1, y0, 0.5, 1e-10).ys.back()(0) - expect);
    CHECK(e2 < e1);
    CHECK(e1 < 1e-4);
}

TEST_CASE("integrator against a quadrature oracle on the divergent model") {
    // y' = (y - x)/x^2, y(x0) = y0:
    // y(x) = e^{-1/x} [ y0 e^{1/x0} - I(x0, x) ],  I = int e^{1/t}/t dt
    double x0 = 0.1, x1 = 0.5;
    // seed on the optimally truncated formal solution
    double y0v = 0;
    {
        double fact = 1;
        for (int k = 1; k <= 8; ++k) {
            y0v += fact * std::pow(x0, k); // (k-1)! x^k
            fact *= k;
        }
    }
    // adaptive Simpson quadrature
    std::function<double(double, double, double, double, double, int)> simp =
        [&](double a, double b, double fa, double fb, double fm, int depth) -> double {
        double m = (a + b) / 2;
        double lm = (a + m) / 2, rm = (m + b) / 2;
        auto g = [](double t) { return std::exp(1.0 / t) / t; };
        double flm = g(lm), frm = g(rm);
        double whole = (b - a) / 6 * (fa + 4 * fm + fb);
        double left = (m - a) / 6 * (fa + 4 * flm + fm);
        double right = (b - m) / 6 * (fm + 4 * frm + fb);
        if (depth > 40 || std::abs(left + right - whole) < 1e-13 * std::abs(left + right))
            return left + right;
        return simp(a, m, fa, fm, flm, depth + 1) + simp(m, b, fm, fb, frm, depth + 1);
    };
    auto g = [](double t) { return std::exp(1.0 / t) / t; };
    double Ival = simp(x0, x1, g(x0), g(x1), g((x0 + x1) / 2), 0);
    double expect = std::exp(-1.0 / x1) * (y0v * std::exp(1.0 / x0) - Ival);

    // the original chart is not in TRS shape (the -x term sits at order q),
    // so integrate it as a plain closure
    FieldEvaluator fe = FieldEvaluator::from_closure(1, [](double x, const Eigen::VectorXd& y) {
        Eigen::VectorXd r(1);
        r(0) = (y(0) - x) / (x * x);
        return r;
    });

    Eigen::VectorXd y0(1);
    y0(0) = y0v;
    double tol = 1e-11;
    NumericTrajectory t = integrate(fe, x0, y0, x1, tol);
    REQUIRE(t.meta.completed);
    CHECK(std::abs(t.ys.back()(0) - expect) <= 1e-8 * (1 + std::abs(expect)));
}

TEST_CASE("invariant axis stays put") {
    FieldEvaluator f = FieldEvaluator::from_linear_form(scalar_form(1, -1, Rational(1, 2)), 1.0);
    Eigen::VectorXd y0 = Eigen::VectorXd::Zero(1);
    NumericTrajectory t = integrate(f, 0.05, y0, 0.4, 1e-10);
    for (const auto& y : t.ys) CHECK(y.norm() == 0.0);
}

TEST_CASE("contact report on constructed curves") {
    TruncatedSeries g(8);
    g.set(2, 1);
    g.set(5, 1);
    FormalCurve curve({g}); // x^2 + x^5

    // the trajectory IS x^2: certifies N <= 4 (zero residual), fails at N = 5
    NumericTrajectory t = sample_curve([](double x) { return x * x; }, 1e-2, 0.3, 120);
    ContactReport rep = contact_report(t, curve, 5);
    CHECK(rep.orders[4].certified);
    CHECK(rep.max_certified == 4);
    CHECK_FALSE(rep.orders[5].certified);

    // flat difference certifies everything
    NumericTrajectory tf = sample_curve([](double x) { return std::exp(-1.0 / x); }, 1e-2, 0.3, 120);
    FormalCurve zero({TruncatedSeries::zero(8)});
    ContactReport rep2 = contact_report(tf, zero, 5);
    CHECK(rep2.max_certified == 5);

    // window of less than a decade is rejected
    NumericTrajectory ts = sample_curve([](double x) { return x; }, 0.1, 0.3, 40);
    CHECK_THROWS_AS(contact_report(ts, zero, 2), Error);
}

TEST_CASE("flat contact of identical and diverging trajectories") {
    NumericTrajectory a = sample_curve([](double x) { return x; }, 1e-2, 0.3, 100);
    FlatContactReport same = flat_contact_check(a, a, 10);
    CHECK(same.identical);
    CHECK(same.certified_up_to == 10);

    // contracting toward 0: difference exp(-1/x), flat
    NumericTrajectory b1 = sample_curve([](double x) { return x; }, 1e-2, 0.3, 100);
    NumericTrajectory b2 =
        sample_curve([](double x) { return x + std::exp(-1.0 / x); }, 1e-2, 0.3, 100);
    FlatContactReport flat = flat_contact_check(b1, b2, 8);
    CHECK(flat.certified_up_to == 8);

    // polynomial-order difference x^3 certifies only below 3
    NumericTrajectory c2 = sample_curve([](double x) { return x + x * x * x; }, 1e-2, 0.3, 100);
    FlatContactReport poly = flat_contact_check(b1, c2, 8);
    CHECK(poly.certified_up_to >= 2);
    CHECK(poly.certified_up_to < 4);
}

TEST_CASE("center manifold jet recursion") {
    // x^2 dx + (x z) dz + (-w + x^3) dw: h = x^3 - 3x^4 + 12x^5 - 60x^6 + ...
    TRSVFForm f;
    f.q = 1;
    f.N = 0;
    f.M = 0;
    f.bs.blocks.push_back({false, 1});
    f.bs.blocks.push_back({false, 1});
    TruncatedSeries zerop(0), minus(0);
    minus.set(0, -1);
    f.dblocks.push_back({false, 1, ComplexSeries::from_real(zerop)});
    f.dblocks.push_back({false, 1, ComplexSeries::from_real(minus)});
    f.C = RatMatrix(2, 2);
    f.C.at(0, 0) = 1; // x^q * 1 * z = x z
    f.unit = MultiSeries::constant(1, 2, 1);
    MultiSeries vz(2, 6), vw(2, 6);
    vw.add_term({1, 0, 0}, 1); // x^{q+1} * (x) = x^3
    f.V = {vz, vw};

    CenterManifoldJet cm = center_manifold_jet(f, 6);
    REQUIRE(cm.center_index == std::vector<int>{0});
    REQUIRE(cm.stable_index == std::vector<int>{1});
    const MultiSeries& h = cm.h[0];
    CHECK(h.coeff({3, 0}) == 1);
    CHECK(h.coeff({4, 0}) == -3);
    CHECK(h.coeff({5, 0}) == 12);
    CHECK(h.coeff({6, 0}) == -60);
    CHECK(cm.divisible); // x^{q+1+N} = x^2 divides h
}

TEST_CASE("center manifold of a linear field vanishes") {
    TRSVFForm f;
    f.q = 1;
    f.N = 0;
    f.M = 0;
    f.bs.blocks.push_back({false, 1});
    f.bs.blocks.push_back({false, 1});
    TruncatedSeries zerop(0), minus(0);
    minus.set(0, -1);
    f.dblocks.push_back({false, 1, ComplexSeries::from_real(zerop)});
    f.dblocks.push_back({false, 1, ComplexSeries::from_real(minus)});
    f.C = RatMatrix(2, 2);
    f.C.at(0, 0) = 1;
    f.unit = MultiSeries::constant(1, 2, 1);
    f.V.assign(2, MultiSeries(2, 6));
    CenterManifoldJet cm = center_manifold_jet(f, 6);
    CHECK(cm.h[0].known_zero());
}

TEST_CASE("horn membership predicate") {
    TruncatedSeries g(4);
    g.set(1, 1);
    HornSpec horn{2, 1.0, 0.1, FormalCurve({g})};
    Eigen::VectorXd on(1), off(1);
    double x = 0.05;
    on(0) = x + 0.5 * x * x;  // inside: |y - x| = x^2/2 < x^2
    off(0) = x + 2 * x * x;   // outside
    CHECK(horn_membership(x, on, horn));
    CHECK_FALSE(horn_membership(x, off, horn));
    CHECK_FALSE(horn_membership(0.2, on, horn)); // x >= eps
    // boundary excluded
    Eigen::VectorXd bd(1);
    bd(0) = x + 1.0 * x * x;
    CHECK_FALSE(horn_membership(x, bd, horn));
}

TEST_CASE("basin dimensions on the model fields") {
    TruncatedSeries zero_series(6);
    FormalCurve axis({zero_series});
    HornSpec horn{1, 1.0, 0.2, axis};
    BasinOptions opt;
    opt.grid_per_direction = 3;
    opt.tol = 1e-9;

    {
        // q=0, C=-1: y = c/x leaves every horn unless c = 0: dim 1
        FieldEvaluator f = FieldEvaluator::from_linear_form(scalar_form(0, 0, -1), 1.0);
        BasinProbe probe = basin_probe(f, horn, opt);
        CHECK(probe.empirical_dim == 1);
        CHECK(probe.ambiguous_fraction < 0.01);
    }
    {
        // q=1, D=1: y = c e^{-1/x} collapses: dim 2
        FieldEvaluator f = FieldEvaluator::from_linear_form(scalar_form(1, 1, 0), 1.0);
        BasinProbe probe = basin_probe(f, horn, opt);
        CHECK(probe.empirical_dim == 2);
        CHECK(probe.ambiguous_fraction < 0.01);
    }
    {
        // n=2, D=diag(1,-1): one thick and one thin direction: dim 2
        TRSLinearForm f2;
        f2.q = 1;
        f2.bs.blocks = {{false, 1}, {false, 1}};
        TruncatedSeries plus(0), minus(0);
        plus.set(0, 1);
        minus.set(0, -1);
        f2.dblocks.push_back({false, 1, ComplexSeries::from_real(plus)});
        f2.dblocks.push_back({false, 1, ComplexSeries::from_real(minus)});
        f2.C = RatMatrix(2, 2);
        f2.V = PolyMatrix(2, 4);
        FieldEvaluator f = FieldEvaluator::from_linear_form(f2, 1.0);
        FormalCurve axis2({zero_series, zero_series});
        HornSpec horn2{1, 1.0, 0.2, axis2};
        BasinProbe probe = basin_probe(f, horn2, opt);
        CHECK(probe.empirical_dim == 2);
        CHECK(probe.directions[0].thick);
        CHECK_FALSE(probe.directions[1].thick);
    }
}

TEST_CASE("iterated tangents of graphs") {
    // gamma = (x, 0): every tangent is e0
    NumericTrajectory line = sample_curve([](double) { return 0.0; }, 1e-3, 0.3, 200);
    IteratedTangents it = iterated_tangents(line, 3);
    REQUIRE(it.tangents.size() == 3);
    for (const auto& u : it.tangents) {
        CHECK(u(0) == doctest::Approx(1.0));
        CHECK(std::abs(u(1)) < 1e-9);
    }

    // gamma = (x, x^2): level 1 sees e0, level 2 sees the curvature direction
    NumericTrajectory par = sample_curve([](double x) { return x * x; }, 1e-3, 0.3, 200);
    IteratedTangents it2 = iterated_tangents(par, 2);
    CHECK(it2.tangents[0](1) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(it2.tangents[1](0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));
    CHECK(it2.tangents[1](1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));

    // symbolic comparison
    TruncatedSeries g(4);
    g.set(2, 1);
    IteratedTangents sym = curve_iterated_tangents(FormalCurve({g}), 2);
    CHECK((it2.tangents[0] - sym.tangents[0]).norm() < 1e-6);
    CHECK((it2.tangents[1] - sym.tangents[1]).norm() < 1e-6);
}

TEST_CASE("shooting the hyperbolic model recovers the bounded solution") {
    // x dx + (-y + x^2) dy: bounded solution y = x^2/3
    TRSVFForm f;
    f.q = 0;
    f.N = 0;
    f.M = 0;
    f.bs.blocks.push_back({false, 1});
    f.dblocks.push_back({false, 1, ComplexSeries::from_real(TruncatedSeries::zero(0))});
    f.C = RatMatrix(1, 1);
    f.C.at(0, 0) = -1;
    f.unit = MultiSeries::constant(1, 1, 1);
    MultiSeries v(1, 4);
    v.add_term({1, 0}, 1); // x^{q+1} * x = x^2
    f.V = {v};
    FieldEvaluator fe = FieldEvaluator::from_vf_form(f, 1.0);

    TruncatedSeries gs(6);
    gs.set(2, Rational(1, 3));
    FormalCurve curve({gs});
    ShootResult sr = shoot_asymptotic(fe, curve, 2, 5e-3, 0.4, 1e-11);
    for (size_t i = 0; i < sr.trajectory.xs.size(); ++i) {
        double x = sr.trajectory.xs[i];
        CHECK(std::abs(sr.trajectory.ys[i](0) - x * x / 3) <= 1e-8 * (1 + x * x));
    }
    CHECK(sr.contact.max_certified >= 2);
}

TEST_CASE("escape is reported as data") {
    // strongly repelling downward: y' = -y/x^2 grows like e^{1/x}
    FieldEvaluator f = FieldEvaluator::from_linear_form(scalar_form(1, -1, 0), 1.0);
    f.domain_bound = 10.0;
    Eigen::VectorXd y0(1);
    y0(0) = 0.5;
    NumericTrajectory t = integrate(f, 0.2, y0, 1e-4, 1e-8);
    CHECK(t.meta.escaped);
    CHECK(t.meta.escape_x > 1e-4);
}
