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

#include "trs/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace trs {

namespace {

Eigen::MatrixXd principal_matrix_eval(const TRSLinearForm& lf, double x) {
    int n = lf.n();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    int pos = 0;
    double xq = std::pow(x, lf.q);
    for (const auto& b : lf.dblocks) {
        if (b.is_complex) {
            double re = b.c.re.eval_double(x), im = b.c.im.eval_double(x);
            for (int k = 0; k < b.mult; ++k) {
                m(pos, pos) = re;
                m(pos, pos + 1) = -im;
                m(pos + 1, pos) = im;
                m(pos + 1, pos + 1) = re;
                pos += 2;
            }
        } else {
            double re = b.c.re.eval_double(x);
            for (int k = 0; k < b.mult; ++k) m(pos + k, pos + k) = re;
            pos += b.mult;
        }
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) += xq * rat_to_double(lf.C.at(i, j));
    return m;
}

} // namespace

FieldEvaluator FieldEvaluator::from_vf_form(const TRSVFForm& f, double x_max) {
    FieldEvaluator fe;
    fe.n = f.n();
    fe.x_max = x_max;
    TRSLinearForm lf;
    lf.q = f.q;
    lf.bs = f.bs;
    lf.dblocks = f.dblocks;
    lf.C = f.C;
    lf.V = PolyMatrix(f.n(), 0);
    const int q = f.q, N = f.N, M = f.M;
    std::vector<MultiSeries> V = f.V;
    int n = f.n();
    fe.rhs = [lf, V, q, N, M, n](double x, const Eigen::VectorXd& y) {
        Eigen::MatrixXd pm = principal_matrix_eval(lf, x);
        Eigen::VectorXd v(n);
        double xm = std::pow(x, M);
        std::vector<double> scaled(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) scaled[static_cast<size_t>(i)] = xm * y(i);
        for (int i = 0; i < n; ++i) v(i) = V[static_cast<size_t>(i)].eval_double(x, scaled);
        return Eigen::VectorXd((pm * y + std::pow(x, q + 1 + N) * v) / std::pow(x, q + 1));
    };
    fe.jacobian_scale = [lf, q](double x) {
        return Eigen::MatrixXd(principal_matrix_eval(lf, x) / std::pow(x, q + 1));
    };
    return fe;
}

FieldEvaluator FieldEvaluator::from_linear_form(const TRSLinearForm& f, double x_max) {
    FieldEvaluator fe;
    fe.n = f.n();
    fe.x_max = x_max;
    TRSLinearForm lf = f;
    const int q = f.q;
    int n = f.n();
    fe.rhs = [lf, q, n](double x, const Eigen::VectorXd& y) {
        Eigen::MatrixXd pm = principal_matrix_eval(lf, x);
        Eigen::MatrixXd vm(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) vm(i, j) = lf.V.at(i, j).eval_double(x);
        return Eigen::VectorXd(((pm + std::pow(x, q + 1) * vm) * y) / std::pow(x, q + 1));
    };
    fe.jacobian_scale = [lf, q](double x) {
        return Eigen::MatrixXd(principal_matrix_eval(lf, x) / std::pow(x, q + 1));
    };
    return fe;
}

FieldEvaluator FieldEvaluator::from_straightened(const StraightenedField& f, double x_max) {
    FieldEvaluator fe;
    fe.n = f.principal.n();
    fe.x_max = x_max;
    TRSLinearForm lf = f.principal;
    const int q = f.q_reduced, N = f.N;
    auto vest = f.vestigial;
    fe.rhs = [lf, q, N, vest](double x, const Eigen::VectorXd& y) {
        Eigen::MatrixXd pm = principal_matrix_eval(lf, x);
        return Eigen::VectorXd((pm * y + std::pow(x, q + 1 + N) * vest(x, y)) / std::pow(x, q + 1));
    };
    fe.jacobian_scale = [lf, q](double x) {
        return Eigen::MatrixXd(principal_matrix_eval(lf, x) / std::pow(x, q + 1));
    };
    return fe;
}

FieldEvaluator FieldEvaluator::from_closure(int n,
                                            std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)> g,
                                            double x_max) {
    FieldEvaluator fe;
    fe.n = n;
    fe.x_max = x_max;
    fe.rhs = std::move(g);
    fe.jacobian_scale = nullptr;
    return fe;
}

Eigen::VectorXd NumericTrajectory::at(double x) const {
    if (xs.empty()) throw Error(ErrorKind::InsufficientWindow, "empty trajectory");
    bool increasing = xs.front() < xs.back();
    double lo = increasing ? xs.front() : xs.back();
    double hi = increasing ? xs.back() : xs.front();
    if (x < lo * (1 - 1e-12) || x > hi * (1 + 1e-12))
        throw Error(ErrorKind::DomainError, "interpolation outside the trajectory window");
    // binary search over the monotone sample sequence
    size_t a = 0, b = xs.size() - 1;
    while (b - a > 1) {
        size_t mid = (a + b) / 2;
        if ((xs[mid] < x) == increasing) a = mid;
        else b = mid;
    }
    double xa = xs[a], xb = xs[b];
    if (xa == xb) return ys[a];
    double t = (std::log(x) - std::log(xa)) / (std::log(xb) - std::log(xa));
    return ys[a] + t * (ys[b] - ys[a]);
}

namespace {

// Dormand-Prince 5(4) tableau
struct DP45 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    // stage coefficients
    static Eigen::VectorXd step(const FieldEvaluator& f, double x, const Eigen::VectorXd& y, double h,
                                Eigen::VectorXd& err) {
        auto F = [&](double xx, const Eigen::VectorXd& yy) { return f.rhs(xx, yy); };
        Eigen::VectorXd k1 = F(x, y);
        Eigen::VectorXd k2 = F(x + c2 * h, y + h * (k1 / 5.0));
        Eigen::VectorXd k3 = F(x + c3 * h, y + h * (3.0 / 40 * k1 + 9.0 / 40 * k2));
        Eigen::VectorXd k4 = F(x + c4 * h, y + h * (44.0 / 45 * k1 - 56.0 / 15 * k2 + 32.0 / 9 * k3));
        Eigen::VectorXd k5 =
            F(x + c5 * h,
              y + h * (19372.0 / 6561 * k1 - 25360.0 / 2187 * k2 + 64448.0 / 6561 * k3 - 212.0 / 729 * k4));
        Eigen::VectorXd k6 =
            F(x + h, y + h * (9017.0 / 3168 * k1 - 355.0 / 33 * k2 + 46732.0 / 5247 * k3 + 49.0 / 176 * k4 -
                              5103.0 / 18656 * k5));
        Eigen::VectorXd y5 =
            y + h * (35.0 / 384 * k1 + 500.0 / 1113 * k3 + 125.0 / 192 * k4 - 2187.0 / 6784 * k5 +
                     11.0 / 84 * k6);
        Eigen::VectorXd k7 = F(x + h, y5);
        Eigen::VectorXd y4 =
            y + h * (5179.0 / 57600 * k1 + 7571.0 / 16695 * k3 + 393.0 / 640 * k4 - 92097.0 / 339200 * k5 +
                     187.0 / 2100 * k6 + 1.0 / 40 * k7);
        err = y5 - y4;
        return y5;
    }
};

} // namespace

NumericTrajectory integrate(const FieldEvaluator& f, double x0, const Eigen::VectorXd& y0, double x1,
                            double tol, const std::vector<double>* output_grid) {
    if (!(x0 > 0) || !(x1 > 0))
        throw Error(ErrorKind::DomainError, "integration domain is x > 0");
    if (!(tol > 0)) throw Error(ErrorKind::DomainError, "tolerance must be positive");
    NumericTrajectory out;
    out.meta.tol = tol;

    const int dir = x1 >= x0 ? 1 : -1;
    double x = x0;
    Eigen::VectorXd y = y0;

    std::vector<double> grid;
    if (output_grid) {
        grid = *output_grid;
        std::sort(grid.begin(), grid.end());
        if (dir < 0) std::reverse(grid.begin(), grid.end());
    }
    size_t gi = 0;
    auto record = [&](double xx, const Eigen::VectorXd& yy) {
        out.xs.push_back(xx);
        out.ys.push_back(yy);
    };
    if (!output_grid) record(x, y);
    else {
        while (gi < grid.size() && (dir > 0 ? grid[gi] <= x * (1 + 1e-14) : grid[gi] >= x * (1 - 1e-14))) {
            record(x, y); // grid points at/before start collapse to the start
            ++gi;
        }
    }

    double h = dir * std::min(0.05 * x, std::abs(x1 - x0));
    const double hfac = 0.25; // |h| <= hfac * x keeps the logarithmic grid
    long iter_cap = 2000000;

    while (dir * (x1 - x) > 1e-15 * x1) {
        if (--iter_cap < 0) {
            out.meta.completed = false;
            break;
        }
        h = dir * std::min({std::abs(h), hfac * x, std::abs(x1 - x)});
        // clip to the next output point
        bool hit_grid = false;
        if (output_grid && gi < grid.size()) {
            double target = grid[gi];
            if (dir * (target - x) <= std::abs(h) * (1 + 1e-12)) {
                h = target - x;
                hit_grid = true;
            }
        }
        if (x + h <= 0) h = -0.5 * x; // never step across the singular line

        bool stiff = false;
        if (f.jacobian_scale) {
            double jn = f.jacobian_scale(x).norm();
            stiff = jn * std::abs(h) > 1.0 && jn * hfac * x > 2.0;
        }
        Eigen::VectorXd ynew;
        double err_norm;
        if (!stiff) {
            Eigen::VectorXd err;
            ynew = DP45::step(f, x, y, h, err);
            err_norm = (err.array() / (tol * (1 + ynew.array().abs()))).matrix().norm();
        } else {
            // linearly implicit Euler with step-doubling error estimate
            out.meta.implicit_steps++;
            auto lie = [&](double xx, const Eigen::VectorXd& yy, double hh) {
                Eigen::MatrixXd jac = f.jacobian_scale(xx);
                Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(f.n, f.n) - hh * jac;
                return Eigen::VectorXd(yy + hh * lhs.partialPivLu().solve(f.rhs(xx, yy)));
            };
            Eigen::VectorXd full = lie(x, y, h);
            Eigen::VectorXd half = lie(x + h / 2, lie(x, y, h / 2), h / 2);
            ynew = half;
            err_norm = ((full - half).array() / (tol * (1 + ynew.array().abs()))).matrix().norm() / 1.0;
        }
        if (!ynew.allFinite()) {
            out.meta.escaped = true;
            out.meta.escape_x = x;
            break;
        }
        if (err_norm <= 1.0) {
            x += h;
            y = ynew;
            out.meta.steps++;
            if (output_grid) {
                while (gi < grid.size() &&
                       (dir > 0 ? grid[gi] <= x * (1 + 1e-12) : grid[gi] >= x * (1 - 1e-12))) {
                    record(grid[gi], y); // grid hit exactly by construction
                    ++gi;
                }
            } else {
                record(x, y);
            }
            if (y.norm() > f.domain_bound) {
                out.meta.escaped = true;
                out.meta.escape_x = x;
                break;
            }
            double grow = stiff ? 1.5 : 0.9 * std::pow(std::max(err_norm, 1e-10), -0.2);
            h *= std::min(5.0, std::max(0.2, grow));
        } else {
            out.meta.rejects++;
            double shrink = stiff ? 0.5 : 0.9 * std::pow(err_norm, -0.25);
            h *= std::min(0.9, std::max(0.1, shrink));
            if (std::abs(h) < 1e-300 * std::abs(x)) {
                out.meta.completed = false;
                break;
            }
        }
        (void)hit_grid;
    }
    out.meta.completed = out.meta.completed && !out.meta.escaped && dir * (x1 - x) <= 1e-12 * x1 + 1e-300;
    if (out.xs.empty()) record(x, y);
    return out;
}

namespace {

struct SlopeFit {
    double slope = 0;
    int points = 0;
    bool at_floor = false;
};

SlopeFit fit_log_slope(const std::vector<double>& xs, const std::vector<double>& rs, double floor_val) {
    SlopeFit fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (rs[i] <= floor_val) continue;
        double lx = std::log(xs[i]), ly = std::log(rs[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++m;
    }
    fit.points = m;
    if (m < 4) {
        fit.at_floor = true;
        return fit;
    }
    double denom = m * sxx - sx * sx;
    if (denom == 0) {
        fit.at_floor = true;
        return fit;
    }
    fit.slope = (m * sxy - sx * sy) / denom;
    return fit;
}

} // namespace

ContactReport contact_report(const NumericTrajectory& t, const FormalCurve& curve, int n_max,
                             double ratio_bound) {
    if (t.xs.size() < 8) throw Error(ErrorKind::InsufficientWindow, "trajectory too short");
    double lo = std::min(t.xs.front(), t.xs.back());
    double hi = std::max(t.xs.front(), t.xs.back());
    if (hi < 10 * lo)
        throw Error(ErrorKind::InsufficientWindow, "window must span at least one decade");
    if (n_max > curve.trunc())
        throw Error(ErrorKind::InsufficientPrecision, "curve jet too short for the requested order");

    ContactReport rep;
    rep.window_lo = lo;
    rep.window_hi = hi;
    rep.ratio_bound = ratio_bound;
    for (int N = 0; N <= n_max; ++N) {
        FormalCurve jet = curve.jet(N);
        std::vector<double> rs(t.xs.size());
        double scale = 0;
        for (size_t i = 0; i < t.xs.size(); ++i) scale = std::max(scale, t.ys[i].norm());
        // residuals below the integration noise carry no slope information
        double floor_val = std::max(1e3 * 2.2e-16, 3 * t.meta.tol) * (1 + scale);
        double sup_ratio = 0;
        for (size_t i = 0; i < t.xs.size(); ++i) {
            std::vector<double> g = jet.eval_double(t.xs[i]);
            double r = 0;
            for (int j = 0; j < static_cast<int>(g.size()); ++j) {
                double d = t.ys[i](j) - g[static_cast<size_t>(j)];
                r += d * d;
            }
            r = std::sqrt(r);
            rs[i] = r;
            sup_ratio = std::max(sup_ratio, r / std::pow(t.xs[i], N + 1));
        }
        SlopeFit fit = fit_log_slope(t.xs, rs, floor_val);
        ContactReport::PerOrder po;
        po.order = N;
        po.sup_ratio = sup_ratio;
        po.slope = fit.slope;
        po.at_floor = fit.at_floor;
        po.certified = (fit.at_floor || fit.slope >= N + 1 - rep.slope_margin) && sup_ratio <= ratio_bound;
        rep.orders.push_back(po);
        if (po.certified && rep.max_certified == N - 1) rep.max_certified = N;
    }
    return rep;
}

FlatContactReport flat_contact_check(const NumericTrajectory& t1, const NumericTrajectory& t2, int k_max) {
    FlatContactReport rep;
    double lo = std::max(std::min(t1.xs.front(), t1.xs.back()), std::min(t2.xs.front(), t2.xs.back()));
    double hi = std::min(std::max(t1.xs.front(), t1.xs.back()), std::max(t2.xs.front(), t2.xs.back()));
    if (!(hi > lo) || hi < 4 * lo)
        throw Error(ErrorKind::InsufficientWindow, "overlapping window too short");
    std::vector<double> xs, ds;
    double scale = 0, maxd = 0;
    for (size_t i = 0; i < t1.xs.size(); ++i) {
        double x = t1.xs[i];
        if (x < lo * (1 + 1e-12) || x > hi * (1 - 1e-12)) continue;
        Eigen::VectorXd d = t1.ys[i] - t2.at(x);
        xs.push_back(x);
        ds.push_back(d.norm());
        scale = std::max({scale, t1.ys[i].norm()});
        maxd = std::max(maxd, d.norm());
    }
    rep.max_difference = maxd;
    double floor_val = std::max(1e2 * 2.2e-16, 10 * std::max(t1.meta.tol, t2.meta.tol)) * (1 + scale);
    if (maxd <= floor_val) {
        rep.identical = true;
        rep.certified_up_to = k_max;
        rep.slope = std::numeric_limits<double>::infinity();
        return rep;
    }
    SlopeFit fit = fit_log_slope(xs, ds, floor_val);
    rep.slope = fit.at_floor ? std::numeric_limits<double>::infinity() : fit.slope;
    for (int k = 0; k <= k_max; ++k) {
        if (rep.slope >= k - 0.1) rep.certified_up_to = k;
        else break;
    }
    return rep;
}

CenterManifoldJet center_manifold_jet(const TRSVFForm& f, int order) {
    const int n = f.n();
    if (f.q < 1)
        throw Error(ErrorKind::ShapeError, "center manifold split needs rank q >= 1");
    // split coordinates by ker D(0)
    PolyMatrix d0m = f.d_matrix(0);
    RatMatrix d0 = d0m.eval0();
    CenterManifoldJet out;
    for (int i = 0; i < n; ++i) {
        bool in_kernel = true;
        for (int j = 0; j < n; ++j)
            if (d0.at(i, j) != 0 || d0.at(j, i) != 0) in_kernel = false;
        if (in_kernel) out.center_index.push_back(i);
        else out.stable_index.push_back(i);
    }
    const int nz = static_cast<int>(out.center_index.size());
    const int nw = static_cast<int>(out.stable_index.size());
    if (nw == 0) {
        out.divisible = true;
        out.required_power = f.q + 1 + f.N;
        return out;
    }
    // D_w(0) must be invertible: with the diagonal-special structure this
    // means no zero diagonal block survived in the stable part
    {
        RatMatrix dw(nw, nw);
        for (int i = 0; i < nw; ++i)
            for (int j = 0; j < nw; ++j)
                dw.at(i, j) = d0.at(out.stable_index[static_cast<size_t>(i)], out.stable_index[static_cast<size_t>(j)]);
        if (determinant(dw) == 0)
            throw Error(ErrorKind::ShapeError, "stable block of D(0) is singular");
    }

    // unknown graph w = h(x, z): MultiSeries in variables (x, z_1..z_nz)
    std::vector<MultiSeries> h(static_cast<size_t>(nw), MultiSeries(nz, order));

    // build the full field components as series in (x, z, w) once
    // xi_y = (D + x^q C) y + x^{q+1+N} V(x, x^M y)
    const int q = f.q, N = f.N, M = f.M;
    int work = order + q + 2;
    PolyMatrix pm = f.d_matrix(work) + PolyMatrix::from_constant(f.C, work - q).shift_up(q);
    std::vector<MultiSeries> xi(static_cast<size_t>(n), MultiSeries(n, work));
    for (int i = 0; i < n; ++i) {
        MultiSeries acc(n, work);
        for (int j = 0; j < n; ++j) {
            if (pm.at(i, j).known_zero()) continue;
            acc = acc + MultiSeries::from_x_series(pm.at(i, j), n) * MultiSeries::var_y(j, n, work);
        }
        // vestigial contribution x^{q+1+N} V_i(x, x^M y)
        const MultiSeries& vi = f.V[static_cast<size_t>(i)];
        for (const auto& [alpha, coef] : vi.terms()) {
            MIdx b = alpha;
            int deg_y = midx_degree(alpha) - alpha[0];
            b[0] = alpha[0] + q + 1 + N + M * deg_y;
            if (midx_degree(b) <= work) acc.add_term(b, coef);
        }
        xi[static_cast<size_t>(i)] = acc;
    }

    // iteration on total degree: D_w(0) h_d = [degree-d part of
    //   x^{q+1} dh/dx + dh/dz . xi_z(x,z,h) - xi_w(x,z,h)]
    auto substitute = [&](const MultiSeries& g, const std::vector<MultiSeries>& hcur) {
        // map (x, y) -> (x, z, h(x,z)): variables reorder to (x, z)
        // build replacement series in (x,z)-space for each original y variable
        std::vector<MultiSeries> repl(static_cast<size_t>(n), MultiSeries(nz, order));
        for (int zi = 0; zi < nz; ++zi)
            repl[static_cast<size_t>(out.center_index[static_cast<size_t>(zi)])] =
                MultiSeries::var_y(zi, nz, order);
        for (int wi = 0; wi < nw; ++wi)
            repl[static_cast<size_t>(out.stable_index[static_cast<size_t>(wi)])] = hcur[static_cast<size_t>(wi)];
        // substitute term by term
        MultiSeries acc(nz, order);
        for (const auto& [alpha, coef] : g.terms()) {
            MIdx base(static_cast<size_t>(nz) + 1, 0);
            base[0] = alpha[0];
            if (alpha[0] > order) continue;
            MultiSeries term = MultiSeries::monomial(coef, base, order);
            bool dead = false;
            for (int yv = 0; yv < n && !dead; ++yv) {
                for (int e = 0; e < alpha[static_cast<size_t>(yv) + 1] && !dead; ++e) {
                    term = term * repl[static_cast<size_t>(yv)];
                    if (term.known_zero()) dead = term.trunc() < 0;
                }
            }
            if (!dead) acc = acc + term;
        }
        return acc;
    };

    RatMatrix dw_inv;
    {
        RatMatrix dw(nw, nw);
        for (int i = 0; i < nw; ++i)
            for (int j = 0; j < nw; ++j)
                dw.at(i, j) = d0.at(out.stable_index[static_cast<size_t>(i)], out.stable_index[static_cast<size_t>(j)]);
        dw_inv = inverse(dw);
    }

    for (int d = 1; d <= order; ++d) {
        // residual of the invariance identity with the current h
        std::vector<MultiSeries> resid(static_cast<size_t>(nw), MultiSeries(nz, order));
        for (int wi = 0; wi < nw; ++wi) {
            const MultiSeries& hw = h[static_cast<size_t>(wi)];
            MultiSeries lhs = substitute(xi[static_cast<size_t>(out.stable_index[static_cast<size_t>(wi)])], h);
            MultiSeries rhs_acc(nz, order);
            if (hw.trunc() >= 1) {
                MultiSeries dhdx = hw.derivative_x();
                rhs_acc = rhs_acc + dhdx.mul_x_pow(q + 1).restrict_trunc(std::min(order, dhdx.trunc() + q + 1));
                for (int zi = 0; zi < nz; ++zi) {
                    MultiSeries dhdz = hw.derivative_y(zi);
                    MultiSeries xi_z =
                        substitute(xi[static_cast<size_t>(out.center_index[static_cast<size_t>(zi)])], h);
                    MultiSeries prod = dhdz * xi_z;
                    rhs_acc = rhs_acc + prod.restrict_trunc(std::min(rhs_acc.trunc(), prod.trunc()));
                }
            }
            resid[static_cast<size_t>(wi)] = lhs - rhs_acc;
        }
        // the degree-d slice of the residual is the defect: h_d enters it only
        // through the D_w(0) h_d term of the stable component, still zero here
        std::map<MIdx, RatMatrix> defects;
        for (int wi = 0; wi < nw; ++wi) {
            MultiSeries slice = resid[static_cast<size_t>(wi)].homogeneous_part(d);
            for (const auto& [alpha, coef] : slice.terms()) {
                auto it = defects.find(alpha);
                if (it == defects.end()) it = defects.emplace(alpha, RatMatrix(nw, 1)).first;
                it->second.at(wi, 0) = coef;
            }
        }
        for (const auto& [alpha, vec] : defects) {
            RatMatrix sol = dw_inv * vec;
            for (int wi = 0; wi < nw; ++wi) {
                if (sol.at(wi, 0) == 0) continue;
                h[static_cast<size_t>(wi)].add_term(alpha, -sol.at(wi, 0));
            }
        }
    }

    out.h = h;
    out.required_power = q + 1 + N;
    out.divisible = true;
    for (const auto& hw : h)
        if (hw.ord_x_floor() < out.required_power && !hw.known_zero()) out.divisible = false;
    return out;
}

bool horn_membership(double x, const Eigen::VectorXd& y, const HornSpec& horn) {
    if (!(x > 0) || !(x < horn.eps)) return false;
    std::vector<double> g = horn.jet.eval_double(x);
    double r = 0;
    for (int j = 0; j < static_cast<int>(g.size()); ++j) {
        double d = y(j) - g[static_cast<size_t>(j)];
        r += d * d;
    }
    return std::sqrt(r) < horn.C * std::pow(x, horn.k);
}

namespace {

BasinProbe::Verdict classify_seed(const FieldEvaluator& f, const HornSpec& horn, double x0,
                                  const Eigen::VectorXd& seed, double x_min, double tol) {
    if (!horn_membership(x0, seed, horn)) return BasinProbe::Verdict::Escapes;
    std::vector<double> grid;
    for (double x = x0; x > x_min; x *= 0.8) grid.push_back(x);
    grid.push_back(x_min);
    NumericTrajectory t = integrate(f, x0, seed, x_min, tol, &grid);
    for (size_t i = 0; i < t.xs.size(); ++i)
        if (!horn_membership(t.xs[i], t.ys[i], horn)) return BasinProbe::Verdict::Escapes;
    if (t.meta.escaped) return BasinProbe::Verdict::Escapes;
    if (!t.meta.completed || t.xs.empty() || std::abs(t.xs.back() - x_min) > 0.05 * x_min)
        return BasinProbe::Verdict::Ambiguous;
    return BasinProbe::Verdict::Stays;
}

} // namespace

BasinProbe basin_probe(const FieldEvaluator& f, const HornSpec& horn, const BasinOptions& opt) {
    BasinProbe out;
    const int n = f.n;
    out.x_slice = horn.eps / 2;
    out.x_min = opt.x_min_factor * horn.eps;
    out.resolution = opt.resolution;
    const double x0 = out.x_slice;
    const double radius = horn.C * std::pow(x0, horn.k);
    std::vector<double> center = horn.jet.eval_double(x0);
    Eigen::VectorXd c0(n);
    for (int i = 0; i < n; ++i) c0(i) = center[static_cast<size_t>(i)];

    // grid classification
    long ambiguous = 0, total = 0;
    std::vector<int> idx(static_cast<size_t>(n), 0);
    const int g = opt.grid_per_direction;
    std::vector<BasinProbe::Verdict> verdicts;
    auto seed_at = [&](const std::vector<int>& multi) {
        Eigen::VectorXd s = c0;
        for (int i = 0; i < n; ++i) {
            double t = g == 1 ? 0.0 : (static_cast<double>(multi[static_cast<size_t>(i)]) / (g - 1) - 0.5);
            s(i) += 1.6 * radius * t; // spans +-0.8 radius
        }
        return s;
    };
    bool done = false;
    while (!done) {
        Eigen::VectorXd s = seed_at(idx);
        if (horn_membership(x0, s, horn)) {
            BasinProbe::Verdict v = classify_seed(f, horn, x0, s, out.x_min, opt.tol);
            verdicts.push_back(v);
            ++total;
            if (v == BasinProbe::Verdict::Ambiguous) ++ambiguous;
        }
        int k = 0;
        while (k < n) {
            if (++idx[static_cast<size_t>(k)] < g) break;
            idx[static_cast<size_t>(k)] = 0;
            ++k;
        }
        done = k == n;
    }
    out.grid_verdicts = verdicts;
    out.ambiguous_fraction = total > 0 ? static_cast<double>(ambiguous) / total : 0.0;

    // per-coordinate bisection from the curve point
    int thick = 0;
    for (int i = 0; i < n; ++i) {
        auto stays = [&](double t) {
            Eigen::VectorXd s = c0;
            s(i) += t;
            return classify_seed(f, horn, x0, s, out.x_min, opt.tol) == BasinProbe::Verdict::Stays;
        };
        double hw = 0;
        if (stays(0.0)) {
            // grow then bisect on each side, take the smaller halfwidth
            double side[2] = {0, 0};
            for (int sgn = 0; sgn < 2; ++sgn) {
                double dirn = sgn == 0 ? 1.0 : -1.0;
                double lo = 0, hi = 0.9 * radius;
                if (stays(dirn * hi)) {
                    side[sgn] = hi;
                    continue;
                }
                while (hi - lo > opt.resolution) {
                    double mid = (lo + hi) / 2;
                    if (stays(dirn * mid)) lo = mid;
                    else hi = mid;
                }
                side[sgn] = lo;
            }
            hw = std::min(side[0], side[1]);
        }
        bool is_thick = hw >= opt.thick_fraction * radius;
        out.directions.push_back({i, hw, is_thick});
        if (is_thick) ++thick;
    }
    out.empirical_dim = 1 + thick;
    return out;
}

IteratedTangents iterated_tangents(const NumericTrajectory& t, int depth) {
    IteratedTangents out;
    if (t.xs.size() < 8) throw Error(ErrorKind::InsufficientWindow, "trajectory too short for tangents");
    // extrapolate to x -> 0 on exact stored samples; the nodes must spread
    // geometrically or the extrapolation to 0 amplifies noise
    const int levels = 6;
    std::vector<std::pair<double, Eigen::VectorXd>> pts;
    for (size_t i = 0; i < t.xs.size(); ++i) pts.emplace_back(t.xs[i], t.ys[i]);
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    int use = std::min<int>(levels, static_cast<int>(pts.size()));
    std::vector<double> xs(static_cast<size_t>(use));
    std::vector<Eigen::VectorXd> cur(static_cast<size_t>(use));
    double x_min_s = pts.front().first;
    size_t cursor = 0;
    for (int l = 0; l < use; ++l) {
        double target = x_min_s * std::pow(2.0, l);
        while (cursor + 1 < pts.size() && pts[cursor + 1].first <= target) ++cursor;
        xs[static_cast<size_t>(l)] = pts[cursor].first;
        cur[static_cast<size_t>(l)] = pts[cursor].second;
        if (l > 0 && xs[static_cast<size_t>(l)] == xs[static_cast<size_t>(l - 1)]) {
            // duplicate node: fall back to the next distinct sample
            if (cursor + 1 < pts.size()) {
                ++cursor;
                xs[static_cast<size_t>(l)] = pts[cursor].first;
                cur[static_cast<size_t>(l)] = pts[cursor].second;
            } else {
                use = l;
                break;
            }
        }
    }
    if (use < 4) throw Error(ErrorKind::InsufficientWindow, "too few distinct samples for tangents");
    xs.resize(static_cast<size_t>(use));
    cur.resize(static_cast<size_t>(use));
    int n = static_cast<int>(cur[0].size());

    auto neville_at_zero = [&](const std::vector<Eigen::VectorXd>& vals, double& resid) {
        std::vector<Eigen::VectorXd> tab = vals;
        Eigen::VectorXd prev = tab[0];
        for (int m = 1; m < use; ++m) {
            for (int l = 0; l + m < use; ++l) {
                double xa = xs[static_cast<size_t>(l)], xb = xs[static_cast<size_t>(l + m)];
                tab[static_cast<size_t>(l)] =
                    (xb * tab[static_cast<size_t>(l)] - xa * tab[static_cast<size_t>(l + 1)]) / (xb - xa);
            }
            if (m == use - 2) prev = tab[0];
        }
        resid = (tab[0] - prev).norm();
        return tab[0];
    };

    for (int k = 0; k <= depth; ++k) {
        double resid = 0;
        Eigen::VectorXd c = neville_at_zero(cur, resid);
        if (!c.allFinite() || resid > 1e-1 * (1 + c.norm()))
            throw Error(ErrorKind::TangentUndefined, "iterated tangent extrapolation did not converge", k);
        if (k > 0) {
            Eigen::VectorXd u(n + 1);
            u(0) = 1;
            for (int i = 0; i < n; ++i) u(i + 1) = c(i);
            u.normalize();
            out.tangents.push_back(u);
            out.diagnostics.push_back(resid);
        }
        for (int l = 0; l < use; ++l)
            cur[static_cast<size_t>(l)] = (cur[static_cast<size_t>(l)] - c) / xs[static_cast<size_t>(l)];
        if (static_cast<int>(out.tangents.size()) >= depth) break;
    }
    return out;
}

IteratedTangents curve_iterated_tangents(const FormalCurve& curve, int depth) {
    IteratedTangents out;
    int n = curve.n();
    if (depth > curve.trunc())
        throw Error(ErrorKind::InsufficientPrecision, "curve jet too short for the requested depth");
    for (int k = 1; k <= depth; ++k) {
        Eigen::VectorXd u(n + 1);
        u(0) = 1;
        for (int i = 0; i < n; ++i) u(i + 1) = rat_to_double(curve.gamma_y[static_cast<size_t>(i)][k]);
        u.normalize();
        out.tangents.push_back(u);
        out.diagnostics.push_back(0.0);
    }
    return out;
}

ShootResult shoot_asymptotic(const FieldEvaluator& f, const FormalCurve& curve, int seed_order,
                             double window_lo, double window_hi, double tol, int n_max, double ratio_bound) {
    if (!(window_lo > 0) || !(window_hi > window_lo))
        throw Error(ErrorKind::DomainError, "window must satisfy 0 < lo < hi");
    if (seed_order > curve.trunc())
        throw Error(ErrorKind::InsufficientPrecision, "seed order beyond the curve jet");
    FormalCurve jet = curve.jet(seed_order);

    // Seed at the end toward which deviations contract.  With any expanding
    // mode toward larger x (positive real part of the principal part) the
    // asymptotic trajectory is only reachable by integrating down toward the
    // singularity; truncation error in an upward shot is amplified by
    // exp(1/x0 - 1/x1).
    bool seed_top = false;
    if (f.jacobian_scale) {
        double xm = std::sqrt(window_lo * window_hi);
        Eigen::MatrixXd jm = f.jacobian_scale(xm) * std::pow(xm, 2);
        Eigen::VectorXcd ev = jm.eigenvalues();
        double maxre = -1e300;
        for (int i = 0; i < ev.size(); ++i) maxre = std::max(maxre, ev(i).real());
        seed_top = maxre > 1e-9;
    }
    double x_start = seed_top ? window_hi : window_lo;
    double x_end = seed_top ? window_lo : window_hi;

    std::vector<double> seed = jet.eval_double(x_start);
    Eigen::VectorXd y0(f.n);
    for (int i = 0; i < f.n; ++i) y0(i) = seed[static_cast<size_t>(i)];
    // log-spaced output grid across the window
    std::vector<double> grid;
    const int npts = 160;
    for (int i = 0; i <= npts; ++i)
        grid.push_back(window_lo * std::pow(window_hi / window_lo, static_cast<double>(i) / npts));
    // the escape radius must leave room for the curve itself on the window
    FieldEvaluator fe = f;
    double jet_sup = 1;
    for (double x : grid) {
        std::vector<double> g = jet.eval_double(x);
        for (double v : g) jet_sup = std::max(jet_sup, std::abs(v));
    }
    fe.domain_bound = std::max(fe.domain_bound, 1e4 * jet_sup);
    NumericTrajectory t = integrate(fe, x_start, y0, x_end, tol, &grid);
    if (t.meta.escaped || !t.meta.completed)
        throw Error(ErrorKind::SeedTooCoarse,
                    "trajectory left the domain before covering the window; retry with a larger seed "
                    "order or a smaller seed point");
    ShootResult res;
    res.contact = contact_report(t, curve, n_max < 0 ? seed_order : n_max, ratio_bound);
    res.trajectory = std::move(t);
    return res;
}

} // namespace trs
