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

#include "trs/straightener.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>

namespace trs {

namespace {

using Float50 = boost::multiprecision::cpp_bin_float_50;

double reduce_mod_2pi(const Rational& alpha) {
    static const Float50 two_pi = 2 * boost::math::constants::pi<Float50>();
    Float50 a = alpha.convert_to<Float50>();
    Float50 k = boost::multiprecision::floor(a / two_pi + Float50(0.5));
    return static_cast<double>(a - k * two_pi);
}

} // namespace

PolyMatrix RotationalMatrix::matrix(int trunc) const {
    PolyMatrix out(n, trunc);
    for (const auto& p : pairs) {
        TruncatedSeries b(trunc);
        for (size_t k = 0; k < p.b.size() && static_cast<int>(k) <= trunc; ++k)
            b.set(static_cast<int>(k), p.b[k]);
        out.set(p.offset, p.offset + 1, -b);
        out.set(p.offset + 1, p.offset, b);
    }
    return out;
}

StraightenerEval::StraightenerEval(RotationalMatrix rot, int q) : r(std::move(rot)), q_param(q) {
    for (const auto& p : r.pairs)
        if (static_cast<int>(p.b.size()) > q_param + 1)
            throw Error(ErrorKind::ShapeError, "rotational degree exceeds the angle exponent parameter");
}

double StraightenerEval::angle(int pair_index, double x) const {
    if (!(x > 0)) throw Error(ErrorKind::DomainError, "straightener undefined for x <= 0");
    const auto& b = r.pairs[static_cast<size_t>(pair_index)].b;
    // exact rational accumulation of sum b^k / ((g+1-k) x^{g+1-k})
    Rational xr(x); // binary doubles convert exactly
    Rational acc(0);
    Rational xpow(1);
    // compute x^{g+1} then divide down
    for (int k = 0; k <= q_param; ++k) xpow *= xr;
    for (int k = 0; k <= q_param; ++k) {
        // denominator power g+1-k
        if (k < static_cast<int>(b.size()) && b[static_cast<size_t>(k)] != 0)
            acc += b[static_cast<size_t>(k)] / (Rational(q_param + 1 - k) * xpow);
        xpow /= xr;
    }
    return reduce_mod_2pi(acc);
}

std::optional<RotationalMatrix> extract_rotational(const std::vector<ExpBlock>& dblocks,
                                                   const BlockStructure& bs, int q) {
    RotationalMatrix r;
    r.n = bs.real_dim();
    r.degree = std::max(q - 1, 0);
    int pos = 0;
    for (const auto& blk : dblocks) {
        int rows = blk.is_complex ? 2 * blk.mult : blk.mult;
        if (blk.is_complex) {
            auto ore = blk.c.re.ord();
            auto oim = blk.c.im.ord();
            int vre = ore ? *ore : blk.c.re.trunc() + 1;
            int vim = oim ? *oim : blk.c.im.trunc() + 1;
            if (vre > vim) {
                // dominant rotation: take the pure imaginary initial jet
                int v = ore ? vre : q; // Re == 0: the whole polynomial is the jet
                std::vector<Rational> b;
                int jet_deg = ore ? v - 1 : blk.c.im.trunc();
                for (int k = 0; k <= jet_deg && k <= blk.c.im.trunc(); ++k)
                    b.push_back(blk.c.im[k]);
                while (!b.empty() && b.back() == 0) b.pop_back();
                if (b.empty())
                    throw Error(ErrorKind::Internal, "dominant block with zero rotational jet");
                for (int mcopy = 0; mcopy < blk.mult; ++mcopy)
                    r.pairs.push_back({pos + 2 * mcopy, b, v});
            }
        }
        pos += rows;
    }
    if (r.pairs.empty()) return std::nullopt;
    return r;
}

Eigen::MatrixXd omega_eval(const StraightenerEval& se, double x) {
    if (!(x > 0)) throw Error(ErrorKind::DomainError, "straightener undefined for x <= 0");
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(se.r.n, se.r.n);
    for (size_t j = 0; j < se.r.pairs.size(); ++j) {
        double a = se.angle(static_cast<int>(j), x);
        int o = se.r.pairs[j].offset;
        double c = std::cos(a), s = std::sin(a);
        m(o, o) = c;
        m(o, o + 1) = -s;
        m(o + 1, o) = s;
        m(o + 1, o + 1) = c;
    }
    return m;
}

OmegaReport verify_omega_properties(const StraightenerEval& se, const std::vector<double>& xs, int m_power,
                                    const std::optional<RatMatrix>& compatible_c, double ode_tol,
                                    double iso_tol) {
    OmegaReport rep;
    rep.ode_ok = true;
    rep.isometry_ok = true;
    rep.decay_ok = true;
    const int n = se.r.n;
    Eigen::MatrixXd cmat;
    if (compatible_c) {
        cmat.resize(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) cmat(i, j) = rat_to_double(compatible_c->at(i, j));
    }
    double residual_minus = 0, residual_plus = 0;
    for (double x : xs) {
        Eigen::MatrixXd om = omega_eval(se, x);
        // isometry
        double iso = (om.transpose() * om - Eigen::MatrixXd::Identity(n, n)).norm();
        rep.max_isometry_err = std::max(rep.max_isometry_err, iso);
        if (iso > iso_tol) rep.isometry_ok = false;
        // R(x)/x^{g+2}
        Eigen::MatrixXd rx = Eigen::MatrixXd::Zero(n, n);
        for (const auto& p : se.r.pairs) {
            double b = 0, xp = 1;
            for (size_t k = 0; k < p.b.size(); ++k) {
                b += rat_to_double(p.b[k]) * xp;
                xp *= x;
            }
            rx(p.offset, p.offset + 1) = -b;
            rx(p.offset + 1, p.offset) = b;
        }
        double scale = std::pow(x, se.q_param + 2);
        Eigen::MatrixXd rhs = rx * om / scale;
        // finite differences: the step must resolve the rotation (scale by the
        // angle derivative |R|/x^{g+2}) and be an exact binary increment so the
        // rational angle arithmetic sees exact abscissae
        double omega_rate = std::max(rx.norm() / scale, 1e-30);
        double h = std::exp2(std::floor(std::log2(std::min(x * 1e-6, 1e-3 / omega_rate))));
        while (x + h / 2 == x) h *= 2; // keep the Richardson half-step above one ulp
        auto fd = [&](double hh) {
            return Eigen::MatrixXd(((omega_eval(se, x + hh) - omega_eval(se, x - hh)) / (2 * hh)));
        };
        Eigen::MatrixXd d1 = fd(h), d2 = fd(h / 2);
        Eigen::MatrixXd d = (4.0 * d2 - d1) / 3.0;
        double denom = std::max(rhs.norm(), 1e-300);
        residual_minus = std::max(residual_minus, (d + rhs).norm() / denom);
        residual_plus = std::max(residual_plus, (d - rhs).norm() / denom);
        // decay of x^M Omega
        if (m_power >= 1) {
            double bound = std::pow(x, m_power) * std::sqrt(2.0 * n);
            if (std::pow(x, m_power) * om.norm() > bound + 1e-12) rep.decay_ok = false;
        }
        if (compatible_c) {
            double comm = (cmat * om - om * cmat).norm();
            rep.max_commute_err = std::max(rep.max_commute_err, comm);
            if (comm > 1e-9 * (1 + cmat.norm())) rep.commute_ok = false;
        }
    }
    // which sign does the numerics support?
    if (residual_minus <= residual_plus) {
        rep.supported_sign = -1;
        rep.max_ode_residual = residual_minus;
    } else {
        rep.supported_sign = +1;
        rep.max_ode_residual = residual_plus;
    }
    rep.ode_ok = rep.max_ode_residual <= ode_tol;
    return rep;
}

StraightenedField straighten_field(const TRSVFForm& f, const RotationalMatrix& r) {
    const int n = f.n();
    if (r.n != n) throw Error(ErrorKind::ShapeError, "rotational matrix size mismatch");
    // compatibility: [C, R] = 0 exactly and [D, R] = 0 by block structure
    int dtr = std::max(f.q - 1, 0);
    PolyMatrix rmat = r.matrix(dtr);
    PolyMatrix dmat = f.d_matrix(dtr);
    PolyMatrix cpm = PolyMatrix::from_constant(f.C, dtr);
    if (!(cpm * rmat - rmat * cpm).known_zero())
        throw Error(ErrorKind::ShapeError, "residual part does not commute with the rotational matrix");
    if (!(dmat * rmat - rmat * dmat).known_zero())
        throw Error(ErrorKind::ShapeError, "exponential part does not commute with the rotational matrix");

    bool vzero = true;
    for (const auto& v : f.V) vzero &= v.known_zero();
    if (!vzero) {
        // differentiability budget of the straightened vestigial closure
        long lhs = f.M / (f.q + 1);
        long rhs = static_cast<long>(n) * (f.q + 1 + f.N) + 1;
        if (lhs < rhs)
            throw Error(ErrorKind::HypothesisViolated,
                        "floor(M/(q+1)) >= n(q+1+N)+1 fails: M=" + std::to_string(f.M));
    }

    StraightenedField out;
    out.N = f.N;
    out.vestigial_zero = vzero;
    out.straightener = StraightenerEval(r, std::max(f.q - 1, 0));

    // D - R, then factor x^s
    PolyMatrix diff = dmat - rmat;
    int s = diff.ord_floor();
    if (s > dtr) s = f.q; // the difference vanishes: everything moves to the residual
    s = std::min(s, f.q);
    TRSLinearForm principal;
    principal.q = f.q - s;
    principal.C = f.C;
    // rebuild block data of (D - R)/x^s
    principal.bs = f.bs;
    principal.dblocks = f.dblocks;
    {
        int newtr = std::max(principal.q - 1, 0);
        auto reduce_poly = [&](const TruncatedSeries& p) {
            TruncatedSeries w = p.widen_exact(std::max(dtr, s));
            TruncatedSeries d = s > 0 ? w.exact_divide_x(s) : w;
            return d.widen_exact(newtr).restrict_trunc(newtr);
        };
        int pos = 0;
        for (auto& blk : principal.dblocks) {
            int rows = blk.is_complex ? 2 * blk.mult : blk.mult;
            if (blk.is_complex) {
                // subtract the pair jet where a pair sits at this offset
                TruncatedSeries im = blk.c.im;
                for (const auto& p : r.pairs)
                    if (p.offset == pos) {
                        TruncatedSeries b(im.trunc());
                        for (size_t k = 0; k < p.b.size() && static_cast<int>(k) <= im.trunc(); ++k)
                            b.set(static_cast<int>(k), p.b[k]);
                        im = im - b;
                        break;
                    }
                blk.c = ComplexSeries(reduce_poly(blk.c.re), reduce_poly(im));
            } else {
                blk.c = ComplexSeries::from_real(reduce_poly(blk.c.re));
            }
            pos += rows;
        }
    }
    principal.V = PolyMatrix(n, 0);
    out.principal = principal;
    out.s = s;
    out.q_reduced = f.q - s;

    // invariants of the reduced exponential part
    if (!no_dominant_rotation(principal))
        throw Error(ErrorKind::Internal, "straightened exponential part still has dominant rotation");
    {
        TRSLinearForm before;
        before.q = f.q;
        before.bs = f.bs;
        before.dblocks = f.dblocks;
        before.C = f.C;
        before.V = PolyMatrix(n, 0);
        if (unstability_index(before) != unstability_index(principal))
            throw Error(ErrorKind::Internal, "straightening changed the unstability index");
    }

    if (!vzero) {
        // With the normative integral convention Omega here is the inverse of
        // the paper's matrix, so the straightened chart is z = Omega y and the
        // closure reads x^M Omega V(x, x^M Omega^T z).
        StraightenerEval se = out.straightener;
        std::vector<MultiSeries> vcopy = f.V;
        int mpow = f.M;
        out.vestigial = [se, vcopy, mpow, n](double x, const Eigen::VectorXd& z) {
            Eigen::MatrixXd om = omega_eval(se, x);
            Eigen::VectorXd w = std::pow(x, mpow) * (om.transpose() * z);
            std::vector<double> y(w.data(), w.data() + n);
            Eigen::VectorXd v(n);
            for (int i = 0; i < n; ++i) v(i) = vcopy[static_cast<size_t>(i)].eval_double(x, y);
            return Eigen::VectorXd(std::pow(x, mpow) * (om * v));
        };
    } else {
        out.vestigial = [n](double, const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(n).eval(); };
    }
    return out;
}

} // namespace trs
