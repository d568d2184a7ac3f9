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

#ifndef TRS_DYNAMICS_HPP
#define TRS_DYNAMICS_HPP

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

#include "trs/straightener.hpp"
#include "trs/vf.hpp"

namespace trs {

// Numeric face of a TRS form on x in (0, x_max]: dy/dx = rhs(x, y), with the
// principal linear part available for stiffness control.
struct FieldEvaluator {
    int n = 0;
    double x_max = 1.0;
    double domain_bound = 1e6;
    std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)> rhs;
    std::function<Eigen::MatrixXd(double)> jacobian_scale; // principal part / x^{q+1}

    static FieldEvaluator from_vf_form(const TRSVFForm& f, double x_max = 1.0);
    static FieldEvaluator from_linear_form(const TRSLinearForm& f, double x_max = 1.0);
    static FieldEvaluator from_straightened(const StraightenedField& f, double x_max = 1.0);
    static FieldEvaluator from_closure(int n, std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)> g,
                                       double x_max = 1.0);
};

struct NumericTrajectory {
    std::vector<double> xs;                 // strictly monotone, > 0
    std::vector<Eigen::VectorXd> ys;
    struct Meta {
        double tol = 0;
        long steps = 0;
        long rejects = 0;
        long implicit_steps = 0;
        bool escaped = false;
        double escape_x = 0;
        bool completed = true;
    } meta;

    // linear interpolation in log x; requires x inside the sample range
    Eigen::VectorXd at(double x) const;
    double x_front() const { return xs.front(); }
    double x_back() const { return xs.back(); }
};

NumericTrajectory integrate(const FieldEvaluator& f, double x0, const Eigen::VectorXd& y0, double x1,
                            double tol, const std::vector<double>* output_grid = nullptr);

struct ContactReport {
    struct PerOrder {
        int order;                // N
        double sup_ratio;         // sup |gamma - j_N Gamma| / x^{N+1}
        double slope;             // least-squares slope of log residual vs log x
        bool certified;
        bool at_floor;            // residuals below numeric resolution
    };
    std::vector<PerOrder> orders;
    int max_certified = -1;
    double window_lo = 0, window_hi = 0;
    double slope_margin = 0.1;
    double ratio_bound = 0;
};

ContactReport contact_report(const NumericTrajectory& t, const FormalCurve& curve, int n_max,
                             double ratio_bound = 1e12);

struct FlatContactReport {
    int certified_up_to = -1; // contact certified for all K <= this
    double slope = 0;         // measured decay slope above the numeric floor
    bool identical = false;
    double max_difference = 0;
};

FlatContactReport flat_contact_check(const NumericTrajectory& t1, const NumericTrajectory& t2, int k_max);

struct CenterManifoldJet {
    std::vector<int> center_index;  // coordinates spanning ker D(0)
    std::vector<int> stable_index;  // the complementary coordinates
    std::vector<MultiSeries> h;     // graph w = h(x, z) in variables (x, z)
    bool divisible = false;         // h divisible by x^{q+1+N}
    int required_power = 0;
};

CenterManifoldJet center_manifold_jet(const TRSVFForm& f, int order);

struct HornSpec {
    int k = 1;
    double C = 1.0;
    double eps = 0.1;
    FormalCurve jet; // j_k Gamma
};

bool horn_membership(double x, const Eigen::VectorXd& y, const HornSpec& horn);

struct BasinProbe {
    enum class Verdict { Stays, Escapes, Ambiguous };
    struct Direction {
        int coordinate;
        double stay_halfwidth; // along +- e_i from the curve point, bisected
        bool thick;
    };
    std::vector<Verdict> grid_verdicts;
    std::vector<Direction> directions;
    int empirical_dim = 0;
    double ambiguous_fraction = 0;
    double x_slice = 0, x_min = 0, resolution = 0;
};

struct BasinOptions {
    int grid_per_direction = 3;
    double resolution = 1e-6;
    double tol = 1e-10;
    double x_min_factor = 1e-4;
    double thick_fraction = 0.05; // halfwidth >= this * horn radius counts as thick
};

BasinProbe basin_probe(const FieldEvaluator& f, const HornSpec& horn, const BasinOptions& opt = {});

struct IteratedTangents {
    std::vector<Eigen::VectorXd> tangents; // unit vectors in R^{1+n}
    std::vector<double> diagnostics;       // extrapolation residual per level
};

IteratedTangents iterated_tangents(const NumericTrajectory& t, int depth);
// symbolic counterpart from the curve's coefficients
IteratedTangents curve_iterated_tangents(const FormalCurve& curve, int depth);

struct ShootResult {
    NumericTrajectory trajectory;
    ContactReport contact;
};

ShootResult shoot_asymptotic(const FieldEvaluator& f, const FormalCurve& curve, int seed_order,
                             double window_lo, double window_hi, double tol, int n_max = -1,
                             double ratio_bound = 1e12);

} // namespace trs

#endif
