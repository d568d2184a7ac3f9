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

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "trs/json_io.hpp"
#include "trs/reduce_linear.hpp"

namespace fs = std::filesystem;
using namespace trs;

namespace {

int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::ParseError:
            return 2;
        case ErrorKind::EmptyPrecision:
        case ErrorKind::InsufficientPrecision:
        case ErrorKind::FuelExhausted:
            return 4;
        case ErrorKind::Undecidable:
            return 5;
        default:
            return 3;
    }
}

struct Knobs {
    int working_order = 24;
    int fuel = 16;
    double tol = 1e-10;
    long seed = 20260810;
    std::string window = "0.01:0.3";
    std::string horn = "1:1.0:0.2";
    double ratio_bound = 1e12;
    std::string out_dir = ".";
    int n_refine = 0;
    int m_refine = 0;
    int seed_order = 8;

    Json echo() const {
        return Json{{"working_order", working_order}, {"fuel", fuel},   {"tol", tol},
                    {"seed", seed},                   {"window", window}, {"horn", horn},
                    {"N", n_refine},                  {"M", m_refine},  {"seed_order", seed_order},
                    {"ratio_bound", ratio_bound}};
    }
};

std::pair<double, double> parse_window(const std::string& w) {
    auto c = w.find(':');
    if (c == std::string::npos) throw Error(ErrorKind::ParseError, "window must be x0:x1");
    return {std::stod(w.substr(0, c)), std::stod(w.substr(c + 1))};
}

struct HornArgs {
    int k;
    double C, eps;
};

HornArgs parse_horn(const std::string& h) {
    auto c1 = h.find(':');
    auto c2 = h.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw Error(ErrorKind::ParseError, "horn must be k:C:eps");
    return {std::stoi(h.substr(0, c1)), std::stod(h.substr(c1 + 1, c2 - c1 - 1)), std::stod(h.substr(c2 + 1))};
}

void ensure_dir(const std::string& d) {
    std::error_code ec;
    fs::create_directories(d, ec);
}

int cmd_reduce_linear(const std::string& input, const Knobs& k) {
    Json j = load_json_file(input);
    LinearSystem s = linear_system_from_json(j);
    ReduceOptions opt;
    opt.working_order = k.working_order;
    opt.max_ramifications = k.fuel;
    opt.max_rank_steps = k.fuel;
    ReductionResult res = reduce_linear_full(s, opt);
    ensure_dir(k.out_dir);
    Json chain = to_json(res.chain);
    chain["config"] = k.echo();
    write_json_file(k.out_dir + "/chain.json", chain);
    Json form;
    if (res.is_regular()) {
        form = Json{{"verdict", "regular"}, {"system", to_json(std::get<RegularResult>(res.outcome).system)}};
    } else {
        form = Json{{"verdict", "trs"}, {"form", to_json(res.form())}};
    }
    form["config"] = k.echo();
    write_json_file(k.out_dir + "/form.json", form);
    std::cout << (res.is_regular() ? "regular" : "trs q=" + std::to_string(res.form().q)) << ", chain length "
              << res.chain.size() << "\n";
    return 0;
}

int cmd_reduce_vf(const std::string& input, const Knobs& k) {
    Json j = load_json_file(input);
    InvariantCouple c = couple_from_json(j);
    InvarianceReport inv = check_invariance(c);
    if (!inv.holds) throw Error(ErrorKind::Inadmissible, "input couple is not invariant");
    VFReduceOptions opt;
    opt.working_order = k.working_order;
    opt.linear.working_order = k.working_order;
    opt.linear.max_ramifications = k.fuel;
    opt.linear.max_rank_steps = k.fuel;
    VFReduction base = reduce_vf_trs(c, opt);
    VFReduction final_red = base;
    TransformChain chain = base.chain;
    if (k.n_refine > 0 || k.m_refine > 0) {
        final_red = refine_trs(base.couple, k.n_refine, k.m_refine, opt);
        for (const auto& t : final_red.chain.steps) chain.steps.push_back(t);
    }
    ensure_dir(k.out_dir);
    Json cj = to_json(chain);
    cj["config"] = k.echo();
    write_json_file(k.out_dir + "/chain.json", cj);
    Json fj = Json{{"form", to_json(final_red.form)},
                   {"curve", to_json(final_red.couple.curve)},
                   {"couple", to_json(final_red.couple)}};
    fj["config"] = k.echo();
    write_json_file(k.out_dir + "/form.json", fj);
    std::cout << "trs type (" << final_red.form.q << "," << final_red.form.N << "," << final_red.form.M
              << "), chain length " << chain.steps.size() << "\n";
    return 0;
}

int cmd_trajectory(const std::string& input, const Knobs& k) {
    Json j = load_json_file(input);
    TRSVFForm form = trs_vf_form_from_json(j.at("form"));
    FormalCurve curve = curve_from_json(j.at("curve"));
    auto [x0, x1] = parse_window(k.window);

    bool straightened = false;
    FieldEvaluator fe = FieldEvaluator::from_vf_form(form, std::max(1.0, x1));
    if (auto rot = extract_rotational(form.dblocks, form.bs, form.q)) {
        StraightenedField sf = straighten_field(form, *rot);
        fe = FieldEvaluator::from_straightened(sf, std::max(1.0, x1));
        straightened = true;
        // the straightened chart shares the x coordinate; the curve is
        // compared in the straightened chart through the same jet
    }
    ShootResult res = shoot_asymptotic(fe, curve, k.seed_order, x0, x1, k.tol, -1, k.ratio_bound);

    ensure_dir(k.out_dir);
    {
        std::ofstream csv(k.out_dir + "/trajectory.csv");
        csv.precision(17);
        csv << "x";
        for (int i = 0; i < form.n(); ++i) csv << ",y" << i + 1;
        csv << "\n";
        for (size_t i = 0; i < res.trajectory.xs.size(); ++i) {
            csv << res.trajectory.xs[i];
            for (int c = 0; c < form.n(); ++c) csv << "," << res.trajectory.ys[i](c);
            csv << "\n";
        }
    }
    Json rep = Json{{"straightener_engaged", straightened},
                    {"window", Json::array({res.contact.window_lo, res.contact.window_hi})},
                    {"max_certified", res.contact.max_certified},
                    {"slope_margin", res.contact.slope_margin},
                    {"ratio_bound", res.contact.ratio_bound},
                    {"orders", Json::array()}};
    for (const auto& po : res.contact.orders)
        rep["orders"].push_back(Json{{"order", po.order},
                                     {"sup_ratio", po.sup_ratio},
                                     {"slope", po.slope},
                                     {"certified", po.certified},
                                     {"at_floor", po.at_floor}});
    rep["integrator"] = Json{{"steps", res.trajectory.meta.steps},
                             {"rejects", res.trajectory.meta.rejects},
                             {"implicit_steps", res.trajectory.meta.implicit_steps}};
    rep["config"] = k.echo();
    write_json_file(k.out_dir + "/contact_report.json", rep);
    std::cout << "certified contact order " << res.contact.max_certified << (straightened ? " (straightened)" : "")
              << "\n";
    return 0;
}

int cmd_verify(const std::string& input, const Knobs& k) {
    Json j = load_json_file(input);
    TRSVFForm form = trs_vf_form_from_json(j.at("form"));
    Json report;
    report["config"] = k.echo();
    Json checks = Json::array();
    auto push = [&](const std::string& name, bool ok, const Json& detail = Json()) {
        checks.push_back(Json{{"check", name}, {"pass", ok}, {"detail", detail}});
        std::cout << (ok ? "PASS" : "FAIL") << "  " << name << "\n";
    };

    // residual compatibility and spectrum
    try {
        PolyMatrix cpm = PolyMatrix::from_constant(form.C, std::max(form.q - 1, 0));
        bool comp = compatible(cpm, form.d_matrix(std::max(form.q - 1, 0)), form.bs);
        push("residual_compatible", comp);
    } catch (const Error& e) {
        push("residual_compatible", false, Json(e.what()));
    }
    push("good_spectrum", has_good_spectrum(form.C));

    TRSLinearForm lp = form.linear_part();
    push("no_dominant_rotation", no_dominant_rotation(lp));
    push("unstability_index", true, Json(unstability_index(lp)));

    // straightener properties when rotation is present
    if (auto rot = extract_rotational(form.dblocks, form.bs, form.q)) {
        StraightenerEval se(*rot, std::max(form.q - 1, 0));
        std::vector<double> xs;
        for (int i = 0; i <= 12; ++i) xs.push_back(1e-3 * std::pow(1000.0, i / 12.0));
        OmegaReport omr = verify_omega_properties(se, xs, std::max(form.M, 1), form.C);
        push("omega_orthogonality", omr.isometry_ok, Json(omr.max_isometry_err));
        push("omega_ode", omr.ode_ok,
             Json{{"supported_sign", omr.supported_sign}, {"residual", omr.max_ode_residual}});
        push("omega_decay", omr.decay_ok);
        push("omega_commutes_with_residual", omr.commute_ok, Json(omr.max_commute_err));
    }

    // vestigial elimination round trip on the associated linear data
    if (has_good_spectrum(form.C)) {
        try {
            TRSLinearForm widened = lp;
            int need = 3 + lp.q + 1;
            if (widened.V.trunc() < need) widened.V = widened.V.widen_exact(need);
            auto [g, killed] = kill_vestigial(widened, 3);
            push("kill_vestigial_roundtrip", killed.V.ord_floor() >= 3 && killed.C == lp.C);
        } catch (const Error& e) {
            push("kill_vestigial_roundtrip", false, Json(e.what()));
        }
    }

    // center manifold divisibility when the kernel splits off
    try {
        if (form.q >= 1) {
            CenterManifoldJet cm = center_manifold_jet(form, std::min(6, form.q + 4));
            if (!cm.stable_index.empty() && !cm.center_index.empty())
                push("center_manifold_divisible", cm.divisible, Json(cm.required_power));
        }
    } catch (const Error& e) {
        push("center_manifold_divisible", false, Json(e.what()));
    }
    report["checks"] = checks;
    ensure_dir(k.out_dir);
    write_json_file(k.out_dir + "/verify_report.json", report);
    return 0;
}

int cmd_omega_eval(const std::string& input, double x, const Knobs&) {
    Json j = load_json_file(input);
    TRSVFForm form = trs_vf_form_from_json(j.at("form"));
    auto rot = extract_rotational(form.dblocks, form.bs, form.q);
    if (!rot) {
        std::cout << "no dominant rotation: straightener is the identity\n";
        return 0;
    }
    StraightenerEval se(*rot, std::max(form.q - 1, 0));
    Eigen::MatrixXd om = omega_eval(se, x);
    std::cout.precision(17);
    std::cout << om << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reduction of real singular systems and vector fields to TRS normal form, with certified "
                 "asymptotic trajectories"};
    app.require_subcommand(1);

    Knobs k;
    std::string input;
    double x_eval = 0.1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("input", input, "input JSON file")->required();
        sub->add_option("--working-order", k.working_order, "series truncation order for the reduction");
        sub->add_option("--fuel", k.fuel, "ramification / rank-step budget");
        sub->add_option("--tol", k.tol, "integrator tolerance");
        sub->add_option("--seed", k.seed, "random seed (logged into every report)");
        sub->add_option("--window", k.window, "integration window x0:x1");
        sub->add_option("--horn", k.horn, "horn parameters k:C:eps");
        sub->add_option("--out", k.out_dir, "output directory");
    };

    auto* rl = app.add_subcommand("reduce-linear", "reduce a linear system to TRS or regular form");
    add_common(rl);
    auto* rv = app.add_subcommand("reduce-vf", "reduce an invariant couple to TRS form");
    add_common(rv);
    rv->add_option("--N", k.n_refine, "vestigial depth of the refinement");
    rv->add_option("--M", k.m_refine, "scaling depth of the refinement");
    auto* tj = app.add_subcommand("trajectory", "shoot a trajectory asymptotic to the curve and certify contact");
    add_common(tj);
    tj->add_option("--seed-order", k.seed_order, "jet order of the seed");
    tj->add_option("--ratio-bound", k.ratio_bound, "bound on sup residual/x^{N+1} for certification");
    auto* vf = app.add_subcommand("verify", "run the invariant suites applicable to a form file");
    add_common(vf);
    auto* oe = app.add_subcommand("omega-eval", "evaluate the straightener matrix at a point");
    add_common(oe);
    oe->add_option("--x", x_eval, "evaluation point (x > 0)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (rl->parsed()) return cmd_reduce_linear(input, k);
        if (rv->parsed()) return cmd_reduce_vf(input, k);
        if (tj->parsed()) return cmd_trajectory(input, k);
        if (vf->parsed()) return cmd_verify(input, k);
        if (oe->parsed()) return cmd_omega_eval(input, x_eval, k);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
