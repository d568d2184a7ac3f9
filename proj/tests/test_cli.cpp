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

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "trs/json_io.hpp"
#include "trs/reduce_linear.hpp"

using namespace trs;
namespace fs = std::filesystem;

namespace {

const char* cli = TRS_CLI_PATH;

int run(const std::string& args) {
    std::string cmd = std::string(cli) + " " + args + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

fs::path tmpdir() {
    fs::path d = fs::temp_directory_path() / "trs_cli_test";
    fs::create_directories(d);
    return d;
}

InvariantCouple euler_couple(int trunc) {
    MultiSeries fx(1, trunc);
    fx.add_term({2, 0}, 1);
    MultiSeries fy(1, trunc);
    fy.add_term({0, 1}, 1);
    fy.add_term({1, 0}, -1);
    TruncatedSeries g(trunc);
    Rational a(1);
    for (int k = 1; k <= trunc; ++k) {
        g.set(k, a);
        a *= k;
    }
    InvariantCouple c;
    c.vf = VectorFieldJet(fx, {fy});
    c.curve = FormalCurve({g});
    return c;
}

} // namespace

TEST_CASE("json round trips") {
    TruncatedSeries s(4);
    s.set(1, Rational(3, 7));
    s.set(4, -2);
    CHECK(series_from_json(to_json(s)) == s);

    MultiSeries m(2, 5);
    m.add_term({1, 2, 0}, Rational(-5, 3));
    m.add_term({0, 0, 3}, 4);
    CHECK(multiseries_from_json(to_json(m)) == m);

    PolyMatrix pm(2, 3);
    pm.at(0, 1) = s.restrict_trunc(3);
    CHECK(polymatrix_from_json(to_json(pm)) == pm);

    GaugeChain chain;
    chain.push_back(GaugeTransform::diag_monomial({1, 0}));
    chain.push_back(GaugeTransform::ramification(2));
    chain.push_back(GaugeTransform::poly_regular(PolyMatrix::identity(2, 1)));
    GaugeChain back = gauge_chain_from_json(to_json(chain));
    REQUIRE(back.size() == 3);
    CHECK(back[0].exponents == std::vector<int>{1, 0});
    CHECK(back[1].r == 2);

    InvariantCouple c = euler_couple(8);
    InvariantCouple cc = couple_from_json(to_json(c));
    CHECK(cc.vf.xi_x == c.vf.xi_x);
    CHECK(cc.vf.xi_y[0] == c.vf.xi_y[0]);
    CHECK(cc.curve.gamma_y[0] == c.curve.gamma_y[0]);

    TransformChain tc;
    tc.steps.push_back(CoordTransform::translation({TruncatedSeries::monomial(1, 1, 3)}));
    tc.steps.push_back(CoordTransform::diag_monomial(1));
    tc.steps.push_back(CoordTransform::ramification(3));
    TransformChain tcb = transform_chain_from_json(to_json(tc));
    REQUIRE(tcb.steps.size() == 3);
    CHECK(tcb.steps[2].r == 3);
}

TEST_CASE("chain file replay reproduces the form file") {
    // reduce the ramified example through the CLI and replay the chain here
    fs::path d = tmpdir();
    PolyMatrix a(2, 8);
    a.at(0, 1) = TruncatedSeries::monomial(1, 1, 8);
    a.at(1, 0) = TruncatedSeries::constant(1, 8);
    LinearSystem s(2, 2, a);
    write_json_file((d / "sys.json").string(), to_json(s));
    int rc = run("reduce-linear " + (d / "sys.json").string() + " --out " + d.string());
    REQUIRE(rc == 0);

    GaugeChain chain = gauge_chain_from_json(load_json_file((d / "chain.json").string()));
    Json form = load_json_file((d / "form.json").string());
    REQUIRE(form.at("verdict").get<std::string>() == "trs");
    TRSLinearForm f = trs_linear_form_from_json(form.at("form"));

    LinearSystem replay = s;
    for (const auto& t : chain) replay = apply_gauge(replay, t);
    CHECK(replay.p == f.q);
    CHECK(replay.A.is_known_equal(f.matrix(replay.A.trunc())));
}

TEST_CASE("cli pipeline on the divergent model") {
    fs::path d = tmpdir();
    write_json_file((d / "couple.json").string(), to_json(euler_couple(40)));
    REQUIRE(run("reduce-vf " + (d / "couple.json").string() + " --N 4 --out " + d.string()) == 0);
    REQUIRE(fs::exists(d / "form.json"));
    // the refined chart carries factorial-size curve coefficients, so the
    // sup-ratio bound scales accordingly; the slope is what certifies
    REQUIRE(run("trajectory " + (d / "form.json").string() +
                " --seed-order 8 --window 0.01:0.3 --tol 1e-11 --ratio-bound 1e18 --out " + d.string()) == 0);
    REQUIRE(fs::exists(d / "trajectory.csv"));
    Json rep = load_json_file((d / "contact_report.json").string());
    CHECK(rep.at("max_certified").get<int>() >= 4);
    REQUIRE(run("verify " + (d / "form.json").string() + " --out " + d.string()) == 0);
    Json ver = load_json_file((d / "verify_report.json").string());
    for (const auto& chk : ver.at("checks")) CHECK(chk.at("pass").get<bool>());
}

TEST_CASE("determinism: identical runs produce identical bytes") {
    fs::path d1 = tmpdir() / "r1";
    fs::path d2 = tmpdir() / "r2";
    fs::create_directories(d1);
    fs::create_directories(d2);
    write_json_file((tmpdir() / "couple2.json").string(), to_json(euler_couple(30)));
    REQUIRE(run("reduce-vf " + (tmpdir() / "couple2.json").string() + " --out " + d1.string()) == 0);
    REQUIRE(run("reduce-vf " + (tmpdir() / "couple2.json").string() + " --out " + d2.string()) == 0);
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p);
        return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    };
    CHECK(slurp(d1 / "form.json") == slurp(d2 / "form.json"));
    CHECK(slurp(d1 / "chain.json") == slurp(d2 / "chain.json"));
}

TEST_CASE("exit codes") {
    fs::path d = tmpdir();
    {
        std::ofstream bad(d / "bad.json");
        bad << "{ not json";
    }
    CHECK(run("reduce-linear " + (d / "bad.json").string() + " --out " + d.string()) == 2);

    // invariance violation is a precondition failure
    MultiSeries fx(1, 6);
    fx.add_term({1, 0}, 1);
    MultiSeries fy(1, 6);
    fy.add_term({0, 1}, 1);
    InvariantCouple c;
    c.vf = VectorFieldJet(fx, {fy});
    TruncatedSeries g(6);
    g.set(1, 1);
    g.set(2, 1);
    c.curve = FormalCurve({g});
    write_json_file((d / "badcouple.json").string(), to_json(c));
    CHECK(run("reduce-vf " + (d / "badcouple.json").string() + " --out " + d.string()) == 3);
}
