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

#include "trs/json_io.hpp"

#include <fstream>

namespace trs {

namespace {

Rational rat_field(const Json& j) {
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (!j.is_string()) throw Error(ErrorKind::ParseError, "rational must be \"p/q\" or integer");
    return rat_from_string(j.get<std::string>());
}

Json rat_json(const Rational& r) { return Json(rat_to_string(r)); }

} // namespace

Json to_json(const TruncatedSeries& s) {
    Json coeffs = Json::array();
    for (int k = 0; k <= s.trunc(); ++k) coeffs.push_back(rat_json(s[k]));
    return Json{{"trunc", s.trunc()}, {"coeffs", coeffs}};
}

TruncatedSeries series_from_json(const Json& j) {
    if (!j.contains("trunc") || !j.contains("coeffs"))
        throw Error(ErrorKind::ParseError, "series needs trunc and coeffs");
    int tr = j.at("trunc").get<int>();
    std::vector<Rational> c;
    for (const auto& e : j.at("coeffs")) c.push_back(rat_field(e));
    return TruncatedSeries(std::move(c), tr);
}

Json to_json(const MultiSeries& m) {
    Json terms = Json::array();
    for (const auto& [a, c] : m.terms()) {
        Json alpha = Json::array();
        for (int e : a) alpha.push_back(e);
        terms.push_back(Json{{"alpha", alpha}, {"c", rat_json(c)}});
    }
    return Json{{"n", m.yvars()}, {"trunc", m.trunc()}, {"terms", terms}};
}

MultiSeries multiseries_from_json(const Json& j) {
    MultiSeries m(j.at("n").get<int>(), j.at("trunc").get<int>());
    for (const auto& t : j.at("terms")) {
        MIdx a;
        for (const auto& e : t.at("alpha")) a.push_back(e.get<int>());
        m.add_term(a, rat_field(t.at("c")));
    }
    return m;
}

Json to_json(const PolyMatrix& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.size(); ++i) {
        Json row = Json::array();
        for (int jj = 0; jj < m.size(); ++jj) row.push_back(to_json(m.at(i, jj)));
        rows.push_back(row);
    }
    return Json{{"n", m.size()}, {"trunc", m.trunc()}, {"entries", rows}};
}

PolyMatrix polymatrix_from_json(const Json& j) {
    int n = j.at("n").get<int>();
    PolyMatrix m(n, j.at("trunc").get<int>());
    const auto& rows = j.at("entries");
    for (int i = 0; i < n; ++i)
        for (int jj = 0; jj < n; ++jj) m.set(i, jj, series_from_json(rows.at(i).at(jj)));
    return m;
}

Json to_json(const RatMatrix& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (int jj = 0; jj < m.cols(); ++jj) row.push_back(rat_json(m.at(i, jj)));
        rows.push_back(row);
    }
    return rows;
}

RatMatrix ratmatrix_from_json(const Json& j) {
    int rows = static_cast<int>(j.size());
    int cols = rows > 0 ? static_cast<int>(j.at(0).size()) : 0;
    RatMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int jj = 0; jj < cols; ++jj) m.at(i, jj) = rat_field(j.at(i).at(jj));
    return m;
}

Json to_json(const LinearSystem& s) {
    return Json{{"n", s.n}, {"p", s.p}, {"A", to_json(s.A)}};
}

LinearSystem linear_system_from_json(const Json& j) {
    int n = j.at("n").get<int>();
    int p = j.at("p").get<int>();
    PolyMatrix a = polymatrix_from_json(j.at("A"));
    return LinearSystem::normalized(n, p, a);
}

Json to_json(const GaugeTransform& t) {
    switch (t.kind) {
        case GaugeTransform::Kind::PolyRegular:
            return Json{{"kind", "poly_regular"}, {"P", to_json(t.P)}};
        case GaugeTransform::Kind::DiagMonomial: {
            Json e = Json::array();
            for (int k : t.exponents) e.push_back(k);
            return Json{{"kind", "diag_monomial"}, {"exponents", e}};
        }
        case GaugeTransform::Kind::Ramification:
            return Json{{"kind", "ramification"}, {"r", t.r}};
    }
    throw Error(ErrorKind::Internal, "unreachable");
}

GaugeTransform gauge_from_json(const Json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "poly_regular") return GaugeTransform::poly_regular(polymatrix_from_json(j.at("P")));
    if (kind == "diag_monomial") {
        std::vector<int> e;
        for (const auto& v : j.at("exponents")) e.push_back(v.get<int>());
        return GaugeTransform::diag_monomial(e);
    }
    if (kind == "ramification") return GaugeTransform::ramification(j.at("r").get<int>());
    throw Error(ErrorKind::ParseError, "unknown gauge kind '" + kind + "'");
}

Json to_json(const GaugeChain& c) {
    Json steps = Json::array();
    for (const auto& t : c) steps.push_back(to_json(t));
    return Json{{"steps", steps}};
}

GaugeChain gauge_chain_from_json(const Json& j) {
    GaugeChain c;
    for (const auto& s : j.at("steps")) c.push_back(gauge_from_json(s));
    return c;
}

namespace {

Json blocks_to_json(const std::vector<ExpBlock>& blocks) {
    Json out = Json::array();
    for (const auto& b : blocks)
        out.push_back(Json{{"complex", b.is_complex},
                           {"mult", b.mult},
                           {"re", to_json(b.c.re)},
                           {"im", to_json(b.c.im)}});
    return out;
}

std::pair<std::vector<ExpBlock>, BlockStructure> blocks_from_json(const Json& j) {
    std::vector<ExpBlock> blocks;
    BlockStructure bs;
    for (const auto& b : j) {
        ExpBlock eb;
        eb.is_complex = b.at("complex").get<bool>();
        eb.mult = b.at("mult").get<int>();
        eb.c = ComplexSeries(series_from_json(b.at("re")), series_from_json(b.at("im")));
        blocks.push_back(eb);
        bs.blocks.push_back({eb.is_complex, eb.mult});
    }
    return {blocks, bs};
}

} // namespace

Json to_json(const TRSLinearForm& f) {
    return Json{{"q", f.q}, {"blocks", blocks_to_json(f.dblocks)}, {"C", to_json(f.C)}, {"V", to_json(f.V)}};
}

TRSLinearForm trs_linear_form_from_json(const Json& j) {
    TRSLinearForm f;
    f.q = j.at("q").get<int>();
    auto [blocks, bs] = blocks_from_json(j.at("blocks"));
    f.dblocks = std::move(blocks);
    f.bs = std::move(bs);
    f.C = ratmatrix_from_json(j.at("C"));
    f.V = polymatrix_from_json(j.at("V"));
    return f;
}

Json to_json(const FormalCurve& c) {
    Json g = Json::array();
    for (const auto& s : c.gamma_y) g.push_back(to_json(s));
    return Json{{"gamma_y", g}};
}

FormalCurve curve_from_json(const Json& j) {
    std::vector<TruncatedSeries> g;
    for (const auto& s : j.at("gamma_y")) g.push_back(series_from_json(s));
    return FormalCurve(std::move(g));
}

Json to_json(const VectorFieldJet& v) {
    Json fy = Json::array();
    for (const auto& f : v.xi_y) fy.push_back(to_json(f));
    return Json{{"n", v.n}, {"xi_x", to_json(v.xi_x)}, {"xi_y", fy}};
}

VectorFieldJet vf_from_json(const Json& j) {
    MultiSeries fx = multiseries_from_json(j.at("xi_x"));
    std::vector<MultiSeries> fy;
    for (const auto& f : j.at("xi_y")) fy.push_back(multiseries_from_json(f));
    return VectorFieldJet(std::move(fx), std::move(fy));
}

Json to_json(const InvariantCouple& c) {
    return Json{{"vf", to_json(c.vf)}, {"curve", to_json(c.curve)}};
}

InvariantCouple couple_from_json(const Json& j) {
    InvariantCouple c;
    c.vf = vf_from_json(j.at("vf"));
    c.curve = curve_from_json(j.at("curve"));
    return c;
}

Json to_json(const CoordTransform& t) {
    switch (t.kind) {
        case CoordTransform::Kind::PolyTranslation: {
            Json b = Json::array();
            for (const auto& s : t.beta) b.push_back(to_json(s));
            return Json{{"kind", "translation"}, {"beta", b}};
        }
        case CoordTransform::Kind::PolyRegular:
            return Json{{"kind", "poly_regular"}, {"P", to_json(t.P)}};
        case CoordTransform::Kind::DiagMonomial:
            return Json{{"kind", "diag_monomial"}, {"k", t.k}};
        case CoordTransform::Kind::Ramification:
            return Json{{"kind", "ramification"}, {"r", t.r}};
    }
    throw Error(ErrorKind::Internal, "unreachable");
}

CoordTransform coord_transform_from_json(const Json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "translation") {
        std::vector<TruncatedSeries> b;
        for (const auto& s : j.at("beta")) b.push_back(series_from_json(s));
        return CoordTransform::translation(std::move(b));
    }
    if (kind == "poly_regular") return CoordTransform::poly_regular(polymatrix_from_json(j.at("P")));
    if (kind == "diag_monomial") return CoordTransform::diag_monomial(j.at("k").get<int>());
    if (kind == "ramification") return CoordTransform::ramification(j.at("r").get<int>());
    throw Error(ErrorKind::ParseError, "unknown transform kind '" + kind + "'");
}

Json to_json(const TransformChain& c) {
    Json steps = Json::array();
    for (const auto& t : c.steps) steps.push_back(to_json(t));
    return Json{{"steps", steps}};
}

TransformChain transform_chain_from_json(const Json& j) {
    TransformChain c;
    for (const auto& s : j.at("steps")) c.steps.push_back(coord_transform_from_json(s));
    return c;
}

Json to_json(const TRSVFForm& f) {
    Json v = Json::array();
    for (const auto& m : f.V) v.push_back(to_json(m));
    return Json{{"e", f.e},      {"unit", to_json(f.unit)}, {"q", f.q},
                {"N", f.N},      {"M", f.M},                {"blocks", blocks_to_json(f.dblocks)},
                {"C", to_json(f.C)}, {"V", v}};
}

TRSVFForm trs_vf_form_from_json(const Json& j) {
    TRSVFForm f;
    f.e = j.at("e").get<int>();
    f.unit = multiseries_from_json(j.at("unit"));
    f.q = j.at("q").get<int>();
    f.N = j.at("N").get<int>();
    f.M = j.at("M").get<int>();
    auto [blocks, bs] = blocks_from_json(j.at("blocks"));
    f.dblocks = std::move(blocks);
    f.bs = std::move(bs);
    f.C = ratmatrix_from_json(j.at("C"));
    for (const auto& m : j.at("V")) f.V.push_back(multiseries_from_json(m));
    return f;
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("json: ") + e.what());
    }
    return j;
}

void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::ParseError, "cannot write '" + path + "'");
    out << j.dump(1) << "\n";
}

} // namespace trs
