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

#ifndef TRS_JSON_IO_HPP
#define TRS_JSON_IO_HPP

#include <json.hpp>

#include "trs/dynamics.hpp"
#include "trs/linear_system.hpp"
#include "trs/vf.hpp"

namespace trs {

// Deterministic key order keeps reports byte-identical across runs.
using Json = nlohmann::ordered_json;

Json to_json(const TruncatedSeries& s);
TruncatedSeries series_from_json(const Json& j);

Json to_json(const MultiSeries& m);
MultiSeries multiseries_from_json(const Json& j);

Json to_json(const PolyMatrix& m);
PolyMatrix polymatrix_from_json(const Json& j);

Json to_json(const RatMatrix& m);
RatMatrix ratmatrix_from_json(const Json& j);

Json to_json(const LinearSystem& s);
LinearSystem linear_system_from_json(const Json& j);

Json to_json(const GaugeTransform& t);
GaugeTransform gauge_from_json(const Json& j);
Json to_json(const GaugeChain& c);
GaugeChain gauge_chain_from_json(const Json& j);

Json to_json(const TRSLinearForm& f);
TRSLinearForm trs_linear_form_from_json(const Json& j);

Json to_json(const FormalCurve& c);
FormalCurve curve_from_json(const Json& j);

Json to_json(const VectorFieldJet& v);
VectorFieldJet vf_from_json(const Json& j);

Json to_json(const InvariantCouple& c);
InvariantCouple couple_from_json(const Json& j);

Json to_json(const CoordTransform& t);
CoordTransform coord_transform_from_json(const Json& j);
Json to_json(const TransformChain& c);
TransformChain transform_chain_from_json(const Json& j);

Json to_json(const TRSVFForm& f);
TRSVFForm trs_vf_form_from_json(const Json& j);

Json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

} // namespace trs

#endif
