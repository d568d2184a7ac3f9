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

#ifndef TRS_REDUCE_LINEAR_HPP
#define TRS_REDUCE_LINEAR_HPP

#include "trs/linear_system.hpp"

namespace trs {

// Newton polygon slopes of det(lambda I - A(x)) in lambda; each slope is the
// x-adic growth order of a family of eigenvalue branches.
struct PolygonSlope {
    long num;
    long den;  // reduced, den >= 1
    int count; // number of branches on this edge
};
std::vector<PolygonSlope> newton_polygon_slopes(const LinearSystem& s);

} // namespace trs

#endif
