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

#ifndef TRS_ERROR_HPP
#define TRS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace trs {

enum class ErrorKind {
    UnitRequired,
    EmptyPrecision,
    InsufficientPrecision,
    NotDivisible,
    ShapeError,
    Inadmissible,
    NotRegular,
    Obstruction,
    Undecidable,
    FuelExhausted,
    DegenerateCurve,
    HypothesisViolated,
    DomainError,
    SeedTooCoarse,
    InsufficientWindow,
    TangentUndefined,
    ParseError,
    Internal,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, std::string msg, long detail = -1)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + msg),
          kind_(kind), detail_(detail) {}

    ErrorKind kind() const { return kind_; }
    // Extra payload: the obstructed order for Obstruction, the tangent level
    // for TangentUndefined, etc.  -1 when unused.
    long detail() const { return detail_; }

  private:
    ErrorKind kind_;
    long detail_;
};

inline const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::UnitRequired: return "UnitRequired";
        case ErrorKind::EmptyPrecision: return "EmptyPrecision";
        case ErrorKind::InsufficientPrecision: return "InsufficientPrecision";
        case ErrorKind::NotDivisible: return "NotDivisible";
        case ErrorKind::ShapeError: return "ShapeError";
        case ErrorKind::Inadmissible: return "Inadmissible";
        case ErrorKind::NotRegular: return "NotRegular";
        case ErrorKind::Obstruction: return "Obstruction";
        case ErrorKind::Undecidable: return "Undecidable";
        case ErrorKind::FuelExhausted: return "FuelExhausted";
        case ErrorKind::DegenerateCurve: return "DegenerateCurve";
        case ErrorKind::HypothesisViolated: return "HypothesisViolated";
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::SeedTooCoarse: return "SeedTooCoarse";
        case ErrorKind::InsufficientWindow: return "InsufficientWindow";
        case ErrorKind::TangentUndefined: return "TangentUndefined";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::Internal: return "Internal";
    }
    return "Unknown";
}

} // namespace trs

#endif
