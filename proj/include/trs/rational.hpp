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

#ifndef TRS_RATIONAL_HPP
#define TRS_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

#include "trs/error.hpp"

namespace trs {

// Exact coefficient arithmetic.  cpp_rational keeps the fraction normalized
// (lowest terms, positive denominator), which is exactly the invariant we
// need; everything symbolic in this library runs on these.
using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational rat(long num, long den = 1) { return Rational(num, den); }

inline Integer rat_num(const Rational& r) { return boost::multiprecision::numerator(r); }
inline Integer rat_den(const Rational& r) { return boost::multiprecision::denominator(r); }

inline int rat_sign(const Rational& r) { return r.sign(); }

inline double rat_to_double(const Rational& r) { return r.convert_to<double>(); }

// Wire format is "p/q" ("p" when q == 1).
inline std::string rat_to_string(const Rational& r) {
    std::string s = rat_num(r).str();
    if (rat_den(r) != 1) s += "/" + rat_den(r).str();
    return s;
}

inline Rational rat_from_string(const std::string& s) {
    auto bad = [&]() { return Error(ErrorKind::ParseError, "bad rational '" + s + "'"); };
    if (s.empty()) throw bad();
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(Integer(s));
        Integer num(s.substr(0, slash));
        Integer den(s.substr(slash + 1));
        if (den == 0) throw bad();
        return Rational(num, den);
    } catch (const std::runtime_error&) {
        throw bad();
    }
}

// Floor of the exact quotient; used for integer-lattice tests.
inline Integer rat_floor(const Rational& r) {
    Integer q = rat_num(r) / rat_den(r);
    if (r < 0 && q * rat_den(r) != rat_num(r)) --q;
    return q;
}

inline Integer rat_ceil(const Rational& r) { return -rat_floor(-r); }

inline bool rat_is_integer(const Rational& r) { return rat_den(r) == 1; }

} // namespace trs

#endif
