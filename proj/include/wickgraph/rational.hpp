#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace wickgraph {

// Exact integer/rational arithmetic for combinatorial factors. Coefficients
// of the input polynomial stay double; everything a theorem guarantees to be
// exact (C(Gamma), 1/n!, their products) is carried in these types and only
// converted to double at the final multiply.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt factorial(long long k) {
  BigInt r = 1;
  for (long long i = 2; i <= k; ++i) r *= i;
  return r;
}

// (2l-1)!! for an even set size 2l; double_factorial_odd(0) = 1.
inline BigInt double_factorial_odd(long long two_l) {
  BigInt r = 1;
  for (long long i = two_l - 1; i >= 1; i -= 2) r *= i;
  return r;
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(const BigInt& i) { return i.convert_to<double>(); }

// Canonical "p/q" rendering, q > 0.
inline std::string fraction_string(const Rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

}  // namespace wickgraph
