#pragma once

#include <cstdint>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

namespace recordlab {

/// Arbitrary-precision nonnegative integer used for every enumeration result.
using ExactCount = boost::multiprecision::cpp_int;

/// Reduced arbitrary-precision fraction with positive denominator.
using ExactRational = boost::multiprecision::cpp_rational;

inline ExactCount factorial(unsigned n) {
  ExactCount r = 1;
  for (unsigned i = 2; i <= n; ++i) r *= i;
  return r;
}

inline ExactCount binomial(long n, long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  ExactCount r = 1;
  for (long i = 1; i <= k; ++i) {
    r *= (n - k + i);
    r /= i;
  }
  return r;
}

inline ExactCount power(ExactCount base, unsigned e) {
  ExactCount r = 1;
  while (e) {
    if (e & 1u) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

inline double to_double(const ExactCount& x) { return x.convert_to<double>(); }
inline double to_double(const ExactRational& x) { return x.convert_to<double>(); }

}  // namespace recordlab
