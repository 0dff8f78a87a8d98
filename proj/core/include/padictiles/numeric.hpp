#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ptiles {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int pow_int(long base, int exp) {
  if (exp < 0) throw std::invalid_argument("pow_int: negative exponent");
  Int r = 1, b = base;
  while (exp > 0) {
    if (exp & 1) r *= b;
    b *= b;
    exp >>= 1;
  }
  return r;
}

// p^e as an exact rational, e of either sign.
inline Rat pow_p(int p, int e) {
  if (e >= 0) return Rat(pow_int(p, e));
  return Rat(Int(1), pow_int(p, -e));
}

// long-valued power with overflow guard; used for group orders and ball counts.
inline long long checked_pow_ll(long long base, int exp) {
  long long r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > (1LL << 56) / base) throw std::overflow_error("checked_pow_ll: order too large");
    r *= base;
  }
  return r;
}

inline bool is_prime_small(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace ptiles
