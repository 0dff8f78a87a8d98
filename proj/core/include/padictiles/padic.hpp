#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "padictiles/numeric.hpp"

namespace ptiles {

/// An element of Z[1/p] with exact arithmetic: value = num / p^den_exp.
/// Canonical form: num == 0 implies den_exp == 0; den_exp > 0 implies p does
/// not divide num. The prime travels with the value and mixing primes in a
/// binary operation is an error, never a coercion.
class PAdicScalar {
 public:
  PAdicScalar() : prime_(2), den_exp_(0), num_(0) {}
  PAdicScalar(int prime, Int num, int den_exp = 0);

  static PAdicScalar zero(int prime) { return PAdicScalar(prime, 0, 0); }

  int prime() const { return prime_; }
  const Int& num() const { return num_; }
  int den_exp() const { return den_exp_; }

  bool is_zero() const { return num_ == 0; }

  /// p-valuation; nullopt encodes +infinity (only for x == 0).
  std::optional<int> valuation() const;

  Rat to_rational() const { return Rat(num_, pow_int(prime_, den_exp_)); }

  PAdicScalar operator-() const;
  PAdicScalar& operator+=(const PAdicScalar& o);
  PAdicScalar& operator-=(const PAdicScalar& o);
  PAdicScalar& operator*=(const PAdicScalar& o);

  /// Multiply by p^e (e of either sign).
  PAdicScalar times_pow_p(int e) const;

  /// Digit of the Hensel expansion at position j (coefficient of p^j).
  int digit_at(int j) const;

  std::string str() const;                                     // "k/p^l"
  static PAdicScalar parse(int prime, std::string_view text);  // accepts "k" or "k/p^l"

  friend bool operator==(const PAdicScalar& a, const PAdicScalar& b) {
    return a.prime_ == b.prime_ && a.den_exp_ == b.den_exp_ && a.num_ == b.num_;
  }
  friend bool operator!=(const PAdicScalar& a, const PAdicScalar& b) { return !(a == b); }
  // Order by rational value; used only to keep containers and output deterministic.
  friend bool operator<(const PAdicScalar& a, const PAdicScalar& b);

 private:
  void normalize();
  int prime_;
  int den_exp_;
  Int num_;
};

PAdicScalar operator+(PAdicScalar a, const PAdicScalar& b);
PAdicScalar operator-(PAdicScalar a, const PAdicScalar& b);
PAdicScalar operator*(PAdicScalar a, const PAdicScalar& b);

std::optional<int> valuation(const PAdicScalar& x);

/// Zero out all digits at positions >= pos, keeping the canonical
/// representative of x + p^pos Z_p.
PAdicScalar digits_below(const PAdicScalar& x, int pos);

/// An exact rational q in [0,1) denoting e^{2*pi*i*q}.
class UnitPhase {
 public:
  UnitPhase() : v_(0) {}
  explicit UnitPhase(Rat v);

  const Rat& value() const { return v_; }
  bool is_zero() const { return v_ == 0; }

  UnitPhase operator+(const UnitPhase& o) const { return UnitPhase(v_ + o.v_); }
  UnitPhase operator-() const { return UnitPhase(-v_); }
  UnitPhase scaled(const Int& k) const { return UnitPhase(v_ * Rat(k)); }

  friend bool operator==(const UnitPhase& a, const UnitPhase& b) { return a.v_ == b.v_; }
  friend bool operator<(const UnitPhase& a, const UnitPhase& b) { return a.v_ < b.v_; }

 private:
  Rat v_;
};

/// Fractional part of the Hensel expansion, as a phase: {x} in [0,1).
UnitPhase frac_part(const PAdicScalar& x);

/// chi_xi(x) = e^{2*pi*i*{xi*x}}. Throws on prime mismatch.
UnitPhase character(const PAdicScalar& xi, const PAdicScalar& x);

/// B(center, p^radius_exp) = center + p^{-radius_exp} Z_p, center canonical
/// (digits at positions >= -radius_exp are zero).
struct Ball {
  PAdicScalar center;
  int radius_exp = 0;

  Ball() = default;
  Ball(PAdicScalar c, int r) : center(digits_below(c, -r)), radius_exp(r) {}

  int prime() const { return center.prime(); }
  bool contains(const PAdicScalar& x) const;
  bool contains(const Ball& b) const;
  Rat haar_measure() const { return pow_p(prime(), radius_exp); }

  /// The p sub-balls of radius p^{radius_exp-1}, in digit order.
  std::vector<Ball> split() const;

  std::string str() const;  // "B(center; p^n)"
  static Ball parse(int prime, std::string_view text);

  friend bool operator==(const Ball& a, const Ball& b) {
    return a.radius_exp == b.radius_exp && a.center == b.center;
  }
  friend bool operator<(const Ball& a, const Ball& b) {
    if (a.radius_exp != b.radius_exp) return a.radius_exp < b.radius_exp;
    return a.center < b.center;
  }
};

/// Exact value of int_B chi(xi x) dx: magnitude * e^{2 pi i phase}, with
/// magnitude = p^{radius_exp} when |xi|_p <= p^{-radius_exp} and 0 otherwise.
struct BallIntegral {
  UnitPhase phase;
  Rat magnitude;  // 0 encodes the exact zero integral
  bool is_zero() const { return magnitude == 0; }
};

BallIntegral ball_character_integral(const Ball& ball, const PAdicScalar& xi);

/// {v_p(x-y) : x != y in points}. Throws if fewer than two distinct points.
std::set<int> admissible_orders(const std::vector<PAdicScalar>& points);

}  // namespace ptiles
