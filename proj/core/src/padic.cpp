#include "padictiles/padic.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace ptiles {

namespace {

void require_same_prime(const PAdicScalar& a, const PAdicScalar& b) {
  if (a.prime() != b.prime())
    throw std::invalid_argument("prime mismatch: p=" + std::to_string(a.prime()) + " vs p=" +
                                std::to_string(b.prime()));
}

}  // namespace

PAdicScalar::PAdicScalar(int prime, Int num, int den_exp)
    : prime_(prime), den_exp_(den_exp), num_(std::move(num)) {
  if (prime < 2 || !is_prime_small(prime)) throw std::invalid_argument("prime required, got " + std::to_string(prime));
  if (den_exp_ < 0) {  // fold p^{-den_exp} into the numerator
    num_ *= pow_int(prime_, -den_exp_);
    den_exp_ = 0;
  }
  normalize();
}

void PAdicScalar::normalize() {
  if (num_ == 0) {
    den_exp_ = 0;
    return;
  }
  while (den_exp_ > 0 && num_ % prime_ == 0) {
    num_ /= prime_;
    --den_exp_;
  }
}

std::optional<int> PAdicScalar::valuation() const {
  if (num_ == 0) return std::nullopt;
  if (den_exp_ > 0) return -den_exp_;
  int v = 0;
  Int k = num_;
  while (k % prime_ == 0) {
    k /= prime_;
    ++v;
  }
  return v;
}

PAdicScalar PAdicScalar::operator-() const {
  PAdicScalar r = *this;
  r.num_ = -r.num_;
  return r;
}

PAdicScalar& PAdicScalar::operator+=(const PAdicScalar& o) {
  require_same_prime(*this, o);
  int l = std::max(den_exp_, o.den_exp_);
  num_ = num_ * pow_int(prime_, l - den_exp_) + o.num_ * pow_int(prime_, l - o.den_exp_);
  den_exp_ = l;
  normalize();
  return *this;
}

PAdicScalar& PAdicScalar::operator-=(const PAdicScalar& o) { return *this += -o; }

PAdicScalar& PAdicScalar::operator*=(const PAdicScalar& o) {
  require_same_prime(*this, o);
  num_ *= o.num_;
  den_exp_ += o.den_exp_;
  normalize();
  return *this;
}

PAdicScalar operator+(PAdicScalar a, const PAdicScalar& b) { return a += b; }
PAdicScalar operator-(PAdicScalar a, const PAdicScalar& b) { return a -= b; }
PAdicScalar operator*(PAdicScalar a, const PAdicScalar& b) { return a *= b; }

PAdicScalar PAdicScalar::times_pow_p(int e) const {
  if (is_zero()) return *this;
  if (e >= den_exp_) return PAdicScalar(prime_, num_ * pow_int(prime_, e - den_exp_), 0);
  return PAdicScalar(prime_, num_, den_exp_ - e);
}

int PAdicScalar::digit_at(int j) const {
  // digit of p^j in the expansion of num / p^l == digit of p^{j+l} in num (num may be negative;
  // digits are those of the canonical representative mod p^{j+l+1}).
  int shift = j + den_exp_;
  if (shift < 0) return 0;
  Int m = pow_int(prime_, shift + 1);
  Int r = num_ % m;
  if (r < 0) r += m;
  r /= pow_int(prime_, shift);
  return static_cast<int>(r);
}

bool operator<(const PAdicScalar& a, const PAdicScalar& b) {
  if (a.prime_ != b.prime_) return a.prime_ < b.prime_;
  // compare a.num / p^a.l with b.num / p^b.l by cross multiplication
  return a.num_ * pow_int(a.prime_, b.den_exp_) < b.num_ * pow_int(a.prime_, a.den_exp_);
}

std::string PAdicScalar::str() const {
  std::ostringstream os;
  os << num_ << "/" << prime_ << "^" << den_exp_;
  return os.str();
}

PAdicScalar PAdicScalar::parse(int prime, std::string_view text) {
  auto slash = text.find('/');
  auto parse_big = [](std::string_view s) {
    if (s.empty()) throw std::invalid_argument("empty integer in scalar literal");
    return Int(std::string(s));
  };
  if (slash == std::string_view::npos) return PAdicScalar(prime, parse_big(text), 0);
  Int num = parse_big(text.substr(0, slash));
  std::string_view den = text.substr(slash + 1);
  auto caret = den.find('^');
  if (caret == std::string_view::npos) throw std::invalid_argument("scalar literal needs k/p^l form: " + std::string(text));
  long base = std::stol(std::string(den.substr(0, caret)));
  long exp = std::stol(std::string(den.substr(caret + 1)));
  if (base != prime) throw std::invalid_argument("scalar literal prime " + std::to_string(base) +
                                                 " differs from context prime " + std::to_string(prime));
  if (exp < 0) throw std::invalid_argument("negative denominator exponent in scalar literal");
  return PAdicScalar(prime, std::move(num), static_cast<int>(exp));
}

std::optional<int> valuation(const PAdicScalar& x) { return x.valuation(); }

PAdicScalar digits_below(const PAdicScalar& x, int pos) {
  if (x.is_zero()) return x;
  int l = x.den_exp();
  int e = l + pos;  // keep num mod p^e
  if (e <= 0) return PAdicScalar::zero(x.prime());
  Int m = pow_int(x.prime(), e);
  Int r = x.num() % m;
  if (r < 0) r += m;
  return PAdicScalar(x.prime(), r, l);
}

UnitPhase::UnitPhase(Rat v) : v_(std::move(v)) {
  // reduce into [0,1)
  Int n = boost::multiprecision::numerator(v_);
  Int d = boost::multiprecision::denominator(v_);
  Int q = n / d;
  if (n % d != 0 && n < 0) --q;  // floor division
  v_ -= Rat(q);
}

UnitPhase frac_part(const PAdicScalar& x) {
  PAdicScalar f = digits_below(x, 0);
  return UnitPhase(f.to_rational());
}

UnitPhase character(const PAdicScalar& xi, const PAdicScalar& x) {
  if (xi.prime() != x.prime()) throw std::invalid_argument("character: prime mismatch");
  return frac_part(xi * x);
}

bool Ball::contains(const PAdicScalar& x) const {
  auto v = (x - center).valuation();
  return !v || *v >= -radius_exp;
}

bool Ball::contains(const Ball& b) const {
  return b.radius_exp <= radius_exp && contains(b.center);
}

std::vector<Ball> Ball::split() const {
  std::vector<Ball> out;
  out.reserve(prime());
  for (int d = 0; d < prime(); ++d) {
    PAdicScalar offset(prime(), d, radius_exp);  // d * p^{-radius_exp}
    out.emplace_back(center + offset, radius_exp - 1);
  }
  return out;
}

std::string Ball::str() const {
  std::ostringstream os;
  os << "B(" << center.str() << "; " << prime() << "^" << radius_exp << ")";
  return os.str();
}

Ball Ball::parse(int prime, std::string_view text) {
  if (text.size() < 4 || text.substr(0, 2) != "B(" || text.back() != ')')
    throw std::invalid_argument("ball literal needs B(center; p^n) form: " + std::string(text));
  std::string_view inner = text.substr(2, text.size() - 3);
  auto semi = inner.find(';');
  if (semi == std::string_view::npos) throw std::invalid_argument("ball literal needs ';': " + std::string(text));
  PAdicScalar c = PAdicScalar::parse(prime, inner.substr(0, semi));
  std::string_view rad = inner.substr(semi + 1);
  while (!rad.empty() && rad.front() == ' ') rad.remove_prefix(1);
  auto caret = rad.find('^');
  if (caret == std::string_view::npos) throw std::invalid_argument("ball radius needs p^n form");
  long base = std::stol(std::string(rad.substr(0, caret)));
  long exp = std::stol(std::string(rad.substr(caret + 1)));
  if (base != prime) throw std::invalid_argument("ball radius prime mismatch");
  return Ball(c, static_cast<int>(exp));
}

BallIntegral ball_character_integral(const Ball& ball, const PAdicScalar& xi) {
  if (ball.prime() != xi.prime()) throw std::invalid_argument("ball_character_integral: prime mismatch");
  auto v = xi.valuation();
  // nonzero iff |xi|_p <= p^{-radius_exp}, i.e. v(xi) >= radius_exp
  if (v && *v < ball.radius_exp) return BallIntegral{UnitPhase(), Rat(0)};
  return BallIntegral{character(xi, ball.center), pow_p(ball.prime(), ball.radius_exp)};
}

std::set<int> admissible_orders(const std::vector<PAdicScalar>& points) {
  std::set<int> orders;
  for (size_t i = 0; i < points.size(); ++i)
    for (size_t j = i + 1; j < points.size(); ++j) {
      auto v = (points[i] - points[j]).valuation();
      if (v) orders.insert(*v);
    }
  if (orders.empty()) throw std::invalid_argument("admissible_orders: need at least two distinct points");
  return orders;
}

}  // namespace ptiles
