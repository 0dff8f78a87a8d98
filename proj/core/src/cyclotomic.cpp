#include "padictiles/cyclotomic.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>

namespace ptiles::cyclo {

void RootSum::add(long index, const Int& c) {
  if (order <= 0) throw std::invalid_argument("RootSum: order must be positive");
  long j = index % order;
  if (j < 0) j += order;
  auto it = coeffs.find(j);
  if (it == coeffs.end()) {
    if (c != 0) coeffs.emplace(j, c);
    return;
  }
  it->second += c;
  if (it->second == 0) coeffs.erase(it);
}

OrderFactors factor_order(long order) {
  if (order <= 0) throw std::invalid_argument("order must be positive");
  OrderFactors f;
  long m = order;
  std::vector<std::pair<long, int>> primes;
  for (long d = 2; d * d <= m; ++d) {
    if (m % d == 0) {
      int e = 0;
      while (m % d == 0) {
        m /= d;
        ++e;
      }
      primes.emplace_back(d, e);
    }
  }
  if (m > 1) primes.emplace_back(m, 1);
  if (primes.size() > 2)
    throw std::invalid_argument("unsupported order " + std::to_string(order) +
                                ": more than two prime factors");
  if (primes.empty()) {  // order == 1
    f.p = 2;
    f.n = 0;
    f.q = 1;
    return f;
  }
  if (primes.size() == 1) {
    f.p = primes[0].first;
    f.n = primes[0].second;
    f.q = 1;
    return f;
  }
  // two distinct primes: one exponent must be 1
  if (primes[0].second != 1 && primes[1].second != 1)
    throw std::invalid_argument("unsupported order " + std::to_string(order) +
                                ": not of the form p^n*q");
  if (primes[0].second == 1 && primes[1].second != 1) std::swap(primes[0], primes[1]);
  f.p = primes[0].first;
  f.n = primes[0].second;
  f.q = primes[1].first;
  return f;
}

namespace {

// exact division of polynomials over Z: num / den with den monic; remainder must be zero
std::vector<Int> poly_divide_exact(std::vector<Int> num, const std::vector<Int>& den) {
  int dn = static_cast<int>(num.size()) - 1;
  int dd = static_cast<int>(den.size()) - 1;
  std::vector<Int> quot(dn - dd + 1, 0);
  for (int i = dn; i >= dd; --i) {
    if (num[i] == 0) continue;
    Int c = num[i];
    quot[i - dd] = c;
    for (int k = 0; k <= dd; ++k) num[i - dd + k] -= c * den[k];
  }
  for (const Int& c : num)
    if (c != 0) throw std::logic_error("poly_divide_exact: nonzero remainder");
  return quot;
}

std::vector<Int> compute_cyclotomic(long n, std::map<long, std::vector<Int>>& cache);

const std::vector<Int>& cached_cyclotomic(long n, std::map<long, std::vector<Int>>& cache) {
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_cyclotomic(n, cache)).first;
  return it->second;
}

std::vector<Int> compute_cyclotomic(long n, std::map<long, std::vector<Int>>& cache) {
  // Phi_n = (x^n - 1) / prod_{d | n, d < n} Phi_d
  std::vector<Int> poly(n + 1, 0);
  poly[0] = -1;
  poly[n] = 1;
  for (long d = 1; d < n; ++d)
    if (n % d == 0) poly = poly_divide_exact(std::move(poly), cached_cyclotomic(d, cache));
  return poly;
}

std::mutex g_phi_mutex;
std::map<long, std::vector<Int>> g_phi_cache;

}  // namespace

const std::vector<Int>& cyclotomic_poly(long order) {
  factor_order(order);  // reject unsupported orders up front
  std::lock_guard<std::mutex> lock(g_phi_mutex);
  return cached_cyclotomic(order, g_phi_cache);
}

bool is_vanishing(const RootSum& s) {
  const std::vector<Int>& phi = cyclotomic_poly(s.order);
  if (s.coeffs.empty()) return true;
  std::vector<Int> a(s.order, 0);
  for (const auto& [j, c] : s.coeffs) {
    if (j < 0 || j >= s.order) throw std::invalid_argument("RootSum index out of range");
    a[j] = c;
  }
  // remainder of a(x) modulo the monic phi(x)
  int dd = static_cast<int>(phi.size()) - 1;
  for (int i = static_cast<int>(a.size()) - 1; i >= dd; --i) {
    if (a[i] == 0) continue;
    Int c = std::move(a[i]);
    a[i] = 0;
    for (int k = 0; k < dd; ++k) a[i - dd + k] -= c * phi[k];
  }
  return std::all_of(a.begin(), a.end(), [](const Int& c) { return c == 0; });
}

RootSum rotate(const RootSum& s, long u) {
  long uu = u % s.order;
  if (uu < 0) uu += s.order;
  if (std::gcd(uu, s.order) != 1)
    throw std::invalid_argument("rotate: " + std::to_string(u) + " is not a unit mod " +
                                std::to_string(s.order));
  RootSum out;
  out.order = s.order;
  for (const auto& [j, c] : s.coeffs) out.add(j * uu % s.order, c);
  return out;
}

CycleDecomposition p_cycle_decompose(const RootSum& s) {
  CycleDecomposition out;
  OrderFactors f = factor_order(s.order);
  if (f.q != 1) {
    out.reason = "order is not a prime power";
    return out;
  }
  for (const auto& [j, c] : s.coeffs)
    if (c < 0) {
      out.reason = "negative coefficient at index " + std::to_string(j);
      return out;
    }
  if (!is_vanishing(s)) {
    out.reason = "sum does not vanish";
    return out;
  }
  long step = s.order / f.p;  // p^{n-1}
  std::map<long, Int> rem = s.coeffs;
  while (!rem.empty()) {
    long j = rem.begin()->first;
    long base = j % step;
    std::vector<long> cycle;
    cycle.reserve(f.p);
    for (long sidx = 0; sidx < f.p; ++sidx) cycle.push_back(base + sidx * step);
    for (long idx : cycle) {
      auto it = rem.find(idx);
      if (it == rem.end() || it->second <= 0) {
        out.cycles.clear();
        out.reason = "peel step would drive index " + std::to_string(idx) + " negative";
        return out;
      }
      if (--it->second == 0) rem.erase(it);
    }
    out.cycles.push_back(std::move(cycle));
  }
  out.ok = true;
  return out;
}

RootSum phases_to_rootsum(const std::vector<std::pair<UnitPhase, Int>>& weighted) {
  Int order = 1;
  for (const auto& [phase, w] : weighted) {
    (void)w;
    Int d = boost::multiprecision::denominator(phase.value());
    order = order / boost::multiprecision::gcd(order, d) * d;
  }
  if (order > 1000000) throw std::invalid_argument("phases_to_rootsum: common order too large");
  long n = static_cast<long>(order);
  factor_order(n);  // throws when the common order needs more than two primes
  RootSum out;
  out.order = n;
  for (const auto& [phase, w] : weighted) {
    Int num = boost::multiprecision::numerator(phase.value());
    Int den = boost::multiprecision::denominator(phase.value());
    out.add(static_cast<long>(num * (order / den)), w);
  }
  return out;
}

std::vector<PAdicScalar> PCycle::members() const {
  std::vector<PAdicScalar> out;
  int p = base.prime();
  for (int s = 0; s < p; ++s) out.push_back(base + PAdicScalar(p, s, 1));
  return out;
}

bool PCycle::valid() const {
  auto pts = members();
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j) {
      auto v = (pts[i] - pts[j]).valuation();
      if (!v || *v != -1) return false;
    }
  return true;
}

}  // namespace ptiles::cyclo
