#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "padictiles/padic.hpp"

namespace ptiles::cyclo {

/// Integer combination of N-th roots of unity: sum_j coeffs[j] * e^{2 pi i j / N}.
/// Supported orders are p^n and p^n*q (p, q distinct primes); zero entries are omitted.
struct RootSum {
  long order = 1;
  std::map<long, Int> coeffs;

  void add(long index, const Int& c);
};

/// N = p^n * q with q == 1 (prime power) or a distinct prime to the first power.
struct OrderFactors {
  long p = 2;
  int n = 0;
  long q = 1;
};

/// Throws std::invalid_argument for orders with more than two prime factors or
/// with both prime exponents above one.
OrderFactors factor_order(long order);

/// Coefficients of the cyclotomic polynomial Phi_order, low degree first. Memoized.
const std::vector<Int>& cyclotomic_poly(long order);

/// Exact test: true iff the complex sum is 0, via polynomial remainder mod Phi_N.
bool is_vanishing(const RootSum& s);

/// Substitute index j -> u*j mod N for a unit u; preserves vanishing both ways.
RootSum rotate(const RootSum& s, long u);

/// Decomposition of a nonnegative vanishing prime-power sum into p-cycles
/// {j, j+p^{n-1}, ..., j+(p-1)p^{n-1}}, greedy on the minimal remaining index.
struct CycleDecomposition {
  bool ok = false;
  std::vector<std::vector<long>> cycles;  // each sorted; multiset, re-sums to the input
  std::string reason;
};

CycleDecomposition p_cycle_decompose(const RootSum& s);

/// Aggregate weighted phases into a RootSum over the smallest common order.
RootSum phases_to_rootsum(const std::vector<std::pair<UnitPhase, Int>>& weighted);

/// The p points {base, base+1/p, ..., base+(p-1)/p}; pairwise differences have
/// valuation exactly -1 and the character sum over the cycle vanishes.
struct PCycle {
  PAdicScalar base;

  std::vector<PAdicScalar> members() const;
  bool valid() const;  // pairwise |c-c'|_p == p
};

}  // namespace ptiles::cyclo
