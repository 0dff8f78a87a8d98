#pragma once

#include <optional>
#include <set>
#include <vector>

#include "padictiles/homog_tree.hpp"

namespace ptiles::finite {

/// Z/p^nZ x Z/qZ; q == 1 degenerates to the cyclic group Z/p^nZ.
struct ProductGroup {
  int p = 2;
  int n = 1;
  int q = 1;

  long mod_p() const { return checked_pow_ll(p, n); }
  long order() const { return mod_p() * q; }
  void validate() const;

  friend bool operator==(const ProductGroup& a, const ProductGroup& b) {
    return a.p == b.p && a.n == b.n && a.q == b.q;
  }
};

using Elem = std::pair<long, int>;  // (a in [0, p^n), b in [0, q))

struct GroupSubset {
  ProductGroup group;
  std::vector<Elem> elements;  // sorted distinct

  void validate() const;
};

struct DualZeroSet {
  ProductGroup group;
  std::set<Elem> zeros;
};

/// Exact vanishing test of 1^_A at the dual point (xi, eta).
bool dft_vanishes(const GroupSubset& a, long xi, int eta);

/// Z_A = { (xi,eta) != 0 : 1^_A(xi,eta) = 0 }, computed exactly.
DualZeroSet dft_zero_set(const GroupSubset& a);

/// True iff every group element is a + t for exactly one (a,t) in A x T.
bool is_tiling_pair(const GroupSubset& a, const GroupSubset& t);

struct SearchOptions {
  long max_results = -1;  // -1: all
  long node_budget = -1;  // -1: unlimited backtracking nodes
};

struct SearchOutcome {
  std::vector<GroupSubset> found;  // deterministic lexicographic order
  bool exhaustive = true;          // false when the node budget was hit
};

/// All tiling complements of A that contain the identity, by backtracking on
/// the minimal uncovered element. Empty when #A does not divide the order.
SearchOutcome find_tiling_complements(const GroupSubset& a, const SearchOptions& opt = {});

/// Spectral pair test: #L == #A and pairwise differences land in Z_A.
bool is_spectral_pair(const GroupSubset& a, const GroupSubset& l);

/// All spectra containing 0, as cliques in the difference graph of Z_A.
SearchOutcome find_spectra(const GroupSubset& a, const SearchOptions& opt = {});

/// Outcome of the structure theorems for tiles of Z/p^nZ x Z/qZ (q != p) and
/// Z/p^nZ x Z/pZ. Exactly one alternative applies; every carried witness
/// re-verifies through the public checkers.
struct TileClassification {
  enum class Case { DisjointUnion, CommonComplement, Shift };
  Case tag = Case::DisjointUnion;

  std::vector<int> zero_index_set;  // I_A = { i : (p^i, 0) in Z_A } (q == p only)
  std::vector<tree::ResidueSet> slices;
  std::vector<std::vector<int>> slice_branch_levels;

  tree::ResidueSet union_set;            // DisjointUnion: union of slices / pi_1(A)
  std::vector<int> union_branch_levels;  // homogeneity of union_set or shifted_set
  tree::ResidueSet complement;           // tiling complement witness in Z/p^nZ

  std::optional<tree::ResidueSet> common_complement;  // CommonComplement witness

  int j0 = -1, b0 = -1;          // Shift parameters
  tree::ResidueSet shifted_set;  // { x + b0*y*p^{n-j0-1} } when tag == Shift
};

/// Theorem for q a prime distinct from p: #A = p^t gives disjoint slices whose
/// union tiles Z/p^nZ; #A = p^t*q gives slices sharing a branched level set.
TileClassification classify_tile_pq(const GroupSubset& a);

/// Theorem for q == p, driven by I_A; cases DisjointUnion / CommonComplement /
/// Shift match the three alternatives of the classification.
TileClassification classify_tile_pp(const GroupSubset& a);

// Cyclic-group helpers used by the classifiers and the census.
GroupSubset to_cyclic_subset(const tree::ResidueSet& c);
tree::ResidueSet to_residue_set(const GroupSubset& cyclic);
std::optional<tree::ResidueSet> first_cyclic_complement(const tree::ResidueSet& c);

}  // namespace ptiles::finite
