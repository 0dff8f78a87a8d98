#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "padictiles/cyclotomic.hpp"

namespace ptiles::tree {

/// Subset of Z/p^level Z, members sorted strictly increasing.
struct ResidueSet {
  int prime = 2;
  int level = 1;
  std::vector<long> members;

  long modulus() const { return static_cast<long>(checked_pow_ll(prime, level)); }
  void validate() const;
};

/// The tree T_C: vertex set at depth g is C mod p^g, edges by congruence.
struct LevelTree {
  int prime = 2;
  int depth = 0;
  std::vector<std::vector<long>> levels;  // levels[g] sorted; levels[0] == {0}
};

LevelTree build_tree(const ResidueSet& c);

/// Child residues (mod p^{g+1}) of a vertex at level g.
std::vector<long> children(const LevelTree& t, int level, long vertex);

/// For each level g in [0, depth), the child counts of the level-g vertices,
/// aligned with t.levels[g].
std::vector<std::vector<int>> branching_profile(const LevelTree& t);

struct HomogeneityVerdict {
  bool homogeneous = false;
  std::vector<int> branch_levels;  // the set I when homogeneous
  int offending_level = -1;        // witness when not
  long offending_vertex = -1;
};

/// T_I-form test: every level uniformly branches fully (level in I) or singly.
HomogeneityVerdict is_p_homogeneous(const ResidueSet& c);

/// Multiset of residues, value -> multiplicity >= 1.
using ResidueMultiset = std::map<long, long>;

/// Zero-based criterion: given #C <= p^k and vanishing sums at exponents
/// j_1 < ... < j_k, asserts #C == p^k and returns I = {j_t - 1}. Throws
/// std::invalid_argument on a precondition failure and std::logic_error if the
/// direct homogeneity check disagrees.
std::vector<int> homogeneity_from_zeros(int prime, int level, const ResidueMultiset& c,
                                        const std::set<int>& exponents);

/// Deterministic Graphviz text; vertices labeled by digit strings, branch
/// levels highlighted when given.
std::string tree_to_dot(const LevelTree& t, const std::vector<int>* branch_levels = nullptr);

}  // namespace ptiles::tree
