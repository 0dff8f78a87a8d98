#include "padictiles/homog_tree.hpp"

#include <algorithm>
#include <sstream>

namespace ptiles::tree {

void ResidueSet::validate() const {
  if (level < 0) throw std::invalid_argument("ResidueSet: negative level");
  long mod = modulus();
  long prev = -1;
  for (long m : members) {
    if (m < 0 || m >= mod) throw std::invalid_argument("ResidueSet: member out of range");
    if (m <= prev) throw std::invalid_argument("ResidueSet: members must be sorted distinct");
    prev = m;
  }
}

LevelTree build_tree(const ResidueSet& c) {
  c.validate();
  if (c.members.empty()) throw std::invalid_argument("build_tree: empty residue set");
  LevelTree t;
  t.prime = c.prime;
  t.depth = c.level;
  t.levels.resize(c.level + 1);
  long mod = 1;
  for (int g = 0; g <= c.level; ++g) {
    std::set<long> verts;
    for (long m : c.members) verts.insert(m % mod);
    t.levels[g].assign(verts.begin(), verts.end());
    if (g < c.level) mod *= c.prime;
  }
  return t;
}

std::vector<long> children(const LevelTree& t, int level, long vertex) {
  std::vector<long> out;
  long mod = 1;
  for (int g = 0; g < level; ++g) mod *= t.prime;
  for (long v : t.levels[level + 1])
    if (v % mod == vertex % mod) out.push_back(v);
  return out;
}

std::vector<std::vector<int>> branching_profile(const LevelTree& t) {
  std::vector<std::vector<int>> profile(t.depth);
  long mod = 1;
  for (int g = 0; g < t.depth; ++g) {
    profile[g].reserve(t.levels[g].size());
    for (long v : t.levels[g]) {
      int count = 0;
      for (long w : t.levels[g + 1])
        if (w % mod == v) ++count;
      profile[g].push_back(count);
    }
    mod *= t.prime;
  }
  return profile;
}

HomogeneityVerdict is_p_homogeneous(const ResidueSet& c) {
  LevelTree t = build_tree(c);
  auto profile = branching_profile(t);
  HomogeneityVerdict verdict;
  for (int g = 0; g < t.depth; ++g) {
    int want = profile[g].empty() ? 1 : profile[g][0];
    if (want != 1 && want != c.prime) {
      verdict.offending_level = g;
      verdict.offending_vertex = t.levels[g][0];
      return verdict;
    }
    for (size_t i = 0; i < profile[g].size(); ++i) {
      if (profile[g][i] != want) {
        verdict.offending_level = g;
        verdict.offending_vertex = t.levels[g][i];
        return verdict;
      }
    }
    if (want == c.prime) verdict.branch_levels.push_back(g);
  }
  verdict.homogeneous = true;
  return verdict;
}

std::vector<int> homogeneity_from_zeros(int prime, int level, const ResidueMultiset& c,
                                        const std::set<int>& exponents) {
  if (c.empty()) throw std::invalid_argument("homogeneity_from_zeros: empty multiset");
  long card = 0;
  for (const auto& [value, mult] : c) {
    if (mult <= 0) throw std::invalid_argument("homogeneity_from_zeros: nonpositive multiplicity");
    (void)value;
    card += mult;
  }
  int k = static_cast<int>(exponents.size());
  long pk = checked_pow_ll(prime, k);
  if (card > pk)
    throw std::invalid_argument("homogeneity_from_zeros: #C exceeds p^k");
  for (int j : exponents) {
    if (j < 1 || j > level) throw std::invalid_argument("homogeneity_from_zeros: exponent out of [1,n]");
    // sum over C of e^{2 pi i c / p^j} must vanish
    std::vector<std::pair<UnitPhase, Int>> phases;
    phases.reserve(c.size());
    for (const auto& [value, mult] : c)
      phases.emplace_back(frac_part(PAdicScalar(prime, value, j)), Int(mult));
    if (!cyclo::is_vanishing(cyclo::phases_to_rootsum(phases)))
      throw std::invalid_argument("homogeneity_from_zeros: sum at exponent " + std::to_string(j) +
                                  " does not vanish");
  }
  if (card != pk)
    throw std::logic_error("homogeneity_from_zeros: zero conditions hold but #C != p^k");

  ResidueSet as_set;
  as_set.prime = prime;
  as_set.level = level;
  for (const auto& [value, mult] : c) {
    if (mult != 1)
      throw std::logic_error("homogeneity_from_zeros: #C == p^k forces multiplicity one");
    as_set.members.push_back(value);
  }
  std::vector<int> branch;
  branch.reserve(k);
  for (int j : exponents) branch.push_back(j - 1);

  HomogeneityVerdict direct = is_p_homogeneous(as_set);
  if (!direct.homogeneous || direct.branch_levels != branch)
    throw std::logic_error("homogeneity_from_zeros: direct homogeneity check disagrees");
  return branch;
}

std::string tree_to_dot(const LevelTree& t, const std::vector<int>* branch_levels) {
  auto is_branch = [&](int g) {
    return branch_levels && std::find(branch_levels->begin(), branch_levels->end(), g) !=
                                branch_levels->end();
  };
  auto label = [&](int g, long v) {
    if (g == 0) return std::string("r");
    std::string s;
    long x = v;
    for (int i = 0; i < g; ++i) {
      s += static_cast<char>('0' + x % t.prime);
      x /= t.prime;
    }
    return s;
  };
  std::ostringstream os;
  os << "digraph tree {\n  rankdir=TB;\n  node [shape=circle, fontsize=10];\n";
  for (int g = 0; g <= t.depth; ++g)
    for (long v : t.levels[g]) {
      os << "  v" << g << "_" << v << " [label=\"" << label(g, v) << "\"";
      if (g < t.depth && is_branch(g)) os << ", style=filled, fillcolor=lightblue";
      os << "];\n";
    }
  for (int g = 0; g < t.depth; ++g)
    for (long v : t.levels[g])
      for (long w : children(t, g, v)) os << "  v" << g << "_" << v << " -> v" << g + 1 << "_" << w << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace ptiles::tree
