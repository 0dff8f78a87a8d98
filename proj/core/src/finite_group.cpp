#include "padictiles/finite_group.hpp"

#include <algorithm>

namespace ptiles::finite {

void ProductGroup::validate() const {
  if (!is_prime_small(p)) throw std::invalid_argument("group: p must be prime");
  if (n < 1) throw std::invalid_argument("group: n must be >= 1");
  if (q != 1 && !is_prime_small(q)) throw std::invalid_argument("group: q must be 1 or prime");
  (void)order();  // overflow guard
}

void GroupSubset::validate() const {
  group.validate();
  long mp = group.mod_p();
  Elem prev{-1, -1};
  for (const Elem& e : elements) {
    if (e.first < 0 || e.first >= mp || e.second < 0 || e.second >= group.q)
      throw std::invalid_argument("subset element out of range");
    if (!(prev < e)) throw std::invalid_argument("subset elements must be sorted distinct");
    prev = e;
  }
}

namespace {

long elem_index(const ProductGroup& g, const Elem& e) { return e.first * g.q + e.second; }

Elem elem_add(const ProductGroup& g, const Elem& a, const Elem& b) {
  return {(a.first + b.first) % g.mod_p(), (a.second + b.second) % g.q};
}

Elem elem_sub(const ProductGroup& g, const Elem& a, const Elem& b) {
  long mp = g.mod_p();
  return {((a.first - b.first) % mp + mp) % mp, ((a.second - b.second) % g.q + g.q) % g.q};
}

}  // namespace

bool dft_vanishes(const GroupSubset& a, long xi, int eta) {
  const ProductGroup& g = a.group;
  long big_n = g.order();
  cyclo::RootSum s;
  s.order = big_n;
  for (const Elem& e : a.elements)
    s.add(xi * e.first % big_n * g.q % big_n + static_cast<long>(eta) * e.second % big_n * g.mod_p() % big_n, 1);
  return cyclo::is_vanishing(s);
}

DualZeroSet dft_zero_set(const GroupSubset& a) {
  a.validate();
  if (a.elements.empty()) throw std::invalid_argument("dft_zero_set: empty subset");
  DualZeroSet z;
  z.group = a.group;
  for (long xi = 0; xi < a.group.mod_p(); ++xi)
    for (int eta = 0; eta < a.group.q; ++eta) {
      if (xi == 0 && eta == 0) continue;
      if (dft_vanishes(a, xi, eta)) z.zeros.insert({xi, eta});
    }
  return z;
}

bool is_tiling_pair(const GroupSubset& a, const GroupSubset& t) {
  if (!(a.group == t.group)) throw std::invalid_argument("is_tiling_pair: group mismatch");
  long order = a.group.order();
  if (static_cast<long>(a.elements.size()) * static_cast<long>(t.elements.size()) != order)
    return false;
  std::vector<char> covered(order, 0);
  for (const Elem& x : a.elements)
    for (const Elem& y : t.elements) {
      long idx = elem_index(a.group, elem_add(a.group, x, y));
      if (covered[idx]) return false;
      covered[idx] = 1;
    }
  return true;
}

namespace {

struct CoverSearch {
  const GroupSubset& a;
  long order;
  long target_size;
  std::vector<char> covered;
  std::vector<Elem> chosen;
  std::vector<GroupSubset> results;
  long max_results;
  long nodes_left;
  bool exhaustive = true;

  CoverSearch(const GroupSubset& a_, long target, const SearchOptions& opt)
      : a(a_),
        order(a_.group.order()),
        target_size(target),
        covered(order, 0),
        max_results(opt.max_results),
        nodes_left(opt.node_budget) {}

  bool place(const Elem& t) {
    for (const Elem& x : a.elements) {
      long idx = elem_index(a.group, elem_add(a.group, x, t));
      if (covered[idx]) {
        // roll back the marks made so far in this call
        for (const Elem& y : a.elements) {
          if (y == x) break;
          covered[elem_index(a.group, elem_add(a.group, y, t))] = 0;
        }
        return false;
      }
      covered[idx] = 1;
    }
    chosen.push_back(t);
    return true;
  }

  void unplace(const Elem& t) {
    chosen.pop_back();
    for (const Elem& x : a.elements) covered[elem_index(a.group, elem_add(a.group, x, t))] = 0;
  }

  bool done() const {
    return max_results >= 0 && static_cast<long>(results.size()) >= max_results;
  }

  void run(long first_uncovered) {
    if (nodes_left == 0) {
      exhaustive = false;
      return;
    }
    if (nodes_left > 0) --nodes_left;
    while (first_uncovered < order && covered[first_uncovered]) ++first_uncovered;
    if (first_uncovered == order) {
      GroupSubset t;
      t.group = a.group;
      t.elements = chosen;
      std::sort(t.elements.begin(), t.elements.end());
      results.push_back(std::move(t));
      return;
    }
    if (static_cast<long>(chosen.size()) == target_size) return;
    Elem e{first_uncovered / a.group.q, static_cast<int>(first_uncovered % a.group.q)};
    std::vector<Elem> candidates;
    candidates.reserve(a.elements.size());
    for (const Elem& x : a.elements) candidates.push_back(elem_sub(a.group, e, x));
    std::sort(candidates.begin(), candidates.end());
    for (const Elem& t : candidates) {
      if (done()) return;
      if (!place(t)) continue;
      run(first_uncovered);
      unplace(t);
    }
  }
};

}  // namespace

SearchOutcome find_tiling_complements(const GroupSubset& a, const SearchOptions& opt) {
  a.validate();
  SearchOutcome out;
  if (a.elements.empty()) return out;
  long order = a.group.order();
  long size = static_cast<long>(a.elements.size());
  if (order % size != 0) return out;  // divisibility failure: verified empty
  CoverSearch search(a, order / size, opt);
  if (!search.place({0, 0})) throw std::logic_error("find_tiling_complements: duplicate elements");
  search.run(0);
  out.found = std::move(search.results);
  out.exhaustive = search.exhaustive;
  std::sort(out.found.begin(), out.found.end(),
            [](const GroupSubset& x, const GroupSubset& y) { return x.elements < y.elements; });
  return out;
}

bool is_spectral_pair(const GroupSubset& a, const GroupSubset& l) {
  if (!(a.group == l.group)) throw std::invalid_argument("is_spectral_pair: group mismatch");
  if (a.elements.empty()) throw std::invalid_argument("is_spectral_pair: empty subset");
  if (a.elements.size() != l.elements.size()) return false;
  if (l.elements.size() == 1) return true;
  DualZeroSet z = dft_zero_set(a);
  for (size_t i = 0; i < l.elements.size(); ++i)
    for (size_t j = i + 1; j < l.elements.size(); ++j)
      if (!z.zeros.count(elem_sub(a.group, l.elements[i], l.elements[j]))) return false;
  return true;
}

SearchOutcome find_spectra(const GroupSubset& a, const SearchOptions& opt) {
  a.validate();
  if (a.elements.empty()) throw std::invalid_argument("find_spectra: empty subset");
  SearchOutcome out;
  size_t need = a.elements.size() - 1;
  GroupSubset base;
  base.group = a.group;
  base.elements = {{0, 0}};
  if (need == 0) {
    out.found.push_back(base);
    return out;
  }
  DualZeroSet z = dft_zero_set(a);
  std::vector<Elem> candidates(z.zeros.begin(), z.zeros.end());
  std::vector<Elem> chosen = {{0, 0}};
  long nodes_left = opt.node_budget;

  std::function<void(size_t)> dfs = [&](size_t from) {
    if (opt.max_results >= 0 && static_cast<long>(out.found.size()) >= opt.max_results) return;
    if (nodes_left == 0) {
      out.exhaustive = false;
      return;
    }
    if (nodes_left > 0) --nodes_left;
    if (chosen.size() == need + 1) {
      GroupSubset l;
      l.group = a.group;
      l.elements = chosen;
      std::sort(l.elements.begin(), l.elements.end());
      out.found.push_back(std::move(l));
      return;
    }
    size_t still_needed = need + 1 - chosen.size();
    for (size_t i = from; i + still_needed <= candidates.size() + 0; ++i) {
      const Elem& cand = candidates[i];
      bool ok = true;
      for (size_t k = 1; k < chosen.size() && ok; ++k)
        if (!z.zeros.count(elem_sub(a.group, cand, chosen[k]))) ok = false;
      if (!ok) continue;
      chosen.push_back(cand);
      dfs(i + 1);
      chosen.pop_back();
    }
  };
  dfs(0);
  std::sort(out.found.begin(), out.found.end(),
            [](const GroupSubset& x, const GroupSubset& y) { return x.elements < y.elements; });
  return out;
}

GroupSubset to_cyclic_subset(const tree::ResidueSet& c) {
  GroupSubset a;
  a.group = ProductGroup{c.prime, c.level, 1};
  a.elements.reserve(c.members.size());
  for (long m : c.members) a.elements.push_back({m, 0});
  return a;
}

tree::ResidueSet to_residue_set(const GroupSubset& cyclic) {
  if (cyclic.group.q != 1) throw std::invalid_argument("to_residue_set: group is not cyclic");
  tree::ResidueSet c;
  c.prime = cyclic.group.p;
  c.level = cyclic.group.n;
  for (const Elem& e : cyclic.elements) c.members.push_back(e.first);
  return c;
}

std::optional<tree::ResidueSet> first_cyclic_complement(const tree::ResidueSet& c) {
  SearchOptions opt;
  opt.max_results = 1;
  SearchOutcome r = find_tiling_complements(to_cyclic_subset(c), opt);
  if (r.found.empty()) return std::nullopt;
  return to_residue_set(r.found[0]);
}

namespace {

// #A must be p^t or p^t * q; returns t and whether the q factor is present.
std::pair<int, bool> split_cardinality(long card, int p, int q) {
  int t = 0;
  while (card % p == 0) {
    card /= p;
    ++t;
  }
  if (card == 1) return {t, false};
  if (card == q) return {t, true};
  throw std::logic_error("tile cardinality is not of the form p^t or p^t*q");
}

std::vector<tree::ResidueSet> slices_by_second(const GroupSubset& a) {
  std::vector<tree::ResidueSet> slices(a.group.q);
  for (int j = 0; j < a.group.q; ++j) {
    slices[j].prime = a.group.p;
    slices[j].level = a.group.n;
  }
  for (const Elem& e : a.elements) slices[e.second].members.push_back(e.first);
  return slices;
}

tree::ResidueSet require_tiles_cyclic(const tree::ResidueSet& c, const char* what) {
  auto t = first_cyclic_complement(c);
  if (!t) throw std::logic_error(std::string(what) + ": witness does not tile Z/p^nZ");
  return *t;
}

std::optional<tree::ResidueSet> common_cyclic_complement(const std::vector<tree::ResidueSet>& slices) {
  const tree::ResidueSet* first = nullptr;
  for (const auto& s : slices)
    if (!s.members.empty()) {
      first = &s;
      break;
    }
  if (!first) return std::nullopt;
  SearchOutcome all = find_tiling_complements(to_cyclic_subset(*first));
  for (const GroupSubset& t : all.found) {
    bool ok = true;
    for (const auto& s : slices)
      if (!s.members.empty() && !is_tiling_pair(to_cyclic_subset(s), t)) {
        ok = false;
        break;
      }
    if (ok) return to_residue_set(t);
  }
  return std::nullopt;
}

}  // namespace

TileClassification classify_tile_pq(const GroupSubset& a) {
  a.validate();
  const ProductGroup& g = a.group;
  if (g.q == 1 || g.q == g.p)
    throw std::invalid_argument("classify_tile_pq: needs q prime distinct from p");
  if (find_tiling_complements(a, {.max_results = 1}).found.empty())
    throw std::invalid_argument("classify_tile_pq: A is not a tile");

  auto [t, has_q] = split_cardinality(static_cast<long>(a.elements.size()), g.p, g.q);
  (void)t;
  TileClassification out;
  out.slices = slices_by_second(a);

  if (!has_q) {
    // #A = p^t: slices are disjoint and their union tiles Z/p^nZ
    out.tag = TileClassification::Case::DisjointUnion;
    std::set<long> seen;
    for (const auto& s : out.slices)
      for (long m : s.members)
        if (!seen.insert(m).second)
          throw std::logic_error("classify_tile_pq: slices are not pairwise disjoint");
    out.union_set.prime = g.p;
    out.union_set.level = g.n;
    out.union_set.members.assign(seen.begin(), seen.end());
    auto verdict = tree::is_p_homogeneous(out.union_set);
    if (!verdict.homogeneous) throw std::logic_error("classify_tile_pq: union is not p-homogeneous");
    out.union_branch_levels = verdict.branch_levels;
    out.complement = require_tiles_cyclic(out.union_set, "classify_tile_pq union");
    return out;
  }

  // #A = p^t * q: every slice is p-homogeneous with a common branched level set
  out.tag = TileClassification::Case::CommonComplement;
  std::vector<int> common;
  for (int j = 0; j < g.q; ++j) {
    if (out.slices[j].members.empty())
      throw std::logic_error("classify_tile_pq: empty slice in the p^t*q case");
    auto verdict = tree::is_p_homogeneous(out.slices[j]);
    if (!verdict.homogeneous)
      throw std::logic_error("classify_tile_pq: slice " + std::to_string(j) + " not homogeneous");
    if (j == 0)
      common = verdict.branch_levels;
    else if (common != verdict.branch_levels)
      throw std::logic_error("classify_tile_pq: slices do not share a branched level set");
    out.slice_branch_levels.push_back(verdict.branch_levels);
  }
  out.common_complement = common_cyclic_complement(out.slices);
  if (!out.common_complement)
    throw std::logic_error("classify_tile_pq: no common complement for the slices");
  return out;
}

TileClassification classify_tile_pp(const GroupSubset& a) {
  a.validate();
  const ProductGroup& g = a.group;
  if (g.q != g.p) throw std::invalid_argument("classify_tile_pp: needs q == p");
  if (find_tiling_complements(a, {.max_results = 1}).found.empty())
    throw std::invalid_argument("classify_tile_pp: A is not a tile");

  auto [t, has_q] = split_cardinality(static_cast<long>(a.elements.size()), g.p, 1);
  if (has_q) throw std::logic_error("classify_tile_pp: cardinality not a power of p");

  DualZeroSet z = dft_zero_set(a);
  TileClassification out;
  out.slices = slices_by_second(a);
  long pw = 1;
  for (int i = 0; i < g.n; ++i) {
    if (z.zeros.count({pw, 0})) out.zero_index_set.push_back(i);
    pw *= g.p;
  }
  int zi = static_cast<int>(out.zero_index_set.size());

  if (zi == t) {
    out.tag = TileClassification::Case::DisjointUnion;
    std::set<long> proj;
    for (const Elem& e : a.elements) proj.insert(e.first);
    if (static_cast<long>(proj.size()) != static_cast<long>(a.elements.size()))
      throw std::logic_error("classify_tile_pp: pi_1 is not injective in case (1)");
    out.union_set.prime = g.p;
    out.union_set.level = g.n;
    out.union_set.members.assign(proj.begin(), proj.end());
    auto verdict = tree::is_p_homogeneous(out.union_set);
    if (!verdict.homogeneous) throw std::logic_error("classify_tile_pp: pi_1(A) not homogeneous");
    out.union_branch_levels = verdict.branch_levels;
    out.complement = require_tiles_cyclic(out.union_set, "classify_tile_pp pi_1(A)");
    return out;
  }
  if (zi != t - 1)
    throw std::logic_error("classify_tile_pp: #I_A is neither t nor t-1");

  // find the minimal (j0, b0), j0 outside I_A, with (p^{j0}, b0) in Z_A
  int j0 = -1, b0 = -1;
  for (int j = 0; j < g.n && j0 < 0; ++j) {
    if (std::find(out.zero_index_set.begin(), out.zero_index_set.end(), j) !=
        out.zero_index_set.end())
      continue;
    long pj = checked_pow_ll(g.p, j);
    for (int b = 1; b < g.p; ++b)
      if (z.zeros.count({pj, b})) {
        j0 = j;
        b0 = b;
        break;
      }
  }

  if (j0 < 0) {
    // case (2): every slice is p-homogeneous with #A_i = p^{t-1}
    out.tag = TileClassification::Case::CommonComplement;
    long expected = checked_pow_ll(g.p, t - 1);
    for (int i = 0; i < g.p; ++i) {
      if (static_cast<long>(out.slices[i].members.size()) != expected)
        throw std::logic_error("classify_tile_pp: slice size is not p^{t-1} in case (2)");
      auto verdict = tree::is_p_homogeneous(out.slices[i]);
      if (!verdict.homogeneous)
        throw std::logic_error("classify_tile_pp: slice " + std::to_string(i) +
                               " not homogeneous in case (2)");
      out.slice_branch_levels.push_back(verdict.branch_levels);
    }
    out.common_complement = common_cyclic_complement(out.slices);
    return out;
  }

  // case (3): the shifted set { x + b0*y*p^{n-j0-1} } is p-homogeneous of size p^t
  out.tag = TileClassification::Case::Shift;
  out.j0 = j0;
  out.b0 = b0;
  long mp = g.mod_p();
  long shift = checked_pow_ll(g.p, g.n - j0 - 1);
  std::set<long> shifted;
  for (const Elem& e : a.elements)
    shifted.insert((e.first + static_cast<long>(b0) * e.second % mp * shift) % mp);
  if (static_cast<long>(shifted.size()) != static_cast<long>(a.elements.size()))
    throw std::logic_error("classify_tile_pp: shift map is not injective in case (3)");
  out.shifted_set.prime = g.p;
  out.shifted_set.level = g.n;
  out.shifted_set.members.assign(shifted.begin(), shifted.end());
  auto verdict = tree::is_p_homogeneous(out.shifted_set);
  if (!verdict.homogeneous)
    throw std::logic_error("classify_tile_pp: shifted set not homogeneous in case (3)");
  out.union_branch_levels = verdict.branch_levels;
  out.complement = require_tiles_cyclic(out.shifted_set, "classify_tile_pp shifted set");
  return out;
}

}  // namespace ptiles::finite
