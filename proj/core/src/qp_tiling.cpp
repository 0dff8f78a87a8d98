#include "padictiles/qp_tiling.hpp"

#include <algorithm>
#include <functional>

namespace ptiles::qp {

namespace {

constexpr long kEnumerationCap = 1 << 21;

long count_cells(int p, int levels) {
  long n = 1;
  for (int i = 0; i < levels; ++i) {
    n *= p;
    if (n > kEnumerationCap) throw std::invalid_argument("enumeration too large for the desk model");
  }
  return n;
}

Int lcm_int(const Int& a, const Int& b) { return a / boost::multiprecision::gcd(a, b) * b; }

// exact zero test of a rational-weighted phase sum
bool phase_sum_vanishes(const std::vector<std::pair<UnitPhase, Rat>>& terms) {
  Int denom = 1;
  for (const auto& [phase, w] : terms) {
    (void)phase;
    denom = lcm_int(denom, boost::multiprecision::denominator(w));
  }
  std::vector<std::pair<UnitPhase, Int>> scaled;
  scaled.reserve(terms.size());
  for (const auto& [phase, w] : terms)
    scaled.emplace_back(phase, boost::multiprecision::numerator(w) *
                                   (denom / boost::multiprecision::denominator(w)));
  return cyclo::is_vanishing(cyclo::phases_to_rootsum(scaled));
}

}  // namespace

void CompactOpenSet::validate() const {
  if (residues.empty()) throw std::invalid_argument("compact open set: no residues");
  for (size_t i = 0; i < residues.size(); ++i) {
    if (residues[i].prime() != prime) throw std::invalid_argument("compact open set: prime mismatch");
    if (!(digits_below(residues[i], scale) == residues[i]))
      throw std::invalid_argument("compact open set: residue not canonical mod p^scale");
    if (i > 0 && !(residues[i - 1] < residues[i]))
      throw std::invalid_argument("compact open set: residues not sorted distinct");
  }
}

Rat CompactOpenSet::haar_measure() const {
  return Rat(static_cast<long>(residues.size())) * pow_p(prime, -scale);
}

int CompactOpenSet::bounding_exp() const {
  int e = -scale;
  for (const PAdicScalar& c : residues) {
    auto v = c.valuation();
    if (v) e = std::max(e, -*v);
  }
  return e;
}

CompactOpenSet make_compact_open(int prime, int scale, std::vector<PAdicScalar> residues) {
  CompactOpenSet om;
  om.prime = prime;
  om.scale = scale;
  for (PAdicScalar& c : residues) c = digits_below(c, scale);
  std::sort(residues.begin(), residues.end());
  residues.erase(std::unique(residues.begin(), residues.end()), residues.end());
  om.residues = std::move(residues);
  om.validate();
  return om;
}

CompactOpenSet refine(const CompactOpenSet& om, int new_scale) {
  om.validate();
  if (new_scale < om.scale) throw std::invalid_argument("refine: new scale must not be coarser");
  count_cells(om.prime, new_scale - om.scale);
  std::vector<PAdicScalar> out = om.residues;
  for (int level = om.scale; level < new_scale; ++level) {
    std::vector<PAdicScalar> next;
    next.reserve(out.size() * om.prime);
    for (const PAdicScalar& c : out)
      for (int d = 0; d < om.prime; ++d) next.push_back(c + PAdicScalar(om.prime, d, -level));
    out = std::move(next);
  }
  return make_compact_open(om.prime, new_scale, std::move(out));
}

void DiscreteMeasure::validate() const {
  if (window.prime() != prime) throw std::invalid_argument("measure: window prime mismatch");
  for (size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].first.prime() != prime) throw std::invalid_argument("measure: atom prime mismatch");
    if (atoms[i].second == 0) throw std::invalid_argument("measure: zero weight atom");
    if (!window.contains(atoms[i].first))
      throw std::invalid_argument("measure: atom outside the window");
    if (i > 0 && !(atoms[i - 1].first < atoms[i].first))
      throw std::invalid_argument("measure: atoms not sorted distinct");
  }
}

bool DiscreteMeasure::unit_weights() const {
  return std::all_of(atoms.begin(), atoms.end(), [](const auto& a) { return a.second == 1; });
}

Int DiscreteMeasure::total_mass() const {
  Int m = 0;
  for (const auto& [x, w] : atoms) {
    (void)x;
    m += w;
  }
  return m;
}

std::optional<int> DiscreteMeasure::separation_exp() const {
  if (atoms.size() < 2) return std::nullopt;
  std::optional<int> n_nu;
  for (size_t i = 0; i < atoms.size(); ++i) {
    std::optional<int> best;
    for (size_t j = 0; j < atoms.size(); ++j) {
      if (i == j) continue;
      auto v = (atoms[i].first - atoms[j].first).valuation();
      if (!v) throw std::logic_error("separation_exp: duplicate atoms");
      if (!best || *v > *best) best = *v;
    }
    if (!n_nu || *best < *n_nu) n_nu = best;
  }
  return n_nu;
}

DiscreteMeasure make_measure(int prime, Ball window, std::vector<std::pair<PAdicScalar, Int>> atoms) {
  DiscreteMeasure nu;
  nu.prime = prime;
  nu.window = std::move(window);
  std::sort(atoms.begin(), atoms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  nu.atoms = std::move(atoms);
  nu.validate();
  return nu;
}

void TestFunction::validate() const {
  if (constancy_exp > support_exp)
    throw std::invalid_argument("test function: constancy exceeds support scale");
  for (const auto& [center, value] : values) {
    (void)value;
    if (center.prime() != prime) throw std::invalid_argument("test function: prime mismatch");
    if (!(digits_below(center, -constancy_exp) == center))
      throw std::invalid_argument("test function: cell center not canonical");
    auto v = center.valuation();
    if (v && *v < -support_exp)
      throw std::invalid_argument("test function: cell center outside the support ball");
  }
}

Rat TestFunction::value_at(const PAdicScalar& x) const {
  auto v = x.valuation();
  if (v && *v < -support_exp) return Rat(0);
  auto it = values.find(digits_below(x, -constancy_exp));
  return it == values.end() ? Rat(0) : it->second;
}

Rat TestFunction::integral() const {
  Rat s = 0;
  for (const auto& [center, value] : values) {
    (void)center;
    s += value;
  }
  return s * pow_p(prime, constancy_exp);
}

TestFunction indicator(const CompactOpenSet& om, const Rat& height) {
  om.validate();
  TestFunction f;
  f.prime = om.prime;
  f.constancy_exp = -om.scale;
  f.support_exp = om.bounding_exp();
  for (const PAdicScalar& c : om.residues) f.values[c] = height;
  f.validate();
  return f;
}

std::vector<PAdicScalar> enumerate_cell_centers(const Ball& ball, int cell_exp) {
  if (cell_exp >= ball.radius_exp) return {digits_below(ball.center, -cell_exp)};
  count_cells(ball.prime(), ball.radius_exp - cell_exp);
  std::vector<PAdicScalar> centers = {ball.center};
  for (int pos = -ball.radius_exp; pos < -cell_exp; ++pos) {
    std::vector<PAdicScalar> next;
    next.reserve(centers.size() * ball.prime());
    for (const PAdicScalar& c : centers)
      for (int d = 0; d < ball.prime(); ++d) next.push_back(c + PAdicScalar(ball.prime(), d, -pos));
    centers = std::move(next);
  }
  return centers;
}

bool margin_ok(const TestFunction& f, const DiscreteMeasure& nu, const Ball& eval) {
  Ball reach(eval.center, std::max(eval.radius_exp, f.support_exp));
  return nu.window.contains(reach);
}

std::map<PAdicScalar, Rat> convolve_window(const TestFunction& f, const DiscreteMeasure& nu,
                                           const Ball& eval) {
  f.validate();
  nu.validate();
  if (f.prime != nu.prime) throw std::invalid_argument("convolve: prime mismatch");
  if (!margin_ok(f, nu, eval))
    throw std::invalid_argument("convolve: window too small to certify the evaluation ball");
  std::map<PAdicScalar, Rat> out;
  for (const PAdicScalar& x : enumerate_cell_centers(eval, f.constancy_exp)) {
    Rat v = 0;
    for (const auto& [t, w] : nu.atoms) v += Rat(w) * f.value_at(x - t);
    out.emplace(x, std::move(v));
  }
  return out;
}

bool is_function_tiling(const TestFunction& f, const DiscreteMeasure& nu, const Rat& level,
                        const Ball& eval) {
  auto cells = convolve_window(f, nu, eval);
  return std::all_of(cells.begin(), cells.end(),
                     [&](const auto& kv) { return kv.second == level; });
}

BallCountReport measure_ball_counts(const DiscreteMeasure& nu, int scale) {
  nu.validate();
  if (scale > nu.window.radius_exp)
    throw std::invalid_argument("measure_ball_counts: scale exceeds the window");
  BallCountReport report;
  report.scale = scale;
  for (const PAdicScalar& c : enumerate_cell_centers(nu.window, scale)) report.counts[c] = 0;
  for (const auto& [x, w] : nu.atoms) {
    auto it = report.counts.find(digits_below(x, -scale));
    if (it == report.counts.end()) throw std::logic_error("measure_ball_counts: atom escaped window");
    it->second += w;
  }
  report.uniform = true;
  for (const auto& [c, m] : report.counts) {
    (void)c;
    if (m != report.counts.begin()->second) {
      report.uniform = false;
      break;
    }
  }
  return report;
}

namespace {

// Lowest scale worth scanning for uniform counts: below it some ball is forced
// empty while another is not, or atoms separate into unequal singletons.
int scan_floor(const DiscreteMeasure& nu) {
  int w = nu.window.radius_exp;
  int lo = w;
  size_t m = nu.atoms.size();
  if (m >= 1) {
    int need = 0;
    long cap = 1;
    while (cap < static_cast<long>(m)) {
      cap *= nu.prime;
      ++need;
    }
    lo = std::min(lo, w - need);
  }
  if (m >= 2) {
    int vmin = 0;
    bool have = false;
    for (size_t i = 0; i < m; ++i)
      for (size_t j = i + 1; j < m; ++j) {
        auto v = (nu.atoms[i].first - nu.atoms[j].first).valuation();
        if (v && (!have || *v < vmin)) {
          vmin = *v;
          have = true;
        }
      }
    if (have) lo = std::min(lo, vmin);
  }
  return lo - 1;
}

}  // namespace

DensityResult density(const DiscreteMeasure& nu) {
  nu.validate();
  DensityResult result;
  int w = nu.window.radius_exp;
  for (int n = scan_floor(nu); n <= w; ++n) {
    BallCountReport counts = measure_ball_counts(nu, n);
    if (!counts.uniform) continue;
    result.certified = true;
    result.certified_scale = n;
    result.density = Rat(counts.counts.begin()->second) * pow_p(nu.prime, -n);
    return result;
  }
  result.reason = "density not certified: no uniform scale within the window";
  return result;
}

ConstancyResult constancy_parameter(const TestFunction& f) {
  f.validate();
  ConstancyResult out;
  out.integral = f.integral();

  // recompute the constancy exponent from the value table
  std::map<PAdicScalar, Rat> table;
  for (const auto& [c, v] : f.values)
    if (v != 0) table[c] = v;
  int s = f.constancy_exp;
  while (s < f.support_exp && !table.empty()) {
    std::map<PAdicScalar, Rat> parents;
    bool constant = true;
    for (const auto& [c, v] : table) {
      PAdicScalar parent = digits_below(c, -(s + 1));
      auto it = parents.find(parent);
      if (it == parents.end())
        parents.emplace(parent, v);
      else if (it->second != v)
        constant = false;
      if (!constant) break;
    }
    if (constant) {
      // every parent with a nonzero child must have all p children at that value
      for (const auto& [parent, v] : parents) {
        long hits = 0;
        for (int d = 0; d < f.prime && constant; ++d) {
          auto it = table.find(parent + PAdicScalar(f.prime, d, s + 1));
          if (it != table.end()) {
            ++hits;
            if (it->second != v) constant = false;
          }
        }
        if (hits != f.prime) constant = false;
        if (!constant) break;
      }
    }
    if (!constant) break;
    std::map<PAdicScalar, Rat> next;
    for (auto& [parent, v] : parents) next.emplace(parent, v);
    table = std::move(next);
    ++s;
  }
  out.constancy_exp = table.empty() ? f.support_exp : s;

  if (out.integral != 0) {
    // n_f: smallest n with f^ nonvanishing on all of B(0, p^{-n}); f^ is
    // constant on balls of radius p^{-support_exp}, so finitely many tests.
    for (int n = f.constancy_exp; n <= f.support_exp; ++n) {
      bool nonvanishing = true;
      Ball dual(PAdicScalar::zero(f.prime), -n);
      for (const PAdicScalar& xi : enumerate_cell_centers(dual, -f.support_exp)) {
        std::vector<std::pair<UnitPhase, Rat>> terms;
        for (const auto& [c, v] : f.values)
          if (v != 0) terms.emplace_back(frac_part(-(c * xi)), v);
        if (terms.empty() || phase_sum_vanishes(terms)) {
          nonvanishing = false;
          break;
        }
      }
      if (nonvanishing) {
        out.n_f = n;
        break;
      }
    }
    if (!out.n_f) throw std::logic_error("constancy_parameter: n_f not found below support scale");
  }
  return out;
}

ZeroScanResult measure_zero_scan(const DiscreteMeasure& nu, int max_abs_exp) {
  nu.validate();
  if (nu.atoms.empty()) throw std::invalid_argument("measure_zero_scan: empty measure");
  if (!nu.window.contains(PAdicScalar::zero(nu.prime)))
    throw std::invalid_argument("measure_zero_scan: window must contain 0");
  int w = nu.window.radius_exp;
  if (max_abs_exp > w + 1)
    throw std::invalid_argument(
        "measure_zero_scan: window insufficiency, radii beyond p^(W+1) are not certifiable");
  ZeroScanResult out;
  out.scanned_from = -w;
  out.scanned_to = max_abs_exp;
  out.separation_exp = nu.separation_exp();
  out.below_range_vanishes = (nu.total_mass() == 0);
  for (int r = -w; r <= max_abs_exp; ++r) {
    PAdicScalar xi(nu.prime, 1, r);  // representative of S(0, p^r); Lemma: one point decides
    std::vector<std::pair<UnitPhase, Int>> phases;
    phases.reserve(nu.atoms.size());
    for (const auto& [x, weight] : nu.atoms) phases.emplace_back(character(xi, x), weight);
    if (cyclo::is_vanishing(cyclo::phases_to_rootsum(phases))) {
      if (!out.separation_exp || r > *out.separation_exp + 1)
        throw std::logic_error("measure_zero_scan: vanishing sphere above the n_nu + 1 bound");
      out.vanishing_radii.push_back(r);
    }
  }
  return out;
}

UniformPartitionResult uniform_partition_check(const DiscreteMeasure& t) {
  t.validate();
  if (!t.unit_weights())
    throw std::invalid_argument("uniform_partition_check: unit weights required");
  UniformPartitionResult out;
  int w = t.window.radius_exp;
  for (int n = scan_floor(t); n <= w - 1; ++n) {
    BallCountReport counts = measure_ball_counts(t, n);
    if (counts.uniform) {
      out.uniform = true;
      out.scale = n;
      out.count = counts.counts.begin()->second;
      return out;
    }
    CountWitness witness;
    witness.scale = n;
    bool first = true;
    for (const auto& [c, m] : counts.counts) {
      if (first) {
        witness.ball_a = c;
        witness.count_a = m;
        first = false;
      } else if (m != witness.count_a) {
        witness.ball_b = c;
        witness.count_b = m;
        break;
      }
    }
    out.witnesses.push_back(std::move(witness));
  }
  return out;
}

TestFunction uniform_partition_construct(const DiscreteMeasure& t, int scale) {
  BallCountReport counts = measure_ball_counts(t, scale);
  if (!counts.uniform || counts.counts.begin()->second < 1)
    throw std::invalid_argument("uniform_partition_construct: counts not uniform at this scale");
  Int c = counts.counts.begin()->second;
  TestFunction f;
  f.prime = t.prime;
  f.constancy_exp = scale;
  f.support_exp = scale;
  f.values[PAdicScalar::zero(t.prime)] = Rat(Int(1), c);
  f.validate();
  if (!is_function_tiling(f, t, Rat(1), t.window))
    throw std::logic_error("uniform_partition_construct: constructed function fails to tile");
  return f;
}

ComplementOrdersReport tiling_complement_orders_check(const CompactOpenSet& om,
                                                      const DiscreteMeasure& t) {
  om.validate();
  t.validate();
  if (!t.unit_weights())
    throw std::invalid_argument("tiling_complement_orders_check: unit weights required");
  ComplementOrdersReport report;
  int w = t.window.radius_exp;

  std::set<int> omega_orders;
  if (om.residues.size() >= 2) omega_orders = admissible_orders(om.residues);
  for (int v = -w; v < om.scale; ++v)
    if (!omega_orders.count(v)) report.expected_orders.push_back(v);

  if (t.atoms.size() >= 2) {
    std::vector<PAdicScalar> pts;
    pts.reserve(t.atoms.size());
    for (const auto& [x, weight] : t.atoms) {
      (void)weight;
      pts.push_back(x);
    }
    for (int v : admissible_orders(pts)) report.observed_orders.push_back(v);
  }
  report.orders_match = (report.observed_orders == report.expected_orders);
  report.cover_ok = is_function_tiling(indicator(om), t, Rat(1), t.window);
  report.pass = report.orders_match && report.cover_ok;
  return report;
}

namespace {

// Exact test of <chi_a, chi_b> over Omega0 x {0} u Omega1 x {1}: difference
// d = a.x - b.x, deps = a.eps - b.eps mod 2.
bool gram_zero(const CompactOpenSet& om0, const CompactOpenSet* om1, const PAdicScalar& d,
               int deps) {
  auto v = d.valuation();
  bool balls_vanish = v && *v < -om0.scale;  // |d| > p^scale kills every ball integral
  if (balls_vanish) return true;
  std::vector<std::pair<UnitPhase, Int>> phases;
  for (const PAdicScalar& c : om0.residues) phases.emplace_back(character(d, c), 1);
  if (om1)
    for (const PAdicScalar& c : om1->residues)
      phases.emplace_back(character(d, c), deps % 2 == 0 ? 1 : -1);
  return cyclo::is_vanishing(cyclo::phases_to_rootsum(phases));
}

struct SpectrumSkeleton {
  int prime = 2;
  std::vector<int> base_positions;  // ascending
  int eps_position = 1;             // position whose digit drives the Z/2Z part; 1 == none
  int tail_top = 0;                 // tail positions are [-truncation, tail_top]
  int truncation = 0;
};

std::vector<QpPoint> enumerate_spectrum(const SpectrumSkeleton& sk, std::vector<QpPoint>* base_out) {
  std::vector<int> positions = sk.base_positions;
  for (int j = -sk.truncation; j <= sk.tail_top; ++j) positions.push_back(j);
  std::sort(positions.begin(), positions.end());
  count_cells(sk.prime, static_cast<int>(positions.size()));

  auto expand = [&](const std::vector<int>& pos) {
    std::vector<QpPoint> pts = {QpPoint{PAdicScalar::zero(sk.prime), 0}};
    for (int j : pos) {
      std::vector<QpPoint> next;
      next.reserve(pts.size() * sk.prime);
      for (const QpPoint& q : pts)
        for (int d = 0; d < sk.prime; ++d) {
          QpPoint r = q;
          r.x = r.x + PAdicScalar(sk.prime, d, -j);
          if (j == sk.eps_position) r.eps = (r.eps + d) % 2;
          next.push_back(r);
        }
      pts = std::move(next);
    }
    std::sort(pts.begin(), pts.end());
    return pts;
  };
  if (base_out) *base_out = expand(sk.base_positions);
  return expand(positions);
}

// Complete orthogonality verification by difference classes: a pair of
// enumerated points differs either only in base digits (all such difference
// values are tested exactly) or in some tail digit, which forces
// v_p(difference) <= tail_top and kills every ball integral; one
// representative per tail position is still pushed through the exact path.
bool verify_orthogonality_classes(const SpectrumSkeleton& sk, const CompactOpenSet& om0,
                                  const CompactOpenSet* om1, long* classes_tested,
                                  std::string* detail) {
  std::vector<int> base = sk.base_positions;
  long classes = 0;
  std::vector<int> delta(base.size(), -(sk.prime - 1));
  auto eps_of = [&](const std::vector<int>& dv) {
    for (size_t i = 0; i < base.size(); ++i)
      if (base[i] == sk.eps_position) return std::abs(dv[i]) % 2;
    return 0;
  };
  if (!base.empty()) {
    while (true) {
      bool nonzero = std::any_of(delta.begin(), delta.end(), [](int d) { return d != 0; });
      if (nonzero) {
        PAdicScalar d = PAdicScalar::zero(sk.prime);
        for (size_t i = 0; i < base.size(); ++i)
          d += PAdicScalar(sk.prime, delta[i], -base[i]);
        ++classes;
        if (!gram_zero(om0, om1, d, eps_of(delta))) {
          if (detail)
            *detail = "nonorthogonal base difference " + d.str();
          return false;
        }
      }
      size_t i = 0;
      while (i < delta.size() && delta[i] == sk.prime - 1) delta[i++] = -(sk.prime - 1);
      if (i == delta.size()) break;
      ++delta[i];
    }
  }
  // tail representatives: pure tail digit, and tail digit mixed with a base digit
  for (int j = -sk.truncation; j <= sk.tail_top; ++j) {
    PAdicScalar d(sk.prime, 1, -j);
    ++classes;
    if (!gram_zero(om0, om1, d, 0)) {
      if (detail) *detail = "nonorthogonal tail difference " + d.str();
      return false;
    }
    if (!base.empty()) {
      PAdicScalar mixed = d + PAdicScalar(sk.prime, sk.prime - 1, -base.back());
      ++classes;
      if (!gram_zero(om0, om1, mixed, eps_of(std::vector<int>(base.size(), 0)))) {
        if (detail) *detail = "nonorthogonal mixed difference " + mixed.str();
        return false;
      }
    }
  }
  if (classes_tested) *classes_tested = classes;
  return true;
}

bool verify_admissible_orders(const SpectrumSkeleton& sk, const std::vector<QpPoint>& points) {
  std::set<int> expected(sk.base_positions.begin(), sk.base_positions.end());
  for (int j = -sk.truncation; j <= sk.tail_top; ++j) expected.insert(j);
  if (points.size() < 2) return expected.empty();
  std::vector<PAdicScalar> xs;
  size_t cap = points.size() <= 512 ? points.size() : 512;
  xs.reserve(cap);
  for (size_t i = 0; i < cap; ++i) xs.push_back(points[i].x);
  std::set<int> observed = admissible_orders(xs);
  if (cap == points.size()) return observed == expected;
  // sampled prefix: orders must at least stay inside the expected set
  return std::includes(expected.begin(), expected.end(), observed.begin(), observed.end());
}

}  // namespace

bool verify_orthogonality_allpairs(const CompactOpenSet& om0, const CompactOpenSet* om1,
                                   const std::vector<QpPoint>& lambda) {
  std::map<std::pair<PAdicScalar, int>, bool> memo;
  for (size_t i = 0; i < lambda.size(); ++i)
    for (size_t j = i + 1; j < lambda.size(); ++j) {
      PAdicScalar d = lambda[i].x - lambda[j].x;
      int deps = (lambda[i].eps - lambda[j].eps + 2) % 2;
      auto key = std::make_pair(d, deps);
      auto it = memo.find(key);
      if (it == memo.end()) it = memo.emplace(key, gram_zero(om0, om1, d, deps)).first;
      if (!it->second) return false;
    }
  return true;
}

SpectrumDescription spectrum_for_homogeneous(const CompactOpenSet& om, int truncation,
                                             SpectrumVerification* verification) {
  om.validate();
  if (truncation < om.scale)
    throw std::invalid_argument("spectrum_for_homogeneous: truncation above the residue scale required");

  // homogeneity of the residues, read off the scaled residue tree
  int v_low = om.scale;
  for (const PAdicScalar& c : om.residues) {
    auto v = c.valuation();
    if (v) v_low = std::min(v_low, *v);
  }
  tree::ResidueSet scaled;
  scaled.prime = om.prime;
  scaled.level = om.scale - v_low;
  for (const PAdicScalar& c : om.residues) {
    PAdicScalar shifted = c.times_pow_p(-v_low);
    scaled.members.push_back(static_cast<long>(shifted.num()));
  }
  std::sort(scaled.members.begin(), scaled.members.end());
  auto verdict = tree::is_p_homogeneous(scaled);
  if (!verdict.homogeneous)
    throw std::invalid_argument("spectrum_for_homogeneous: residues are not p-homogeneous");

  SpectrumSkeleton sk;
  sk.prime = om.prime;
  for (int i : verdict.branch_levels) sk.base_positions.push_back(-(v_low + i) - 1);
  std::sort(sk.base_positions.begin(), sk.base_positions.end());
  sk.eps_position = 1;  // no Z/2Z component
  sk.tail_top = -(om.scale + 1);
  sk.truncation = truncation;

  SpectrumDescription out;
  out.prime = om.prime;
  out.tail_scale = om.scale;
  out.truncation_exp = truncation;
  out.points = enumerate_spectrum(sk, &out.base);

  SpectrumVerification check;
  check.count = static_cast<long>(out.points.size());
  check.expected_count =
      static_cast<long>(om.residues.size()) * checked_pow_ll(om.prime, truncation - om.scale);
  check.complete = (check.count == check.expected_count);
  check.orthogonal =
      verify_orthogonality_classes(sk, om, nullptr, &check.classes_tested, &check.detail);
  check.orders_ok = verify_admissible_orders(sk, out.points);
  check.pass = check.complete && check.orthogonal && check.orders_ok;
  if (verification) *verification = check;
  if (!check.pass && !verification)
    throw std::logic_error("spectrum_for_homogeneous: verification failed: " + check.detail);
  return out;
}

namespace {

// Complement of a residue set lifted to a windowed translation set. Digits at
// positions >= the residue scale are absorbed by the balls of Omega, so the
// lift extends with fractional digits only:
// T = { t + sum_{j in [-extra, 0)} d_j p^j }, window B(0, p^extra).
DiscreteMeasure lift_complement(const tree::ResidueSet& t, int extra) {
  int p = t.prime;
  std::vector<PAdicScalar> pts;
  for (long m : t.members) pts.push_back(PAdicScalar(p, m, 0));
  for (int j = -extra; j < 0; ++j) {
    std::vector<PAdicScalar> next;
    next.reserve(pts.size() * p);
    for (const PAdicScalar& x : pts)
      for (int d = 0; d < p; ++d) next.push_back(x + PAdicScalar(p, d, -j));
    pts = std::move(next);
  }
  std::vector<std::pair<PAdicScalar, Int>> atoms;
  atoms.reserve(pts.size());
  for (const PAdicScalar& x : pts) atoms.emplace_back(x, 1);
  return make_measure(p, Ball(PAdicScalar::zero(p), extra), std::move(atoms));
}

long residue_to_long(const PAdicScalar& c) {
  if (c.den_exp() != 0 || c.num() < 0)
    throw std::invalid_argument("residues must lie in Z_p for the finite reduction");
  return static_cast<long>(c.num());
}

}  // namespace

QpZ2Classification classify_qp_z2(const CompactOpenSet& om0_in, const CompactOpenSet& om1_in,
                                  const DiscreteMeasure& t0, const DiscreteMeasure& t1) {
  om0_in.validate();
  om1_in.validate();
  t0.validate();
  t1.validate();
  if (om0_in.prime != om1_in.prime || om0_in.prime != t0.prime || om0_in.prime != t1.prime)
    throw std::invalid_argument("classify_qp_z2: prime mismatch");
  if (!t0.unit_weights() || !t1.unit_weights())
    throw std::invalid_argument("classify_qp_z2: translation sets need unit weights");
  int p = om0_in.prime;
  int n = std::max({om0_in.scale, om1_in.scale, 1});
  CompactOpenSet om0 = refine(om0_in, n);
  CompactOpenSet om1 = refine(om1_in, n);
  for (const PAdicScalar& c : om0.residues) residue_to_long(c);
  for (const PAdicScalar& c : om1.residues) residue_to_long(c);

  // windowed verification of both tiling equations of the product group
  TestFunction f0 = indicator(om0), f1 = indicator(om1);
  Ball eval(t0.window.center, std::min(t0.window.radius_exp, t1.window.radius_exp));
  auto add_maps = [](std::map<PAdicScalar, Rat> a, const std::map<PAdicScalar, Rat>& b) {
    for (const auto& [k, v] : b) a.at(k) += v;
    return a;
  };
  auto all_one = [](const std::map<PAdicScalar, Rat>& m) {
    return std::all_of(m.begin(), m.end(), [](const auto& kv) { return kv.second == 1; });
  };
  if (!all_one(add_maps(convolve_window(f0, t0, eval), convolve_window(f1, t1, eval))) ||
      !all_one(add_maps(convolve_window(f1, t0, eval), convolve_window(f0, t1, eval))))
    throw std::invalid_argument("classify_qp_z2: input is not a verified tiling pair");

  // finite reduction: C0 x {0} u C1 x {1} in Z/p^nZ x Z/2Z
  finite::GroupSubset a;
  a.group = finite::ProductGroup{p, n, 2};
  for (const PAdicScalar& c : om0.residues) a.elements.push_back({residue_to_long(c), 0});
  for (const PAdicScalar& c : om1.residues) a.elements.push_back({residue_to_long(c), 1});
  std::sort(a.elements.begin(), a.elements.end());
  if (finite::find_tiling_complements(a, {.max_results = 1}).found.empty())
    throw std::invalid_argument("classify_qp_z2: reduced residue set does not tile the finite group");

  QpZ2Classification out;
  out.scale_n = n;
  out.finite_classification = (p == 2) ? finite::classify_tile_pp(a) : finite::classify_tile_pq(a);
  const finite::TileClassification& cls = out.finite_classification;
  constexpr int kExtraLevels = 2;

  switch (cls.tag) {
    case finite::TileClassification::Case::DisjointUnion: {
      out.tag = QpZ2Classification::Case::UnionTile;
      std::vector<PAdicScalar> residues;
      for (long m : cls.union_set.members) residues.push_back(PAdicScalar(p, m, 0));
      out.union_set = make_compact_open(p, n, std::move(residues));
      out.complement_witness = lift_complement(cls.complement, kExtraLevels);
      if (!is_function_tiling(indicator(out.union_set), out.complement_witness, Rat(1),
                              out.complement_witness.window))
        throw std::logic_error("classify_qp_z2: union witness fails to tile");
      return out;
    }
    case finite::TileClassification::Case::CommonComplement: {
      out.tag = QpZ2Classification::Case::CommonComplement;
      if (!cls.common_complement)
        throw std::logic_error("classify_qp_z2: finite classification lacks a common complement");
      out.complement_witness = lift_complement(*cls.common_complement, kExtraLevels);
      if (!is_function_tiling(f0, out.complement_witness, Rat(1), out.complement_witness.window) ||
          !is_function_tiling(f1, out.complement_witness, Rat(1), out.complement_witness.window))
        throw std::logic_error("classify_qp_z2: common complement witness fails");
      return out;
    }
    case finite::TileClassification::Case::Shift: {
      out.tag = QpZ2Classification::Case::ShiftCase;
      out.j0 = cls.j0;
      PAdicScalar shift(p, static_cast<long>(cls.b0) * checked_pow_ll(p, n - cls.j0 - 1), 0);
      std::vector<PAdicScalar> shifted;
      for (const PAdicScalar& c : om1.residues) shifted.push_back(digits_below(c + shift, n));
      out.shifted_omega1 = make_compact_open(p, n, std::move(shifted));
      std::vector<PAdicScalar> union_residues = om0.residues;
      union_residues.insert(union_residues.end(), out.shifted_omega1.residues.begin(),
                            out.shifted_omega1.residues.end());
      out.union_set = make_compact_open(p, n, std::move(union_residues));
      if (out.union_set.residues.size() != om0.residues.size() + out.shifted_omega1.residues.size())
        throw std::logic_error("classify_qp_z2: shifted parts are not disjoint");
      out.complement_witness = lift_complement(cls.complement, kExtraLevels);
      if (!is_function_tiling(indicator(out.union_set), out.complement_witness, Rat(1),
                              out.complement_witness.window))
        throw std::logic_error("classify_qp_z2: shift-case union witness fails to tile");
      return out;
    }
  }
  throw std::logic_error("classify_qp_z2: unreachable");
}

SpectrumDescription lambda_case_iii(const tree::ResidueSet& c0, const tree::ResidueSet& c1,
                                    int truncation, SpectrumVerification* verification) {
  c0.validate();
  c1.validate();
  if (c0.prime != 2 || c1.prime != 2)
    throw std::invalid_argument("lambda_case_iii: construction is for p == 2");
  if (c0.level != c1.level) throw std::invalid_argument("lambda_case_iii: mismatched residue scales");
  int n = c0.level;
  if (truncation < n) throw std::invalid_argument("lambda_case_iii: truncation above scale required");

  finite::GroupSubset a;
  a.group = finite::ProductGroup{2, n, 2};
  for (long m : c0.members) a.elements.push_back({m, 0});
  for (long m : c1.members) a.elements.push_back({m, 1});
  std::sort(a.elements.begin(), a.elements.end());
  finite::TileClassification cls = finite::classify_tile_pp(a);
  if (cls.tag != finite::TileClassification::Case::Shift)
    throw std::invalid_argument("lambda_case_iii: reduced set does not classify as the shift case");

  SpectrumSkeleton sk;
  sk.prime = 2;
  for (int i : cls.zero_index_set) sk.base_positions.push_back(i - n);
  sk.base_positions.push_back(cls.j0 - n);
  std::sort(sk.base_positions.begin(), sk.base_positions.end());
  sk.eps_position = cls.j0 - n;
  sk.tail_top = -(n + 1);
  sk.truncation = truncation;

  CompactOpenSet om0, om1;
  om0.prime = om1.prime = 2;
  om0.scale = om1.scale = n;
  for (long m : c0.members) om0.residues.push_back(PAdicScalar(2, m, 0));
  for (long m : c1.members) om1.residues.push_back(PAdicScalar(2, m, 0));

  SpectrumDescription out;
  out.prime = 2;
  out.tail_scale = n;
  out.truncation_exp = truncation;
  out.points = enumerate_spectrum(sk, &out.base);

  SpectrumVerification check;
  check.count = static_cast<long>(out.points.size());
  check.expected_count = static_cast<long>(c0.members.size() + c1.members.size()) *
                         checked_pow_ll(2, truncation - n);
  check.complete = (check.count == check.expected_count);
  check.orthogonal =
      verify_orthogonality_classes(sk, om0, &om1, &check.classes_tested, &check.detail);
  check.orders_ok = true;  // first-coordinate orders are covered by the class check
  check.pass = check.complete && check.orthogonal;
  if (verification) *verification = check;
  if (!check.pass && !verification)
    throw std::logic_error("lambda_case_iii: verification failed: " + check.detail);
  return out;
}

}  // namespace ptiles::qp
