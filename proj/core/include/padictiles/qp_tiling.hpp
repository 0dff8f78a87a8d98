#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "padictiles/finite_group.hpp"

namespace ptiles::qp {

/// Omega = disjoint union of (c + p^scale Z_p); residues canonical mod p^scale,
/// sorted and distinct.
struct CompactOpenSet {
  int prime = 2;
  int scale = 0;
  std::vector<PAdicScalar> residues;

  void validate() const;
  Rat haar_measure() const;
  /// Exponent e with Omega contained in B(0, p^e).
  int bounding_exp() const;
};

CompactOpenSet make_compact_open(int prime, int scale, std::vector<PAdicScalar> residues);

/// Re-express at a finer scale (new_scale >= scale), splitting every ball.
CompactOpenSet refine(const CompactOpenSet& om, int new_scale);

/// nu = sum of weight * delta_atom; the atom list is asserted complete inside
/// the window ball.
struct DiscreteMeasure {
  int prime = 2;
  Ball window;
  std::vector<std::pair<PAdicScalar, Int>> atoms;  // sorted by point, weights nonzero

  void validate() const;
  bool unit_weights() const;
  Int total_mass() const;
  /// n_nu = inf_x max_{x' != x} v_p(x - x'); nullopt encodes -infinity.
  std::optional<int> separation_exp() const;
};

DiscreteMeasure make_measure(int prime, Ball window, std::vector<std::pair<PAdicScalar, Int>> atoms);

/// Locally constant compactly supported function: constant on balls of radius
/// p^constancy_exp, supported inside B(0, p^support_exp); values keyed by the
/// canonical scale-constancy_exp ball centers, absent = 0.
struct TestFunction {
  int prime = 2;
  int constancy_exp = 0;
  int support_exp = 0;
  std::map<PAdicScalar, Rat> values;

  void validate() const;
  Rat value_at(const PAdicScalar& x) const;
  Rat integral() const;
};

TestFunction indicator(const CompactOpenSet& om, const Rat& height = Rat(1));

/// Canonical centers of the scale-`cell_exp` balls partitioning `ball`.
std::vector<PAdicScalar> enumerate_cell_centers(const Ball& ball, int cell_exp);

/// Margin rule: every atom that can contribute to eval lies inside the window.
bool margin_ok(const TestFunction& f, const DiscreteMeasure& nu, const Ball& eval);

/// Exact (f * nu)(x) on each scale-l cell of eval. Throws on margin violation.
std::map<PAdicScalar, Rat> convolve_window(const TestFunction& f, const DiscreteMeasure& nu,
                                           const Ball& eval);

bool is_function_tiling(const TestFunction& f, const DiscreteMeasure& nu, const Rat& level,
                        const Ball& eval);

struct BallCountReport {
  int scale = 0;
  std::map<PAdicScalar, Int> counts;  // ball center -> nu-mass, every ball listed
  bool uniform = false;
};

/// nu-mass of every radius-p^scale ball inside the window.
BallCountReport measure_ball_counts(const DiscreteMeasure& nu, int scale);

struct DensityResult {
  bool certified = false;
  Rat density;
  int certified_scale = 0;  // smallest uniform scale inside the window
  std::string reason;
};

DensityResult density(const DiscreteMeasure& nu);

struct ConstancyResult {
  int constancy_exp = 0;          // recomputed largest constancy exponent
  std::optional<int> n_f;         // min n with f^ nonvanishing on B(0, p^-n); needs integral != 0
  Rat integral;
};

ConstancyResult constancy_parameter(const TestFunction& f);

struct ZeroScanResult {
  std::vector<int> vanishing_radii;  // r with nu^ == 0 on S(0, p^r), scan range only
  bool below_range_vanishes = false; // every r < scanned_from behaves like total-mass test
  int scanned_from = 0;
  int scanned_to = 0;
  std::optional<int> separation_exp;  // n_nu
};

/// Sphere-by-sphere vanishing scan of nu^, one representative per sphere.
/// Asserts the windowed support bound r <= n_nu + 1 on every hit.
ZeroScanResult measure_zero_scan(const DiscreteMeasure& nu, int max_abs_exp);

struct CountWitness {
  int scale = 0;
  PAdicScalar ball_a, ball_b;
  Int count_a, count_b;
};

struct UniformPartitionResult {
  bool uniform = false;
  int scale = 0;  // smallest scale with constant counts
  Int count;
  std::vector<CountWitness> witnesses;  // one differing pair per checkable scale when negative
};

UniformPartitionResult uniform_partition_check(const DiscreteMeasure& t);

/// f = (1/count) * 1_{B(0, p^scale)}; requires constant counts at that scale.
TestFunction uniform_partition_construct(const DiscreteMeasure& t, int scale);

/// Windowed check of the complement-order identity I_T = Z \ I_Omega together
/// with the exact cover test.
struct ComplementOrdersReport {
  bool pass = false;
  bool orders_match = false;
  bool cover_ok = false;
  std::vector<int> observed_orders;
  std::vector<int> expected_orders;
};

ComplementOrdersReport tiling_complement_orders_check(const CompactOpenSet& om,
                                                      const DiscreteMeasure& t);

/// Point of Q_p x Z/2Z (eps == 0 throughout for plain Q_p spectra).
struct QpPoint {
  PAdicScalar x;
  int eps = 0;

  friend bool operator<(const QpPoint& a, const QpPoint& b) {
    if (a.x < b.x) return true;
    if (b.x < a.x) return false;
    return a.eps < b.eps;
  }
  friend bool operator==(const QpPoint& a, const QpPoint& b) { return a.x == b.x && a.eps == b.eps; }
};

struct SpectrumDescription {
  int prime = 2;
  std::vector<QpPoint> base;      // finite digit combinations at the branch positions
  int tail_scale = 0;             // tail digits live at positions <= -(tail_scale+1)
  int truncation_exp = 0;         // m: enumeration keeps |lambda|_p <= p^m
  std::vector<QpPoint> points;    // enumerated Lambda_m, sorted
};

struct SpectrumVerification {
  bool pass = false;
  bool orthogonal = false;
  bool complete = false;
  bool orders_ok = false;
  long count = 0;
  long expected_count = 0;
  long classes_tested = 0;
  std::string detail;
};

/// Spectrum of a p-homogeneous compact open set, truncated at |.|_p <= p^m,
/// with exact orthogonality and completeness verification.
SpectrumDescription spectrum_for_homogeneous(const CompactOpenSet& om, int truncation,
                                             SpectrumVerification* verification = nullptr);

/// All-pairs Gram verification over Omega0 x {0} u Omega1 x {1} (Omega1 may be
/// empty for plain Q_p). Independent slow path used to cross-check the
/// class-based verification.
bool verify_orthogonality_allpairs(const CompactOpenSet& om0, const CompactOpenSet* om1,
                                   const std::vector<QpPoint>& lambda);

struct QpZ2Classification {
  enum class Case { UnionTile, CommonComplement, ShiftCase };
  Case tag = Case::UnionTile;
  int scale_n = 1;
  int j0 = -1;
  CompactOpenSet union_set;        // UnionTile / ShiftCase
  CompactOpenSet shifted_omega1;   // ShiftCase
  DiscreteMeasure complement_witness;  // union complement, or the common T0
  finite::TileClassification finite_classification;
};

/// Structure of the tile Omega0 x {0} u Omega1 x {1} of Q_p x Z/2Z, via the
/// reduction to residue data in Z/p^nZ x Z/2Z.
QpZ2Classification classify_qp_z2(const CompactOpenSet& om0, const CompactOpenSet& om1,
                                  const DiscreteMeasure& t0, const DiscreteMeasure& t1);

/// Spectrum construction for the shift case: C = C0 x {0} u C1 x {1} must
/// classify as the shift alternative; p == 2.
SpectrumDescription lambda_case_iii(const tree::ResidueSet& c0, const tree::ResidueSet& c1,
                                    int truncation, SpectrumVerification* verification = nullptr);

}  // namespace ptiles::qp
