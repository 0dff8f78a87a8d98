#include "padictiles/json_io.hpp"

namespace ptiles::io {

std::string int_str(const Int& v) { return v.str(); }

Int int_from_json(const Json& j) {
  if (j.is_number_integer()) return Int(j.get<long long>());
  if (j.is_string()) return Int(j.get<std::string>());
  throw std::invalid_argument("expected integer or integer string");
}

static Json int_to_json(const Int& v) {
  if (v >= std::numeric_limits<long long>::min() && v <= std::numeric_limits<long long>::max())
    return static_cast<long long>(v);
  return v.str();
}

std::string rat_str(const Rat& v) {
  Int num = boost::multiprecision::numerator(v);
  Int den = boost::multiprecision::denominator(v);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

PAdicScalar scalar_from_json(int prime, const Json& j) {
  if (j.is_number_integer()) return PAdicScalar(prime, Int(j.get<long long>()), 0);
  if (j.is_string()) return PAdicScalar::parse(prime, j.get<std::string>());
  throw std::invalid_argument("expected scalar literal");
}

Json scalar_to_json(const PAdicScalar& x) { return x.str(); }

Ball ball_from_json(int prime, const Json& j) {
  if (j.is_string()) return Ball::parse(prime, j.get<std::string>());
  if (j.is_object())
    return Ball(scalar_from_json(prime, j.at("center")), j.at("radius_exp").get<int>());
  throw std::invalid_argument("expected ball literal");
}

Json ball_to_json(const Ball& b) { return b.str(); }

cyclo::RootSum rootsum_from_json(const Json& j) {
  cyclo::RootSum s;
  s.order = j.at("order").get<long>();
  if (j.contains("coeffs"))
    for (const auto& [key, value] : j.at("coeffs").items())
      s.add(std::stol(key), int_from_json(value));
  return s;
}

Json rootsum_to_json(const cyclo::RootSum& s) {
  Json coeffs = Json::object();
  for (const auto& [index, c] : s.coeffs) coeffs[std::to_string(index)] = int_to_json(c);
  return Json{{"order", s.order}, {"coeffs", coeffs}};
}

tree::ResidueSet residue_set_from_json(const Json& j) {
  tree::ResidueSet c;
  c.prime = j.at("p").get<int>();
  c.level = j.at("n").get<int>();
  for (const auto& m : j.at("members")) c.members.push_back(m.get<long>());
  std::sort(c.members.begin(), c.members.end());
  c.validate();
  return c;
}

Json residue_set_to_json(const tree::ResidueSet& c) {
  return Json{{"p", c.prime}, {"n", c.level}, {"members", c.members}};
}

finite::ProductGroup group_from_json(const Json& j) {
  finite::ProductGroup g;
  g.p = j.at("p").get<int>();
  g.n = j.at("n").get<int>();
  g.q = j.value("q", 1);
  g.validate();
  return g;
}

Json group_to_json(const finite::ProductGroup& g) {
  return Json{{"p", g.p}, {"n", g.n}, {"q", g.q}};
}

finite::GroupSubset group_subset_from_json(const finite::ProductGroup& g, const Json& elements) {
  finite::GroupSubset a;
  a.group = g;
  for (const auto& e : elements) {
    if (e.is_array() && e.size() == 2)
      a.elements.push_back({e[0].get<long>(), e[1].get<int>()});
    else if (e.is_number_integer() && g.q == 1)
      a.elements.push_back({e.get<long>(), 0});
    else
      throw std::invalid_argument("subset element must be [a,b] (or a bare residue when q == 1)");
  }
  std::sort(a.elements.begin(), a.elements.end());
  a.validate();
  return a;
}

Json group_subset_to_json(const finite::GroupSubset& a) {
  Json out = Json::array();
  for (const auto& [x, y] : a.elements) out.push_back(Json::array({x, y}));
  return out;
}

qp::CompactOpenSet compact_open_from_json(const Json& j) {
  int prime = j.at("p").get<int>();
  std::vector<PAdicScalar> residues;
  for (const auto& r : j.at("residues")) residues.push_back(scalar_from_json(prime, r));
  return qp::make_compact_open(prime, j.at("gamma").get<int>(), std::move(residues));
}

Json compact_open_to_json(const qp::CompactOpenSet& om) {
  Json residues = Json::array();
  for (const PAdicScalar& c : om.residues) residues.push_back(c.str());
  return Json{{"p", om.prime}, {"gamma", om.scale}, {"residues", residues}};
}

qp::DiscreteMeasure measure_from_json(const Json& j) {
  int prime = j.at("p").get<int>();
  Ball window = ball_from_json(prime, j.at("window"));
  std::vector<std::pair<PAdicScalar, Int>> atoms;
  for (const auto& a : j.at("atoms")) {
    if (a.is_array() && a.size() == 2)
      atoms.emplace_back(scalar_from_json(prime, a[0]), int_from_json(a[1]));
    else
      atoms.emplace_back(scalar_from_json(prime, a), 1);
  }
  return qp::make_measure(prime, window, std::move(atoms));
}

Json measure_to_json(const qp::DiscreteMeasure& nu) {
  Json atoms = Json::array();
  for (const auto& [x, w] : nu.atoms) atoms.push_back(Json::array({x.str(), int_to_json(w)}));
  return Json{{"p", nu.prime}, {"window", nu.window.str()}, {"atoms", atoms}};
}

Json test_function_to_json(const qp::TestFunction& f) {
  Json values = Json::object();
  for (const auto& [c, v] : f.values) values[c.str()] = rat_str(v);
  return Json{{"p", f.prime},
              {"constancy_exp", f.constancy_exp},
              {"support_exp", f.support_exp},
              {"values", values}};
}

Json spectrum_to_json(const qp::SpectrumDescription& s) {
  auto points_json = [](const std::vector<qp::QpPoint>& pts) {
    Json arr = Json::array();
    for (const auto& q : pts) arr.push_back(Json::array({q.x.str(), q.eps}));
    return arr;
  };
  return Json{{"p", s.prime},
              {"base", points_json(s.base)},
              {"tail_scale", s.tail_scale},
              {"truncation", s.truncation_exp},
              {"count", s.points.size()},
              {"points", points_json(s.points)}};
}

Json spectrum_verification_to_json(const qp::SpectrumVerification& v) {
  return Json{{"pass", v.pass},          {"orthogonal", v.orthogonal},
              {"complete", v.complete},  {"orders_ok", v.orders_ok},
              {"count", v.count},        {"expected_count", v.expected_count},
              {"classes_tested", v.classes_tested}, {"detail", v.detail}};
}

Json classification_to_json(const finite::TileClassification& cls) {
  Json out;
  switch (cls.tag) {
    case finite::TileClassification::Case::DisjointUnion:
      out["case"] = "disjoint_union";
      break;
    case finite::TileClassification::Case::CommonComplement:
      out["case"] = "common_complement";
      break;
    case finite::TileClassification::Case::Shift:
      out["case"] = "shift";
      break;
  }
  out["zero_index_set"] = cls.zero_index_set;
  Json slices = Json::array();
  for (const auto& s : cls.slices) slices.push_back(s.members);
  out["slices"] = slices;
  if (!cls.slice_branch_levels.empty()) out["slice_branch_levels"] = cls.slice_branch_levels;
  if (!cls.union_set.members.empty()) {
    out["union"] = cls.union_set.members;
    out["union_branch_levels"] = cls.union_branch_levels;
  }
  if (!cls.complement.members.empty()) out["complement"] = cls.complement.members;
  if (cls.common_complement) out["common_complement"] = cls.common_complement->members;
  if (cls.tag == finite::TileClassification::Case::Shift) {
    out["j0"] = cls.j0;
    out["b0"] = cls.b0;
    out["shifted_set"] = cls.shifted_set.members;
  }
  return out;
}

}  // namespace ptiles::io
