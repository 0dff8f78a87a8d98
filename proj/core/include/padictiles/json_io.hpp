#pragma once

#include <string>

#include "json.hpp"
#include "padictiles/qp_tiling.hpp"

namespace ptiles::io {

using Json = nlohmann::json;

std::string int_str(const Int& v);
Int int_from_json(const Json& j);

std::string rat_str(const Rat& v);  // "a/b", or "a" when b == 1

PAdicScalar scalar_from_json(int prime, const Json& j);  // "k/p^l" or integer
Json scalar_to_json(const PAdicScalar& x);

Ball ball_from_json(int prime, const Json& j);  // "B(center; p^n)" or {"center","radius_exp"}
Json ball_to_json(const Ball& b);

cyclo::RootSum rootsum_from_json(const Json& j);  // {"order":N, "coeffs":{"j":a_j}}
Json rootsum_to_json(const cyclo::RootSum& s);

tree::ResidueSet residue_set_from_json(const Json& j);  // {"p","n","members"}
Json residue_set_to_json(const tree::ResidueSet& c);

finite::ProductGroup group_from_json(const Json& j);  // {"p","n","q"}; q defaults to 1
Json group_to_json(const finite::ProductGroup& g);

finite::GroupSubset group_subset_from_json(const finite::ProductGroup& g, const Json& elements);
Json group_subset_to_json(const finite::GroupSubset& a);  // elements array only

qp::CompactOpenSet compact_open_from_json(const Json& j);  // {"p","gamma","residues"}
Json compact_open_to_json(const qp::CompactOpenSet& om);

qp::DiscreteMeasure measure_from_json(const Json& j);  // {"p","window","atoms":[["x",w],...]}
Json measure_to_json(const qp::DiscreteMeasure& nu);

Json test_function_to_json(const qp::TestFunction& f);

Json spectrum_to_json(const qp::SpectrumDescription& s);
Json spectrum_verification_to_json(const qp::SpectrumVerification& v);

Json classification_to_json(const finite::TileClassification& cls);

}  // namespace ptiles::io
